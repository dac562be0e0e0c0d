//! Standard input signals, sampled as polylines.

use std::f64::consts::TAU;

use crate::bvcalc::Path;
use crate::error::{Error, Result};
use crate::point::Point;

/// `u(t) = start + velocity * t` on `[0, t_end]`.
pub fn ramp(t_end: f64, segments: usize, start: &Point, velocity: &Point) -> Result<Path> {
    if start.dim() != velocity.dim() {
        return Err(Error::DimensionMismatch {
            expected: start.dim(),
            found: velocity.dim(),
        });
    }
    Path::uniform(t_end, segments, |t| start.axpy(t, velocity))
}

/// Triangle wave with `teeth` teeth: zero at `t = 2kT/(2K)`, `amplitude * direction`
/// at the odd nodes `t = (2k+1)T/(2K)`. Exact as a polyline on `2K + 1` nodes.
pub fn zigzag(t_end: f64, teeth: usize, amplitude: f64, direction: &Point) -> Result<Path> {
    if teeth == 0 {
        return Err(Error::InvalidArgument(
            "zigzag needs at least one tooth".into(),
        ));
    }
    let peak = direction * amplitude;
    let zero = Point::zeros(direction.dim());
    let times = crate::bvcalc::uniform_grid(t_end, 2 * teeth);
    let values = (0..=2 * teeth)
        .map(|k| {
            if k % 2 == 1 {
                peak.clone()
            } else {
                zero.clone()
            }
        })
        .collect();
    Path::new(times, values)
}

/// `u(t) = center + radius * (cos(θ0 + ωt), sin(θ0 + ωt))`.
pub fn circle_arc(
    t_end: f64,
    segments: usize,
    center: [f64; 2],
    radius: f64,
    theta0: f64,
    omega: f64,
) -> Result<Path> {
    Path::uniform(t_end, segments, |t| {
        let a = theta0 + omega * t;
        Point::from([center[0] + radius * a.cos(), center[1] + radius * a.sin()])
    })
}

/// `u(t) = (ax sin(2π fx t/T + phase), ay sin(2π fy t/T))`.
pub fn lissajous(
    t_end: f64,
    segments: usize,
    amplitude: [f64; 2],
    frequency: [f64; 2],
    phase: f64,
) -> Result<Path> {
    Path::uniform(t_end, segments, |t| {
        let s = TAU * t / t_end;
        Point::from([
            amplitude[0] * (frequency[0] * s + phase).sin(),
            amplitude[1] * (frequency[1] * s).sin(),
        ])
    })
}
