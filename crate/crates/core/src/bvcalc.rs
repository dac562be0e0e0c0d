//! Calculus of bounded variation on continuous piecewise-linear paths.
//!
//! A [`Path`] is the linear interpolant of its samples, so variations, sup
//! norms and compositions with piecewise-linear time changes are computed
//! exactly (up to rounding) from the nodes.

use std::io::{Read, Write};

use crate::error::{check_dim, Error, Result};
use crate::point::Point;
use crate::report::fmt_real;
use crate::tol;

/// Continuous piecewise-linear map `[0, T] -> R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    times: Vec<f64>,
    values: Vec<Point>,
}

impl Path {
    pub fn new(times: Vec<f64>, values: Vec<Point>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidPath(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.len() < 2 {
            return Err(Error::InvalidPath(
                "a path needs at least two samples".into(),
            ));
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidPath(format!(
                "first time must be 0, got {}",
                times[0]
            )));
        }
        if let Some(k) = times.windows(2).position(|w| w[1].is_nan() || w[1] <= w[0]) {
            return Err(Error::InvalidPath(format!(
                "times must be strictly increasing: t[{k}] = {} and t[{}] = {}",
                times[k],
                k + 1,
                times[k + 1]
            )));
        }
        if !times.iter().all(|t| t.is_finite()) {
            return Err(Error::InvalidPath("times must be finite".into()));
        }
        let d = values[0].dim();
        if d == 0 {
            return Err(Error::InvalidPath("values must have dimension >= 1".into()));
        }
        for (k, v) in values.iter().enumerate() {
            check_dim(d, v.dim())?;
            if !v.is_finite() {
                return Err(Error::InvalidPath(format!("value {k} is not finite")));
            }
        }
        Ok(Path { times, values })
    }

    /// Samples `f` at the given times.
    pub fn from_fn(times: Vec<f64>, f: impl Fn(f64) -> Point) -> Result<Self> {
        let values = times.iter().map(|&t| f(t)).collect();
        Self::new(times, values)
    }

    /// Samples `f` on `segments + 1` uniform nodes of `[0, t_end]`.
    pub fn uniform(t_end: f64, segments: usize, f: impl Fn(f64) -> Point) -> Result<Self> {
        Self::from_fn(uniform_grid(t_end, segments), f)
    }

    /// Scalar path from real samples.
    pub fn scalar(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::new(times, values.into_iter().map(Point::scalar).collect())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Point] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.values[0].dim()
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().expect("paths have at least two samples")
    }

    pub fn start(&self) -> &Point {
        &self.values[0]
    }

    pub fn end(&self) -> &Point {
        self.values.last().expect("paths have at least two samples")
    }

    /// Value of the interpolant at `t`, clamped to `[0, T]`. Nodes are
    /// returned exactly.
    pub fn eval(&self, t: f64) -> Point {
        let n = self.times.len();
        if t <= self.times[0] {
            return self.values[0].clone();
        }
        if t >= self.times[n - 1] {
            return self.values[n - 1].clone();
        }
        let hi = self.times.partition_point(|&s| s <= t);
        let lo = hi - 1;
        if self.times[lo] == t {
            return self.values[lo].clone();
        }
        let theta = (t - self.times[lo]) / (self.times[hi] - self.times[lo]);
        self.values[lo].lerp(&self.values[hi], theta)
    }

    /// Node increments `v[k+1] - v[k]`.
    pub fn increments(&self) -> Vec<Point> {
        self.values.windows(2).map(|w| &w[1] - &w[0]).collect()
    }

    /// Same values on a new time grid.
    pub fn retimed(&self, times: Vec<f64>) -> Result<Path> {
        Path::new(times, self.values.clone())
    }

    /// Restriction to the first `nodes` samples.
    pub fn prefix(&self, nodes: usize) -> Result<Path> {
        Path::new(self.times[..nodes].to_vec(), self.values[..nodes].to_vec())
    }

    pub fn map_values(&self, f: impl Fn(&Point) -> Point) -> Result<Path> {
        Path::new(self.times.clone(), self.values.iter().map(f).collect())
    }

    /// Pointwise combination of two paths on the union of their grids.
    pub fn zip_with(&self, other: &Path, f: impl Fn(&Point, &Point) -> Point) -> Result<Path> {
        check_dim(self.dim(), other.dim())?;
        let grid = union_grid(self, other)?;
        let values = grid
            .iter()
            .map(|&t| f(&self.eval(t), &other.eval(t)))
            .collect();
        Path::new(grid, values)
    }

    pub fn difference(&self, other: &Path) -> Result<Path> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `V(f, [a, b])`, the sum of the lengths of the pieces of `f` over `[a, b]`.
    pub fn variation(&self, a: f64, b: f64) -> Result<f64> {
        let end = self.t_end();
        if !(0.0 <= a && a <= b && b <= end) {
            return Err(Error::BadInterval { a, b, end });
        }
        if a == b {
            return Ok(0.0);
        }
        let first = self.times.partition_point(|&s| s <= a);
        let last = self.times.partition_point(|&s| s < b);
        let mut prev = self.eval(a);
        let mut total = 0.0;
        for v in &self.values[first..last] {
            total += prev.dist(v);
            prev = v.clone();
        }
        total += prev.dist(&self.eval(b));
        Ok(total)
    }

    pub fn total_variation(&self) -> f64 {
        self.values.windows(2).map(|w| w[0].dist(&w[1])).sum()
    }

    /// `V(f, [0, t_k])` at every node.
    pub fn cumulative_variation(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.len());
        out.push(0.0);
        for w in self.values.windows(2) {
            acc += w[0].dist(&w[1]);
            out.push(acc);
        }
        out
    }

    /// Inserts segment midpoints `levels` times; the interpolant is unchanged.
    pub fn refine(&self, levels: u32) -> Path {
        let mut times = self.times.clone();
        let mut values = self.values.clone();
        for _ in 0..levels {
            let mut t2 = Vec::with_capacity(2 * times.len() - 1);
            let mut v2 = Vec::with_capacity(2 * times.len() - 1);
            for k in 0..times.len() - 1 {
                t2.push(times[k]);
                v2.push(values[k].clone());
                t2.push(0.5 * (times[k] + times[k + 1]));
                v2.push(values[k].lerp(&values[k + 1], 0.5));
            }
            t2.push(*times.last().unwrap());
            v2.push(values.last().unwrap().clone());
            times = t2;
            values = v2;
        }
        Path { times, values }
    }

    /// Writes the CSV form `t,v1,..,vd` with 17 significant digits.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["t".to_string()];
        header.extend((1..=self.dim()).map(|i| format!("v{i}")));
        w.write_record(&header)?;
        for (t, v) in self.times.iter().zip(&self.values) {
            let mut rec = vec![fmt_real(*t)];
            rec.extend(v.coords().iter().map(|c| fmt_real(*c)));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the CSV form written by [`Path::write_csv`]; time must strictly increase.
    pub fn read_csv<R: Read>(reader: R) -> Result<Path> {
        let mut r = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header = r.headers()?.clone();
        if header.get(0) != Some("t") || header.len() < 2 {
            return Err(Error::InvalidPath(
                "csv header must be `t,v1,..,vd`".to_string(),
            ));
        }
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec?;
            let nums: Vec<f64> = rec
                .iter()
                .map(|s| {
                    s.parse::<f64>().map_err(|_| {
                        Error::InvalidPath(format!("row {}: `{s}` is not a number", line + 1))
                    })
                })
                .collect::<Result<_>>()?;
            if nums.len() != header.len() {
                return Err(Error::InvalidPath(format!(
                    "row {} has {} fields, header has {}",
                    line + 1,
                    nums.len(),
                    header.len()
                )));
            }
            times.push(nums[0]);
            values.push(Point::new(nums[1..].to_vec()));
        }
        Path::new(times, values)
    }
}

pub fn uniform_grid(t_end: f64, segments: usize) -> Vec<f64> {
    let n = segments.max(1);
    let mut g: Vec<f64> = (0..=n).map(|k| t_end * k as f64 / n as f64).collect();
    g[n] = t_end;
    g
}

fn check_domain(f: &Path, g: &Path) -> Result<()> {
    let (a, b) = (f.t_end(), g.t_end());
    if (a - b).abs() <= tol::ALGEBRAIC * a.abs().max(b.abs()) {
        Ok(())
    } else {
        Err(Error::DomainMismatch { left: a, right: b })
    }
}

/// Sorted union of both grids; both paths must share `[0, T]`.
pub fn union_grid(f: &Path, g: &Path) -> Result<Vec<f64>> {
    check_domain(f, g)?;
    let end = f.t_end();
    let mut grid: Vec<f64> = f
        .times
        .iter()
        .chain(&g.times)
        .copied()
        .filter(|&t| t < end)
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid.push(end);
    Ok(grid)
}

/// `sup_t |f(t) - g(t)|`, exact for polylines since the maximum of a
/// piecewise-linear norm sits on a node of the union grid.
pub fn sup_distance(f: &Path, g: &Path) -> Result<f64> {
    check_dim(f.dim(), g.dim())?;
    let grid = union_grid(f, g)?;
    Ok(grid
        .iter()
        .map(|&t| f.eval(t).dist(&g.eval(t)))
        .fold(0.0, f64::max))
}

/// BV-norm distance `|f - g|_inf + V(f - g)`.
pub fn bv_distance(f: &Path, g: &Path) -> Result<f64> {
    let diff = f.difference(g)?;
    let sup = diff.values().iter().map(Point::norm).fold(0.0, f64::max);
    Ok(sup + diff.total_variation())
}

/// Strict metric `|f - g|_inf + |V(f) - V(g)|`.
pub fn strict_distance(f: &Path, g: &Path) -> Result<f64> {
    Ok(sup_distance(f, g)? + (f.total_variation() - g.total_variation()).abs())
}

/// Nondecreasing scalar path `φ` on `[0, T]` with `φ(0) = 0` and `φ(T) = T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeChange(Path);

impl TimeChange {
    pub fn new(path: Path) -> Result<Self> {
        if path.dim() != 1 {
            return Err(Error::InvalidTimeChange(format!(
                "time changes are scalar, got dimension {}",
                path.dim()
            )));
        }
        let end = path.t_end();
        let vals: Vec<f64> = path.values.iter().map(|v| v[0]).collect();
        if vals[0] != 0.0 {
            return Err(Error::InvalidTimeChange(format!("φ(0) = {} != 0", vals[0])));
        }
        let last = *vals.last().unwrap();
        if (last - end).abs() > tol::ALGEBRAIC * end {
            return Err(Error::InvalidTimeChange(format!(
                "φ(T) = {last} != T = {end}"
            )));
        }
        if let Some(k) = vals.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::InvalidTimeChange(format!(
                "φ decreases between nodes {k} and {}",
                k + 1
            )));
        }
        if vals.iter().any(|&v| v < 0.0 || v > end) {
            return Err(Error::InvalidTimeChange("φ leaves [0, T]".into()));
        }
        let mut path = path;
        let n = path.values.len();
        path.values[n - 1] = Point::scalar(end);
        Ok(TimeChange(path))
    }

    pub fn identity(t_end: f64) -> Result<Self> {
        Self::new(Path::scalar(vec![0.0, t_end], vec![0.0, t_end])?)
    }

    /// Samples a monotone surjection `phi` of `[0, T]` on the given grid.
    pub fn from_fn(times: Vec<f64>, phi: impl Fn(f64) -> f64) -> Result<Self> {
        let end = *times
            .last()
            .ok_or_else(|| Error::InvalidTimeChange("empty grid".into()))?;
        Self::new(Path::from_fn(times, |t| {
            Point::scalar(phi(t).clamp(0.0, end))
        })?)
    }

    pub fn path(&self) -> &Path {
        &self.0
    }

    pub fn t_end(&self) -> f64 {
        self.0.t_end()
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.0.eval(t)[0]
    }
}

/// `V(f,[0,t]) * T / V(f,[0,T])` at every node of `f`, or zero when `f` is
/// constant.
pub fn arc_length_profile(f: &Path) -> Path {
    let cum = f.cumulative_variation();
    let total = *cum.last().unwrap();
    let end = f.t_end();
    let vals = cum
        .iter()
        .map(|&c| if total > 0.0 { end * (c / total) } else { 0.0 })
        .collect();
    Path::scalar(f.times.clone(), vals).expect("grid of a valid path")
}

/// Splits `f` into its normalized arc-length `ℓ` and the constant-speed path
/// `f̃` with `f = f̃ ∘ ℓ`. Constant stretches of `f` collapse to single nodes.
pub fn reparametrize_by_arclength(f: &Path) -> Result<(TimeChange, Path)> {
    if f.total_variation() == 0.0 {
        return Err(Error::DegenerateVariation);
    }
    let ell = arc_length_profile(f);
    let end = f.t_end();
    let dup = tol::DUPLICATE_TIME * end;
    let mut sigma: Vec<f64> = Vec::with_capacity(f.len());
    let mut vals: Vec<Point> = Vec::with_capacity(f.len());
    for (s, v) in ell.values().iter().map(|p| p[0]).zip(f.values()) {
        match sigma.last() {
            Some(&last) if s - last <= dup => {}
            _ => {
                sigma.push(s);
                vals.push(v.clone());
            }
        }
    }
    // the final node always sits at T; replace a near-duplicate predecessor
    if *sigma.last().unwrap() < end {
        if end - sigma.last().unwrap() <= dup && sigma.len() > 1 {
            sigma.pop();
            vals.pop();
        }
        sigma.push(end);
        vals.push(f.end().clone());
    }
    let ftilde = Path::new(sigma, vals)?;
    Ok((TimeChange::new(ell)?, ftilde))
}

/// The polyline `f ∘ φ`. The preimages under `φ` of the breakpoints of `f`
/// are inserted into the grid of `φ`, so the result is the exact composition.
pub fn compose_time_change(f: &Path, phi: &TimeChange) -> Result<Path> {
    let p = phi.path();
    check_domain(f, p)?;
    let mut times = Vec::with_capacity(p.len() + f.len());
    let mut values = Vec::with_capacity(p.len() + f.len());
    for k in 0..p.len() - 1 {
        let (t0, t1) = (p.times[k], p.times[k + 1]);
        let (a, b) = (p.values[k][0], p.values[k + 1][0]);
        times.push(t0);
        values.push(f.eval(a));
        if b > a {
            let first = f.times.partition_point(|&s| s <= a);
            let last = f.times.partition_point(|&s| s < b);
            for i in first..last {
                let s = f.times[i];
                let t = t0 + (s - a) / (b - a) * (t1 - t0);
                if t > *times.last().unwrap() && t < t1 {
                    times.push(t);
                    values.push(f.values[i].clone());
                }
            }
        }
    }
    times.push(p.t_end());
    values.push(f.eval(phi.eval(p.t_end())));
    Path::new(times, values)
}
