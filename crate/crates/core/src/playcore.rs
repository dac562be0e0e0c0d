//! Catching-up solver for the play operator over a prox-regular set, the
//! derived stop and Q operators, and residual certificates.
//!
//! For an input polyline `u` and an initial state `z0 ∈ Z` the solver folds
//! the implicit step `x_{k+1} = Proj_Z(x_k + Δu_k)` over the input increments
//! and sets `y = u - x` (play), `x` (stop) and `w = y - x = 2y - u` (Q).
//! For non-convex sets, input segments longer than `step_fraction * r` are
//! split so that every projected point stays in the unique-projection zone.
//! The subdivision depends only on the visited input values, never on the
//! time stamps, so the discrete operator is exactly rate independent.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bvcalc::{sup_distance, Path};
use crate::error::{check_dim, Error, Result};
use crate::geometry::SetSpec;
use crate::point::Point;
use crate::report::{fmt_real, PassRule, Report, Row};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Maximal input increment as a fraction of the prox-regularity radius.
    pub step_fraction: f64,
    /// Upper bound on the number of grid nodes of a single solve.
    pub max_points: usize,
    /// Sampled members per step in [`vi_residual`].
    pub residual_targets: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            step_fraction: 0.25,
            max_points: 1 << 20,
            residual_targets: 64,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_fraction > 0.0 && self.step_fraction <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "step_fraction must lie in (0, 1], got {}",
                self.step_fraction
            )));
        }
        if self.max_points < 2 {
            return Err(Error::InvalidArgument(
                "max_points must be at least 2".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    /// Nodes of the input as given.
    pub input_nodes: usize,
    /// Nodes after step-control subdivision.
    pub nodes: usize,
    /// Input segments that step control had to split.
    pub split_segments: usize,
    /// Cauchy gap achieved by [`solve_adaptive`].
    pub cauchy_gap: Option<f64>,
    /// Refinement level at which the adaptive stopping rule was met.
    pub level: Option<u32>,
}

/// Play, stop and Q outputs on a common grid.
#[derive(Debug, Clone)]
pub struct PlaySolution {
    set: SetSpec,
    z0: Point,
    u: Path,
    y: Path,
    x: Path,
    w: Path,
    du: Vec<Point>,
    dx: Vec<Point>,
    dy: Vec<Point>,
    opts: SolverOptions,
    pub diagnostics: Diagnostics,
}

impl PlaySolution {
    /// Builds a solution record from a candidate play output `y` on the grid
    /// of `u`. Increments of `y` serve as the normal increments, so residuals
    /// of the result check whether `y` actually solves the problem.
    pub fn from_paths(
        set: SetSpec,
        u: Path,
        y: Path,
        z0: Point,
        opts: SolverOptions,
    ) -> Result<Self> {
        if u.times() != y.times() {
            return Err(Error::InvalidArgument(
                "u and y must share the same grid".into(),
            ));
        }
        check_dim(u.dim(), y.dim())?;
        let x = u.zip_with(&y, |a, b| a - b)?;
        let w = y.zip_with(&x, |a, b| a - b)?;
        let dy = y.increments();
        Ok(PlaySolution {
            du: u.increments(),
            dx: x.increments(),
            dy,
            diagnostics: Diagnostics {
                input_nodes: u.len(),
                nodes: u.len(),
                ..Diagnostics::default()
            },
            set,
            z0,
            u,
            y,
            x,
            w,
            opts,
        })
    }

    pub fn set(&self) -> &SetSpec {
        &self.set
    }
    pub fn z0(&self) -> &Point {
        &self.z0
    }
    pub fn options(&self) -> &SolverOptions {
        &self.opts
    }
    /// The input on the solver grid.
    pub fn u(&self) -> &Path {
        &self.u
    }
    /// Play output.
    pub fn y(&self) -> &Path {
        &self.y
    }
    /// Stop output `u - y`.
    pub fn x(&self) -> &Path {
        &self.x
    }
    /// Q output `y - x`.
    pub fn w(&self) -> &Path {
        &self.w
    }
    pub fn times(&self) -> &[f64] {
        self.u.times()
    }
    pub fn du(&self) -> &[Point] {
        &self.du
    }
    pub fn dx(&self) -> &[Point] {
        &self.dx
    }
    /// Normal increments: `Δy_k ∈ N_Z(x_{k+1})` for a genuine solution.
    pub fn dy(&self) -> &[Point] {
        &self.dy
    }

    /// Trajectory CSV `t,u1..ud,y1..yd,x1..xd,w1..wd`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let d = self.u.dim();
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["t".to_string()];
        for name in ["u", "y", "x", "w"] {
            header.extend((1..=d).map(|i| format!("{name}{i}")));
        }
        w.write_record(&header)?;
        for k in 0..self.u.len() {
            let mut rec = vec![fmt_real(self.times()[k])];
            for p in [&self.u, &self.y, &self.x, &self.w] {
                rec.extend(p.values()[k].coords().iter().map(|c| fmt_real(*c)));
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// One implicit catching-up step from `x_k ∈ Z` under the input increment `du`.
///
/// Returns `(x_next, dy)` with `x_next = Proj_Z(x_k + du)` and
/// `dy = x_k + du - x_next`, a proximal normal at `x_next` (or zero).
pub fn catching_up_step(set: &SetSpec, x_k: &Point, du: &Point) -> Result<(Point, Point)> {
    check_dim(set.dim(), x_k.dim())?;
    check_dim(set.dim(), du.dim())?;
    let radius = set.prox_radius();
    let step = du.norm();
    if step >= radius {
        return Err(Error::StepTooLarge { step, radius });
    }
    let trial = x_k + du;
    let x_next = set.project(&trial)?;
    let dy = &trial - &x_next;
    Ok((x_next, dy))
}

/// Splits segments of `u` longer than `step_fraction * r` into equal pieces.
/// Returns the subdivided input and the number of segments that were split.
pub fn step_controlled_grid(
    set: &SetSpec,
    u: &Path,
    opts: &SolverOptions,
) -> Result<(Path, usize)> {
    let radius = set.prox_radius();
    if radius.is_infinite() {
        if u.len() > opts.max_points {
            return Err(Error::GridBudgetExceeded {
                needed: u.len(),
                budget: opts.max_points,
                last_gap: None,
            });
        }
        return Ok((u.clone(), 0));
    }
    let max_step = opts.step_fraction * radius;
    let pieces: Vec<usize> = u
        .increments()
        .iter()
        .map(|du| {
            let len = du.norm();
            let mut m = (len / max_step).ceil().max(1.0) as usize;
            if len / m as f64 >= radius {
                m += 1;
            }
            m
        })
        .collect();
    let needed = pieces.iter().sum::<usize>() + 1;
    if needed > opts.max_points {
        return Err(Error::GridBudgetExceeded {
            needed,
            budget: opts.max_points,
            last_gap: None,
        });
    }
    let split = pieces.iter().filter(|&&m| m > 1).count();
    if split == 0 {
        return Ok((u.clone(), 0));
    }
    let (ts, vs) = (u.times(), u.values());
    let mut times = Vec::with_capacity(needed);
    let mut values = Vec::with_capacity(needed);
    for (k, &m) in pieces.iter().enumerate() {
        times.push(ts[k]);
        values.push(vs[k].clone());
        for j in 1..m {
            let theta = j as f64 / m as f64;
            times.push(ts[k] + theta * (ts[k + 1] - ts[k]));
            values.push(vs[k].lerp(&vs[k + 1], theta));
        }
    }
    times.push(u.t_end());
    values.push(u.end().clone());
    Ok((Path::new(times, values)?, split))
}

/// Approximates `y = Pl(u, z0)` by the catching-up scheme on the grid of `u`.
pub fn solve_play(
    set: &SetSpec,
    u: &Path,
    z0: &Point,
    opts: &SolverOptions,
) -> Result<PlaySolution> {
    opts.validate()?;
    check_dim(set.dim(), u.dim())?;
    check_dim(set.dim(), z0.dim())?;
    if !set.contains(z0)? {
        return Err(Error::InitialConditionViolation {
            z0: z0.to_string(),
            distance: set.distance(z0)?,
        });
    }
    let (grid, split) = step_controlled_grid(set, u, opts)?;
    let n = grid.len();
    let mut xs = Vec::with_capacity(n);
    let mut dys = Vec::with_capacity(n - 1);
    xs.push(z0.clone());
    for du in grid.increments() {
        let (x_next, dy) = catching_up_step(set, xs.last().unwrap(), &du)?;
        xs.push(x_next);
        dys.push(dy);
    }
    let ys: Vec<Point> = grid.values().iter().zip(&xs).map(|(u, x)| u - x).collect();
    let ws: Vec<Point> = ys.iter().zip(&xs).map(|(y, x)| y - x).collect();
    let times = grid.times().to_vec();
    let x = Path::new(times.clone(), xs)?;
    let y = Path::new(times.clone(), ys)?;
    let w = Path::new(times, ws)?;
    Ok(PlaySolution {
        du: grid.increments(),
        dx: x.increments(),
        dy: dys,
        diagnostics: Diagnostics {
            input_nodes: u.len(),
            nodes: n,
            split_segments: split,
            ..Diagnostics::default()
        },
        set: set.clone(),
        z0: z0.clone(),
        u: grid,
        y,
        x,
        w,
        opts: *opts,
    })
}

/// Stop operator output `x = u - Pl(u, z0)`.
pub fn stop(set: &SetSpec, u: &Path, z0: &Point, opts: &SolverOptions) -> Result<Path> {
    Ok(solve_play(set, u, z0, opts)?.x)
}

/// Q operator output `2 Pl(u, z0) - u`.
pub fn q_operator(set: &SetSpec, u: &Path, z0: &Point, opts: &SolverOptions) -> Result<Path> {
    Ok(solve_play(set, u, z0, opts)?.w)
}

/// Refines the input by midpoint insertion until the sup distance between the
/// play outputs of consecutive levels is at most `tol`, and returns the finer
/// of the last two solves.
pub fn solve_adaptive(
    set: &SetSpec,
    u: &Path,
    z0: &Point,
    tol: f64,
    opts: &SolverOptions,
) -> Result<PlaySolution> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let mut prev = solve_play(set, u, z0, opts)?;
    let mut last_gap = None;
    for level in 1u32.. {
        let needed = (u.len() - 1)
            .checked_mul(1usize.checked_shl(level).unwrap_or(usize::MAX))
            .map(|n| n + 1)
            .unwrap_or(usize::MAX);
        if needed > opts.max_points || level >= usize::BITS - 1 {
            return Err(Error::GridBudgetExceeded {
                needed,
                budget: opts.max_points,
                last_gap,
            });
        }
        let mut cur = match solve_play(set, &u.refine(level), z0, opts) {
            Err(Error::GridBudgetExceeded { needed, budget, .. }) => {
                return Err(Error::GridBudgetExceeded {
                    needed,
                    budget,
                    last_gap,
                })
            }
            other => other?,
        };
        let gap = sup_distance(prev.y(), cur.y())?;
        if gap <= tol {
            cur.diagnostics.cauchy_gap = Some(gap);
            cur.diagnostics.level = Some(level - 1);
            return Ok(cur);
        }
        last_gap = Some(gap);
        prev = cur;
    }
    unreachable!("the level loop returns or errors")
}

fn sample_in_ball<R: Rng>(rng: &mut R, center: &Point, radius: f64) -> Point {
    let d = center.dim();
    let dir = loop {
        let g = Point::new(
            (0..d)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect(),
        );
        if let Some(u) = g.normalized() {
            break u;
        }
    };
    let r = radius * rng.random::<f64>().powf(1.0 / d as f64);
    center.axpy(r, &dir)
}

/// Largest positive part of
/// `<z - x_{k+1}, Δy_k> - |Δy_k| / (2r) * |z - x_{k+1}|^2`
/// over steps with `Δy_k ≠ 0` and sampled members `z` of `Z`.
///
/// Members are drawn uniformly from a ball around `x_{k+1}` of radius
/// `2|Δy_k| + scale(Z)`, plus the far points reported by
/// [`SetSpec::extreme_points`], where the inequality is tightest.
pub fn vi_residual(sol: &PlaySolution, sampler_seed: u64) -> f64 {
    let set = sol.set();
    let r = set.prox_radius();
    let targets = sol.opts.residual_targets;
    let mut rng = ChaCha8Rng::seed_from_u64(sampler_seed);
    let xs = sol.x().values();
    let scale = set.scale();
    let mut worst = 0.0f64;
    for (k, dy) in sol.dy().iter().enumerate() {
        let size = dy.norm();
        if size == 0.0 {
            continue;
        }
        let x_next = &xs[k + 1];
        let radius = 2.0 * size + scale;
        let mut zs = set.extreme_points(x_next);
        let mut attempts = 0;
        let mut accepted = 0;
        while accepted < targets && attempts < 20 * targets {
            attempts += 1;
            let z = sample_in_ball(&mut rng, x_next, radius);
            if set.contains(&z).unwrap_or(false) {
                zs.push(z);
                accepted += 1;
            }
        }
        for z in &zs {
            let diff = z - x_next;
            let quad = if r.is_infinite() {
                0.0
            } else {
                size / (2.0 * r) * diff.norm_sq()
            };
            worst = worst.max(diff.dot(dy) - quad);
        }
    }
    worst
}

/// Largest displacement `|Proj_Z(x_{k+1} + ρ Δy_k/|Δy_k|) - x_{k+1}|` over
/// steps with `Δy_k ≠ 0`; zero certifies `Δy_k ∈ N_Z(x_{k+1})`.
///
/// `ρ = probe_fraction * r` for non-convex sets and
/// `ρ = 10 * probe_fraction * |Δy_k|` for convex ones.
pub fn inclusion_residual(sol: &PlaySolution, probe_fraction: f64) -> Result<f64> {
    if !(probe_fraction > 0.0 && probe_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "probe_fraction must lie in (0, 1), got {probe_fraction}"
        )));
    }
    let set = sol.set();
    let r = set.prox_radius();
    let xs = sol.x().values();
    let mut worst = 0.0f64;
    for (k, dy) in sol.dy().iter().enumerate() {
        let Some(n) = dy.normalized() else { continue };
        let rho = if r.is_finite() {
            probe_fraction * r
        } else {
            10.0 * probe_fraction * dy.norm()
        };
        let x_next = &xs[k + 1];
        let back = set.project(&x_next.axpy(rho, &n))?;
        worst = worst.max(back.dist(x_next));
    }
    Ok(worst)
}

/// Discrete normality-rule defects of a solution.
///
/// * `orthogonality`: `Σ|<Δy_k, Δx_k>| / Σ|Δu_k|^2`
/// * `min_inner`: `min_k <Δy_k, Δx_k>`
/// * `speed_defect`: `max_k ||Δw_k| - |Δu_k||`
/// * `variation_defect`: `|V(w) - V(u)|`
///
/// These vanish only in the continuum limit; the report is informational.
pub fn normality_report(sol: &PlaySolution) -> Report {
    let dys = sol.y().increments();
    let dxs = sol.x().increments();
    let dws = sol.w().increments();
    let dus = sol.u().increments();
    let mut inner_abs = 0.0;
    let mut min_inner = f64::INFINITY;
    let mut speed = 0.0f64;
    for k in 0..dus.len() {
        let inner = dys[k].dot(&dxs[k]);
        inner_abs += inner.abs();
        min_inner = min_inner.min(inner);
        speed = speed.max((dws[k].norm() - dus[k].norm()).abs());
    }
    let energy: f64 = dus.iter().map(Point::norm_sq).sum();
    let orthogonality = if energy > 0.0 {
        inner_abs / energy
    } else {
        0.0
    };
    let row = Row::new("normality")
        .with("orthogonality", orthogonality)
        .with("min_inner", min_inner)
        .with("speed_defect", speed)
        .with(
            "variation_defect",
            (sol.w().total_variation() - sol.u().total_variation()).abs(),
        )
        .with("nodes", sol.u().len() as f64);
    Report::new("normality", vec![row], 0.0, PassRule::Informational)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn box1() -> SetSpec {
        SetSpec::interval(-1.0, 1.0).unwrap()
    }

    fn hole() -> SetSpec {
        SetSpec::complement_of_ball([0.0, 0.0], 1.0).unwrap()
    }

    fn ramp(segments: usize) -> Path {
        Path::uniform(2.0, segments, Point::scalar).unwrap()
    }

    #[test]
    fn step_examples() {
        let (x, dy) = catching_up_step(&box1(), &Point::scalar(0.8), &Point::scalar(0.5)).unwrap();
        assert_eq!(x, Point::scalar(1.0));
        assert!((dy[0] - 0.3).abs() < 1e-15);

        let (x, dy) =
            catching_up_step(&hole(), &Point::from([1.0, 0.0]), &Point::from([-0.2, 0.0])).unwrap();
        assert_eq!(x, Point::from([1.0, 0.0]));
        assert!(dy.dist(&Point::from([-0.2, 0.0])) < 1e-15);

        let (x, dy) =
            catching_up_step(&hole(), &Point::from([0.0, 1.0]), &Point::zeros(2)).unwrap();
        assert_eq!(x, Point::from([0.0, 1.0]));
        assert!(dy.is_zero());

        assert!(matches!(
            catching_up_step(&hole(), &Point::from([1.0, 0.0]), &Point::from([-1.0, 0.0])),
            Err(Error::StepTooLarge { .. })
        ));
    }

    #[test]
    fn scalar_closed_form() {
        let sol = solve_play(
            &box1(),
            &ramp(64),
            &Point::scalar(0.0),
            &SolverOptions::default(),
        )
        .unwrap();
        for (k, &t) in sol.times().iter().enumerate() {
            assert_eq!(sol.y().values()[k][0], (t - 1.0).max(0.0));
            assert_eq!(sol.x().values()[k][0], t.min(1.0));
        }
    }

    #[test]
    fn constant_input() {
        let u = Path::uniform(1.0, 5, |_| Point::from([0.3, -2.0])).unwrap();
        let z0 = Point::from([3.0, 0.0]);
        let sol = solve_play(&hole(), &u, &z0, &SolverOptions::default()).unwrap();
        for k in 0..u.len() {
            assert_eq!(sol.x().values()[k], z0);
            assert_eq!(sol.y().values()[k], &Point::from([0.3, -2.0]) - &z0);
        }
    }

    #[test]
    fn initial_condition_is_checked() {
        let u = Path::uniform(1.0, 4, |t| Point::from([t, 0.0])).unwrap();
        let err = solve_play(
            &hole(),
            &u,
            &Point::from([0.5, 0.0]),
            &SolverOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InitialConditionViolation { .. }));
        assert!(err.to_string().contains("u(0) - y(0) = z0"));
    }

    #[test]
    fn step_control_splits_long_segments() {
        let u = Path::new(
            vec![0.0, 1.0],
            vec![Point::from([0.0, 0.0]), Point::from([-1.0, 1.0])],
        )
        .unwrap();
        let sol = solve_play(
            &hole(),
            &u,
            &Point::from([1.0, 0.0]),
            &SolverOptions::default(),
        )
        .unwrap();
        // |Δu| = √2 with max step 0.25 gives 6 pieces
        assert_eq!(sol.diagnostics.nodes, 7);
        assert_eq!(sol.diagnostics.split_segments, 1);
        assert!(sol.du().iter().all(|d| d.norm() <= 0.25 + 1e-15));

        let tight = SolverOptions {
            max_points: 5,
            ..SolverOptions::default()
        };
        assert!(matches!(
            solve_play(&hole(), &u, &Point::from([1.0, 0.0]), &tight),
            Err(Error::GridBudgetExceeded { needed: 7, .. })
        ));
    }

    #[test]
    fn solution_invariants_hold() {
        let u = Path::uniform(0.5, 64, |t| Point::from([-t, t])).unwrap();
        let z0 = Point::from([1.0, 0.0]);
        let sol = solve_play(&hole(), &u, &z0, &SolverOptions::default()).unwrap();
        assert_eq!(sol.x().start(), &z0);
        for k in 0..sol.u().len() {
            let (u, y, x, w) = (
                &sol.u().values()[k],
                &sol.y().values()[k],
                &sol.x().values()[k],
                &sol.w().values()[k],
            );
            assert!(hole().contains(x).unwrap());
            assert!((&(x + y) - u).norm() <= 1e-12);
            assert!((&(y - x) - w).norm() <= 1e-12);
            assert!((&(&(y * 2.0) - u) - w).norm() <= 1e-12);
        }
        // genuine sliding: x stays on the circle and moves
        assert!(sol.dy().iter().any(|d| d.norm() > 0.0));
        assert!((sol.x().end().norm() - 1.0).abs() < 1e-12);
        assert!(sol.x().end()[1] > 0.3);
    }

    #[test]
    fn causality() {
        let u = Path::uniform(0.5, 40, |t| Point::from([-t, t + (9.0 * t).sin() * 0.1])).unwrap();
        let z0 = Point::from([1.0, 0.0]);
        let opts = SolverOptions::default();
        let full = solve_play(&hole(), &u, &z0, &opts).unwrap();
        for nodes in [2, 7, 23] {
            let part = solve_play(&hole(), &u.prefix(nodes).unwrap(), &z0, &opts).unwrap();
            assert_eq!(&full.y().values()[..nodes], part.y().values());
        }
    }

    #[test]
    fn retiming_is_bitwise_invisible() {
        let u = Path::uniform(1.0, 50, |t| {
            Point::from([2.0 * (3.0 * t).cos(), 2.0 * (3.0 * t).sin()])
        })
        .unwrap();
        let z0 = Point::from([1.0, 0.0]);
        let opts = SolverOptions::default();
        let new_times: Vec<f64> = u.times().iter().map(|t| t * t).collect();
        let v = u.retimed(new_times).unwrap();
        let a = solve_play(&hole(), &u, &z0, &opts).unwrap();
        let b = solve_play(&hole(), &v, &z0, &opts).unwrap();
        assert_eq!(a.y().values(), b.y().values());
        assert_eq!(a.x().values(), b.x().values());
    }

    #[test]
    fn residuals_vanish_on_solutions_and_flag_corruption() {
        let opts = SolverOptions::default();
        let sol = solve_play(&box1(), &ramp(64), &Point::scalar(0.0), &opts).unwrap();
        assert!(vi_residual(&sol, 1) <= 1e-12);
        assert!(inclusion_residual(&sol, 0.5).unwrap() <= 1e-12);

        let j = 48; // t = 1.5, inside the active phase
        let mut ys = sol.y().values().to_vec();
        ys[j] = ys[j].map(|c| c + 0.1);
        let y_bad = Path::new(sol.times().to_vec(), ys).unwrap();
        let bad =
            PlaySolution::from_paths(box1(), sol.u().clone(), y_bad, Point::scalar(0.0), opts)
                .unwrap();
        assert!(vi_residual(&bad, 1) > 1e-2);
        assert!(inclusion_residual(&bad, 0.5).unwrap() > 1e-3);
    }

    #[test]
    fn adaptive_examples() {
        let opts = SolverOptions::default();
        let sol = solve_adaptive(&box1(), &ramp(4), &Point::scalar(0.0), 1e-6, &opts).unwrap();
        assert_eq!(sol.diagnostics.level, Some(0));
        assert_eq!(sol.diagnostics.cauchy_gap, Some(0.0));

        let u = Path::uniform(0.5, 8, |t| Point::from([-t, t])).unwrap();
        let z0 = Point::from([1.0, 0.0]);
        let sol = solve_adaptive(&hole(), &u, &z0, 1e-4, &opts).unwrap();
        assert!(sol.diagnostics.cauchy_gap.unwrap() <= 1e-4);

        let small = SolverOptions {
            max_points: 200,
            ..opts
        };
        match solve_adaptive(&hole(), &u, &z0, 1e-9, &small) {
            Err(Error::GridBudgetExceeded { last_gap, .. }) => assert!(last_gap.unwrap() > 1e-9),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn normality_scalar_monotone_is_exact() {
        let sol = solve_play(
            &box1(),
            &ramp(64),
            &Point::scalar(0.0),
            &SolverOptions::default(),
        )
        .unwrap();
        let rep = normality_report(&sol);
        let row = &rep.rows[0];
        assert_eq!(row.get("orthogonality"), Some(0.0));
        assert_eq!(row.get("speed_defect"), Some(0.0));
        assert_eq!(row.get("variation_defect"), Some(0.0));
    }

    #[test]
    fn convex_inner_products_are_nonnegative() {
        let ball = SetSpec::ball([0.0, 0.0], 1.0).unwrap();
        let u = Path::uniform(6.0, 300, |t| {
            Point::from([2.0 * t.cos() - 1.0, 2.0 * t.sin()])
        })
        .unwrap();
        let sol = solve_play(
            &ball,
            &u,
            &Point::from([1.0, 0.0]),
            &SolverOptions::default(),
        )
        .unwrap();
        for (dy, dx) in sol.dy().iter().zip(sol.dx()) {
            assert!(dy.dot(dx) >= -1e-12);
        }
    }

    #[test]
    fn trajectory_csv_layout() {
        let sol = solve_play(
            &box1(),
            &ramp(4),
            &Point::scalar(0.0),
            &SolverOptions::default(),
        )
        .unwrap();
        let mut buf = Vec::new();
        sol.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,u1,y1,x1,w1"));
        assert_eq!(lines.count(), 5);
    }
}
