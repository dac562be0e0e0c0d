//! Refinement studies of the play operator: rate independence, the normality
//! rule, continuity in the BV and strict metrics, and the empirical order of
//! the catching-up scheme.
//!
//! Every experiment returns a [`Report`] whose verdict is recomputable from
//! its rows. Independent solves run in parallel; rows are assembled in a
//! fixed order, so reports do not depend on scheduling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bvcalc::{
    bv_distance, compose_time_change, strict_distance, sup_distance, union_grid, Path, TimeChange,
};
use crate::error::{check_dim, Error, Result};
use crate::geometry::SetSpec;
use crate::playcore::{normality_report, solve_adaptive, solve_play, SolverOptions};
use crate::point::Point;
use crate::report::{PassRule, Report, Row};

/// Threshold below which a refinement metric counts as identically zero.
const VANISHING: f64 = 1e-14;

/// Extra refinement levels of the reference solve in [`convergence_order`].
pub const ORACLE_EXTRA_LEVELS: u32 = 4;

fn level_label(j: u32) -> String {
    format!("level{j}")
}

/// Whether `u ∘ φ` visits exactly the node values of `u`: every node of `φ`
/// lands on a node of `u`, so the composed input differs only by timing and
/// repeated values.
pub fn is_value_preserving(u: &Path, phi: &TimeChange) -> bool {
    phi.path()
        .values()
        .iter()
        .all(|v| u.times().binary_search_by(|t| t.total_cmp(&v[0])).is_ok())
}

/// Measures `e_j = sup|Pl(u_j ∘ φ) - Pl(u_j) ∘ φ|` on the base grid and on
/// `levels` midpoint refinements of it.
///
/// For value-preserving `φ` the discrete scheme is exactly rate independent
/// and the verdict is `e ≤ tolerance` at the finest level. Otherwise `e` must
/// not increase from level to level.
pub fn check_rate_independence(
    set: &SetSpec,
    u: &Path,
    z0: &Point,
    phi: &TimeChange,
    opts: &SolverOptions,
    levels: u32,
    tolerance: f64,
) -> Result<Report> {
    let exact = is_value_preserving(u, phi);
    let u_phi = compose_time_change(u, phi)?;
    let rows = (0..=levels)
        .into_par_iter()
        .map(|j| {
            let direct = solve_play(set, &u_phi.refine(j), z0, opts)?;
            let base = solve_play(set, &u.refine(j), z0, opts)?;
            let retimed = compose_time_change(base.y(), phi)?;
            let e = sup_distance(direct.y(), &retimed)?;
            Ok(Row::new(level_label(j))
                .with("e", e)
                .with("nodes", direct.u().len() as f64))
        })
        .collect::<Result<Vec<_>>>()?;
    let rule = if exact {
        PassRule::FinalAtMost { metric: "e".into() }
    } else {
        PassRule::Decreasing {
            metric: "e".into(),
            slack: 0.0,
        }
    };
    Ok(Report::new("rate_independence", rows, tolerance, rule))
}

/// Normality-rule defects on the base grid and `levels` refinements; passes
/// when the orthogonality and variation defects vanish or shrink by a mean
/// factor in `[1.4, 2.6]` per level.
pub fn check_normality(
    set: &SetSpec,
    u: &Path,
    z0: &Point,
    levels: u32,
    opts: &SolverOptions,
) -> Result<Report> {
    if levels < 2 {
        return Err(Error::InvalidArgument(format!(
            "normality check needs at least 2 levels, got {levels}"
        )));
    }
    let rows = (0..=levels)
        .into_par_iter()
        .map(|j| {
            let sol = solve_play(set, &u.refine(j), z0, opts)?;
            let mut row = normality_report(&sol).rows.remove(0);
            row.label = level_label(j);
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let rule = PassRule::ShrinkFactor {
        metrics: vec!["orthogonality".into(), "variation_defect".into()],
        lo: 1.4,
        hi: 2.6,
    };
    Ok(Report::new("normality", rows, VANISHING, rule))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Bv,
    Strict,
}

impl Metric {
    pub fn distance(self, f: &Path, g: &Path) -> Result<f64> {
        match self {
            Metric::Bv => bv_distance(f, g),
            Metric::Strict => strict_distance(f, g),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Bv => "bv",
            Metric::Strict => "strict",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuityConfig {
    /// Factor in `final output <= tolerance * (final input + grid gap)`.
    pub tolerance: f64,
    /// Cauchy gap target used to pick the common grid.
    pub grid_tol: f64,
    /// Relative increase of the output column still counted as noise.
    pub slack: f64,
    pub opts: SolverOptions,
}

impl Default for ContinuityConfig {
    fn default() -> Self {
        ContinuityConfig {
            tolerance: 10.0,
            grid_tol: 1e-2,
            slack: 0.05,
            opts: SolverOptions::default(),
        }
    }
}

/// Distances between `Pl(u, z0)` and `Pl(u + p/n, z0_n)` for `n = 1..=n_terms`.
///
/// All inputs are sampled on the union of the grids of `u` and `p`, refined
/// to the level at which [`solve_adaptive`] meets `grid_tol` for `u`. An empty
/// `z0_seq` means `z0_n = z0`.
#[allow(clippy::too_many_arguments)]
pub fn continuity_experiment(
    set: &SetSpec,
    u: &Path,
    z0: &Point,
    mode: Metric,
    n_terms: usize,
    perturbation: &Path,
    z0_seq: &[Point],
    cfg: &ContinuityConfig,
) -> Result<Report> {
    if n_terms == 0 {
        return Err(Error::InvalidArgument("n_terms must be positive".into()));
    }
    if !z0_seq.is_empty() && z0_seq.len() != n_terms {
        return Err(Error::InvalidArgument(format!(
            "z0_seq has {} entries, expected {n_terms}",
            z0_seq.len()
        )));
    }
    check_dim(u.dim(), perturbation.dim())?;
    let grid = union_grid(u, perturbation)?;
    let u_base = Path::from_fn(grid.clone(), |t| u.eval(t))?;
    let p_base = Path::from_fn(grid, |t| perturbation.eval(t))?;

    let reference = solve_adaptive(set, &u_base, z0, cfg.grid_tol, &cfg.opts)?;
    let gap = reference.diagnostics.cauchy_gap.unwrap_or(0.0);
    let level = reference.diagnostics.level.unwrap_or(0) + 1;
    let u_fine = u_base.refine(level);
    let p_fine = p_base.refine(level);
    let y_ref = solve_play(set, &u_fine, z0, &cfg.opts)?;

    let rows = (1..=n_terms)
        .into_par_iter()
        .map(|n| {
            let z0_n = z0_seq.get(n - 1).unwrap_or(z0);
            let scale = 1.0 / n as f64;
            let u_n = u_fine.zip_with(&p_fine, |a, b| a.axpy(scale, b))?;
            let sol = solve_play(set, &u_n, z0_n, &cfg.opts).map_err(|e| {
                Error::InadmissiblePerturbation {
                    term: n,
                    source: Box::new(e),
                }
            })?;
            Ok(Row::new(format!("n{n}"))
                .with("input", mode.distance(&u_fine, &u_n)?)
                .with("output", mode.distance(y_ref.y(), sol.y())?)
                .with("gap", gap))
        })
        .collect::<Result<Vec<_>>>()?;
    let rule = PassRule::Continuity {
        input: "input".into(),
        output: "output".into(),
        gap: "gap".into(),
        slack: cfg.slack,
    };
    Ok(Report::new(
        format!("continuity[{}]", mode.name()),
        rows,
        cfg.tolerance,
        rule,
    ))
}

/// Empirical order of the scheme.
///
/// Solves at `levels` successive midpoint refinements and compares each play
/// output with a reference solved [`ORACLE_EXTRA_LEVELS`] levels beyond the
/// last one, so that `p_j = log2(e_j / e_{j+1})` is not biased by the
/// reference's own error. Rows with `e_j = 0` carry no `p`.
pub fn convergence_order(
    set: &SetSpec,
    u: &Path,
    z0: &Point,
    levels: u32,
    opts: &SolverOptions,
) -> Result<Report> {
    if levels < 3 {
        return Err(Error::InvalidArgument(format!(
            "convergence order needs at least 3 levels, got {levels}"
        )));
    }
    let oracle_level = levels - 1 + ORACLE_EXTRA_LEVELS;
    let oracle = solve_play(set, &u.refine(oracle_level), z0, opts)?;
    let measured = (0..levels)
        .into_par_iter()
        .map(|j| {
            let sol = solve_play(set, &u.refine(j), z0, opts)?;
            Ok((sup_distance(sol.y(), oracle.y())?, sol.u().len()))
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = measured
        .iter()
        .enumerate()
        .map(|(j, &(e, nodes))| {
            let mut row = Row::new(level_label(j as u32))
                .with("e", e)
                .with("nodes", nodes as f64);
            if let Some(&(next, _)) = measured.get(j + 1) {
                if e > 0.0 && next > 0.0 {
                    row = row.with("p", (e / next).log2());
                }
            }
            row
        })
        .collect();
    Ok(Report::new(
        "convergence_order",
        rows,
        0.0,
        PassRule::Informational,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn box1() -> SetSpec {
        SetSpec::interval(-1.0, 1.0).unwrap()
    }

    #[test]
    fn identity_time_change_is_exact() {
        let u = Path::uniform(2.0, 16, Point::scalar).unwrap();
        let phi = TimeChange::identity(2.0).unwrap();
        assert!(is_value_preserving(&u, &phi));
        let rep = check_rate_independence(
            &box1(),
            &u,
            &Point::scalar(0.0),
            &phi,
            &SolverOptions::default(),
            3,
            1e-12,
        )
        .unwrap();
        assert!(rep.pass);
        assert!(rep.column("e").iter().all(|e| *e == 0.0));
        assert_eq!(rep.rows.len(), 4);
    }

    #[test]
    fn zero_perturbation_gives_zero_outputs() {
        let u = Path::uniform(1.0, 16, |t| {
            Point::scalar(1.5 * (std::f64::consts::TAU * t).sin())
        })
        .unwrap();
        let p = Path::uniform(1.0, 1, |_| Point::scalar(0.0)).unwrap();
        for mode in [Metric::Bv, Metric::Strict] {
            let rep = continuity_experiment(
                &box1(),
                &u,
                &Point::scalar(0.0),
                mode,
                4,
                &p,
                &[],
                &ContinuityConfig::default(),
            )
            .unwrap();
            assert!(rep.pass, "{}", rep.to_text());
            assert!(rep.column("output").iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn inadmissible_perturbation_is_reported() {
        let hole = SetSpec::complement_of_ball([0.0, 0.0], 1.0).unwrap();
        let u = Path::uniform(0.5, 8, |t| Point::from([-t, t])).unwrap();
        // pushes z0_n inside the removed disk
        let bad_z0 = vec![Point::from([0.5, 0.0]); 2];
        let p = presets::zigzag(0.5, 2, 0.1, &Point::from([1.0, 0.0])).unwrap();
        let err = continuity_experiment(
            &hole,
            &u,
            &Point::from([1.0, 0.0]),
            Metric::Bv,
            2,
            &p,
            &bad_z0,
            &ContinuityConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            Error::InadmissiblePerturbation { term: 1, .. }
        ));
    }

    #[test]
    fn scalar_convergence_is_exact_at_nodes() {
        let u = Path::uniform(2.0, 4, Point::scalar).unwrap();
        let rep = convergence_order(
            &box1(),
            &u,
            &Point::scalar(0.0),
            3,
            &SolverOptions::default(),
        )
        .unwrap();
        assert!(rep.column("e").iter().all(|e| *e == 0.0));
        assert!(rep.column("p").is_empty());
    }

    #[test]
    fn reports_are_deterministic() {
        let hole = SetSpec::complement_of_ball([0.0, 0.0], 1.0).unwrap();
        let u = Path::uniform(0.5, 8, |t| Point::from([-t, t])).unwrap();
        let z0 = Point::from([1.0, 0.0]);
        let a = check_normality(&hole, &u, &z0, 2, &SolverOptions::default()).unwrap();
        let b = check_normality(&hole, &u, &z0, 2, &SolverOptions::default()).unwrap();
        assert_eq!(a, b);
    }
}
