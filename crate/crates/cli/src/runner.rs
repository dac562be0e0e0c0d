//! Executes scenarios and writes trajectories and reports.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context};

use proxplay_core::geometry::verify_prox_regularity;
use proxplay_core::playcore::{inclusion_residual, step_controlled_grid, vi_residual};
use proxplay_core::propcheck::{
    check_normality, check_rate_independence, continuity_experiment, convergence_order,
    ContinuityConfig,
};
use proxplay_core::report::fmt_real;
use proxplay_core::{solve_play, PassRule, Path, PlaySolution, Report, Row};

use crate::scenario::{Experiment, Scenario};

/// Command-line overrides applied on top of a scenario.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub output_dir: Option<PathBuf>,
    pub levels: Option<u32>,
    pub seed: Option<u64>,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub solution: PlaySolution,
    pub reports: Vec<Report>,
    pub trajectory_csv: PathBuf,
    pub report_txt: PathBuf,
    pub report_csv: PathBuf,
}

impl RunOutcome {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }
}

pub const CATALOG: &str = "\
Ball: prox_radius = infinity; parameters center (vector), radius > 0; convex
Box: prox_radius = infinity; parameters lo, hi (vectors, lo <= hi); convex
Halfspace: prox_radius = infinity; parameters normal (unit vector), offset; the set <normal, p> <= offset; convex
ComplementOfBall: prox_radius = radius; parameters center (vector), radius > 0; the set |p - center| >= radius
Union: prox_radius = gap / 2; parameters members (convex sets), gap > 0 (lower bound on pairwise member distance)
";

/// Runs one experiment against the scenario and its solution.
pub fn run_experiment(
    scenario: &Scenario,
    sol: &PlaySolution,
    exp: &Experiment,
) -> anyhow::Result<Report> {
    let (set, u, z0, opts) = (&scenario.set, &scenario.input, &scenario.z0, &scenario.opts);
    let report = match exp {
        Experiment::RateIndependence {
            phi,
            levels,
            tolerance,
        } => check_rate_independence(set, u, z0, phi, opts, *levels, *tolerance)?,
        Experiment::Normality { levels } => check_normality(set, u, z0, *levels, opts)?,
        Experiment::Continuity {
            mode,
            n_terms,
            perturbation,
            z0_seq,
            tolerance,
            grid_tol,
            slack,
        } => {
            let cfg = ContinuityConfig {
                tolerance: *tolerance,
                grid_tol: *grid_tol,
                slack: *slack,
                opts: *opts,
            };
            continuity_experiment(set, u, z0, *mode, *n_terms, perturbation, z0_seq, &cfg)?
        }
        Experiment::Convergence { levels } => convergence_order(set, u, z0, *levels, opts)?,
        Experiment::Residual {
            seed,
            probe_fraction,
            tolerance,
            corrupt,
        } => {
            let checked = match corrupt {
                None => sol.clone(),
                Some((node, amount)) => corrupted(sol, *node, *amount)?,
            };
            let rows = vec![
                Row::new("vi").with("residual", vi_residual(&checked, *seed)),
                Row::new("inclusion")
                    .with("residual", inclusion_residual(&checked, *probe_fraction)?),
            ];
            Report::new(
                "residual",
                rows,
                *tolerance,
                PassRule::MaxAtMost {
                    metric: "residual".into(),
                },
            )
        }
        Experiment::ProxRegularity {
            r,
            seed,
            boundary,
            targets,
        } => verify_prox_regularity(set, *r, *boundary, *targets, *seed)?,
    };
    Ok(report)
}

fn corrupted(sol: &PlaySolution, node: usize, amount: f64) -> anyhow::Result<PlaySolution> {
    let mut ys = sol.y().values().to_vec();
    let Some(y) = ys.get_mut(node) else {
        bail!(
            "key `corrupt.node`: {node} is past the last grid node {}",
            sol.times().len() - 1
        );
    };
    *y = y.map(|c| c + amount);
    let y_bad = Path::new(sol.times().to_vec(), ys)?;
    Ok(PlaySolution::from_paths(
        sol.set().clone(),
        sol.u().clone(),
        y_bad,
        sol.z0().clone(),
        *sol.options(),
    )?)
}

fn apply_overrides(exp: &Experiment, ro: &RunOptions) -> Experiment {
    let mut exp = exp.clone();
    if let Some(l) = ro.levels {
        match &mut exp {
            Experiment::RateIndependence { levels, .. } => *levels = l,
            Experiment::Normality { levels } => *levels = l.max(2),
            Experiment::Convergence { levels } => *levels = l.max(3),
            _ => {}
        }
    }
    if let Some(s) = ro.seed {
        match &mut exp {
            Experiment::Residual { seed, .. } | Experiment::ProxRegularity { seed, .. } => {
                *seed = s
            }
            _ => {}
        }
    }
    exp
}

/// Solves the scenario, runs its experiments and writes
/// `<name>_trajectory.csv`, `<name>_report.txt` and `<name>_report.csv`.
pub fn run(scenario: &Scenario, ro: &RunOptions) -> anyhow::Result<RunOutcome> {
    let dir = ro
        .output_dir
        .clone()
        .or_else(|| scenario.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;

    let solution = solve_play(&scenario.set, &scenario.input, &scenario.z0, &scenario.opts)
        .with_context(|| format!("solving scenario `{}`", scenario.name))?;

    let mut reports = Vec::with_capacity(scenario.experiments.len());
    let mut names = HashSet::new();
    for (i, (label, exp)) in scenario.experiments.iter().enumerate() {
        let exp = apply_overrides(exp, ro);
        let mut report = run_experiment(scenario, &solution, &exp)
            .with_context(|| format!("experiments[{i}] ({})", exp.kind()))?;
        let mut name = label.clone().unwrap_or_else(|| report.name.clone());
        if !names.insert(name.clone()) {
            name = format!("{name}_{i}");
            names.insert(name.clone());
        }
        report.name = name;
        reports.push(report);
    }

    let trajectory_csv = dir.join(format!("{}_trajectory.csv", scenario.name));
    let mut buf = Vec::new();
    solution.write_csv(&mut buf)?;
    std::fs::write(&trajectory_csv, buf)
        .with_context(|| format!("writing {}", trajectory_csv.display()))?;

    let report_txt = dir.join(format!("{}_report.txt", scenario.name));
    std::fs::write(&report_txt, reports_text(&scenario.name, &reports))
        .with_context(|| format!("writing {}", report_txt.display()))?;
    let report_csv = dir.join(format!("{}_report.csv", scenario.name));
    std::fs::write(&report_csv, reports_csv(&reports)?)
        .with_context(|| format!("writing {}", report_csv.display()))?;

    Ok(RunOutcome {
        solution,
        reports,
        trajectory_csv,
        report_txt,
        report_csv,
    })
}

pub fn reports_text(scenario: &str, reports: &[Report]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario = {scenario}");
    let _ = writeln!(out, "pass = {}", reports.iter().all(|r| r.pass));
    let _ = writeln!(out, "experiments = {}", reports.len());
    for r in reports {
        out.push('\n');
        out.push_str(&r.to_text());
    }
    out
}

/// One record per metric: `experiment,row,metric,value`, followed by a
/// `verdict,pass` record per experiment.
pub fn reports_csv(reports: &[Report]) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["experiment", "row", "metric", "value"])?;
    for r in reports {
        for [row, metric, value] in r.csv_records() {
            w.write_record([r.name.as_str(), &row, &metric, &value])?;
        }
        w.write_record([
            r.name.as_str(),
            "verdict",
            "pass",
            &fmt_real(if r.pass { 1.0 } else { 0.0 }),
        ])?;
        w.write_record([
            r.name.as_str(),
            "verdict",
            "tolerance",
            &fmt_real(r.tolerance_used),
        ])?;
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

/// Derived quantities printed by `validate`.
pub fn summary(scenario: &Scenario) -> anyhow::Result<String> {
    let (grid, split) = step_controlled_grid(&scenario.set, &scenario.input, &scenario.opts)?;
    let set = &scenario.set;
    let mut out = String::new();
    let _ = writeln!(out, "scenario: {}", scenario.name);
    let _ = writeln!(
        out,
        "set: {} dim={} prox_radius={}",
        set.variant_name(),
        set.dim(),
        set.prox_radius()
    );
    let _ = writeln!(
        out,
        "input: nodes={} t_end={} variation={}",
        scenario.input.len(),
        scenario.input.t_end(),
        scenario.input.total_variation()
    );
    let _ = writeln!(out, "grid: nodes={} split_segments={split}", grid.len());
    let _ = writeln!(out, "z0: {} in Z", scenario.z0);
    let kinds: Vec<&str> = scenario.experiments.iter().map(|(_, e)| e.kind()).collect();
    let _ = writeln!(out, "experiments: {} [{}]", kinds.len(), kinds.join(", "));
    Ok(out)
}
