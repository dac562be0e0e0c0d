//! Scenario files: TOML documents describing a set, an input, an initial
//! state, solver options and a list of experiments.

use std::path::{Path as FsPath, PathBuf};

use anyhow::{bail, Context};
use serde::Deserialize;

use proxplay_core::propcheck::Metric;
use proxplay_core::{presets, Error, Path, Point, SetSpec, SolverOptions, TimeChange};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    pub set: SetSpec,
    pub input: PathSpec,
    pub z0: Vec<f64>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub experiments: Vec<ExperimentSpec>,
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub step_fraction: f64,
    pub max_points: usize,
    pub residual_targets: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let o = SolverOptions::default();
        SolverConfig {
            step_fraction: o.step_fraction,
            max_points: o.max_points,
            residual_targets: o.residual_targets,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum Samples {
    Scalar(Vec<f64>),
    Vector(Vec<Vec<f64>>),
}

impl Samples {
    fn points(&self) -> Vec<Point> {
        match self {
            Samples::Scalar(v) => v.iter().map(|&x| Point::scalar(x)).collect(),
            Samples::Vector(v) => v.iter().map(|c| Point::new(c.clone())).collect(),
        }
    }
}

/// A polyline input, given inline, read from CSV, or generated by a preset.
#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PathSpec {
    Samples {
        times: Vec<f64>,
        values: Samples,
    },
    /// CSV with header `t,v1..vd`; relative paths resolve against the scenario file.
    Csv {
        path: PathBuf,
    },
    Ramp {
        t_end: f64,
        segments: usize,
        start: Vec<f64>,
        velocity: Vec<f64>,
    },
    Zigzag {
        t_end: f64,
        teeth: usize,
        amplitude: f64,
        direction: Vec<f64>,
    },
    CircleArc {
        t_end: f64,
        segments: usize,
        center: [f64; 2],
        radius: f64,
        #[serde(default)]
        theta0: f64,
        omega: f64,
    },
    Lissajous {
        t_end: f64,
        segments: usize,
        amplitude: [f64; 2],
        frequency: [f64; 2],
        #[serde(default)]
        phase: f64,
    },
}

impl PathSpec {
    pub fn build(&self, base: &FsPath) -> anyhow::Result<Path> {
        let path = match self {
            PathSpec::Samples { times, values } => Path::new(times.clone(), values.points())?,
            PathSpec::Csv { path } => {
                let full = base.join(path);
                let file = std::fs::File::open(&full)
                    .with_context(|| format!("opening {}", full.display()))?;
                Path::read_csv(file)?
            }
            PathSpec::Ramp {
                t_end,
                segments,
                start,
                velocity,
            } => presets::ramp(
                *t_end,
                *segments,
                &Point::new(start.clone()),
                &Point::new(velocity.clone()),
            )?,
            PathSpec::Zigzag {
                t_end,
                teeth,
                amplitude,
                direction,
            } => presets::zigzag(*t_end, *teeth, *amplitude, &Point::new(direction.clone()))?,
            PathSpec::CircleArc {
                t_end,
                segments,
                center,
                radius,
                theta0,
                omega,
            } => presets::circle_arc(*t_end, *segments, *center, *radius, *theta0, *omega)?,
            PathSpec::Lissajous {
                t_end,
                segments,
                amplitude,
                frequency,
                phase,
            } => presets::lissajous(*t_end, *segments, *amplitude, *frequency, *phase)?,
        };
        Ok(path)
    }
}

/// A time change on `[0, T]` of the scenario input.
#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhiSpec {
    Identity,
    /// `φ(t) = T (t/T)^exponent` sampled on `segments` equal pieces.
    Power {
        exponent: f64,
        segments: usize,
    },
    Samples {
        times: Vec<f64>,
        values: Vec<f64>,
    },
}

impl PhiSpec {
    pub fn build(&self, t_end: f64) -> anyhow::Result<TimeChange> {
        let phi = match self {
            PhiSpec::Identity => TimeChange::identity(t_end)?,
            PhiSpec::Power { exponent, segments } => {
                if exponent.is_nan() || *exponent <= 0.0 {
                    bail!("exponent must be positive, got {exponent}");
                }
                let e = *exponent;
                TimeChange::from_fn(proxplay_core::bvcalc::uniform_grid(t_end, *segments), |t| {
                    t_end * (t / t_end).powf(e)
                })?
            }
            PhiSpec::Samples { times, values } => {
                TimeChange::new(Path::scalar(times.clone(), values.clone())?)?
            }
        };
        Ok(phi)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Corruption {
    /// Node index on the solver grid.
    pub node: usize,
    /// Added to every coordinate of `y` at that node.
    pub amount: f64,
}

#[derive(Debug, Deserialize)]
pub struct ExperimentSpec {
    pub label: Option<String>,
    #[serde(flatten)]
    pub kind: ExperimentKind,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentKind {
    RateIndependence {
        phi: PhiSpec,
        #[serde(default = "default_levels")]
        levels: u32,
        #[serde(default = "default_rate_tolerance")]
        tolerance: f64,
    },
    Normality {
        #[serde(default = "default_levels")]
        levels: u32,
    },
    Continuity {
        mode: Metric,
        #[serde(default = "default_terms")]
        n_terms: usize,
        perturbation: PathSpec,
        #[serde(default)]
        z0_seq: Vec<Vec<f64>>,
        #[serde(default = "default_continuity_tolerance")]
        tolerance: f64,
        #[serde(default = "default_grid_tol")]
        grid_tol: f64,
        #[serde(default = "default_slack")]
        slack: f64,
    },
    Convergence {
        #[serde(default = "default_convergence_levels")]
        levels: u32,
    },
    /// Variational-inequality and inclusion residuals of the solution,
    /// optionally after corrupting one node of `y`.
    Residual {
        seed: u64,
        #[serde(default = "default_probe_fraction")]
        probe_fraction: f64,
        #[serde(default = "default_residual_tolerance")]
        tolerance: f64,
        corrupt: Option<Corruption>,
    },
    ProxRegularity {
        r: f64,
        seed: u64,
        #[serde(default = "default_samples")]
        boundary: usize,
        #[serde(default = "default_samples")]
        targets: usize,
    },
}

fn default_levels() -> u32 {
    3
}
fn default_convergence_levels() -> u32 {
    4
}
fn default_rate_tolerance() -> f64 {
    1e-6
}
fn default_terms() -> usize {
    16
}
fn default_continuity_tolerance() -> f64 {
    10.0
}
fn default_grid_tol() -> f64 {
    1e-2
}
fn default_slack() -> f64 {
    0.05
}
fn default_probe_fraction() -> f64 {
    0.5
}
fn default_residual_tolerance() -> f64 {
    1e-9
}
fn default_samples() -> usize {
    100
}

/// An experiment with its inputs resolved.
#[derive(Debug, Clone)]
pub enum Experiment {
    RateIndependence {
        phi: TimeChange,
        levels: u32,
        tolerance: f64,
    },
    Normality {
        levels: u32,
    },
    Continuity {
        mode: Metric,
        n_terms: usize,
        perturbation: Path,
        z0_seq: Vec<Point>,
        tolerance: f64,
        grid_tol: f64,
        slack: f64,
    },
    Convergence {
        levels: u32,
    },
    Residual {
        seed: u64,
        probe_fraction: f64,
        tolerance: f64,
        corrupt: Option<(usize, f64)>,
    },
    ProxRegularity {
        r: f64,
        seed: u64,
        boundary: usize,
        targets: usize,
    },
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::RateIndependence { .. } => "rate_independence",
            Experiment::Normality { .. } => "normality",
            Experiment::Continuity { .. } => "continuity",
            Experiment::Convergence { .. } => "convergence",
            Experiment::Residual { .. } => "residual",
            Experiment::ProxRegularity { .. } => "prox_regularity",
        }
    }
}

/// A validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub set: SetSpec,
    pub input: Path,
    pub z0: Point,
    pub opts: SolverOptions,
    pub experiments: Vec<(Option<String>, Experiment)>,
    pub output_dir: Option<PathBuf>,
}

impl Scenario {
    pub fn load(file: &FsPath) -> anyhow::Result<Scenario> {
        let text = std::fs::read_to_string(file)
            .with_context(|| format!("reading scenario {}", file.display()))?;
        let base = file.parent().unwrap_or(FsPath::new("."));
        Scenario::parse(&text, base).with_context(|| format!("scenario {}", file.display()))
    }

    /// Parses and validates a scenario; relative file references resolve
    /// against `base`.
    pub fn parse(text: &str, base: &FsPath) -> anyhow::Result<Scenario> {
        let raw: ScenarioFile = toml::from_str(text)?;
        raw.resolve(base)
    }
}

impl ScenarioFile {
    pub fn resolve(self, base: &FsPath) -> anyhow::Result<Scenario> {
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            bail!(
                "key `name`: must be a non-empty file-name fragment, got {:?}",
                self.name
            );
        }
        self.set.validate().context("key `set`")?;
        let input = self.input.build(base).context("key `input`")?;
        if input.dim() != self.set.dim() {
            bail!(
                "key `input`: dimension {} does not match the set dimension {}",
                input.dim(),
                self.set.dim()
            );
        }
        let z0 = Point::new(self.z0);
        check_state(&self.set, &z0).context("key `z0`")?;
        let opts = SolverOptions {
            step_fraction: self.solver.step_fraction,
            max_points: self.solver.max_points,
            residual_targets: self.solver.residual_targets,
        };
        opts.validate().context("key `solver`")?;

        let mut experiments = Vec::with_capacity(self.experiments.len());
        for (i, spec) in self.experiments.into_iter().enumerate() {
            let exp = resolve_experiment(spec.kind, &self.set, &input, base)
                .with_context(|| format!("key `experiments[{i}]`"))?;
            experiments.push((spec.label, exp));
        }
        Ok(Scenario {
            name: self.name,
            set: self.set,
            input,
            z0,
            opts,
            experiments,
            output_dir: self.output_dir.map(|d| base.join(d)),
        })
    }
}

fn check_state(set: &SetSpec, z0: &Point) -> anyhow::Result<()> {
    if z0.dim() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            found: z0.dim(),
        }
        .into());
    }
    if !set.contains(z0)? {
        return Err(Error::InitialConditionViolation {
            z0: z0.to_string(),
            distance: set.distance(z0)?,
        }
        .into());
    }
    Ok(())
}

fn resolve_experiment(
    kind: ExperimentKind,
    set: &SetSpec,
    input: &Path,
    base: &FsPath,
) -> anyhow::Result<Experiment> {
    let exp = match kind {
        ExperimentKind::RateIndependence {
            phi,
            levels,
            tolerance,
        } => Experiment::RateIndependence {
            phi: phi.build(input.t_end()).context("key `phi`")?,
            levels,
            tolerance,
        },
        ExperimentKind::Normality { levels } => {
            if levels < 2 {
                bail!("key `levels`: normality needs at least 2, got {levels}");
            }
            Experiment::Normality { levels }
        }
        ExperimentKind::Continuity {
            mode,
            n_terms,
            perturbation,
            z0_seq,
            tolerance,
            grid_tol,
            slack,
        } => {
            let perturbation = perturbation.build(base).context("key `perturbation`")?;
            if perturbation.dim() != input.dim() {
                bail!(
                    "key `perturbation`: dimension {} does not match the input",
                    perturbation.dim()
                );
            }
            if n_terms == 0 {
                bail!("key `n_terms`: must be positive");
            }
            if !z0_seq.is_empty() && z0_seq.len() != n_terms {
                bail!("key `z0_seq`: {} entries for {n_terms} terms", z0_seq.len());
            }
            let z0_seq: Vec<Point> = z0_seq.into_iter().map(Point::new).collect();
            for (n, z) in z0_seq.iter().enumerate() {
                check_state(set, z).with_context(|| format!("key `z0_seq[{n}]`"))?;
            }
            Experiment::Continuity {
                mode,
                n_terms,
                perturbation,
                z0_seq,
                tolerance,
                grid_tol,
                slack,
            }
        }
        ExperimentKind::Convergence { levels } => {
            if levels < 3 {
                bail!("key `levels`: convergence needs at least 3, got {levels}");
            }
            Experiment::Convergence { levels }
        }
        ExperimentKind::Residual {
            seed,
            probe_fraction,
            tolerance,
            corrupt,
        } => {
            if !(probe_fraction > 0.0 && probe_fraction < 1.0) {
                bail!("key `probe_fraction`: must lie in (0, 1), got {probe_fraction}");
            }
            Experiment::Residual {
                seed,
                probe_fraction,
                tolerance,
                corrupt: corrupt.map(|c| (c.node, c.amount)),
            }
        }
        ExperimentKind::ProxRegularity {
            r,
            seed,
            boundary,
            targets,
        } => {
            if r.is_nan() || r <= 0.0 {
                bail!("key `r`: must be positive, got {r}");
            }
            Experiment::ProxRegularity {
                r,
                seed,
                boundary,
                targets,
            }
        }
    };
    Ok(exp)
}
