use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("ambiguous projection: {point} has several nearest points in the set")]
    AmbiguousProjection { point: String },

    #[error(
        "point at distance {distance} is outside the prox-regular neighbourhood (radius {radius})"
    )]
    OutsideProxNeighborhood { distance: f64, radius: f64 },

    #[error("point {point} is not a member of the set")]
    NotMember { point: String },

    #[error("probe length {probe} must lie in (0, {radius})")]
    InvalidProbe { probe: f64, radius: f64 },

    #[error(
        "sampler exhausted: accepted {accepted} of {requested} members after {attempts} attempts"
    )]
    SamplerExhausted {
        accepted: usize,
        requested: usize,
        attempts: usize,
    },

    #[error("invalid set: {0}")]
    InvalidSet(String),

    #[error("union members {first} and {second} are {distance} apart, closer than the declared gap {gap}")]
    UnionGapViolated {
        first: usize,
        second: usize,
        distance: f64,
        gap: f64,
    },

    #[error("bad interval [{a}, {b}] for a path on [0, {end}]")]
    BadInterval { a: f64, b: f64, end: f64 },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("invalid time change: {0}")]
    InvalidTimeChange(String),

    #[error("paths live on different time intervals: [0, {left}] vs [0, {right}]")]
    DomainMismatch { left: f64, right: f64 },

    #[error("path has zero variation; arc-length reparametrization is undefined")]
    DegenerateVariation,

    #[error("input increment {step} is not below the prox-regularity radius {radius}")]
    StepTooLarge { step: f64, radius: f64 },

    #[error(
        "initial condition violated: z0 = {z0} is at distance {distance} from the characteristic set, \
         but u(0) - y(0) = z0 must lie in Z"
    )]
    InitialConditionViolation { z0: String, distance: f64 },

    #[error("grid budget exceeded: {needed} points needed, budget is {budget}{}",
        last_gap.map(|g| format!(" (last Cauchy gap {g:e})")).unwrap_or_default())]
    GridBudgetExceeded {
        needed: usize,
        budget: usize,
        last_gap: Option<f64>,
    },

    #[error("perturbed input u_{term} is inadmissible: {source}")]
    InadmissiblePerturbation {
        term: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
