//! Scenario-driven front end for `proxplay-core`.

pub mod runner;
pub mod scenario;

pub use runner::{run, RunOptions, RunOutcome};
pub use scenario::Scenario;
