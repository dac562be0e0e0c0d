//! Play, stop and Q hysteresis operators with prox-regular characteristic
//! sets, computed by the catching-up scheme on polyline inputs.
//!
//! * [`geometry`]: characteristic sets, projections, proximal normals.
//! * [`bvcalc`]: polylines, variation, BV metrics and time changes.
//! * [`playcore`]: the solver and its residual certificates.
//! * [`propcheck`]: numerical experiments producing [`Report`]s.

pub mod bvcalc;
pub mod error;
pub mod geometry;
pub mod playcore;
pub mod point;
pub mod presets;
pub mod propcheck;
pub mod report;
pub mod tol;

pub use bvcalc::{Path, TimeChange};
pub use error::{Error, Result};
pub use geometry::SetSpec;
pub use playcore::{solve_adaptive, solve_play, PlaySolution, SolverOptions};
pub use point::Point;
pub use report::{PassRule, Report, Row};
