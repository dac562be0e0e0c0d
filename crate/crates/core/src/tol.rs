//! Default comparison tolerances.

/// Geometric comparisons: boundary detection, verifier pass threshold.
pub const GEOMETRIC: f64 = 1e-9;

/// Algebraic identities that hold up to rounding.
pub const ALGEBRAIC: f64 = 1e-12;

/// Slack under which a point counts as a member of a characteristic set.
pub const MEMBERSHIP: f64 = 1e-12;

/// Relative tolerance (times `T`) under which two arc-length values coincide.
pub const DUPLICATE_TIME: f64 = 1e-14;
