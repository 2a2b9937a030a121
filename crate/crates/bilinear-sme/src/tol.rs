//! Centralized numerical tolerances.
//!
//! Every feasibility, equality, and spectral comparison in the crate goes
//! through these constants so that tests and library code agree on what
//! "equal" means.

/// Feasibility slack for halfspace membership and LP constraint checks:
/// `a·x <= b + LP_FEASIBILITY`.
pub const LP_FEASIBILITY: f64 = 1e-9;

/// Equality tolerance for optimal LP values and exact algebraic identities.
pub const EQUALITY: f64 = 1e-8;

/// Relative accuracy target for spectral-radius estimates.
pub const SPECTRAL: f64 = 1e-4;

/// Pivot magnitude below which a tableau entry is treated as zero.
pub(crate) const LP_PIVOT: f64 = 1e-10;
