use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument `{arg}`: {reason}")]
    InvalidArgument { arg: &'static str, reason: String },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("LP iteration cap of {cap} exceeded after {iterations} pivots")]
    LpIterationLimit { cap: usize, iterations: usize },

    #[error("LP solution failed certification: {0}")]
    LpCertification(String),

    #[error("feasible set row {row} is infeasible; the noise bound is likely misspecified")]
    InfeasibleRow { row: usize },

    #[error("gram matrix is singular; pass a positive ridge parameter")]
    SingularGram,

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("spectral radius {rho} exceeds 1; growth certificate refused")]
    ExplosiveSystem { rho: f64 },

    #[error("scale calibration did not converge after {0} bisection steps")]
    CalibrationFailed(usize),

    #[error("fixed-point iteration for the sample-size bound did not converge (last iterate {last})")]
    BoundNonConvergence { last: f64 },

    #[error("covering radius {0} is out of range (must be in (0, 0.5))")]
    CoveringRadiusOutOfRange(f64),

    #[error("noise bound mismatch: spec bound {spec} != system bound {system}")]
    BoundMismatch { spec: f64, system: f64 },

    #[error("noise bound violated: |w| = {value} > {bound}")]
    NoiseBoundViolated { value: f64, bound: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 for configuration problems,
    /// 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) | Error::Json(_) | Error::InvalidArgument { .. } => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
