use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid particle number N={n}: {reason}")]
    InvalidParticleNumber { n: usize, reason: &'static str },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("state is not normalized: |psi|^2 = {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },

    #[error("mean spin length {length:e} is below {threshold:e}; squeezing direction undefined")]
    DegenerateSpin { length: f64, threshold: f64 },

    #[error("correlator {0} is outside [0, 1/4]")]
    CorrelatorOutOfRange(f64),

    #[error("revival order q={0} must be even")]
    OddRevivalOrder(usize),

    #[error("no crossing of the local bound found for N={n} in (0, pi/2]")]
    NoCrossing { n: usize },

    #[error("brute-force enumeration limited to N <= {max}, got N={n}")]
    TooManyParties { n: usize, max: usize },

    #[error("basis dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: u128, cap: usize },

    #[error("eigensolver did not converge after {iterations} restarts (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("Krylov step rejected at dt={dt:e}: residual estimate {residual:e} > {tolerance:e}")]
    StepRejected { dt: f64, residual: f64, tolerance: f64 },

    #[error("checkpoint mismatch: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
