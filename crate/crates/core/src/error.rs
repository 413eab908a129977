use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not traceless: |trace| = {trace:.3e} exceeds tolerance {tol:.3e}")]
    NonTraceless { trace: f64, tol: f64 },

    #[error("expression needs jet variable u{needed} but only u1..u{available} were supplied")]
    JetOrderTooLow { needed: u32, available: u32 },

    #[error("grid length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("time step {dt:.4e} violates the CFL bound {limit:.4e}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("numerical blow-up at t = {t:.6}: {reason}")]
    NumericalBlowup { t: f64, reason: String },

    #[error("spectral parameter must be non-zero")]
    ZeroSpectralParameter,

    #[error("matrix is singular (|det| = {det:.3e})")]
    SingularMatrix { det: f64 },

    #[error("no closed-form density for index {0}")]
    InvalidIndex(usize),

    #[error("ratio of densities is not a constant phase for n = {n} (spread {spread:.3e})")]
    NonConstantRatio { n: usize, spread: f64 },

    #[error("growth-law check needs at least 3 observer samples, got {0}")]
    InsufficientSamples(usize),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("malformed snapshot: {0}")]
    Snapshot(String),
}
