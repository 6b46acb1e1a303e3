use alloc::string::String;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("grid size {0} must be an even number >= 8")]
    InvalidGridSize(usize),
    #[error("grid size {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("young conjugate at y = {y} not attained below t = {t_max}")]
    Divergence { y: f64, t_max: f64 },
    #[error("window is {edge:e} at the patch edge, above the truncation threshold {threshold:e}")]
    WindowTruncation { edge: f64, threshold: f64 },
    #[error("memory budget exceeded: {required} bytes required, budget is {budget}")]
    BudgetExceeded { required: u64, budget: u64 },
    #[error("no derivative evaluator for {0}")]
    MissingDerivative(&'static str),
    #[error("no closed-form Fourier transform for {0}")]
    MissingFourier(&'static str),
    #[error("quadrature tail {tail:e} above threshold {threshold:e}")]
    QuadratureTail { tail: f64, threshold: f64 },
    #[error("singular linear part (determinant {0:e})")]
    SingularMatrix(f64),
    #[error("partition order {0} outside 1..=25")]
    PartitionOrder(usize),
    #[error("reassembly residual {residual:e} above tolerance {tolerance:e}")]
    Reassembly { residual: f64, tolerance: f64 },
    #[error("no candidate passes: {0}")]
    NoCandidate(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
