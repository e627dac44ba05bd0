use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("invalid tabulated profile: {0}")]
    InvalidProfile(String),

    #[error("{0} kernels have no closed-form Fourier coefficients")]
    NoClosedForm(&'static str),

    #[error("quadrature did not converge: {coarse:e} vs {fine:e} (tolerance {tolerance:e})")]
    NoConvergence {
        coarse: f64,
        fine: f64,
        tolerance: f64,
    },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("spectrum cutoff {cutoff} is too small, at least {needed} is required")]
    WindowTooSmall { cutoff: usize, needed: usize },

    #[error("frequency {freq:?} lies outside the stored spectrum window (cutoff {cutoff})")]
    OutsideWindow { freq: Vec<i64>, cutoff: usize },

    #[error(
        "hop class {class:?} is degenerate: alias sum {alias_sum:e}, kernel matrix is singular"
    )]
    DegenerateClass { class: Vec<usize>, alias_sum: f64 },

    #[error("kernel matrix would be {n}x{n}, above the dense limit {limit}")]
    DenseLimit { n: usize, limit: usize },

    #[error("target is not real-valued: V[{freq:?}] is not the conjugate of V[-{freq:?}]")]
    NotRealValued { freq: Vec<i64> },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("interpolation residual {residual:e} exceeds {tolerance:e}")]
    Residual { residual: f64, tolerance: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
