use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("negative eigenvalue {value} at position {index}")]
    NegativeEigenvalue { index: usize, value: f64 },
    #[error("weighted eigenvalue sum is {sum}, not 1")]
    TraceNotOne { sum: f64 },
    #[error("matrix is not Hermitian (relative residual {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("matrix is not skew-Hermitian (relative residual {residual:.3e})")]
    NotSkewHermitian { residual: f64 },
    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },
    #[error("trace has non-negligible imaginary part {imag:.3e}")]
    NonNegligibleImaginaryPart { imag: f64 },
    #[error("tangent vectors have different base points (residual {residual:.3e})")]
    BasePointMismatch { residual: f64 },
    #[error("vector is not tangent at the given frame (residual {residual:.3e})")]
    NotTangent { residual: f64 },
    #[error("time grid is not strictly increasing at index {index}")]
    NonIncreasingGrid { index: usize },
    #[error("frame does not project onto the initial state (residual {residual:.3e})")]
    FiberMismatch { residual: f64 },
    #[error("trajectory carries no frames; rebuild with frames enabled")]
    MissingFrames,
    #[error("trajectory is not a loop (endpoint gap {gap:.3e})")]
    NotALoop { gap: f64 },
    #[error("states are not isospectral (spectrum gap {gap:.3e})")]
    NotIsospectral { gap: f64 },
    #[error("negative radicand {value:.3e} in uncertainty")]
    NegativeRadicand { value: f64 },
    #[error("zero energy dispersion with distinct endpoints")]
    ZeroDispersion,
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("input lists have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("multiplicity must be positive at position {0}")]
    NonPositiveMultiplicity(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
