use thiserror::Error;

/// Errors raised by the matrix kernel, the geometry routines and the
/// recovery engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("matrix is not traceless (trace {trace:.3e})")]
    NotTraceless { trace: f64 },
    #[error("{what} did not converge within {sweeps} sweeps")]
    NoConvergence { what: &'static str, sweeps: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("subspaces live in different ambient spaces ({0} vs {1})")]
    AmbientMismatch(usize, usize),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("the set H_a(X,Y) is empty for these subspaces")]
    EmptySet,
    #[error("matrix is not an isometry (defect {defect:.3e})")]
    NotIsometry { defect: f64 },
    #[error("matrix is not a projection")]
    NotProjection,
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("tau does not map sampled involutions to unitaries (worst defect {defect:.3e})")]
    TauNotAdmissible { defect: f64 },
    #[error("matrix is not a trace-zero hermitian involution")]
    NotInvolution,
    #[error("matrix is not a rank-k projection in H_2k")]
    NotHalfRankProjection,
    #[error("X + Y and X - Y are not both unitary (defect {defect:.3e})")]
    NotUnitaryPair { defect: f64 },
    #[error("map is not a preserver: {0}")]
    NotAPreserver(String),
    #[error("block extraction failed (reassembly residual {residual:.3e})")]
    BlockExtractionFailure { residual: f64 },
    #[error("preserver has no tensor form: {0}")]
    TensorFormUnavailable(String),
    #[error("entries must be finite")]
    NonFinite,
}

pub type Result<T> = std::result::Result<T, Error>;
