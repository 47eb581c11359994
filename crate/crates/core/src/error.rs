use thiserror::Error;

/// Errors produced across the crate.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("invalid tensor format: {0}")]
    InvalidFormat(String),

    #[error("variable count mismatch: {left} vs {right}")]
    VariableCountMismatch { left: usize, right: usize },

    #[error("format {0} is not beyond boundary by one in its last factor")]
    NotBeyondByOne(String),

    #[error("degenerate tensor: the contraction map on the last factor is not injective")]
    DegenerateTensor,

    #[error("generic rank protocol disagreement: ranks {0:?}")]
    RankDisagreement(Vec<usize>),

    #[error("oracle modes disagree: {complex_mode} vs {artinian_mode}")]
    OracleDisagreement {
        complex_mode: usize,
        artinian_mode: usize,
    },

    #[error("resource guard: {0}")]
    ResourceGuard(String),

    #[error("tracking unstable, retry with new seed ({failed}/{tracked} paths failed)")]
    TrackingUnstable { failed: usize, tracked: usize },

    #[error("ill-conditioned span: singular value gap {gap:.3e} below threshold {threshold:.1e}")]
    IllConditionedSpan { gap: f64, threshold: f64 },

    #[error("entry count {got} does not match format volume {expected}")]
    EntryCount { got: usize, expected: usize },

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
