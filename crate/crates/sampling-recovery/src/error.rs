use thiserror::Error;

/// Errors produced by model construction, sampling, solving and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("basis index {j} out of range for a model of rank {rank}")]
    IndexOutOfRange { j: usize, rank: usize },

    #[error("point {point} lies outside the model domain")]
    PointOutsideDomain { point: String },

    #[error("approximation numbers are not square-summable: {0}")]
    DivergentTail(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("truncation index k must be at least 1")]
    ZeroTruncation,

    #[error("index must be at least {min} here, got {got}")]
    IndexTooSmall { min: usize, got: usize },

    #[error("rejection sampler exceeded {0} consecutive rejections; envelope violated")]
    RejectionOverflow(u64),

    #[error("tail truncation J = {j} must exceed k = {k}")]
    TailTruncationTooSmall { j: usize, k: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("matrix is empty")]
    EmptyMatrix,

    #[error(
        "theorem-mode truncation k_n is degenerate for n = {n}, c = {c}; \
         the smallest n with k_n >= 2 at this c is {min_n}"
    )]
    DegenerateK { n: u64, c: f64, min_n: u64 },

    #[error("k_n must be an even index >= 2, got {0}")]
    InvalidTheoremIndex(usize),

    #[error("coefficient {index} sits on a zero approximation number (infinite norm)")]
    CoefficientOnNullDirection { index: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
