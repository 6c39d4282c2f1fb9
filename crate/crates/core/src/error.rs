use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("invalid family: {0}")]
    InvalidFamily(String),

    #[error("not a frame sequence: lower frame bound on the span is zero")]
    NotFrameSequence,

    #[error("representation impossible{}: {reason}", size.map(|n| format!(" at truncation size {n}")).unwrap_or_default())]
    RepresentationImpossible { size: Option<usize>, reason: String },

    #[error("label error: {0}")]
    Label(String),

    #[error("pattern error: {0}")]
    Pattern(String),

    #[error("index {index} out of range for a family of {len} vectors")]
    Range { index: usize, len: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("discretization error: {reason} (suggested dim: {suggested_dim})")]
    Discretization { reason: String, suggested_dim: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable kind string.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NumericFailure(_) => "numeric_failure",
            Error::InvalidTolerance(_) => "invalid_tolerance",
            Error::InvalidFamily(_) => "invalid_family",
            Error::NotFrameSequence => "not_frame_sequence",
            Error::RepresentationImpossible { .. } => "representation_impossible",
            Error::Label(_) => "label",
            Error::Pattern(_) => "pattern",
            Error::Range { .. } => "range",
            Error::Parameter(_) => "parameter",
            Error::Discretization { .. } => "discretization",
            Error::Config(_) => "config",
            Error::Parse(_) => "parse",
        }
    }

    pub(crate) fn at_size(self, n: usize) -> Self {
        match self {
            Error::RepresentationImpossible { reason, .. } => {
                Error::RepresentationImpossible { size: Some(n), reason }
            }
            other => other,
        }
    }
}
