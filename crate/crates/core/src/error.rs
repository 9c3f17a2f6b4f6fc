use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("series did not converge within {terms} terms")]
    SeriesNonConvergence { terms: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operation requires a closed polygon")]
    RequiresClosed,

    #[error("too few vertices: need {need}, have {have}")]
    TooFewVertices { need: usize, have: usize },

    #[error("integrator step check failed: estimated error {estimate:e}")]
    IntegratorCheck { estimate: f64 },

    #[error("affine soliton check failed: residual {residual:e} exceeds {bound:e}")]
    SolitonCheck { residual: f64, bound: f64 },

    #[error("missing preset parameter `{0}`")]
    MissingParam(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
