use thiserror::Error;

/// Errors raised by the geometric and numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("antipodal pair: geodesic between the points is not unique")]
    AntipodalPair,

    #[error("degenerate circle: {0}")]
    DegenerateCircle(String),

    #[error("base point mismatch: loop is based at {loop_base:?}, arcs start at {arc_start:?}")]
    BaseMismatch {
        loop_base: Vec<f64>,
        arc_start: Vec<f64>,
    },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid loop: {field}: {message}")]
    InvalidLoop { field: String, message: String },

    #[error("invalid functional spec: {0}")]
    InvalidSpec(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid_loop(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidLoop {
            field: field.into(),
            message: message.into(),
        }
    }
}
