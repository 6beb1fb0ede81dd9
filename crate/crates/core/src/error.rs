use thiserror::Error;

/// Errors raised by the channel models and the scheduling routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A kernel was evaluated at (or numerically at) its source point.
    #[error("singular displacement: {0}")]
    SingularDisplacement(&'static str),

    #[error("element {index}: {source}")]
    Element {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid configuration: {field}: {reason}")]
    Config { field: String, reason: String },

    #[error("overlapping elements: side {side} m exceeds spacing {spacing} m")]
    OverlappingElements { side: f64, spacing: f64 },

    #[error("null channel, beamformer undefined")]
    NullChannel,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("instance too large for exact oracle: {k} nodes (cap {cap})")]
    InstanceTooLarge { k: usize, cap: usize },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by singular geometry rather than bad input.
    pub fn is_domain(&self) -> bool {
        match self {
            Error::SingularDisplacement(_) | Error::NullChannel => true,
            Error::Element { source, .. } => source.is_domain(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
