use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// The density document does not match the schema.
    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error("invalid parameter `{field}`: {message}")]
    InvalidParameter { field: String, message: String },

    #[error("density is not normalizable (integral = {integral})")]
    NotNormalizable { integral: f64 },

    /// The density produced NaN or infinity somewhere on the circle.
    #[error("non-finite density value at theta = {theta}")]
    NonFinite { theta: f64 },

    #[error("invalid sampler configuration: {0}")]
    Config(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(field: &str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.to_string(),
            message: message.into(),
        }
    }

    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonFinite { .. })
    }
}
