use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("non-finite input: {0}")]
    NonFinite(String),
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("mode mismatch: {0}")]
    Mode(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("CFL violation: dt = {dt} exceeds {limit}")]
    Cfl { dt: f64, limit: f64 },
    #[error("history does not cover the requested range: {0}")]
    History(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;

impl From<std::io::Error> for CoreError {
    fn from(e: std::io::Error) -> Self {
        CoreError::Io(e.to_string())
    }
}
