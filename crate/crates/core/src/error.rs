use thiserror::Error;

/// Error type shared by all modules of the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A caller-supplied argument is outside the operation's domain.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A parameter set violates a physical or configuration constraint.
    #[error("configuration error: {0}")]
    Config(String),

    /// The operation is not defined for the given input shape.
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// The operation was requested in a state that does not allow it.
    #[error("invalid state: {0}")]
    State(String),

    /// A value is outside its permitted range.
    #[error("{what} = {value} is outside [{min}, {max}]")]
    Range {
        what: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    /// Division by zero in a closed-form expression.
    #[error("singularity: {0}")]
    Singularity(String),

    /// Decoding failed at a specific element index.
    #[error("decode error at index {index}: {reason}")]
    Decode { index: usize, reason: String },

    /// The requested combination is not supported by the device class.
    #[error("capability error: {0}")]
    Capability(String),

    /// A register bank cannot be translated into hardware commands.
    #[error("cannot interpret register `{register}`: {reason}")]
    Interpretation { register: String, reason: String },

    /// Unknown register key.
    #[error("unknown register `{0}`")]
    UnknownRegister(String),

    /// Malformed text or binary input.
    #[error("parse error at {location}: {reason}")]
    Parse { location: String, reason: String },

    /// The receiver saw no usable signal dynamic range.
    #[error("no signal: {0}")]
    NoSignal(String),

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}
