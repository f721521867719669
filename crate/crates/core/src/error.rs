use thiserror::Error;

/// Errors raised by the fatigue, strength, arm and posture routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the model is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A joint angle violates the configured limits.
    #[error("joint `{joint}` at {value:.3} outside limits [{min:.3}, {max:.3}]")]
    JointLimit {
        joint: String,
        value: f64,
        min: f64,
        max: f64,
    },

    /// The requested recovery fraction can never be reached (p >= 1).
    #[error("recovery fraction {0} is unreachable; capacity only approaches its maximum")]
    UnreachableFraction(f64),

    /// The hand target is outside the annulus reachable by the two-link arm.
    #[error("target at {distance:.4} m is unreachable; reachable interval is [{min:.4}, {max:.4}] m")]
    Unreachable { distance: f64, min: f64, max: f64 },

    /// A normalization column of the combined objective is zero everywhere.
    #[error("cannot normalize `{0}`: its maximum over the candidate set is not positive")]
    Normalization(&'static str),

    /// A data file (coefficients, arm definition, comfort spec) is malformed.
    #[error("{file}:{line}: {message}")]
    DataFile {
        file: String,
        line: usize,
        message: String,
    },

    /// A scenario document failed to parse or validate.
    #[error("scenario: {0}")]
    Scenario(String),

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn data(file: &str, line: usize, message: impl Into<String>) -> Self {
        Error::DataFile {
            file: file.to_string(),
            line,
            message: message.into(),
        }
    }

    /// True for errors caused by the scenario document or its data files
    /// rather than by the computation itself.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Scenario(_) | Error::DataFile { .. } | Error::Io(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
