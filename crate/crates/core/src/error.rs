use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// The variants fall in three classes that the CLI maps to exit codes:
/// input problems (2), exceeded resource caps (3) and internal failures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("resource cap exceeded: {what} (cap {cap})")]
    Resource { what: String, cap: usize },

    #[error("orbit exceeds cap {cap} and exact mode was requested")]
    OrbitOverflow { cap: usize },

    #[error("unsupported computation: {0}")]
    Unsupported(String),

    #[error("singular linear system while solving {0}; this indicates a bug")]
    Singular(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(position: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            position,
            message: message.into(),
        }
    }

    pub(crate) fn input(message: impl Into<String>) -> Self {
        Error::Input(message.into())
    }

    pub(crate) fn resource(what: impl Into<String>, cap: usize) -> Self {
        Error::Resource {
            what: what.into(),
            cap,
        }
    }

    /// True for errors caused by malformed or inconsistent caller input.
    pub fn is_input(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::UnknownGenerator(_)
                | Error::Input(_)
                | Error::Unsupported(_)
        )
    }

    /// True for errors caused by a configured cap being exceeded.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource { .. } | Error::OrbitOverflow { .. })
    }

    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        if self.is_input() {
            2
        } else if self.is_resource() {
            3
        } else {
            1
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
