use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error in {source_name}: {message}")]
    Parse { source_name: String, message: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] contexta::Error),
}

impl CliError {
    pub fn parse(source_name: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Parse { source_name: source_name.into(), message: message.into() }
    }

    /// 0 success, 2 parse or validation, 3 capacity guard, 4 numerical integrity.
    pub fn exit_code(&self) -> i32 {
        use contexta::Error as E;
        match self {
            CliError::Parse { .. } | CliError::Io { .. } => 2,
            CliError::Core(E::Capacity(_)) => 3,
            CliError::Core(E::Numerical(_)) => 4,
            CliError::Core(_) => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
