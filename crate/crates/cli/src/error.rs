use std::path::PathBuf;

use thiserror::Error;

/// Failures of the command-line driver.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("cannot parse {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Model(#[from] fracctl::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    /// One or more invariant checks failed.
    #[error("{0} check(s) failed")]
    Validation(usize),

    /// A solver stopped without converging.
    #[error("{0}")]
    NonConvergence(String),
}

impl CliError {
    /// 0 is success; 2 marks solver non-convergence, 1 everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::NonConvergence(_) => 2,
            Self::Model(fracctl::Error::NonConvergence { .. }) => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Io { path, source }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_convergence_maps_to_two() {
        assert_eq!(CliError::NonConvergence("x".into()).exit_code(), 2);
        assert_eq!(CliError::Validation(3).exit_code(), 1);
        assert_eq!(CliError::Config("x".into()).exit_code(), 1);
    }
}
