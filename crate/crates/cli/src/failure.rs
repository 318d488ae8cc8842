use std::path::PathBuf;

use rightsize_core::{Error, Violation};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Failure {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid instance: {}", list(.0))]
    Invalid(Vec<Violation>),
}

fn list(violations: &[Violation]) -> String {
    violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

impl Failure {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Failure::Io { path: path.into(), source }
    }

    /// Process exit code.
    pub fn code(&self) -> u8 {
        match self {
            Failure::Io { .. } | Failure::Invalid(_) => 2,
            Failure::Core(e) => match e {
                Error::Schema(_) | Error::Shape(_) | Error::Domain(_) | Error::Alignment(_) => 2,
                Error::Infeasible { .. } => 3,
                Error::Config(_) => 4,
                Error::Contract(_) | Error::NumericalContract(_) => 5,
            },
        }
    }
}
