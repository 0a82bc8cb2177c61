use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub type AppResult<T> = Result<T, AppError>;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] fkpp_core::Error),
    #[error("cannot access {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {}: {detail}", path.display())]
    Parse { path: PathBuf, detail: String },
}

impl AppError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    pub fn parse(path: impl Into<PathBuf>, detail: impl ToString) -> Self {
        Self::Parse { path: path.into(), detail: detail.to_string() }
    }

    /// 2 for bad input (flags, files, parameters); 1 when a computation on
    /// valid input broke down.
    pub fn exit_code(&self) -> i32 {
        use fkpp_core::Error as E;
        match self {
            Self::Usage(_) | Self::Io { .. } | Self::Parse { .. } => 2,
            Self::Core(e) => match e {
                E::Domain(_) | E::Inadmissible { .. } | E::Config(_) | E::Cfl { .. } | E::Unsupported(_) => 2,
                _ => 1,
            },
        }
    }
}

/// Verdict of a run's scientific checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Self::Pass
        } else {
            Self::Fail
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Self::Pass => 0,
            Self::Fail => 1,
        }
    }

    pub fn and(self, other: Self) -> Self {
        self.max(other)
    }
}
