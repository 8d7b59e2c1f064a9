use std::fmt;
use std::io;

use chanid::geometry::GeometryError;
use chanid::ident::IdentError;
use chanid::necessity::NecessityError;
use chanid::spark::SparkError;

use crate::config::ConfigError;

pub const EXIT_OTHER: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_RANK_DEFICIENT: i32 = 4;
pub const EXIT_NOT_OVERSPREAD: i32 = 5;
pub const EXIT_NO_COVER: i32 = 6;
pub const EXIT_PACKING: i32 = 7;

/// Error plus the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    pub fn other(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_OTHER,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        Self::config(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        Self::other(e.to_string())
    }
}

impl From<SparkError> for CliError {
    fn from(e: SparkError) -> Self {
        let code = match e {
            SparkError::BudgetExceeded { .. } => EXIT_BUDGET,
            _ => EXIT_OTHER,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        let code = match e {
            GeometryError::NoCoverFound(_) => EXIT_NO_COVER,
            GeometryError::PackingFailed { .. } => EXIT_PACKING,
            GeometryError::Parse { .. } => EXIT_CONFIG,
            _ => EXIT_OTHER,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<IdentError> for CliError {
    fn from(e: IdentError) -> Self {
        match e {
            IdentError::Spark(s) => s.into(),
            IdentError::RankDeficient { .. } => Self {
                code: EXIT_RANK_DEFICIENT,
                message: e.to_string(),
            },
            _ => Self::other(e.to_string()),
        }
    }
}

impl From<NecessityError> for CliError {
    fn from(e: NecessityError) -> Self {
        match e {
            NecessityError::Spark(s) => s.into(),
            NecessityError::Geometry(g) => g.into(),
            NecessityError::PlanNotOverspread { .. } => Self {
                code: EXIT_NOT_OVERSPREAD,
                message: e.to_string(),
            },
            _ => Self::other(e.to_string()),
        }
    }
}
