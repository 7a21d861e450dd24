use std::path::PathBuf;

use thiserror::Error;

use crate::model::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("no feasible gate for flight {flight}: the schedule needs more simultaneous gates than exist")]
    NoFeasibleGate { flight: usize },

    #[error("no feasible assignment exists")]
    NoFeasibleAssignment,

    #[error("search space of {size} assignments exceeds the enumeration limit {limit}")]
    SizeLimit { size: String, limit: u64 },

    #[error("exponential fit failed: {0}")]
    Fit(String),

    #[error("failed to parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("instance failed validation:\n{}", format_violations(.0))]
    Validation(Vec<Violation>),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| format!("  - {x}"))
        .collect::<Vec<_>>()
        .join("\n")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
