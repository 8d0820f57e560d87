use thiserror::Error;

use crate::scheme::SchemeKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("{scheme} step at index {index} left the domain")]
    DomainViolation { scheme: SchemeKind, index: usize },

    #[error("schedule value {value} for {sequence} at index {index} is outside [0, 1]")]
    InvalidSchedule {
        sequence: &'static str,
        index: usize,
        value: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("map evaluation failed at node {node} (t = {t}): {reason}")]
    Evaluation { node: usize, t: f64, reason: String },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
