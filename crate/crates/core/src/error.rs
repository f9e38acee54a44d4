use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("code distance must be at least 3, got {0}")]
    InvalidDistance(usize),

    #[error("{kind} index {index} out of range (limit {limit})")]
    IndexOutOfRange {
        kind: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("physical error rate {0} is outside [0, 1]")]
    InvalidProbability(f64),

    #[error("capacity exceeded: {what} is {requested}, limit is {limit}")]
    Capacity {
        what: &'static str,
        requested: u128,
        limit: u128,
    },

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
