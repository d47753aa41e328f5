use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Solver or problem parameters that can never produce a valid run.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("scaled capacity {capacity} exceeds the dynamic program limit of {limit}")]
    CapacityTooLarge { capacity: u64, limit: u64 },

    #[error("instance has {items} items, enumeration supports at most {limit}")]
    InstanceTooLarge { items: usize, limit: usize },

    #[error("dataset contains no usable instruments")]
    EmptyDataset,

    #[error("failed to read dataset: {0}")]
    Io(String),
}
