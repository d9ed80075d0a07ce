use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("ground-set size {0} out of range")]
    Size(usize),
    #[error("invalid parameters: {0}")]
    Parameter(String),
    #[error("system is not a covering; minimality is undefined")]
    NotACover,
    #[error("unsupported: {0}")]
    Capability(String),
    #[error("weights violate the packing condition at candidate {candidate:#x} (column sum {sum})")]
    InvalidWeights { candidate: u32, sum: String },
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
