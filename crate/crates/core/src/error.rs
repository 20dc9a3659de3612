use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} exceeds the supported range (p <= 2^31)")]
    ModulusTooLarge(u64),
    #[error("operands belong to different fields (gf{0} vs gf{1})")]
    MixedFields(u64, u64),
    #[error("division by zero in gf{0}")]
    DivisionByZero(u64),
    #[error("index {index} out of range for dimension of size {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("nominal volume {volume} exceeds the configured cap {cap}")]
    VolumeCap { volume: u128, cap: u128 },
    #[error("enumeration needs {bits} bits at rank {r} (cap {cap}); out of the oracle's reach")]
    OracleInfeasible { bits: u64, r: usize, cap: u64 },
    #[error("oracle budget exhausted after {solves} solves (last fully searched rank: {searched_up_to})")]
    OracleBudget { solves: u64, searched_up_to: usize },
    #[error("hypothesis failure: {0} must be nondegenerate")]
    DegenerateInput(&'static str),
    #[error("invalid witness: {0}")]
    InvalidWitness(String),
    #[error("order {0} is even; only odd orders reshape to three-way tensors")]
    EvenOrder(usize),
    #[error("internal invariant violated: {0}")]
    Internal(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
