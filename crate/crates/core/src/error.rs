use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("N must be odd (got {0})")]
    EvenModulus(u64),
    #[error("N must be at least 15 (got {0})")]
    ModulusTooSmall(u64),
    #[error("N must be composite (got prime {0})")]
    PrimeModulus(u64),
    #[error("instance needs {needed} qubits, more than the supported {max}")]
    TooManyQubits { needed: usize, max: usize },
    #[error("no factorization found in the register of N = {0}; qubit sizing is inconsistent")]
    NoSolutions(u64),
    #[error("basis index {index} out of range for {qubits} qubits")]
    IndexOutOfRange { index: u64, qubits: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("Pauli term of weight {0} exceeds the supported maximum of 4")]
    UnsupportedWeight(u32),
    #[error("probabilities sum to {0}, not 1")]
    Unnormalized(f64),
    #[error("probability {0} is negative")]
    NegativeProbability(f64),
    #[error("cannot normalize an all-zero spectrum")]
    ZeroSpectrum,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}
