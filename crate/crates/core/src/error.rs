use thiserror::Error;

use crate::group::GroupVector;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {0} is outside the supported range 1..={max}", max = crate::group::MAX_DIM)]
    UnsupportedDimension(usize),

    #[error("digit {digit} at coordinate {coord} is not in 0..{modulus}")]
    InvalidDigit { digit: u32, coord: usize, modulus: u32 },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("result would hold {requested} elements, cap is {cap}")]
    TooLarge { requested: u128, cap: u128 },

    #[error("{0} is not a supported prime modulus")]
    InvalidPrime(u32),

    #[error("polynomial has degree {degree}, above the declared bound {bound}")]
    DegreeBound { degree: usize, bound: usize },

    #[error("degree bound {d} exceeds variable count {n}")]
    DegreeOutOfRange { d: usize, n: usize },

    #[error("epsilon {0} is outside the open interval (0, 1/4)")]
    EpsilonOutOfRange(String),

    #[error("invalid epsilon literal `{0}`")]
    InvalidEpsilon(String),

    #[error("argument {value} outside the domain of {what}")]
    Domain { what: &'static str, value: String },

    #[error("set is not progression-free: {0} + {1} = 2*{2}")]
    NotProgressionFree(GroupVector, GroupVector, GroupVector),

    #[error("invariant factors do not form a divisibility chain at position {0}")]
    ChainViolated(usize),

    #[error("gram entry ({row}, {col}) = {value} breaks the diagonal configuration")]
    GramPrecondition { row: usize, col: usize, value: u32 },

    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
