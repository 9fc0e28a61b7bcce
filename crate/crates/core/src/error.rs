use alloc::string::String;
use core::fmt;

/// Errors raised by the library. Every variant has a stable machine code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    AlgebraMismatch,
    DimensionMismatch { expected: usize, found: usize },
    IndexOutOfRange { index: usize, bound: usize },
    InvalidInput(String),
    FlagViolated(String),
    UnsupportedVariety(String),
    NotNilpotent,
    NotSquare { equations: usize, unknowns: usize },
    SingularJacobian,
    RankDeficient { rank: usize, required: usize },
    HypothesisViolated(String),
    UnsupportedField(String),
    NotLie,
    NotSolvable,
    PositiveCharacteristic,
    NotAutomorphism,
    InfiniteIndex,
    NonIntegralLattice,
    NotInvertible,
    NotMember(String),
    CheckFailed(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::AlgebraMismatch => "AlgebraMismatch",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::InvalidInput(_) => "InvalidInput",
            Error::FlagViolated(_) => "FlagViolated",
            Error::UnsupportedVariety(_) => "UnsupportedVariety",
            Error::NotNilpotent => "NotNilpotent",
            Error::NotSquare { .. } => "NotSquare",
            Error::SingularJacobian => "SingularJacobian",
            Error::RankDeficient { .. } => "RankDeficient",
            Error::HypothesisViolated(_) => "HypothesisViolated",
            Error::UnsupportedField(_) => "UnsupportedField",
            Error::NotLie => "NotLie",
            Error::NotSolvable => "NotSolvable",
            Error::PositiveCharacteristic => "PositiveCharacteristic",
            Error::NotAutomorphism => "NotAutomorphism",
            Error::InfiniteIndex => "InfiniteIndex",
            Error::NonIntegralLattice => "NonIntegralLattice",
            Error::NotInvertible => "NotInvertible",
            Error::NotMember(_) => "NotMember",
            Error::CheckFailed(_) => "CheckFailed",
        }
    }

    /// Errors that state a mathematical negative result rather than a
    /// violated precondition.
    pub fn is_negative_result(&self) -> bool {
        matches!(
            self,
            Error::NotNilpotent | Error::NotSolvable | Error::InfiniteIndex
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::AlgebraMismatch => write!(f, "operands belong to different algebras"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "expected dimension {expected}, found {found}")
            }
            Error::IndexOutOfRange { index, bound } => {
                write!(f, "index {index} out of range (< {bound})")
            }
            Error::InvalidInput(s) => write!(f, "invalid input: {s}"),
            Error::FlagViolated(s) => write!(f, "declared flag does not hold: {s}"),
            Error::UnsupportedVariety(s) => write!(f, "unsupported variety {s:?}"),
            Error::NotNilpotent => write!(f, "algebra is not nilpotent"),
            Error::NotSquare {
                equations,
                unknowns,
            } => {
                write!(f, "system has {equations} equations in {unknowns} unknowns")
            }
            Error::SingularJacobian => write!(f, "Jacobian matrix is singular"),
            Error::RankDeficient { rank, required } => {
                write!(
                    f,
                    "Jacobian rank {rank} is below the number of equations {required}"
                )
            }
            Error::HypothesisViolated(s) => write!(f, "hypothesis violated: {s}"),
            Error::UnsupportedField(s) => write!(f, "unsupported field: {s}"),
            Error::NotLie => write!(f, "algebra is not a Lie algebra"),
            Error::NotSolvable => write!(f, "algebra is not solvable"),
            Error::PositiveCharacteristic => write!(f, "operation needs characteristic zero"),
            Error::NotAutomorphism => write!(f, "matrix is not an automorphism"),
            Error::InfiniteIndex => write!(f, "subgroup has infinite index"),
            Error::NonIntegralLattice => write!(f, "coordinates leave the integral lattice"),
            Error::NotInvertible => write!(f, "leading coefficient is zero"),
            Error::NotMember(s) => write!(f, "not a member: {s}"),
            Error::CheckFailed(s) => write!(f, "internal check failed: {s}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
