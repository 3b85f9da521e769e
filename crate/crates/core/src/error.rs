use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ground set size {size} outside 1..={cap}")]
    GroundSize { size: usize, cap: usize },
    #[error("element {element} outside ground set of size {size}")]
    ElementOutOfRange { element: usize, size: usize },
    #[error("basis family is empty")]
    EmptyBases,
    #[error("basis family violates the exchange axiom: {0}")]
    ExchangeAxiomViolation(String),
    #[error("invalid rank {r} for ground set of size {n}")]
    InvalidRank { r: usize, n: usize },
    #[error("flats are not comparable")]
    NotComparable,
    #[error("matroids live on different ground sets ({0} vs {1})")]
    GroundSetMismatch(usize, usize),
    #[error("subset {0:#b} is not a flat")]
    NotAFlat(u32),
    #[error("flat is empty or has rank zero")]
    EmptyFlat,
    #[error("flat {0:#b} is not a proper nonempty flat")]
    NotAProperFlat(u32),
    #[error("matroid has a loop")]
    LoopyMatroid,
    #[error("element is not homogeneous")]
    InhomogeneousElement,
    #[error("expected grade {expected}, found {found}")]
    WrongGrade { expected: usize, found: usize },
    #[error("expected {expected} sets, found {found}")]
    WrongArity { expected: usize, found: usize },
    #[error("empty set in a set family")]
    EmptySetMember,
    #[error("characteristic polynomial is not divisible by t - 1")]
    NonexactDivision,
    #[error("element is not of degree one")]
    NotDegreeOne,
    #[error("weight has dimension {0}, expected 0")]
    WrongDimension(usize),
    #[error("unknown variable {0:#b} for this alphabet")]
    UnknownVariable(u32),
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
