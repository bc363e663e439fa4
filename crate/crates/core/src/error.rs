use thiserror::Error;

/// Every failure the library can report.
///
/// Variants are grouped by the module that raises them; [`Error::kind`] gives a
/// stable snake-case tag used in machine-readable error output.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    // qseries
    #[error("coefficient at exponent index {index} requested but series precision is {precision}")]
    QueryBeyondPrecision { index: i64, precision: i64 },
    #[error("malformed series: {0}")]
    MalformedSeries(String),

    // thetafit
    #[error("basis index {j} outside 0..={max}")]
    IndexOutOfRange { j: usize, max: usize },
    #[error("minimum norm {min_norm} overdetermines dimension {n} (at most {max} coefficients)")]
    Overdetermined { n: usize, min_norm: usize, max: usize },
    #[error("constraint system is inconsistent")]
    Inconsistent,
    #[error("constraint system leaves {free} coefficient(s) free: {unknowns:?}")]
    Underdetermined { free: usize, unknowns: Vec<usize> },
    #[error("solved series violates integrality: {0}")]
    IntegralityViolation(String),
    #[error("series precision {have} does not reach required exponent index {need}")]
    InsufficientPrecision { have: i64, need: i64 },
    #[error("constraint norm {0} is not on the quarter-integer grid")]
    OffGrid(String),

    // lattice
    #[error("gram matrix is not square or has inconsistent rank")]
    NotSquare,
    #[error("gram matrix is not symmetric")]
    NotSymmetric,
    #[error("gram matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("form is not integral")]
    NonIntegralForm,
    #[error("lattice is already even")]
    AlreadyEven,
    #[error("lattice is not unimodular")]
    NotUnimodular,
    #[error("rank {rank} exceeds enumeration cap {cap}")]
    RankCapExceeded { rank: usize, cap: usize },
    #[error("basis and gram disagree")]
    BasisGramMismatch,
    #[error("generators do not span a full-rank lattice")]
    RankDeficient,
    #[error("vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("malformed lattice: {0}")]
    MalformedLattice(String),

    // neighbor
    #[error("every basis vector has even inner product with x")]
    AllProductsEven,
    #[error("norm of x is {0}, not divisible by 4")]
    NormNotDivisibleBy4(String),
    #[error("inner product of x and y is even")]
    CompanionNotOdd,
    #[error("input lattice is not even unimodular")]
    NotEvenUnimodular,
    #[error("lattice has no vector of norm 8")]
    NoNorm8Vector,
    #[error("vector does not lie in the lattice")]
    NotInLattice,

    // z8code
    #[error("input is empty")]
    EmptyInput,
    #[error("row {row} is malformed: {reason}")]
    MalformedRow { row: usize, reason: String },
    #[error("digit {digit} in row {row} is outside 0..=7")]
    DigitOutOfRange { row: usize, digit: String },
    #[error("code length {0} is odd")]
    OddLength(usize),
    #[error("code has {size} codewords, above the enumeration cap {cap}")]
    SizeCapExceeded { size: String, cap: u64 },
    #[error("code is not self-orthogonal")]
    NotSelfOrthogonal,
    #[error("vectors do not form a frame: {0}")]
    NotAFrame(String),
    #[error("frame vector {0} is not in the lattice")]
    FrameNotInLattice(usize),
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::QueryBeyondPrecision { .. } => "query_beyond_precision",
            Error::MalformedSeries(_) => "malformed_series",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::Overdetermined { .. } => "overdetermined",
            Error::Inconsistent => "inconsistent",
            Error::Underdetermined { .. } => "underdetermined",
            Error::IntegralityViolation(_) => "integrality_violation",
            Error::InsufficientPrecision { .. } => "insufficient_precision",
            Error::OffGrid(_) => "off_grid",
            Error::NotSquare => "not_square",
            Error::NotSymmetric => "not_symmetric",
            Error::NotPositiveDefinite => "not_positive_definite",
            Error::NonIntegralForm => "non_integral_form",
            Error::AlreadyEven => "already_even",
            Error::NotUnimodular => "not_unimodular",
            Error::RankCapExceeded { .. } => "rank_cap_exceeded",
            Error::BasisGramMismatch => "basis_gram_mismatch",
            Error::RankDeficient => "rank_deficient",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::MalformedLattice(_) => "malformed_lattice",
            Error::AllProductsEven => "all_products_even",
            Error::NormNotDivisibleBy4(_) => "norm_not_divisible_by_4",
            Error::CompanionNotOdd => "companion_not_odd",
            Error::NotEvenUnimodular => "not_even_unimodular",
            Error::NoNorm8Vector => "no_norm8_vector",
            Error::NotInLattice => "not_in_lattice",
            Error::EmptyInput => "empty_input",
            Error::MalformedRow { .. } => "malformed_row",
            Error::DigitOutOfRange { .. } => "digit_out_of_range",
            Error::OddLength(_) => "odd_length",
            Error::SizeCapExceeded { .. } => "size_cap_exceeded",
            Error::NotSelfOrthogonal => "not_self_orthogonal",
            Error::NotAFrame(_) => "not_a_frame",
            Error::FrameNotInLattice(_) => "frame_not_in_lattice",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
