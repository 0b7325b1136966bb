use thiserror::Error;

use crate::explorer::SemigroupSnapshot;

/// Errors raised across the library.
///
/// Indices carried in variants are 1-based, matching every external format.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("matrix has no rows")]
    Empty,
    #[error("negative entry at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize },
    #[error("row {row} sums to {sum}, expected 1")]
    RowSumNotOne { row: usize, sum: String },
    #[error("column {col} sums to {sum}, expected 1")]
    ColSumNotOne { col: usize, sum: String },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid simplex vector: {0}")]
    InvalidVector(String),
    #[error("cannot parse rational {0:?}")]
    ParseRational(String),
    #[error("invalid generator set: {0}")]
    InvalidGenerators(String),
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("empty word")]
    EmptyWord,
    #[error("dimension {n} exceeds the configured limit {limit}")]
    DimensionTooLarge { n: usize, limit: usize },
    #[error("dimension {0} is too small")]
    DimensionTooSmall(usize),
    #[error("epsilon {eps} is outside (0, {max}]")]
    EpsilonOutOfRange { eps: String, max: String },
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("vector does not majorize the target")]
    NotMajorized,
    #[error("vectors do not form a majorization chain p > q > r")]
    ChainNotMajorized,
    #[error("generator {name:?} is not domestic: block sum over X={x:?}, Y={y:?} reaches {sum}")]
    NotDomestic {
        name: String,
        x: Vec<usize>,
        y: Vec<usize>,
        sum: String,
    },
    #[error("product did not converge within {iterations} iterations (residual {residual:e})")]
    NonConvergent {
        iterations: usize,
        residual: f64,
        last: Vec<Vec<f64>>,
        previous: Vec<Vec<f64>>,
    },
    #[error("{count} generators need 2^{count} subset checks; the limit is {limit}")]
    SubsetBudgetExceeded { count: usize, limit: usize },
    #[error("element budget of {budget} exhausted at depth {depth}")]
    BudgetExceeded {
        budget: usize,
        depth: usize,
        partial: Box<SemigroupSnapshot>,
    },
    #[error("no generator has an entry strictly between 0 and 1")]
    NoSubUnitEntry,
    #[error("factorization failed for {name:?}: {detail}")]
    FactorizationFailed { name: String, detail: String },
    #[error("invalid input: {0}")]
    Input(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// Stable machine-readable name for reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotSquare { .. } => "NotSquare",
            Error::Empty => "Empty",
            Error::NegativeEntry { .. } => "NegativeEntry",
            Error::RowSumNotOne { .. } => "RowSumNotOne",
            Error::ColSumNotOne { .. } => "ColSumNotOne",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::InvalidPartition(_) => "InvalidPartition",
            Error::InvalidPermutation(_) => "InvalidPermutation",
            Error::InvalidVector(_) => "InvalidVector",
            Error::ParseRational(_) => "ParseRational",
            Error::InvalidGenerators(_) => "InvalidGenerators",
            Error::UnknownGenerator(_) => "UnknownGenerator",
            Error::EmptyWord => "EmptyWord",
            Error::DimensionTooLarge { .. } => "DimensionTooLarge",
            Error::DimensionTooSmall(_) => "DimensionTooSmall",
            Error::EpsilonOutOfRange { .. } => "EpsilonOutOfRange",
            Error::OutOfRange(_) => "OutOfRange",
            Error::NotMajorized => "NotMajorized",
            Error::ChainNotMajorized => "ChainNotMajorized",
            Error::NotDomestic { .. } => "NotDomestic",
            Error::NonConvergent { .. } => "NonConvergent",
            Error::SubsetBudgetExceeded { .. } => "SubsetBudgetExceeded",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::NoSubUnitEntry => "NoSubUnitEntry",
            Error::FactorizationFailed { .. } => "FactorizationFailed",
            Error::Input(_) => "Input",
            Error::Internal(_) => "InternalError",
        }
    }

    /// True for outcomes that are mathematical answers rather than failures.
    pub fn is_negative_result(&self) -> bool {
        matches!(
            self,
            Error::NotDomestic { .. }
                | Error::NotMajorized
                | Error::ChainNotMajorized
                | Error::NonConvergent { .. }
        )
    }

    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::BudgetExceeded { .. } | Error::SubsetBudgetExceeded { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
