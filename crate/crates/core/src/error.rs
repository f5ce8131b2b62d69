use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("a measure space needs at least one atom")]
    EmptySpace,

    #[error("weight of atom {index} is {weight}, expected a strictly positive value")]
    NonPositiveWeight { index: usize, weight: String },

    #[error("weights sum to {sum}, expected exactly 1")]
    WeightSum { sum: String },

    #[error("duplicate atom id `{0}`")]
    DuplicateAtom(String),

    #[error("{what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid metric type: {0}")]
    InvalidMetricType(String),

    #[error("invalid rational `{0}`: expected `p/q` in lowest terms with q > 0")]
    InvalidRational(String),

    #[error("value {value} is not attained on a set of positive mass")]
    ZeroMassValue { value: String },

    #[error("enumeration needs {required} tuples, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },

    #[error("corner sizes differ: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("prefix depth {depth} exceeds matrix side {size}")]
    DepthExceedsMatrix { depth: usize, size: usize },

    #[error(
        "cell (row class {row_class}, column class {col_class}) has majority share {share}, \
         below threshold {threshold}; increase the depth"
    )]
    AmbiguousCell {
        row_class: usize,
        col_class: usize,
        share: String,
        threshold: String,
    },

    #[error("{candidates} candidate permutations in a single class exceed the search limit {limit}")]
    SearchLimit { candidates: u128, limit: u128 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
