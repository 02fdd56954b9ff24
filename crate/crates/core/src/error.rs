use thiserror::Error;

/// Errors raised while building or evaluating distributions, orders and functionals.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input")]
    Empty,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("non-finite number in input")]
    NonFinite,
    #[error("weight #{index} is not positive: {weight}")]
    NonPositiveWeight { index: usize, weight: f64 },
    #[error("weights sum to {0}, expected 1")]
    WeightSum(f64),
    #[error("invalid quantile function: {0}")]
    InvalidQuantile(String),
    #[error("invalid piecewise-linear function: {0}")]
    InvalidPiecewiseLinear(String),
    #[error("{name} = {value} lies outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("function is not concave")]
    NotConcave,
    #[error("function is not convex")]
    NotConvex,
    #[error("integrated function must vanish at 1, found {0}")]
    NonZeroAtOne(f64),
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("relation `{0}` is not supported by this operation")]
    UnsupportedRelation(String),
    #[error("convex-order supremum needs equal means, found {min} and {max}")]
    UnequalMeans { min: f64, max: f64 },
    #[error("invalid penalty curve: {0}")]
    InvalidCurve(String),
    #[error("penalty family decreases between levels {lower} and {upper} near u = {u}")]
    NonMonotoneFamily { lower: f64, upper: f64, u: f64 },
    #[error("acceptance set for level #{0} is not contained in the next level")]
    NotNested(usize),
    #[error("functional `{spec}` does not belong to relation `{relation}`")]
    RelationMismatch { spec: String, relation: String },
    #[error("partition oracle needs {found} grid points, limit is {limit}")]
    GridTooLarge { found: usize, limit: usize },
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("unknown check or suite `{0}`")]
    UnknownCheck(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
