use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-canonical bit sequence: trailing digit must be 1")]
    TrailingZero,
    #[error("invalid binary digit {0} (expected 0 or 1)")]
    InvalidDigit(u8),
    #[error("value {0} lies outside [0, 1]")]
    OutOfUnitInterval(String),
    #[error("cannot parse dyadic literal {0:?}")]
    ParseDyadic(String),
    #[error("class is empty")]
    EmptyClass,
    #[error("class parameters must be strictly increasing (violated at index {index})")]
    NotIncreasing { index: usize },
    #[error("true index {index} out of range for class of size {len}")]
    BadTrueIndex { index: usize, len: usize },
    #[error("complexity must be non-negative and finite, got {0}")]
    BadComplexity(f64),
    #[error("no complexity given for parameter {0}")]
    MissingComplexity(String),
    #[error("assignment declared sub-Kraft but Σ 2^-Kw = {0} > 1")]
    KraftViolated(f64),
    #[error("{what} = {value} exceeds the limit {limit}")]
    TooLarge { what: &'static str, value: u64, limit: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parameter {0} is not in the class")]
    NotInClass(String),
    #[error("posterior weights vanished")]
    PosteriorUnderflow,
    #[error("construction undefined for true parameter at the boundary {0}")]
    BoundaryTruth(String),
    #[error("series needs about {needed:.3e} terms for z = {z}; use z >= {min_feasible_z:.3e}")]
    SeriesTooLong { z: f64, needed: f64, min_feasible_z: f64 },
    #[error("estimated cost {estimate:.3e} exceeds the compute budget {budget:.3e}")]
    OverBudget { estimate: f64, budget: f64 },
    #[error("oracle needs exact dyadic values and integral complexities: {0}")]
    NotExact(String),
    #[error("map is not injective on the grid: phi({0}) and phi({1}) collide")]
    NotInjective(String, String),
    #[error("map leaves [0, 1] at t = {0}")]
    MapOutOfRange(String),
    #[error("no derivative order up to {degree} satisfies the growth condition at t0")]
    NoQualifyingOrder { degree: usize },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
