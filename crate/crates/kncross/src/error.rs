use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("truncation order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("marker sets differ")]
    MarkerMismatch,
    #[error("series has zero constant term")]
    ZeroConstantTerm,
    #[error("inner series has nonzero constant term")]
    NonzeroInnerConstant,
    #[error("outer series order {have} too small, need {need}")]
    InsufficientOrder { have: usize, need: usize },
    #[error("series has zero linear coefficient")]
    ZeroLinearCoefficient,
    #[error("ODE has no nonzero coefficient polynomial")]
    DegenerateOde,
    #[error("leading recurrence coefficient vanishes at n = {n}")]
    LeadingZero { n: i64 },
    #[error("recurrence needs {needed} initial terms, got {got}")]
    NotEnoughInitialTerms { needed: usize, got: usize },
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("n = {n} exceeds the oracle limit {limit}")]
    OracleLimit { n: usize, limit: usize },
    #[error("diagram is not a shape")]
    NotAShape,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("no sign change in [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("root iteration did not converge")]
    NoConvergence,
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("distribution is empty")]
    EmptyDistribution,
    #[error("distribution is degenerate")]
    Degenerate,
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
