use thiserror::Error;

/// Errors raised by the solvers and domain constructors.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid profit table: {0}")]
    InvalidProfit(String),

    #[error("closed form not applicable: {0}")]
    NotApplicable(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("size guard exceeded: {0}")]
    GuardExceeded(String),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("iteration cap of {cap} reached (lower bound {lower}, upper bound {upper})")]
    IterationCap {
        cap: usize,
        lower: String,
        upper: String,
    },

    #[error("column generation produced a repeated payoff profile at iteration {0}")]
    RepeatedColumn(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, GameError>;
