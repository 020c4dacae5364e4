use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at column {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown variable `{name}` at column {pos}")]
    UnknownVariable { name: String, pos: usize },

    #[error("variable `{name}` at column {pos} exceeds the variable count {n}")]
    VariableOutOfRange { name: String, pos: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("inadmissible weight vector: {0}")]
    InadmissibleWeight(String),

    #[error("reduction budget of {0} steps exceeded")]
    BudgetExceeded(u64),

    #[error("the zero operator has no Newton polygon")]
    ZeroOperator,

    #[error("polynomial involves derivative variables")]
    NotXOnly,

    #[error("ideal is not generated by monomials")]
    NotMonomial,

    #[error("invalid GKZ data: {0}")]
    InvalidGkz(String),

    #[error("series hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
