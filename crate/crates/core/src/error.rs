use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid subproblem: {0}")]
    InvalidSubproblem(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unsupported factor order {arity} at line {line} (only unary and pairwise factors)")]
    UnsupportedOrder { line: usize, arity: usize },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("projection error: {0}")]
    Projection(String),

    #[error("inconsistent primal: {0}")]
    InconsistentPrimal(String),

    #[error("no branchable node: every node has a single allowed label")]
    NoBranchableNode,

    #[error("i/o error: {0}")]
    Io(String),

    #[error("enumeration refused: {size} assignments exceeds the limit of {limit}")]
    TooLarge { size: f64, limit: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
