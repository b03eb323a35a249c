use std::io;

/// Errors raised by samplers, solvers and pipelines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },

    #[error("block count mismatch: {left} vs {right}")]
    BlockCountMismatch { left: usize, right: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("eigensolver did not converge after {iterations} iterations (max residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("rank deficient: fewer than {requested} nonzero singular values")]
    RankDeficient { requested: usize },

    #[error("only {accepted} of {requested} pairwise-compatible candidate sets found among {survivors} survivors")]
    SelectionShortfall {
        accepted: usize,
        requested: usize,
        survivors: usize,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
