use thiserror::Error;

use crate::corr_er::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("model specification invalid: {}", format_violations(.0))]
    InvalidSpec(Vec<Violation>),

    #[error(
        "infeasible correlation {rho} for marginals ({p_marginal}, {q_marginal}): \
         bound is {bound}{context}"
    )]
    InfeasibleCorrelation {
        p_marginal: f64,
        q_marginal: f64,
        rho: f64,
        bound: f64,
        context: String,
    },

    #[error("dimension mismatch in {op}: {left} vs {right}")]
    Dimension {
        op: &'static str,
        left: usize,
        right: usize,
    },

    #[error("non-finite entries in input matrix")]
    NonFinite,

    #[error("{0} did not converge")]
    NoConvergence(&'static str),

    #[error("problem size {n} exceeds the exact-enumeration limit {max}")]
    SizeLimit { n: usize, max: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("self-loop at line {line}: vertex {vertex} (graphs are loop-free)")]
    SelfLoop { line: usize, vertex: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_violations(violations: &[Violation]) -> String {
    let shown: Vec<String> = violations.iter().take(3).map(|v| v.to_string()).collect();
    if violations.len() > 3 {
        format!("{} (+{} more)", shown.join("; "), violations.len() - 3)
    } else {
        shown.join("; ")
    }
}

impl Error {
    pub fn dimension(op: &'static str, left: usize, right: usize) -> Self {
        Error::Dimension { op, left, right }
    }
}
