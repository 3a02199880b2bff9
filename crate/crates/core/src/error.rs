use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid cut: {0}")]
    InvalidCut(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("mesh budget exceeded: {vertices} vertices needed, cap is {cap} (use a larger h or a smaller grid)")]
    BudgetExceeded { vertices: usize, cap: usize },

    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("cut is not aligned with mesh edges: {0}")]
    CutNotAligned(String),

    #[error("inverted element {0}")]
    InvertedElement(usize),

    #[error("empty system after boundary elimination")]
    EmptySystem,

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("eigensolver did not converge: {converged} of {wanted} pairs, worst residual {worst:e}")]
    NotConverged { converged: usize, wanted: usize, worst: f64 },

    #[error("ambiguous symmetry classification (correlation {0:.3})")]
    Ambiguous(f64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Factorization(_) | Error::NotConverged { .. } | Error::Mesh(_) | Error::InvertedElement(_) => 2,
            Error::Parse(_) => 1,
            _ => 3,
        }
    }
}
