use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("dimension error: k = {k} exceeds code length {n_out}")]
    Dimension { k: usize, n_out: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("not enough erased positions: need {needed}, have {available}")]
    InsufficientErasures { needed: usize, available: usize },

    #[error("not enough unerased positions: need {needed}, have {available}")]
    InsufficientUnerasures { needed: usize, available: usize },

    #[error("state space too large: {atoms} atoms exceeds budget {budget}")]
    TooLarge { atoms: f64, budget: f64 },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("optimizer did not converge after {iterations} iterations (best value {best})")]
    NonConvergence { iterations: usize, best: f64 },

    #[error("invariant violated: {0}")]
    InvariantViolated(String),

    #[error("malformed transcript: {0}")]
    Transcript(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {p} is not in [0, 1]")))
    }
}
