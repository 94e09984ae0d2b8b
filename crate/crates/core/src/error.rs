use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong between parsing an equation and handing back
/// a closed-form solution.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown symbol `{symbol}` at byte {offset}")]
    UnknownSymbol { offset: usize, symbol: String },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("QR iteration failed to converge for eigenvalue index {index} after {iterations} iterations")]
    NoConvergence { index: usize, iterations: usize },

    #[error("Jordan chain construction failed: {0} (try adjusting the rank or cluster tolerance)")]
    Chain(String),

    #[error("realification left an imaginary residual of {residual:e} in the similarity matrix (conjugate chains mismatched)")]
    Pairing { residual: f64 },

    #[error("structure error: {0}")]
    Structure(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("integration overflowed at x = {x}")]
    Overflow { x: f64 },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// True for errors caused by malformed input rather than numerical trouble.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Syntax { .. }
                | Error::UnknownSymbol { .. }
                | Error::InvalidProblem(_)
                | Error::Shape(_)
                | Error::Domain(_)
        )
    }
}
