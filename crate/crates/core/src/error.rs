use thiserror::Error;

/// Errors raised by the library operations.
///
/// Every message names the condition that failed so reports stay
/// self-explanatory without looking at the source.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter or descriptor outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),

    /// Parameters not covered by any row of the optimal-target tables.
    #[error("not covered by the case table: {0}")]
    NotCovered(String),

    /// An iterative procedure (ball means, bisection) did not converge.
    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),

    /// A bracket handed to a root finder does not enclose the target.
    #[error("bracket violation at the {endpoint} endpoint: F({x}) = {value}, target {target}")]
    Bracket {
        endpoint: &'static str,
        x: f64,
        value: f64,
        target: f64,
    },

    /// An integral that must be finite diverges.
    #[error("divergent integral: {0}")]
    Divergent(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn divergent(msg: impl Into<String>) -> Self {
        Error::Divergent(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
