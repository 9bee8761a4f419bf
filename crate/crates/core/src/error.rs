use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// Hermite recurrence requested beyond the guarded depth.
    #[error("hermite recurrence depth {requested} exceeds guard {limit}")]
    DepthExceeded { requested: usize, limit: usize },

    /// A quadrature or truncation did not reach its tolerance.
    #[error("no convergence in {op}: {detail}")]
    NonConvergence { op: &'static str, detail: String },

    /// The Fano factor of a state with vanishing mean photon number.
    #[error("Fano factor undefined: mean photon number is {mean:.3e}")]
    UndefinedFano { mean: f64 },

    /// Cramér–Rao bound with zero Fisher information.
    #[error("Cramér–Rao bound is infinite (Fisher information {information})")]
    InfiniteBound { information: f64 },

    /// A probability fell below the roundoff clipping threshold.
    #[error("negative probability {value} at index {index}")]
    NegativeProbability { index: usize, value: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain { op, detail: detail.into() }
    }

    pub(crate) fn no_convergence(op: &'static str, detail: impl Into<String>) -> Self {
        Error::NonConvergence { op, detail: detail.into() }
    }
}
