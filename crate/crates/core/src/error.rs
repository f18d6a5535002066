use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// Two eigenvalue groups are too close to be separated at the requested tolerance.
    #[error("ambiguous eigenvalue clustering: {first} and {second} are {gap:.3e} apart (threshold {threshold:.3e})")]
    AmbiguousClustering {
        first: Complex64,
        second: Complex64,
        gap: f64,
        threshold: f64,
    },

    #[error("numerical degeneracy: {what} (residual {residual:.3e})")]
    Degenerate { what: String, residual: f64 },

    #[error("eigenvalue {eigenvalue} has real part {:.3e} <= {threshold:.1e}; dilation generator must be strictly expanding", eigenvalue.re)]
    NonExpanding { eigenvalue: Complex64, threshold: f64 },

    #[error("root bracket left [1e-60, 1e60] while evaluating the gauge of {point:?}")]
    BracketOverflow { point: Vec<f64> },

    #[error("unsupported dimension {0}; surface quadrature is implemented for n = 2 and n = 3")]
    UnsupportedDimension(usize),

    #[error("non-finite integrand value at {location:?}")]
    NonFinite { location: Vec<f64> },

    #[error("quadrature budget of {budget} nodes exceeded; achieved error estimate {achieved:.3e}")]
    BudgetExceeded { budget: usize, achieved: f64 },

    #[error("exponent budget failed validation: {0}; increase the exponent slack")]
    ExponentSlack(String),

    #[error("degenerate direction: envelope quantity vanishes ({0})")]
    DegenerateDirection(String),

    #[error("level-set truncation at M = {m_max} leaves tail mass {tail_mass:.3e} (relative {relative:.3e})")]
    Truncation {
        m_max: usize,
        tail_mass: f64,
        relative: f64,
    },

    #[error("phase partition needs {count} pieces, more than the limit {limit}")]
    PathologicalPhase { count: usize, limit: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
