use thiserror::Error;

/// Every failure the laboratory can report.
///
/// Variants carry enough context to print a useful message; the FFI layer
/// maps each variant onto a stable integer status code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vector cutoff is not timelike (sigma^mu sigma_mu = {inner})")]
    NonTimelike { inner: f64 },

    #[error("vector cutoff time component must be positive, got {t}")]
    NegativeTimeComponent { t: f64 },

    #[error("scalar cutoff {sigma_scalar} must be below sigma_bar = {sigma_bar}")]
    SigmaTooLarge { sigma_scalar: f64, sigma_bar: f64 },

    #[error("scalar cutoff must be non-negative, got {0}")]
    NegativeSigma(f64),

    #[error("boost direction must be a unit 2-vector, |d| = {norm}")]
    BadDirection { norm: f64 },

    #[error("non-finite component in {0}")]
    NonFinite(&'static str),

    #[error("quadrature did not converge: estimate {value}, error {abs_error} after {evaluations} evaluations")]
    NoConvergence {
        value: f64,
        abs_error: f64,
        evaluations: usize,
    },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("too close to the mode-sum pole: (sigma_bar - Sigma) pi / a = {x:e} < {min:e}")]
    NearPole { x: f64, min: f64 },

    #[error("mode sum needs l = {needed} terms but the cap is {cap}")]
    TailTooFat { needed: usize, cap: usize },

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
