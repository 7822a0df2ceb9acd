use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("point r = {r} lies outside the chart r > {r_min}")]
    OutOfChart { r: f64, r_min: f64 },
    #[error("finite-difference step {step} too large at r = {r}: need r - r_plus > {need}")]
    StepTooLarge { step: f64, r: f64, need: f64 },
    #[error("dimension n = {0} unsupported: complex structure needs n = 2 + 2k with k >= 1")]
    UnsupportedDimension(usize),
    #[error("profile has no positive root; the regularized chart does not exist")]
    NoHorizon,
    #[error("inversion of V failed: {0}")]
    Inversion(String),
    #[error("no convergence: {0}")]
    NonConvergent(String),
}

impl Error {
    /// True for failures of an iterative or limiting procedure rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonConvergent(_) | Error::Inversion(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
