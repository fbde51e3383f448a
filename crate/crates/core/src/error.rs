use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument x = {0} is outside the domain x > 0")]
    Domain(f64),

    #[error(
        "quadrature did not reach tolerance {tol:e} within {budget} subdivisions (estimated error {estimate:e})"
    )]
    Convergence {
        tol: f64,
        estimate: f64,
        budget: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "branch continuation is ambiguous near r = {radius} (grid too coarse or exceptional point)"
    )]
    TrackingAmbiguity { radius: f64 },

    #[error("eigenvalue iteration did not converge after {iterations} sweeps")]
    NoConvergence { iterations: usize },

    #[error("matrix dimension {dim} exceeds the oracle cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("eigenvector residual {residual:e} exceeds tolerance {tol:e}")]
    Residual { residual: f64, tol: f64 },

    #[error("eigensystem is near-defective (bilinear norm {norm:e})")]
    NearDefective { norm: f64 },

    #[error("only {found} usable {what} points, at least {needed} required")]
    InsufficientPoints {
        what: &'static str,
        found: usize,
        needed: usize,
    },
}
