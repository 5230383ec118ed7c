use thiserror::Error;

/// Errors produced by the numerical kernels.
///
/// Variants split into two families: input validation ([`Error::is_numerical`]
/// returns `false`) and numerical failure (`true`). The CLI maps them to
/// different exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value at grid index {index:?}")]
    NonFinite { index: [usize; 3] },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular metric at grid index {index:?} (det = {det:e})")]
    SingularMetric { index: [usize; 3], det: f64 },

    #[error("metric not positive definite at grid index {index:?}")]
    NotPositiveDefinite { index: [usize; 3] },

    #[error("near-singular deformation gradient at grid index {index:?} (det F = {det:e})")]
    SingularDeformation { index: [usize; 3], det: f64 },

    #[error("incompatible right-hand side: mean {mean:e} exceeds tolerance on a periodic grid")]
    IncompatibleRhs { mean: f64 },

    #[error("solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("normal-coordinate neighbourhood too small: radius {radius:e} excludes every node but the origin")]
    NeighborhoodTooSmall { radius: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("integrator failure at x = {x}, last good value {value}")]
    Integrator { x: f64, value: f64 },
}

impl Error {
    /// True when the error reports a numerical failure rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularMetric { .. }
                | Error::NotPositiveDefinite { .. }
                | Error::SingularDeformation { .. }
                | Error::NotConverged { .. }
                | Error::NeighborhoodTooSmall { .. }
                | Error::Integrator { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
