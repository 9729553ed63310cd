use thiserror::Error;

/// Errors produced by the tensor library and the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid tensor: {0}")]
    InvalidTensor(String),

    #[error("spectral tensor is not conjugate symmetric: imaginary residue {residue:e} exceeds {limit:e}")]
    SymmetryViolation { residue: f64, limit: f64 },

    #[error("SVD did not converge on spectral slice {slice}")]
    SvdFailure { slice: usize },

    #[error("{name} = {value} is out of range [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: usize,
        min: usize,
        max: usize,
    },

    #[error("input contract violated: {0}")]
    Contract(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("solver diverged: non-finite iterate at iteration {iteration}")]
    Divergence { iteration: usize },

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
