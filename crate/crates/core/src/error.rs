use thiserror::Error;

/// Errors shared across the toolkit.
///
/// Operations validate their inputs up front and return one of these instead
/// of panicking; anything that reaches a numerical routine is assumed finite
/// and shape-checked.
#[derive(Debug, Error)]
pub enum CalcError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grids are incompatible: {0}")]
    GridMismatch(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("operator is not Hermitian (symmetry defect {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is numerically singular: {0}")]
    Singular(String),

    #[error("symbol does not provide derivatives: {0}")]
    MissingDerivative(String),

    #[error("operation requires a declared operator structure (multiplication, fourier multiplier, or weyl): {0}")]
    MissingStructure(String),

    #[error("requested window leaves the reliable data range: {0}")]
    Extrapolation(String),

    #[error("invalid path or ladder: {0}")]
    InvalidPath(String),

    #[error("coefficient field violates positivity: {0}")]
    Positivity(String),

    #[error("precondition rejected: {0}")]
    Precondition(String),

    #[error("did not converge: {0}")]
    NonConvergent(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, CalcError>;
