use thiserror::Error;

/// Errors shared across the crate.
///
/// Scalar payloads are reported as `f64` regardless of the working precision.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A square root in one of the spectral formulas received a negative
    /// radicand: the parameter set is unphysical for the requested sector.
    #[error("negative radicand in {quantity}: {value}")]
    NegativeRadicand { quantity: &'static str, value: f64 },

    /// Argument outside the valid domain of a special function or eigenfunction.
    #[error("domain error in {context}: {message}")]
    Domain {
        context: &'static str,
        message: String,
    },

    /// The grid does not map onto itself under the requested reflection.
    #[error("grid is not symmetric under {0}")]
    AsymmetricGrid(&'static str),

    /// Parity label disagrees with the spectral constants it is paired with.
    #[error("inconsistent parity: {0}")]
    InconsistentParity(String),

    /// The auxiliary trajectory left the admissible region.
    #[error("auxiliary trajectory blew up at t = {t}: rho = {rho}")]
    BlowUp { t: f64, rho: f64 },

    /// Two fields or states live on different grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// The tridiagonal factorization hit a vanishing pivot.
    #[error("singular tridiagonal solve at row {row}")]
    SingularSolve { row: usize },

    /// An overlap was requested against a numerically zero state.
    #[error("zero state in {0}")]
    ZeroState(&'static str),

    /// Malformed tabulated profile data.
    #[error("invalid table: {0}")]
    InvalidTable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
