use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {op}: expected {expected}, got {found}")]
    DimensionMismatch {
        op: &'static str,
        expected: String,
        found: String,
    },

    /// The sign-vector enumeration for the interval 2-norm is exponential in `n`.
    #[error("dimension {n} exceeds the 2-norm enumeration threshold {max}; use the Frobenius norm")]
    DimensionTooLarge { n: usize, max: usize },

    #[error("interval exponential remainder diverges: theta = {theta} >= order + 2 = {limit}")]
    RemainderDiverges { theta: f64, limit: f64 },

    #[error("Kagstrom2 bound unavailable: matrix is defective or ill-conditioned (cond(S) = {cond:e})")]
    Defective { cond: f64 },

    #[error("largest singular value is not simple (sigma1 - sigma2 = {gap:e}); first-order sensitivity undefined")]
    DegenerateSv { gap: f64 },

    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("cell ({row}, {col}) out of range for a {n}x{n} matrix")]
    CellOutOfRange { row: usize, col: usize, n: usize },

    #[error("no cells given to distribute the perturbation budget over")]
    EmptyCells,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn mismatch(op: &'static str, expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch {
            op,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
