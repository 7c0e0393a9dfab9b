use thiserror::Error;

use crate::qmath::ProductStateParams;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: String, got: String },

    #[error("matrix is not Hermitian (max |M - M^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("density matrix trace is {trace}, expected 1")]
    NotUnitTrace { trace: f64 },

    #[error("density matrix has negative eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("degenerate state: cannot normalize a zero vector")]
    DegenerateState,

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal mass {off_diagonal:e})")]
    NoConvergence { sweeps: usize, off_diagonal: f64 },

    #[error("operator norm {norm} exceeds 1; not a sub-normalized Kraus operator")]
    OperatorNorm { norm: f64 },

    #[error("parameter {name} = {value} outside {range}")]
    ParameterRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("gate evaluation failed at {params:?}: {source}")]
    Evaluation {
        params: ProductStateParams,
        source: Box<Error>,
    },

    #[error("invalid request: {0}")]
    InvalidRequest(String),

    #[error(transparent)]
    Choi(#[from] crate::choi::ChoiError),
}

impl Error {
    pub(crate) fn at(self, params: ProductStateParams) -> Self {
        Error::Evaluation {
            params,
            source: Box::new(self),
        }
    }
}
