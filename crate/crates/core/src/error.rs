use thiserror::Error;

pub type Result<T> = std::result::Result<T, MilacError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MilacError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not symmetric (defect {defect:.3e} > tol {tol:.3e})")]
    Asymmetric { defect: f64, tol: f64 },

    #[error("near-singular system: reciprocal condition number {rcond:.3e} below {threshold:.1e}")]
    Singular { rcond: f64, threshold: f64 },

    #[error("response is not realizable: spectral norm {norm} exceeds 1 + {tol:e}")]
    InfeasibleResponse { norm: f64, tol: f64 },

    #[error("beamformer is not a member of the MiLAC set at the given powers (min eigenvalue {min_eig:.3e})")]
    NotMember { min_eig: f64 },

    #[error("channel is rank deficient (lambda_min/lambda_max = {ratio:.3e}); reduce the user set to rank(H) first")]
    RankDeficient { ratio: f64 },

    #[error("no convergence after {iterations} iterations: {what}")]
    NoConvergence { iterations: usize, what: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for MilacError {
    fn from(e: std::io::Error) -> Self {
        MilacError::Io(e.to_string())
    }
}
