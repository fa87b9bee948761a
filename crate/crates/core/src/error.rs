use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("empty box on axis {axis}: lo must be strictly below hi")]
    EmptyBox { axis: usize },
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("scale entry on axis {axis} is zero")]
    ZeroScale { axis: usize },
    #[error("box straddles the coordinate hyperplane on axis {axis}; split it by quadrant first")]
    Straddle { axis: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("function vanishes identically")]
    ZeroFunction,
    #[error("dilation is not expansive (min |eigenvalue| = {min_modulus})")]
    NotExpansive { min_modulus: f64 },
    #[error("matrix is singular")]
    Singular,
    #[error("input must have unit L2 norm, got {norm}")]
    NotNormalized { norm: f64 },
    #[error("test function violates band limits: {0}")]
    BandLimit(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("index set is empty")]
    EmptyIndexSet,
    #[error("budget violated: {0}")]
    Budget(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
