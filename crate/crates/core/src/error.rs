use qrw_poly::PolyError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QrwError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("I - S is singular; Cayley transform undefined")]
    SingularCayley,
    #[error("matrix is singular")]
    Singular,
    #[error("input matrix is not skew: {0}")]
    NotSkew(String),
    #[error("operation needs an exact coin")]
    NonExactCoin,
    #[error("exact symbolic work needs a real coin; entry ({0},{1}) is complex")]
    ComplexCoin(usize, usize),
    #[error("operation needs dimension {expected}, spec has d = {got}")]
    Dimension { expected: &'static str, got: usize },
    #[error("resource guard: {0}")]
    ResourceGuard(String),
    #[error("profile slice is empty")]
    EmptyProfile,
    #[error("no lattice points in the scaling window")]
    EmptyWindow,
    #[error("|y Q_y| = {0:e} is below tolerance; Gauss map undefined")]
    NearSingularFiber(f64),
    #[error("point is off the variety: |Q| = {0:e}")]
    NotOnVariety(f64),
    #[error("degenerate direction: curvature {0:e} at a critical point")]
    DegenerateDirection(f64),
    #[error("kernel is not smooth on the torus: {0}")]
    SmoothnessFailed(String),
    #[error("fiber tracking ambiguous: {0}")]
    TrackingAmbiguity(String),
    #[error("spec ids differ: {0} vs {1}")]
    SpecMismatch(String, String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl QrwError {
    /// Process exit code: 1 configuration, 2 resource exhaustion, 3 analysis.
    pub fn exit_code(&self) -> i32 {
        match self {
            QrwError::Config(_)
            | QrwError::Io(_)
            | QrwError::Json(_)
            | QrwError::NotSkew(_)
            | QrwError::Dimension { .. }
            | QrwError::NonExactCoin
            | QrwError::ComplexCoin(..)
            | QrwError::SpecMismatch(..) => 1,
            QrwError::ResourceGuard(_) | QrwError::Poly(PolyError::ResourceExhausted(_)) => 2,
            QrwError::Poly(PolyError::Parse(_)) => 1,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, QrwError>;
