use thiserror::Error;

/// Errors raised by the Maslov engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MaslovError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("degenerate frame: |wedge|^2 = {value:e} below threshold {threshold:e}")]
    DegenerateFrame { value: f64, threshold: f64 },
    #[error("matrix is not Hermitian (relative residual {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("phase jump {jump:.4} rad at sample {index} exceeds pi/2; refine the loop sampling")]
    NeedRefinement { index: usize, jump: f64 },
    #[error("sample {index} has vanishing modulus")]
    ZeroSample { index: usize },
    #[error("unsupported surface kind: {0}")]
    UnsupportedKind(String),
    #[error("refinement level {level} outside [0, {max}]")]
    InvalidRefinement { level: usize, max: usize },
    #[error("invalid surface: {0}")]
    InvalidSurface(String),
    #[error("non-finite field value at ({x}, {y}, {z})")]
    NonFiniteField { x: f64, y: f64, z: f64 },
    #[error("field is not antisymmetric in its tangent arguments (residual {residual:e})")]
    NotAntisymmetric { residual: f64 },
    #[error("finite-difference step {step:e} below 1e-9")]
    StepUnderflow { step: f64 },
    #[error("connection is not unitary for the metric (residual {residual:e})")]
    NotUnitary { residual: f64 },
    #[error("no coordinate subspace keeps the projected determinant away from zero")]
    ProjectionDegenerate,
    #[error("unsupported input: {0}")]
    UnsupportedInput(String),
    #[error("singular metric at chart point")]
    SingularMetric,
    #[error("boundary leaves the constraint (distance {distance:e})")]
    BoundaryOffConstraint { distance: f64 },
    #[error("constraint carries no analytic mean curvature")]
    MissingAnalyticH,
    #[error("routes disagree: spread {spread:e} exceeds {limit:e}")]
    RouteDisagreement { spread: f64, limit: f64 },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid constraint: {0}")]
    InvalidConstraint(String),
    #[error("immersion degenerates (rank < 2) near ({x}, {y}, {z})")]
    NotImmersed { x: f64, y: f64, z: f64 },
}

pub type Result<T, E = MaslovError> = std::result::Result<T, E>;
