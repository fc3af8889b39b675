use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown shape `{0}` (expected plane, circle-product, clifford-torus or cylinder)")]
    UnknownShape(String),

    #[error("invalid shape parameters for `{shape}`: n = {n}, k = {k}")]
    ShapeParams { shape: String, n: usize, k: usize },

    #[error("degenerate metric at u = {u:?}: condition number {condition:.3e}")]
    DegenerateMetric { u: Vec<f64>, condition: f64 },

    #[error("non-positive quadrature weight {weight:e} at node {node}")]
    NonPositiveWeight { node: usize, weight: f64 },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("axis {axis}: resolution {resolution} aliases basis (need at least {required})")]
    Aliasing {
        axis: usize,
        resolution: usize,
        required: usize,
    },

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },

    #[error("field is not normal at node {node}: tangential part {deviation:e}")]
    NonNormalField { node: usize, deviation: f64 },

    #[error("chart is not Lagrangian at node {node}: |<Je_i, e_j>| = {deviation:e}")]
    NonLagrangian { node: usize, deviation: f64 },

    #[error("chart `{0}` has no harmonic normal basis")]
    MissingHarmonicBasis(String),

    #[error("eigen-expansion residual {residual:e} exceeds tolerance {tolerance:e}")]
    PoorExpansion { residual: f64, tolerance: f64 },

    #[error("second variation is unbounded above in y (range defect {defect:e})")]
    UnboundedAbove { defect: f64 },

    #[error("finite-difference step {0:e} is too small")]
    StepUnderflow(f64),

    #[error("field `{0}` carries no jet of the required order")]
    MissingJet(String),
}

pub type Result<T> = std::result::Result<T, Error>;
