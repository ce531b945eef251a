use thiserror::Error;

use crate::maskit::RegionViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole at input: |cz + d| = {0:e}")]
    PoleAtInput(f64),
    #[error("singular matrix: |det| = {0:e}")]
    SingularMatrix(f64),
    #[error("transformation is not hyperbolic: |tr| = {0}")]
    NotHyperbolic(f64),
    #[error("point {0} is not in the open unit disk")]
    NotInterior(f64),
    #[error("coincident points")]
    CoincidentPoints,
    #[error("geodesics do not intersect inside the disk")]
    NoInteriorIntersection,
    #[error("arcs overlap or touch")]
    OverlappingArcs,
    #[error("degenerate arc of length {0:e}")]
    DegenerateArc(f64),

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("genus must be at least 2, got {0}")]
    InvalidGenus(usize),
    #[error("degenerate side {0}")]
    DegenerateSide(usize),
    #[error("polygon is not canonical: {0}")]
    NotCanonical(String),
    #[error("tessellation depth {0} exceeds 4")]
    DepthTooLarge(usize),

    #[error("non-positive length parameter {name} = {value}")]
    NonPositiveLength { name: &'static str, value: f64 },
    #[error("parameters outside the valid region: {0}")]
    InvalidRegion(RegionViolation),
    #[error("consecutive side geodesics {0} and {1} do not meet in the disk")]
    NonAdjacentSides(usize, usize),
    #[error("fixed points violate the P/Q ordering")]
    OrientationMismatch,
    #[error("unknown surface {0:?}")]
    UnknownSurface(String),

    #[error("A_{k} lies outside [P_{k}, Q_{k}]")]
    OutOfArc { k: usize },
    #[error("multi-parameter has {got} points, polygon needs {expected}")]
    ParameterLength { expected: usize, got: usize },
    #[error("diagonal input u = w")]
    DiagonalInput,
    #[error("orbit iterate within {0:e} of a discontinuity")]
    NumericalAmbiguity(f64),
    #[error("partition construction is not Markov: {0}")]
    NotMarkov(String),
    #[error("expected interval collapse at C_{k} = B_{k} missing (gap {gap:e})")]
    CollapseMismatch { k: usize, gap: f64 },
    #[error("partition variant {variant} does not apply to this multi-parameter")]
    VariantMismatch { variant: String },
    #[error("image endpoint is {0:e} from every partition point")]
    SnapFailure(f64),
    #[error("partition points are not strictly increasing around the circle")]
    PartitionOrder,

    #[error("matrix is not irreducible")]
    NotIrreducible,
    #[error("Perron eigenvalue {0} does not exceed 1")]
    NotExpanding(f64),
    #[error("power iteration did not converge (residual {0:e})")]
    NoConvergence(f64),
    #[error("evaluation depth {0} exceeds 60")]
    EvalDepthTooLarge(usize),
    #[error("conjugacies use different anchors")]
    AnchorMismatch,
    #[error("quadrature failed: estimated error {0:e}")]
    QuadratureFailure(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
