use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("Dirac matrix index {0} out of range, expected 1..=3")]
    IndexOutOfRange(usize),

    #[error("mass must be positive and finite, got {0}")]
    InvalidMass(f64),

    #[error("kernel evaluated at zero offset")]
    ZeroOffset,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("non-triangular face at line {0}")]
    NonTriangularFace(usize),

    #[error("degenerate triangle {face} (area {area:e})")]
    DegenerateTriangle { face: usize, area: f64 },

    #[error("mesh has no panels")]
    EmptyMesh,

    #[error("invalid mesh spec `{0}`")]
    MeshSpec(String),

    #[error("subdivision level {level} exceeds guard {max}")]
    LevelGuard { level: u32, max: u32 },

    #[error("panel count {count} exceeds guard {max}")]
    PanelGuard { count: usize, max: usize },

    #[error("coincident centroids at panels {0} and {1}")]
    CoincidentCentroids(usize, usize),

    #[error("operators were assembled on different meshes (`{0}` vs `{1}`)")]
    MeshMismatch(String, String),

    #[error("tau is numerically singular: condition number {condition:e} exceeds {guard:e} ({context})")]
    SingularTau {
        condition: f64,
        guard: f64,
        context: String,
    },

    #[error(
        "Neumann bound violated: |omega| = {omega_norm:.6}, 1/2 + |c| + |C| = {factor:.6}, product {product:.6} >= 1"
    )]
    NeumannBound {
        omega_norm: f64,
        factor: f64,
        product: f64,
    },

    #[error("potential kind {0} is not supported by this construction")]
    UnsupportedPotential(String),

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("empty lambda range [{0}, {1}]")]
    EmptyRange(f64, f64),

    #[error("density has no component in the kernel of the symbol")]
    NoKernelComponent,

    #[error("point lies on the sphere or at the origin (|x| = {0})")]
    SingularPoint(f64),

    #[error("evaluation point is {distance:e} from panel {panel}, below the {limit:e} limit")]
    TooClose {
        panel: usize,
        distance: f64,
        limit: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
