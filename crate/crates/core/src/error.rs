use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point index {index} out of range for a metric on {size} points")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("point kind does not match the metric context: {0}")]
    PointKind(String),

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("empty set where a nonempty one is required: {0}")]
    EmptySet(&'static str),

    #[error("unknown element {0}")]
    UnknownElement(usize),

    #[error("map is not order-preserving: {x} <= {y} but f({x}) is not <= f({y})")]
    NotOrderPreserving { x: usize, y: usize },

    #[error("assignment is partial: {got} images for {expected} elements")]
    PartialAssignment { expected: usize, got: usize },

    #[error("image {image:?} of element {element} is not an element of the target")]
    ImageNotInTarget { element: usize, image: Vec<u32> },

    #[error("spaces without set payloads: {0}")]
    NoSetPayload(&'static str),

    #[error("degree {degree} out of range (complex built to dimension {cap})")]
    DegreeOutOfRange { degree: usize, cap: usize },

    #[error("level {level} out of range (tower has {depth} levels)")]
    LevelOutOfRange { level: usize, depth: usize },

    #[error("empty bonding image at level {level}: element {element:?} has no points of A_{level} within ε")]
    EmptyImage { level: usize, element: Vec<u32> },

    #[error("bonding image at level {level} has diameter {diameter} >= 4ε = {bound}: {image:?}")]
    DiameterBound { level: usize, image: Vec<u32>, diameter: f64, bound: f64 },

    #[error("empty projection at level {level}: the point is not ε-covered")]
    EmptyProjection { level: usize },

    #[error("schedule rejected: {0}")]
    Schedule(String),

    #[error("coverage radius γ missing at level {0}")]
    MissingGamma(usize),

    #[error("resource cap exceeded: {what} needs {needed} > cap {cap}")]
    ResourceCap { what: String, needed: usize, cap: usize },

    #[error("integer overflow during {0}")]
    Overflow(&'static str),

    #[error("chain is not a cycle in degree {degree}")]
    NotACycle { degree: usize },

    #[error("induced maps need field coefficients, not integers")]
    NeedsField,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
