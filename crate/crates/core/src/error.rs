use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("graph is disconnected")]
    DisconnectedGraph,
    #[error("degenerate graph: {0}")]
    DegenerateGraph(&'static str),
    #[error("edge `{0}` has non-positive length")]
    NonpositiveLength(String),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("invalid id `{0}`: ids must be non-empty and may not contain '#' or '@'")]
    InvalidId(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("offset {offset} is outside [0, {length}] on edge `{edge}`")]
    OffsetOutOfRange { edge: String, offset: String, length: String },
    #[error("point does not lie on the graph")]
    PointOffGraph,
    #[error("malformed set: {0}")]
    MalformedSet(String),
    #[error("sets live on different graphs or incompatible models")]
    ModelMismatch,
    #[error("the set is empty")]
    EmptySet,
    #[error("the target set is empty")]
    EmptyTargets,
    #[error("the set is the whole graph")]
    NotProper,
    #[error("the set is not convex and a complement segment is shorter than twice the firing distance")]
    NotConvex,
    #[error("firing distance {eps} exceeds the distance {limit} to the nearest branch point outside the set")]
    EpsTooLarge { eps: String, limit: String },
    #[error("firing distance must be positive")]
    NonpositiveEps,
    #[error("edge lengths are not all integers")]
    NonIntegerLengths,
    #[error("ground set of size {size} exceeds the exhaustive bound {bound}")]
    GroundSetTooLarge { size: usize, bound: usize },
    #[error("the requested solver backend was not compiled in")]
    SolverNotAvailable,
    #[error("degree {degree} is outside [0, {genus}]")]
    DegreeOutOfRange { degree: i64, genus: usize },
    #[error("divisor is not effective")]
    NotEffective,
    #[error("degrees differ: {0} vs {1}")]
    DegreeMismatch(i64, i64),
    #[error("enumeration too large: {0}")]
    TooLarge(String),
    #[error("reduction exceeded the iteration bound {bound}")]
    IterationBoundExceeded { bound: usize },
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Errors that can only arise from a bug, never from bad input.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(
            self,
            Error::IterationBoundExceeded { .. } | Error::InvariantViolation(_)
        )
    }
}
