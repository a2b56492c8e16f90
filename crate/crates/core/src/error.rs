use thiserror::Error;

/// Errors raised by the core library.
///
/// Structural problems (bad ids, mismatched shapes) are kept apart from
/// mathematical failures (a relation that does not hold, a twist pairing that
/// breaks antisymmetry) so callers can report them differently.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate arrow id `{0}`")]
    DuplicateArrow(String),
    #[error("arrow `{arrow}` refers to undeclared vertex `{vertex}`")]
    UnknownVertex { arrow: String, vertex: String },
    #[error("framing vertex `{0}` is not a vertex of the quiver")]
    UnknownFramingVertex(String),
    #[error("the quiver has no vertex besides the framing vertex")]
    NoGaugedVertices,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("moment map relation fails at vertices {0:?}")]
    RelationFailed(Vec<String>),
    #[error("no twist degree given for arrow `{0}`")]
    MissingTwist(String),
    #[error("twist degrees of `{arrow}` and its reverse sum to {sum}, expected {expected}")]
    TwistPairing { arrow: String, sum: i64, expected: i64 },
    #[error("framing rank {v0} is neither 0 nor dim K = {dim_k}")]
    FramingRank { v0: u32, dim_k: u32 },
    #[error("stability parameter must be positive, got {0}")]
    NonPositiveTau(String),
    #[error("class {0} is not framed")]
    NotFramed(String),
    #[error("class {0} is not unframed")]
    NotUnframed(String),
    #[error("support class {0} has zero total rank")]
    ZeroRankSupport(String),
    #[error("class {class} has {found} vertex entries, the shape has {expected} gauged vertices")]
    ClassArity { class: String, found: usize, expected: usize },
    #[error("index-set length must be at least 1")]
    ZeroLength,
    #[error("invariant table lacks values for {0:?}")]
    InsufficientTable(Vec<String>),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
