use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    // graph construction
    #[error("edge ({u}, {v}) has non-positive or non-finite weight {w}")]
    NonPositiveWeight { u: u64, v: u64, w: f64 },
    #[error("self-loop on vertex {0}")]
    SelfLoop(u64),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(u64, u64),
    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    // vertex sets and partitions
    #[error("vertex sets overlap")]
    OverlappingSets,
    #[error("vertex set is empty")]
    EmptySet,
    #[error("parts do not form a partition of the vertex set: {0}")]
    IncompletePartition(String),
    #[error("cut is trivial (empty or full side)")]
    TrivialCut,

    // size-limited oracles
    #[error("input of size {size} exceeds the limit {limit} for {what}")]
    TooLarge { what: &'static str, size: usize, limit: usize },
    #[error("graph is disconnected")]
    Disconnected,

    // spectral
    #[error("eigensolver did not converge; residuals {residuals:?}")]
    NoConvergence { residuals: Vec<f64> },
    #[error("requested {requested} eigenpairs of a {n}-vertex graph")]
    RankDeficient { requested: usize, n: usize },
    #[error("spectrum holds {available} vectors, {requested} requested")]
    InsufficientVectors { requested: usize, available: usize },
    #[error("k = {k} is invalid for {n} points")]
    KTooLarge { k: usize, n: usize },
    #[error("cluster count k = {0} is invalid here (need 2 <= k <= n)")]
    BadClusterCount(usize),

    // trees
    #[error("vertex {0} is not a leaf of the tree")]
    UnknownVertex(usize),
    #[error("tree leaves do not match the graph vertices: {0}")]
    LeafMismatch(String),
    #[error("leaf set is empty")]
    EmptyLeafSet,
    #[error("forest is empty")]
    EmptyForest,
    #[error("node {0} is not a leaf")]
    NotALeaf(usize),
    #[error("leaf label {0} appears more than once")]
    DuplicateLeaf(usize),
    #[error("malformed tree: {0}")]
    MalformedTree(String),

    // bucketing
    #[error("cluster is empty")]
    EmptyCluster,
    #[error("bucket base must be > 1, got {0}")]
    BadBeta(f64),

    // wrsc
    #[error("contracted graph has {size} vertices, exact enumeration is capped at {cap}")]
    TooLargeForExact { size: usize, cap: usize },
    #[error("contracted graph has a single vertex")]
    Degenerate,

    // algorithms / generators
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("sigma must be positive and finite, got {0}")]
    BadSigma(f64),

    // io / harness
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("config parse error: {0}")]
    ConfigParse(String),
    #[error("failed to load graph {path}: {msg}")]
    GraphLoad { path: String, msg: String },
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
