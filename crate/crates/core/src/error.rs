use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("self-loop on node {node}")]
    SelfLoop { node: usize },
    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: usize, v: usize },
    #[error("edge ({u}, {v}) has invalid weight {w}; weights must be positive and finite")]
    InvalidWeight { u: usize, v: usize, w: f64 },
    #[error("node id {id} out of range for {n} nodes")]
    NodeOutOfRange { id: usize, n: usize },
    #[error("node {node} has zero degree; degree normalization needs positive degrees")]
    ZeroDegree { node: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PartitionError {
    #[error("label vector has length {got}, graph has {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },
    #[error("cluster {cluster} is empty")]
    EmptyCluster { cluster: usize },
    #[error("a partition needs at least one node")]
    NoNodes,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EigenError {
    #[error("requested K = {k} eigenvectors for a matrix of dimension {n}; need 2 <= K <= n")]
    InvalidOrder { k: usize, n: usize },
    #[error("eigensolver did not converge after {matvecs} matrix-vector products (residual {residual:.3e})")]
    NotConverged { matvecs: usize, residual: f64 },
    #[error("graph is disconnected (lambda_2 = {lambda2:.3e})")]
    Disconnected { lambda2: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KMeansError {
    #[error("cannot form {k} clusters from {n} points")]
    TooFewPoints { n: usize, k: usize },
    #[error("cluster count must be at least 1")]
    ZeroClusters,
    #[error("points must have at least one dimension")]
    ZeroDimension,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenerateError {
    #[error("cluster {cluster} stayed disconnected after {attempts} resampling attempts")]
    ConnectivityExhausted { cluster: usize, attempts: usize },
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Crate-level error for operations that compose several stages.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    KMeans(#[from] KMeansError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error("{0}")]
    InvalidArgument(String),
    #[error("input graph is disconnected ({components} components); cluster each component separately")]
    Disconnected { components: usize },
    #[error("cluster {cluster} induces a disconnected subgraph")]
    DisconnectedCluster { cluster: usize },
    #[error("matrix columns are not orthonormal (max Gram deviation {deviation:.3e})")]
    NotOrthonormal { deviation: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
