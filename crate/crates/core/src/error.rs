use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("graph needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),

    #[error("edge ({0}, {1}) references a node outside 0..{2}")]
    NodeOutOfRange(usize, usize, usize),

    #[error("self loop at node {0}")]
    SelfLoop(usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("graph is disconnected ({reached} of {nodes} nodes reachable from node 0)")]
    DisconnectedGraph { reached: usize, nodes: usize },

    #[error("symmetric eigensolver failed: {0}")]
    EigensolverFailure(String),

    #[error("could not draw a connected geometric graph after {0} attempts")]
    CouldNotConnect(usize),

    #[error("invalid radius {0}: must lie in (0, sqrt(2)]")]
    InvalidRadius(f64),

    #[error("invalid shape parameter {name} = {value}")]
    InvalidShapeParameter { name: &'static str, value: f64 },

    #[error("measurement vector is empty")]
    EmptyVector,

    #[error("beta must be nonzero")]
    ZeroBeta,

    #[error("beta * x = {0} would overflow the exponential mapping (limit {1})")]
    OverflowRisk(f64, f64),

    #[error("state {0} is not positive, estimate undefined")]
    NonpositiveState(f64),

    #[error("non-finite state at iteration {iteration}, node {node}")]
    NonFiniteState { iteration: usize, node: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("stability violated: 2 a lambda h' = {0} <= 1")]
    StabilityViolated(f64),

    #[error("transmit derivative {0:e} is degenerate (below 1e-300)")]
    DegenerateDerivative(f64),

    #[error("error target eps2 = {eps2} must be below x_max = {x_max}")]
    InvalidErrorTarget { eps2: f64, x_max: f64 },

    #[error("spec parse error: {0}")]
    SpecParse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
