use thiserror::Error;

/// Errors surfaced by graph construction, inference, and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("node {node} out of range (graph has {node_count} nodes)")]
    NodeOutOfRange { node: usize, node_count: usize },
    #[error("graph must have at least one node")]
    EmptyGraph,
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("operation requires a tree ({node_count} nodes, {edge_count} edges, connected = {connected})")]
    NotATree {
        node_count: usize,
        edge_count: usize,
        connected: bool,
    },
    #[error("nodes u and v must differ, got {0}")]
    SameNode(usize),
    #[error("infected set must be non-empty")]
    EmptyInfectedSet,
    #[error("infected node {infected} is unreachable from node {from}")]
    UnreachableInfected { infected: usize, from: usize },
    #[error("infection probability must lie in the open interval (0, 1), got {0}")]
    InvalidProbability(f64),
    #[error("regular tree degree must be at least 2, got {0}")]
    InvalidDegree(usize),
    #[error("elapsed time {t} is below the feasible window [{earliest}, inf)")]
    TimeBelowWindow { t: usize, earliest: usize },
    #[error("exact search supports at most {max} nodes, got {got}")]
    ExactNodeCap { got: usize, max: usize },
    #[error("exact search supports elapsed times up to {max}, got {got}")]
    ExactTimeCap { got: usize, max: usize },
    #[error("snapshot stayed empty after {0} resampling attempts")]
    ResampleLimit(usize),
    #[error("failed to parse {what}: {detail}")]
    Parse { what: String, detail: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn parse(what: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Parse {
            what: what.into(),
            detail: detail.into(),
        }
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
