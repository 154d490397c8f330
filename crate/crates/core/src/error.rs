use std::path::PathBuf;

use thiserror::Error;

use crate::graph::Node;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("node {node} out of range for a graph with {n} nodes")]
    NodeOutOfRange { node: Node, n: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(Node),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(Node, Node),
    #[error("relabeling is not a permutation of the node set")]
    BadPermutation,
    #[error("invalid node range [{min}, {max}]")]
    BadNodeRange { min: usize, max: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("unknown node {node} (graph has {n} nodes)")]
    UnknownNode { node: Node, n: usize },
    #[error("nodes {0} and {1} are in different components")]
    Unreachable(Node, Node),
    #[error("graph contains a directed cycle")]
    CycleDetected,
    #[error("task requires an undirected graph")]
    ExpectedUndirected,
    #[error("task requires a directed graph")]
    ExpectedDirected,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PromptError {
    #[error("no pseudo-code asset for {task} in style {style}")]
    MissingAsset { task: String, style: String },
    #[error("strategy {0} requires at least one exemplar")]
    ZeroShots(String),
    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),
    #[error("unknown pseudo-code style `{0}`")]
    UnknownStyle(String),
    #[error("instance does not fit its task: {0}")]
    BadInstance(String),
}

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("request timed out after {attempts} attempt(s)")]
    Timeout { attempts: u32 },
    #[error("rate limited after {attempts} attempt(s)")]
    RateLimited { attempts: u32 },
    #[error("server error {status} after {attempts} attempt(s)")]
    Server { status: u16, attempts: u32 },
    #[error("request rejected with status {status}: {body}")]
    Rejected { status: u16, body: String },
    #[error("malformed response: {0}")]
    MalformedResponse(String),
    #[error("no cached response for key {0}")]
    CacheMiss(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("cache I/O error on {path}: {source}")]
    CacheIo { path: PathBuf, source: std::io::Error },
    #[error("corrupt cache line {line} in {path}: {reason}")]
    CacheCorrupt { path: PathBuf, line: usize, reason: String },
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("unsupported schema version {found} (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },
    #[error("missing or invalid header line")]
    MissingHeader,
    #[error("corrupt line {line}: {reason}")]
    CorruptLine { line: usize, reason: String },
    #[error("gold answer of {id} fails re-verification: {reason}")]
    GoldMismatch { id: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("duplicate record for instance {id} under strategy {strategy}")]
    DuplicateRecord { id: String, strategy: String },
    #[error("record references unknown instance {0}")]
    UnknownInstance(String),
}
