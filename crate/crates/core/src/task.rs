//! Task kinds, size buckets and per-instance query arguments.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::graph::Node;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    NodeCount,
    EdgeCount,
    NodeDegree,
    Neighbors,
    ConnectedComponents,
    CycleCheck,
    Mst,
    ShortestPath,
    BipartiteCheck,
    TopologicalSort,
}

/// Shape of a task's answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnswerKind {
    Int,
    Bool,
    NodeSet,
    NodeSeq,
    EdgeSet,
}

/// What a task asks about: the whole graph, one node, or a pair of nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskLevel {
    Graph,
    Node,
    Pair,
}

impl Task {
    pub const ALL: [Task; 10] = [
        Task::NodeCount,
        Task::EdgeCount,
        Task::NodeDegree,
        Task::Neighbors,
        Task::ConnectedComponents,
        Task::CycleCheck,
        Task::Mst,
        Task::ShortestPath,
        Task::BipartiteCheck,
        Task::TopologicalSort,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::NodeCount => "node_count",
            Task::EdgeCount => "edge_count",
            Task::NodeDegree => "node_degree",
            Task::Neighbors => "neighbors",
            Task::ConnectedComponents => "connected_components",
            Task::CycleCheck => "cycle_check",
            Task::Mst => "mst",
            Task::ShortestPath => "shortest_path",
            Task::BipartiteCheck => "bipartite_check",
            Task::TopologicalSort => "topological_sort",
        }
    }

    /// Column heading used in report tables.
    pub fn title(self) -> &'static str {
        match self {
            Task::NodeCount => "Node count",
            Task::EdgeCount => "Edge count",
            Task::NodeDegree => "Node degree",
            Task::Neighbors => "Neighbors",
            Task::ConnectedComponents => "Connected components",
            Task::CycleCheck => "Cycle check",
            Task::Mst => "MST",
            Task::ShortestPath => "Shortest path",
            Task::BipartiteCheck => "Bipartite check",
            Task::TopologicalSort => "Topological sorting",
        }
    }

    pub fn level(self) -> TaskLevel {
        match self {
            Task::NodeDegree | Task::Neighbors => TaskLevel::Node,
            Task::ShortestPath => TaskLevel::Pair,
            _ => TaskLevel::Graph,
        }
    }

    /// Answer shape with the MST task in edge-set mode.
    pub fn answer_kind(self) -> AnswerKind {
        match self {
            Task::NodeCount
            | Task::EdgeCount
            | Task::NodeDegree
            | Task::ConnectedComponents
            | Task::ShortestPath => AnswerKind::Int,
            Task::CycleCheck | Task::BipartiteCheck => AnswerKind::Bool,
            Task::Neighbors => AnswerKind::NodeSet,
            Task::TopologicalSort => AnswerKind::NodeSeq,
            Task::Mst => AnswerKind::EdgeSet,
        }
    }

    /// Default label base for prompts: topological sorting numbers nodes from 1.
    pub fn default_label_base(self) -> usize {
        match self {
            Task::TopologicalSort => 1,
            _ => 0,
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Task::ALL
            .into_iter()
            .find(|t| t.name() == key)
            .ok_or_else(|| format!("unknown task `{s}`"))
    }
}

/// Inclusive node-count range for generated graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeRange {
    min: usize,
    max: usize,
}

impl NodeRange {
    /// Requires `2 <= min <= max`.
    pub fn new(min: usize, max: usize) -> Result<Self, crate::error::GraphError> {
        if min < 2 || min > max {
            return Err(crate::error::GraphError::BadNodeRange { min, max });
        }
        Ok(NodeRange { min, max })
    }

    pub fn exactly(n: usize) -> Result<Self, crate::error::GraphError> {
        Self::new(n, n)
    }

    pub fn min(self) -> usize {
        self.min
    }

    pub fn max(self) -> usize {
        self.max
    }

    pub fn contains(self, n: usize) -> bool {
        (self.min..=self.max).contains(&n)
    }
}

/// Size bucket of the benchmark. Ranges are inclusive and overlap at 11 and 21.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Bucket {
    S,
    M,
    L,
}

impl Bucket {
    pub const ALL: [Bucket; 3] = [Bucket::S, Bucket::M, Bucket::L];

    pub fn node_range(self) -> NodeRange {
        match self {
            Bucket::S => NodeRange { min: 5, max: 11 },
            Bucket::M => NodeRange { min: 11, max: 21 },
            Bucket::L => NodeRange { min: 21, max: 51 },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Bucket::S => "S",
            Bucket::M => "M",
            Bucket::L => "L",
        }
    }
}

impl fmt::Display for Bucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Bucket {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "S" | "s" => Ok(Bucket::S),
            "M" | "m" => Ok(Bucket::M),
            "L" | "l" => Ok(Bucket::L),
            other => Err(format!("unknown bucket `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Query {
    None,
    Node(Node),
    Pair(Node, Node),
}
