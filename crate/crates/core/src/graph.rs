//! Labeled simple graphs, directed or undirected, with 0-based node labels.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

use crate::error::GraphError;

pub type Node = usize;

/// A simple graph on nodes `0..n`.
///
/// Edges are kept sorted and deduplicated. Undirected edges are stored as
/// `(u, v)` with `u < v`; directed edges keep their orientation. Self-loops
/// are rejected at construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct Graph {
    n: usize,
    directed: bool,
    edges: Vec<(Node, Node)>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    n: usize,
    directed: bool,
    edges: Vec<(Node, Node)>,
}

impl TryFrom<RawGraph> for Graph {
    type Error = GraphError;

    fn try_from(raw: RawGraph) -> Result<Self, Self::Error> {
        Graph::new(raw.n, raw.directed, raw.edges)
    }
}

impl From<Graph> for RawGraph {
    fn from(g: Graph) -> Self {
        RawGraph { n: g.n, directed: g.directed, edges: g.edges }
    }
}

impl Graph {
    pub fn new(
        n: usize,
        directed: bool,
        edges: impl IntoIterator<Item = (Node, Node)>,
    ) -> Result<Self, GraphError> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::NodeOutOfRange { node: u.max(v), n });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            let e = if directed { (u, v) } else { (u.min(v), u.max(v)) };
            if !set.insert(e) {
                return Err(GraphError::DuplicateEdge(e.0, e.1));
            }
        }
        Ok(Graph { n, directed, edges: set.into_iter().collect() })
    }

    pub fn undirected(n: usize, edges: impl IntoIterator<Item = (Node, Node)>) -> Result<Self, GraphError> {
        Self::new(n, false, edges)
    }

    pub fn directed(n: usize, edges: impl IntoIterator<Item = (Node, Node)>) -> Result<Self, GraphError> {
        Self::new(n, true, edges)
    }

    pub fn empty(n: usize) -> Self {
        Graph { n, directed: false, edges: Vec::new() }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Graph { n, directed: false, edges }
    }

    /// Builds a graph from edges already known to be canonical, sorted and unique.
    pub(crate) fn from_sorted_unchecked(n: usize, directed: bool, edges: Vec<(Node, Node)>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        Graph { n, directed, edges }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edges(&self) -> &[(Node, Node)] {
        &self.edges
    }

    pub fn contains_edge(&self, u: Node, v: Node) -> bool {
        let e = if self.directed { (u, v) } else { (u.min(v), u.max(v)) };
        self.edges.binary_search(&e).is_ok()
    }

    /// Adjacency lists; for directed graphs these hold out-neighbors only.
    pub fn adjacency(&self) -> Vec<Vec<Node>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            if !self.directed {
                adj[v].push(u);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Orients every edge from the lower label to the higher one.
    pub fn oriented_low_to_high(&self) -> Graph {
        let mut edges: Vec<_> = self.edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        edges.sort_unstable();
        edges.dedup();
        Graph { n: self.n, directed: true, edges }
    }

    /// Applies a node relabeling `perm[old] = new`.
    pub fn relabel(&self, perm: &[Node]) -> Result<Graph, GraphError> {
        if perm.len() != self.n {
            return Err(GraphError::BadPermutation);
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || std::mem::replace(&mut seen[p], true) {
                return Err(GraphError::BadPermutation);
            }
        }
        Graph::new(self.n, self.directed, self.edges.iter().map(|&(u, v)| (perm[u], perm[v])))
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arrow = if self.directed { "->" } else { "--" };
        write!(f, "Graph(n={}", self.n)?;
        for (u, v) in &self.edges {
            write!(f, " {u}{arrow}{v}")?;
        }
        write!(f, ")")
    }
}
