//! Exact solvers and validators for the ten benchmark tasks.
//!
//! These are the source of every gold answer. Component counting exists twice
//! (union-find and breadth-first flood fill) so the two can be cross-checked.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, VecDeque};

use crate::error::OracleError;
use crate::graph::{Graph, Node};
use crate::task::AnswerKind;

/// A typed task answer. Node labels are internal (0-based).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    Int(u64),
    Bool(bool),
    NodeSet(BTreeSet<Node>),
    NodeSeq(Vec<Node>),
    EdgeSet(BTreeSet<(Node, Node)>),
}

impl Answer {
    pub fn kind(&self) -> AnswerKind {
        match self {
            Answer::Int(_) => AnswerKind::Int,
            Answer::Bool(_) => AnswerKind::Bool,
            Answer::NodeSet(_) => AnswerKind::NodeSet,
            Answer::NodeSeq(_) => AnswerKind::NodeSeq,
            Answer::EdgeSet(_) => AnswerKind::EdgeSet,
        }
    }

    /// Maps every node label through `f`. Edge pairs are re-canonicalized.
    pub fn map_nodes(&self, f: impl Fn(Node) -> Node) -> Answer {
        match self {
            Answer::Int(_) | Answer::Bool(_) => self.clone(),
            Answer::NodeSet(s) => Answer::NodeSet(s.iter().map(|&u| f(u)).collect()),
            Answer::NodeSeq(s) => Answer::NodeSeq(s.iter().map(|&u| f(u)).collect()),
            Answer::EdgeSet(s) => Answer::EdgeSet(
                s.iter()
                    .map(|&(u, v)| {
                        let (a, b) = (f(u), f(v));
                        (a.min(b), a.max(b))
                    })
                    .collect(),
            ),
        }
    }

    /// Converts labels as shown in a prompt (`base`-numbered) to internal labels.
    /// Labels below the base become `Node::MAX`, which no graph contains.
    pub fn from_surface(&self, base: usize) -> Answer {
        self.map_nodes(|u| u.checked_sub(base).unwrap_or(Node::MAX))
    }

    pub fn to_surface(&self, base: usize) -> Answer {
        self.map_nodes(|u| u + base)
    }
}

fn check_node(g: &Graph, u: Node) -> Result<(), OracleError> {
    if u < g.node_count() {
        Ok(())
    } else {
        Err(OracleError::UnknownNode { node: u, n: g.node_count() })
    }
}

fn require_undirected(g: &Graph) -> Result<(), OracleError> {
    if g.is_directed() {
        Err(OracleError::ExpectedUndirected)
    } else {
        Ok(())
    }
}

pub fn node_count(g: &Graph) -> u64 {
    g.node_count() as u64
}

pub fn edge_count(g: &Graph) -> u64 {
    g.edge_count() as u64
}

pub fn degree(g: &Graph, u: Node) -> Result<u64, OracleError> {
    require_undirected(g)?;
    check_node(g, u)?;
    Ok(g.edges().iter().filter(|&&(a, b)| a == u || b == u).count() as u64)
}

pub fn neighbors(g: &Graph, u: Node) -> Result<BTreeSet<Node>, OracleError> {
    require_undirected(g)?;
    check_node(g, u)?;
    Ok(g.edges()
        .iter()
        .filter_map(|&(a, b)| {
            if a == u {
                Some(b)
            } else if b == u {
                Some(a)
            } else {
                None
            }
        })
        .collect())
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    sets: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n], sets: n }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.sets -= 1;
        true
    }

    pub fn set_count(&self) -> usize {
        self.sets
    }
}

pub fn connected_components(g: &Graph) -> Result<u64, OracleError> {
    require_undirected(g)?;
    let mut uf = UnionFind::new(g.node_count());
    for &(u, v) in g.edges() {
        uf.union(u, v);
    }
    Ok(uf.set_count() as u64)
}

/// Component label per node, numbered in order of first appearance.
pub fn component_labels(g: &Graph) -> Result<Vec<usize>, OracleError> {
    require_undirected(g)?;
    let adj = g.adjacency();
    let mut label = vec![usize::MAX; g.node_count()];
    let mut next = 0;
    let mut queue = VecDeque::new();
    for start in 0..g.node_count() {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = next;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if label[v] == usize::MAX {
                    label[v] = next;
                    queue.push_back(v);
                }
            }
        }
        next += 1;
    }
    Ok(label)
}

/// Component count by breadth-first flood fill.
pub fn connected_components_bfs(g: &Graph) -> Result<u64, OracleError> {
    Ok(component_labels(g)?.into_iter().max().map_or(0, |m| m as u64 + 1))
}

pub fn has_cycle(g: &Graph) -> Result<bool, OracleError> {
    require_undirected(g)?;
    let mut uf = UnionFind::new(g.node_count());
    Ok(g.edges().iter().any(|&(u, v)| !uf.union(u, v)))
}

/// A spanning forest (Kruskal order over the sorted edge list). In an
/// unweighted graph every spanning forest has minimum cardinality `n - c`.
pub fn spanning_forest(g: &Graph) -> Result<BTreeSet<(Node, Node)>, OracleError> {
    require_undirected(g)?;
    let mut uf = UnionFind::new(g.node_count());
    Ok(g.edges().iter().copied().filter(|&(u, v)| uf.union(u, v)).collect())
}

/// True iff `es` is a subset of the graph's edges, is acyclic, and connects
/// every component of the graph (equivalently `|es| = n - c` with no cycle).
pub fn validate_spanning_tree(g: &Graph, es: &BTreeSet<(Node, Node)>) -> Result<bool, OracleError> {
    require_undirected(g)?;
    let components = connected_components(g)? as usize;
    if es.len() + components != g.node_count() {
        return Ok(false);
    }
    let mut uf = UnionFind::new(g.node_count());
    for &(u, v) in es {
        if !g.contains_edge(u, v) || !uf.union(u, v) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn shortest_path_length(g: &Graph, u: Node, v: Node) -> Result<u64, OracleError> {
    require_undirected(g)?;
    check_node(g, u)?;
    check_node(g, v)?;
    bfs_distances(g, u)[v].ok_or(OracleError::Unreachable(u, v))
}

/// Unweighted distances from `source`; `None` for unreachable nodes.
pub fn bfs_distances(g: &Graph, source: Node) -> Vec<Option<u64>> {
    let adj = g.adjacency();
    let mut dist = vec![None; g.node_count()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(x) = queue.pop_front() {
        let d = dist[x].expect("queued nodes have a distance");
        for &y in &adj[x] {
            if dist[y].is_none() {
                dist[y] = Some(d + 1);
                queue.push_back(y);
            }
        }
    }
    dist
}

/// Two-coloring by breadth-first search.
pub fn is_bipartite(g: &Graph) -> Result<bool, OracleError> {
    require_undirected(g)?;
    let adj = g.adjacency();
    let mut color: Vec<Option<bool>> = vec![None; g.node_count()];
    for start in 0..g.node_count() {
        if color[start].is_some() {
            continue;
        }
        color[start] = Some(false);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            let cu = color[u].expect("queued nodes are colored");
            for &v in &adj[u] {
                match color[v] {
                    None => {
                        color[v] = Some(!cu);
                        queue.push_back(v);
                    }
                    Some(cv) if cv == cu => return Ok(false),
                    Some(_) => {}
                }
            }
        }
    }
    Ok(true)
}

/// Kahn's algorithm, always releasing the smallest ready label first.
pub fn topo_order(g: &Graph) -> Result<Vec<Node>, OracleError> {
    if !g.is_directed() {
        return Err(OracleError::ExpectedDirected);
    }
    let adj = g.adjacency();
    let mut indegree = vec![0usize; g.node_count()];
    for &(_, v) in g.edges() {
        indegree[v] += 1;
    }
    let mut ready: BTreeSet<Node> = (0..g.node_count()).filter(|&u| indegree[u] == 0).collect();
    let mut order = Vec::with_capacity(g.node_count());
    while let Some(u) = ready.pop_first() {
        order.push(u);
        for &v in &adj[u] {
            indegree[v] -= 1;
            if indegree[v] == 0 {
                ready.insert(v);
            }
        }
    }
    if order.len() == g.node_count() {
        Ok(order)
    } else {
        Err(OracleError::CycleDetected)
    }
}

/// True iff `seq` is a permutation of all nodes and every edge points forward in it.
pub fn validate_topo_order(g: &Graph, seq: &[Node]) -> Result<bool, OracleError> {
    if !g.is_directed() {
        return Err(OracleError::ExpectedDirected);
    }
    let n = g.node_count();
    if seq.len() != n {
        return Ok(false);
    }
    let mut position = vec![usize::MAX; n];
    for (i, &u) in seq.iter().enumerate() {
        if u >= n || position[u] != usize::MAX {
            return Ok(false);
        }
        position[u] = i;
    }
    Ok(g.edges().iter().all(|&(u, v)| position[u] < position[v]))
}
