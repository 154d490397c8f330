//! Seeded random-graph generators: Erdős–Rényi, ER oriented into a DAG, and
//! random bipartite graphs.
//!
//! Each generator draws `n` uniformly from the configured inclusive node range,
//! then an edge probability `p` uniformly from `[0, 1)` (unless pinned), then
//! flips one coin per candidate pair in lexicographic order.

use crate::graph::{Graph, Node};
use crate::seed::BenchRng;
use crate::task::{Bucket, NodeRange};

/// Where the edge probability of each graph comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeProb {
    /// Resampled uniformly from `[0, 1)` for every graph.
    Uniform,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorConfig {
    pub nodes: NodeRange,
    pub p: EdgeProb,
}

impl GeneratorConfig {
    pub fn for_bucket(bucket: Bucket) -> Self {
        GeneratorConfig { nodes: bucket.node_range(), p: EdgeProb::Uniform }
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = EdgeProb::Fixed(p);
        self
    }

    fn draw_n_and_p(&self, rng: &mut BenchRng) -> (usize, f64) {
        let n = rng.inclusive(self.nodes.min(), self.nodes.max());
        let p = match self.p {
            EdgeProb::Uniform => rng.unit_f64(),
            EdgeProb::Fixed(p) => p,
        };
        (n, p)
    }
}

/// The two sides of a random bipartite graph, each sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    pub left: Vec<Node>,
    pub right: Vec<Node>,
}

pub fn gen_er(cfg: &GeneratorConfig, seed: u64) -> Graph {
    gen_er_with(cfg, &mut BenchRng::from_seed(seed))
}

pub fn gen_er_with(cfg: &GeneratorConfig, rng: &mut BenchRng) -> Graph {
    let (n, p) = cfg.draw_n_and_p(rng);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.bernoulli(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_sorted_unchecked(n, false, edges)
}

/// ER graph with every edge pointing from the lower label to the higher one.
pub fn gen_er_dag(cfg: &GeneratorConfig, seed: u64) -> Graph {
    gen_er_dag_with(cfg, &mut BenchRng::from_seed(seed))
}

pub fn gen_er_dag_with(cfg: &GeneratorConfig, rng: &mut BenchRng) -> Graph {
    gen_er_with(cfg, rng).oriented_low_to_high()
}

pub fn gen_random_bipartite(cfg: &GeneratorConfig, seed: u64) -> Graph {
    gen_random_bipartite_with(cfg, &mut BenchRng::from_seed(seed)).0
}

/// Splits the nodes into two nonempty sides (left size uniform in `[1, n-1]`,
/// membership by shuffle) and includes each cross pair with probability `p`.
pub fn gen_random_bipartite_with(cfg: &GeneratorConfig, rng: &mut BenchRng) -> (Graph, Bipartition) {
    let (n, p) = cfg.draw_n_and_p(rng);
    let left_size = rng.inclusive(1, n - 1);
    let mut order: Vec<Node> = (0..n).collect();
    rng.shuffle(&mut order);
    let mut in_left = vec![false; n];
    for &u in &order[..left_size] {
        in_left[u] = true;
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if in_left[u] != in_left[v] && rng.bernoulli(p) {
                edges.push((u, v));
            }
        }
    }
    let (left, right): (Vec<Node>, Vec<Node>) = (0..n).partition(|&u| in_left[u]);
    (Graph::from_sorted_unchecked(n, false, edges), Bipartition { left, right })
}
