//! Exhaustive reference checks, written independently of the library's
//! oracles. Node sets are `u64` bitmasks, so graphs are limited to 64 nodes.

#![allow(dead_code)]

use graphbench_core::generate::{gen_er_dag_with, gen_er_with, gen_random_bipartite_with, GeneratorConfig};
use graphbench_core::seed::BenchRng;
use graphbench_core::task::NodeRange;
use graphbench_core::Graph;

pub fn masks(g: &Graph) -> Vec<u64> {
    assert!(g.node_count() <= 64);
    let mut adj = vec![0u64; g.node_count()];
    for &(u, v) in g.edges() {
        adj[u] |= 1 << v;
        if !g.is_directed() {
            adj[v] |= 1 << u;
        }
    }
    adj
}

fn undirected_masks(n: usize, edges: &[(usize, usize)]) -> Vec<u64> {
    let mut adj = vec![0u64; n];
    for &(u, v) in edges {
        adj[u] |= 1 << v;
        adj[v] |= 1 << u;
    }
    adj
}

/// Nodes reachable from `s` (including `s`).
pub fn reach(adj: &[u64], s: usize) -> u64 {
    let mut seen = 1u64 << s;
    loop {
        let mut next = seen;
        let mut rest = seen;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            next |= adj[v];
        }
        if next == seen {
            return seen;
        }
        seen = next;
    }
}

pub fn closure(adj: &[u64]) -> Vec<u64> {
    (0..adj.len()).map(|s| reach(adj, s)).collect()
}

/// Number of classes of the reachability relation: a node starts a class
/// exactly when it is the smallest node reachable from itself.
pub fn components(g: &Graph) -> u64 {
    closure(&masks(g)).iter().enumerate().filter(|&(s, &r)| r.trailing_zeros() as usize == s).count() as u64
}

/// An undirected graph has a cycle iff some edge's endpoints stay connected
/// after removing that edge.
pub fn has_cycle(g: &Graph) -> bool {
    let edges = g.edges();
    (0..edges.len()).any(|i| {
        let rest: Vec<_> = edges.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &e)| e).collect();
        let (u, v) = edges[i];
        reach(&undirected_masks(g.node_count(), &rest), u) & (1 << v) != 0
    })
}

pub fn degree(g: &Graph, u: usize) -> u64 {
    g.edges().iter().filter(|&&(a, b)| a == u || b == u).count() as u64
}

pub fn neighbors(g: &Graph, u: usize) -> Vec<usize> {
    let mut out: Vec<usize> = g
        .edges()
        .iter()
        .filter_map(|&(a, b)| if a == u { Some(b) } else if b == u && !g.is_directed() { Some(a) } else { None })
        .collect();
    out.sort();
    out
}

/// All-pairs hop distances.
pub fn floyd_warshall(g: &Graph) -> Vec<Vec<Option<u64>>> {
    let n = g.node_count();
    let mut d = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(0);
    }
    for &(u, v) in g.edges() {
        d[u][v] = Some(1);
        if !g.is_directed() {
            d[v][u] = Some(1);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

/// Searches for a simple cycle of odd length. Each cycle is found from its
/// smallest node, extending only through larger nodes.
pub fn has_odd_cycle(g: &Graph) -> bool {
    let adj = masks(g);
    fn extend(adj: &[u64], start: usize, at: usize, visited: u64, len: usize) -> bool {
        if len >= 3 && len % 2 == 1 && adj[at] & (1 << start) != 0 {
            return true;
        }
        let mut cand = adj[at] & !visited & !((1u64 << (start + 1)) - 1);
        while cand != 0 {
            let v = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            if extend(adj, start, v, visited | (1 << v), len + 1) {
                return true;
            }
        }
        false
    }
    (0..g.node_count()).any(|s| extend(&adj, s, s, 1 << s, 1))
}

/// Whether the chosen edges (indices into `g.edges()`) form a spanning
/// forest of `g`: acyclic, and connecting exactly what `g` connects.
pub fn is_spanning_forest(g: &Graph, chosen: &[(usize, usize)], full_closure: &[u64]) -> bool {
    let n = g.node_count();
    if chosen.iter().any(|&(u, v)| !g.edges().contains(&(u.min(v), u.max(v)))) {
        return false;
    }
    // Adding edges one at a time, an edge closes a cycle exactly when its
    // endpoints are already connected.
    let mut adj = vec![0u64; n];
    for &(u, v) in chosen {
        if reach(&adj, u) & (1 << v) != 0 {
            return false;
        }
        adj[u] |= 1 << v;
        adj[v] |= 1 << u;
    }
    closure(&adj) == full_closure
}

pub fn is_topo_order(g: &Graph, seq: &[usize]) -> bool {
    let n = g.node_count();
    if seq.len() != n {
        return false;
    }
    let mut pos = vec![usize::MAX; n];
    for (i, &u) in seq.iter().enumerate() {
        if u >= n || pos[u] != usize::MAX {
            return false;
        }
        pos[u] = i;
    }
    g.edges().iter().all(|&(u, v)| pos[u] < pos[v])
}

/// Every permutation of `0..n` (Heap's algorithm).
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut a: Vec<usize> = (0..n).collect();
    let mut out = vec![a.clone()];
    let mut c = vec![0; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Bitmasks over `m` items with exactly `k` bits set (Gosper's hack).
pub fn subsets_of_size(m: usize, k: usize) -> Vec<u64> {
    if k > m {
        return Vec::new();
    }
    if k == 0 {
        return vec![0];
    }
    let mut out = Vec::new();
    let mut x: u64 = (1 << k) - 1;
    let limit = 1u64 << m;
    while x < limit {
        out.push(x);
        let c = x & x.wrapping_neg();
        let r = x + c;
        x = (((r ^ x) >> 2) / c) | r;
    }
    out
}

pub fn pick(edges: &[(usize, usize)], mask: u64) -> Vec<(usize, usize)> {
    (0..edges.len()).filter(|&i| mask & (1 << i) != 0).map(|i| edges[i]).collect()
}

/// A reproducible mix of small undirected graphs: ER graphs and random
/// bipartite graphs, with `n` in `[2, max_n]`.
pub fn small_graphs(count: usize, max_n: usize, seed: u64) -> Vec<Graph> {
    let cfg = GeneratorConfig { nodes: NodeRange::new(2, max_n).unwrap(), p: graphbench_core::generate::EdgeProb::Uniform };
    let mut rng = BenchRng::from_seed(seed);
    (0..count)
        .map(|i| if i % 3 == 2 { gen_random_bipartite_with(&cfg, &mut rng).0 } else { gen_er_with(&cfg, &mut rng) })
        .collect()
}

/// A DAG whose topological structure is not just the label order.
pub fn shuffled_dag(max_n: usize, rng: &mut BenchRng) -> Graph {
    let cfg = GeneratorConfig { nodes: NodeRange::new(2, max_n).unwrap(), p: graphbench_core::generate::EdgeProb::Uniform };
    let dag = gen_er_dag_with(&cfg, rng);
    let mut perm: Vec<usize> = (0..dag.node_count()).collect();
    rng.shuffle(&mut perm);
    dag.relabel(&perm).unwrap()
}

use graphbench_core::oracle;
use std::collections::BTreeSet;

fn agree<T: PartialEq + std::fmt::Debug>(what: &str, g: &Graph, got: T, want: T) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what} on {g}: library {got:?}, reference {want:?}"))
    }
}

/// Graphs with at most this many edges get every edge subset checked.
pub const FULL_SUBSET_EDGES: usize = 16;
/// Cap on spanning-tree candidates per graph beyond that.
pub const SUBSET_BUDGET: usize = 250_000;

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Compares every undirected oracle against the reference checks.
/// Returns the number of spanning-tree candidates examined.
pub fn check_undirected(g: &Graph) -> Result<usize, String> {
    let n = g.node_count();
    agree("node count", g, oracle::node_count(g), n as u64)?;
    agree("edge count", g, oracle::edge_count(g), g.edges().len() as u64)?;
    for u in 0..n {
        agree("degree", g, oracle::degree(g, u).unwrap(), degree(g, u))?;
        agree("neighbors", g, oracle::neighbors(g, u).unwrap().into_iter().collect::<Vec<_>>(), neighbors(g, u))?;
    }
    let c = components(g);
    agree("components", g, oracle::connected_components(g).unwrap(), c)?;
    agree("components (bfs)", g, oracle::connected_components_bfs(g).unwrap(), c)?;
    agree("cycle", g, oracle::has_cycle(g).unwrap(), has_cycle(g))?;
    agree("bipartite", g, oracle::is_bipartite(g).unwrap(), !has_odd_cycle(g))?;
    let d = floyd_warshall(g);
    for u in 0..n {
        for v in 0..n {
            agree("distance", g, oracle::shortest_path_length(g, u, v).ok(), d[u][v])?;
        }
    }

    let full = closure(&masks(g));
    let forest = oracle::spanning_forest(g).unwrap();
    let forest_edges: Vec<_> = forest.iter().copied().collect();
    agree("spanning forest validity", g, is_spanning_forest(g, &forest_edges, &full), true)?;

    let edges = g.edges();
    let m = edges.len();
    let candidates: Vec<u64> = if m <= FULL_SUBSET_EDGES {
        (0..1u64 << m).collect()
    } else {
        // Too many edges for every subset: take the sizes next to n - c, and
        // sample them when even that family is too large.
        let target = n - c as usize;
        let sizes = target.saturating_sub(1)..=target + 1;
        let family: u128 = sizes.clone().map(|k| binomial(m, k)).sum();
        if family <= SUBSET_BUDGET as u128 {
            sizes.flat_map(|k| subsets_of_size(m, k)).collect()
        } else {
            let mut rng = BenchRng::from_seed(m as u64 * 1_000 + n as u64);
            let idx: Vec<usize> = (0..m).collect();
            let sizes: Vec<usize> = sizes.collect();
            (0..SUBSET_BUDGET)
                .map(|i| rng.sample(&idx, sizes[i % sizes.len()]).into_iter().fold(0u64, |acc, e| acc | 1 << e))
                .collect()
        }
    };
    for &mask in &candidates {
        let chosen = pick(edges, mask);
        let set: BTreeSet<_> = chosen.iter().copied().collect();
        agree(
            &format!("spanning validator on {chosen:?}"),
            g,
            oracle::validate_spanning_tree(g, &set).unwrap(),
            is_spanning_forest(g, &chosen, &full),
        )?;
    }
    // Swapping any forest edge for a non-edge must be rejected.
    if let Some(non_edge) = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).find(|&(u, v)| !g.contains_edge(u, v)) {
        for &e in &forest {
            let mut swapped = forest.clone();
            swapped.remove(&e);
            swapped.insert(non_edge);
            agree("spanning validator with a non-edge", g, oracle::validate_spanning_tree(g, &swapped).unwrap(), false)?;
        }
    }
    Ok(candidates.len())
}

/// Compares the topological oracles against permutation checks. Orders of
/// DAGs up to `exhaustive_n` nodes are checked against every permutation.
pub fn check_dag(g: &Graph, exhaustive_n: usize) -> Result<(), String> {
    let order = oracle::topo_order(g).map_err(|e| format!("topo_order on {g}: {e}"))?;
    agree("topological order validity", g, is_topo_order(g, &order), true)?;
    if g.node_count() <= exhaustive_n {
        for perm in permutations(g.node_count()) {
            agree(
                &format!("order validator on {perm:?}"),
                g,
                oracle::validate_topo_order(g, &perm).unwrap(),
                is_topo_order(g, &perm),
            )?;
        }
    }
    let d = floyd_warshall(g);
    for (u, row) in d.iter().enumerate() {
        for (v, &want) in row.iter().enumerate() {
            agree("directed distance", g, oracle::bfs_distances(g, u)[v], want)?;
        }
    }
    Ok(())
}

/// Pinned digests of the bundled pseudo-code files.
pub const ASSET_SHA256: [(&str, &str); 30] = [
    ("bipartite_check.multifunction.txt", "2ffa4b8d9eb0eb77d8c29e02e1c4abfb8d5b09ac6cb744103a813d26b19b92b9"),
    ("bipartite_check.pseudo.txt", "93c8be2cc0260d5d2acc3da09cb2c885876a35cc16c6658b2486e0afe021fde6"),
    ("bipartite_check.python.txt", "4ea8b4c9894655667158ac58c6ad88c38a86debda1da37dbcaf14dfcf2ee96c3"),
    ("connected_components.multifunction.txt", "88e3d367b9a4c3b11a747f9274a7934a09585362f758cb41b2cc03e49d5cb12b"),
    ("connected_components.pseudo.txt", "15870bac6034b1c6d5f7377af00e90a65e91a8898790441dde0e628d6661cf13"),
    ("connected_components.python.txt", "bc8ab1c6778b5d30ca8ec369e5408d414106cb177248d478e05dc51b9ef20b6e"),
    ("cycle_check.multifunction.txt", "fb55977ca4ed876438b3786f79fddc76d5425b6dcd04812d0ccf19235e25becd"),
    ("cycle_check.pseudo.txt", "799263461247c51a2f22f1a24aea83d7c13442f124013436f6fd2643d259046a"),
    ("cycle_check.python.txt", "70efa235db5c6710ebfccb50fef8d959ac0549861ad5c3c78601f35ce3adb112"),
    ("edge_count.multifunction.txt", "c3640659460cbc7e7700c0fde05357f3b56e0f26bca64312ada1f8deb4bdc25d"),
    ("edge_count.pseudo.txt", "ed5fffb882cda78e017d096d8d71fcfe722a9ab5c91486d591958da176bc9d27"),
    ("edge_count.python.txt", "aa9f77aca2a8ee42dec21c6f68404333e825abf36772171ccda634a708aca856"),
    ("mst.multifunction.txt", "27b93a1c6d52c83d516d9337bf37602aca611161a3fb6137f87a13fc8130272f"),
    ("mst.pseudo.txt", "4b434c547654196365ebb34a388c5c1b9d143b62e15fdadf484c218be56635ef"),
    ("mst.python.txt", "b4df8bdfbe4372bd83c583d7bf1f5a972f49bafff7de5d8e338d1ee03d984942"),
    ("neighbors.multifunction.txt", "917fe7d1d085322a200a4f1bd589accd8c1b255d476e2ebf36b09c8861331899"),
    ("neighbors.pseudo.txt", "fce8644e11b651e146353404e61dc5935b24fd36f486e7e6fd34b92fb340c2f7"),
    ("neighbors.python.txt", "4c5fb7f8d125a5cc1783cf66a4797007561311daf121a585c80d4ba47b86f743"),
    ("node_count.multifunction.txt", "83ee1592d7a4374b63371ef749ae3464c76754beef9e4e7622e6d978f2557861"),
    ("node_count.pseudo.txt", "285ba744492385ce7664b736ced6f6eaa5e6c07d9009dd2cefde0a2e4305bdda"),
    ("node_count.python.txt", "69dcdc04ee17fd5b04d1bcea780babe892446c7df0eb81577d662af8f02d695c"),
    ("node_degree.multifunction.txt", "596cbcff10b0c12608d9fd69a45cb8994c824b7c39b5990c4a5a9014b4205d63"),
    ("node_degree.pseudo.txt", "9e006037713394dd460bccb8422cdb3e50c1ed811ea9d4e908a261017246647f"),
    ("node_degree.python.txt", "6518d6f19163e30391f48f717a57313b3476ddcbb37fe25fd77b4f9cd443a9bf"),
    ("shortest_path.multifunction.txt", "0a29edcf7175d820fb53ebd5b531ab4eea2e96aef06827ff3226bcdc1c9178b3"),
    ("shortest_path.pseudo.txt", "92802efcf96ba49d0a79bc487f0b6b3460c95703ccaa8116347d7e7bf34635d6"),
    ("shortest_path.python.txt", "acd732532422e4885e38129647312dc4a33e33e3a66bf962fa060e592850f4e5"),
    ("topological_sort.multifunction.txt", "f78e3453f13cef17f38a29af91e16ea08b3e2419e3ee98b7a509fa04a4830150"),
    ("topological_sort.pseudo.txt", "a81594f849d295fb38e8e92b73905b0327fef1be14a1fe94c9ddf2c6c3b43b27"),
    ("topological_sort.python.txt", "911f01d9f27bdd84cac5049326f5b689f377f52ca9065c9d8f107b4c9ccd77d0"),
];
