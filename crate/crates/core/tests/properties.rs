use graphbench_core::eval::extract_answer;
use graphbench_core::oracle::{self, Answer};
use graphbench_core::{Graph, Task};
use proptest::prelude::*;
use std::collections::BTreeSet;

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let m = pairs.len();
        proptest::collection::vec(any::<bool>(), m)
            .prop_map(move |keep| Graph::undirected(n, pairs.iter().zip(&keep).filter(|(_, &k)| k).map(|(&e, _)| e)).unwrap())
    })
}

fn graph_and_perm(max_n: usize) -> impl Strategy<Value = (Graph, Vec<usize>)> {
    graph(max_n).prop_flat_map(|g| {
        let n = g.node_count();
        (Just(g), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

fn dag(max_n: usize) -> impl Strategy<Value = Graph> {
    graph_and_perm(max_n).prop_map(|(g, perm)| g.oriented_low_to_high().relabel(&perm).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn handshake(g in graph(20)) {
        let total: u64 = (0..g.node_count()).map(|u| oracle::degree(&g, u).unwrap()).sum();
        prop_assert_eq!(total, 2 * oracle::edge_count(&g));
    }

    #[test]
    fn cycle_iff_more_edges_than_a_forest(g in graph(20)) {
        let c = oracle::connected_components(&g).unwrap();
        let n = oracle::node_count(&g);
        prop_assert_eq!(oracle::has_cycle(&g).unwrap(), oracle::edge_count(&g) > n - c);
    }

    #[test]
    fn spanning_forest_has_n_minus_c_edges_and_validates(g in graph(20)) {
        let f = oracle::spanning_forest(&g).unwrap();
        let c = oracle::connected_components(&g).unwrap();
        prop_assert_eq!(f.len() as u64, oracle::node_count(&g) - c);
        prop_assert!(oracle::validate_spanning_tree(&g, &f).unwrap());
        let forest = Graph::undirected(g.node_count(), f.iter().copied()).unwrap();
        prop_assert!(!oracle::has_cycle(&forest).unwrap());
        prop_assert_eq!(oracle::connected_components(&forest).unwrap(), c);
    }

    #[test]
    fn component_counts_agree(g in graph(20)) {
        prop_assert_eq!(oracle::connected_components(&g).unwrap(), oracle::connected_components_bfs(&g).unwrap());
    }

    #[test]
    fn relabeling_preserves_answers((g, perm) in graph_and_perm(14)) {
        let h = g.relabel(&perm).unwrap();
        prop_assert_eq!(oracle::edge_count(&g), oracle::edge_count(&h));
        prop_assert_eq!(oracle::connected_components(&g).unwrap(), oracle::connected_components(&h).unwrap());
        prop_assert_eq!(oracle::has_cycle(&g).unwrap(), oracle::has_cycle(&h).unwrap());
        prop_assert_eq!(oracle::is_bipartite(&g).unwrap(), oracle::is_bipartite(&h).unwrap());
        for u in 0..g.node_count() {
            prop_assert_eq!(oracle::degree(&g, u).unwrap(), oracle::degree(&h, perm[u]).unwrap());
            let mapped: BTreeSet<usize> = oracle::neighbors(&g, u).unwrap().into_iter().map(|v| perm[v]).collect();
            prop_assert_eq!(mapped, oracle::neighbors(&h, perm[u]).unwrap());
            for v in 0..g.node_count() {
                prop_assert_eq!(
                    oracle::shortest_path_length(&g, u, v).ok(),
                    oracle::shortest_path_length(&h, perm[u], perm[v]).ok()
                );
            }
        }
    }

    #[test]
    fn distances_are_a_metric_on_components(g in graph(14)) {
        let n = g.node_count();
        let d: Vec<Vec<Option<u64>>> = (0..n).map(|u| oracle::bfs_distances(&g, u)).collect();
        for u in 0..n {
            prop_assert_eq!(d[u][u], Some(0));
            for v in 0..n {
                prop_assert_eq!(d[u][v], d[v][u]);
                for w in 0..n {
                    if let (Some(a), Some(b)) = (d[u][w], d[w][v]) {
                        prop_assert!(d[u][v].is_some_and(|x| x <= a + b));
                    }
                }
            }
        }
    }

    #[test]
    fn bipartite_iff_bfs_depth_parity_is_proper(g in graph(14)) {
        // In a bipartite graph every edge joins nodes whose BFS depths differ by one.
        let bip = oracle::is_bipartite(&g).unwrap();
        let labels = oracle::component_labels(&g).unwrap();
        let n = g.node_count();
        let mut depth = vec![0u64; n];
        for u in 0..n {
            let root = (0..n).find(|&r| labels[r] == labels[u]).unwrap();
            depth[u] = oracle::bfs_distances(&g, root)[u].unwrap();
        }
        let parity_ok = g.edges().iter().all(|&(u, v)| depth[u] % 2 != depth[v] % 2);
        prop_assert_eq!(bip, parity_ok);
    }

    #[test]
    fn topo_order_is_valid(g in dag(14)) {
        let order = oracle::topo_order(&g).unwrap();
        prop_assert!(oracle::validate_topo_order(&g, &order).unwrap());
        let mut sorted = order.clone();
        sorted.sort();
        prop_assert_eq!(sorted, (0..g.node_count()).collect::<Vec<_>>());
    }

    #[test]
    fn surface_labels_round_trip(base in 0usize..3, nodes in proptest::collection::btree_set(0usize..50, 0..10)) {
        let a = Answer::NodeSet(nodes);
        prop_assert_eq!(a.to_surface(base).from_surface(base), a);
    }

    #[test]
    fn extraction_never_panics(task in proptest::sample::select(Task::ALL.to_vec()), text in ".{0,600}") {
        let _ = extract_answer(task, &text);
    }

    #[test]
    fn extraction_never_panics_on_answer_like_text(
        task in proptest::sample::select(Task::ALL.to_vec()),
        text in "(Answer:|answer is|\\[|\\]|\\(|\\)|,|->| |[0-9]{1,25}|yes|no|not|cycle|bipartite|\n){0,60}",
    ) {
        let _ = extract_answer(task, &text);
    }
}
