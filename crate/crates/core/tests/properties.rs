mod common;

use common::*;
use pebblab::assignment_graph::build as build_generic;
use pebblab::format::{parse_instance, write_instance};
use pebblab::pebbling::{apply_move, legal_moves};
use pebblab::*;
use proptest::prelude::*;

/// A graph on `n` vertices from one choice per unordered pair: no edge,
/// forward, or backward.
fn graph_from(n: usize, pairs: &[u8]) -> OrientedGraph {
    let mut edges = Vec::new();
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            match pairs[k] {
                1 => edges.push((i, j)),
                2 => edges.push((j, i)),
                _ => {}
            }
            k += 1;
        }
    }
    OrientedGraph::from_indices((0..n).map(|i| format!("v{i}")).collect(), edges).unwrap()
}

fn instance(max_n: usize, cap: u32) -> impl Strategy<Value = (OrientedGraph, Assignment)> {
    (1..=max_n).prop_flat_map(move |n| {
        (
            prop::collection::vec(0u8..3, n * (n - 1) / 2),
            prop::collection::vec(0..=cap, n),
        )
            .prop_map(move |(pairs, counts)| (graph_from(n, &pairs), Assignment::from_counts(counts)))
    })
}

fn permuted_instance() -> impl Strategy<Value = (OrientedGraph, Assignment, Vec<usize>)> {
    instance(5, 5).prop_flat_map(|(g, s)| {
        let n = g.vertex_count();
        (Just(g), Just(s), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 400, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn build_matches_naive_enumeration((g, s) in instance(6, 5)) {
        let ag = build(&g, &s).unwrap();
        prop_assert_eq!(matches_oracle(&g, &ag), Ok(()));
    }

    #[test]
    fn built_graphs_are_graded_bipartite_with_one_source((g, s) in instance(6, 6)) {
        let ag = build(&g, &s).unwrap();
        prop_assert!(is_graded(&ag));
        prop_assert!(has_unique_source(&ag));
        prop_assert!(is_bipartite(&ag));
        prop_assert_eq!(ag.as_oriented_graph().sources().len(), 1);
    }

    #[test]
    fn sink_counts_do_not_change_structure(
        (g, s) in instance(6, 5),
        extra in prop::collection::vec(0u32..20, 6),
    ) {
        let mut counts = s.counts().to_vec();
        for v in g.sinks() {
            counts[v.0] = extra[v.0];
        }
        let a = build(&g, &s).unwrap();
        let b = build(&g, &Assignment::from_counts(counts)).unwrap();
        prop_assert_eq!(a.state_count(), b.state_count());
        prop_assert_eq!(a.transitions(), b.transitions());
    }

    #[test]
    fn compact_and_wide_counts_agree((g, s) in instance(5, 5)) {
        let wide = build(&g, &s).unwrap();
        let narrow = build_generic(&g, &s.convert::<CompactPebbles>().unwrap()).unwrap();
        prop_assert_eq!(wide.transitions(), narrow.transitions());
        let back: Vec<Vec<u64>> = narrow.states().iter().map(|x| x.to_u64s()).collect();
        let orig: Vec<Vec<u64>> = wide.states().iter().map(|x| x.to_u64s()).collect();
        prop_assert_eq!(back, orig);
    }

    #[test]
    fn moves_commute_when_both_orders_are_legal((g, s) in instance(6, 6), i in 0usize..64, j in 0usize..64) {
        let moves = legal_moves(&g, &s);
        prop_assume!(moves.len() >= 2);
        let (m1, m2) = (moves[i % moves.len()], moves[j % moves.len()]);
        let ab = apply_move(&g, &s, m1).and_then(|t| apply_move(&g, &t, m2));
        let ba = apply_move(&g, &s, m2).and_then(|t| apply_move(&g, &t, m1));
        if let (Ok(x), Ok(y)) = (ab, ba) {
            prop_assert_eq!(x, y);
        }
    }

    #[test]
    fn state_level_cycle_search_agrees_with_graph_search((g, s) in instance(5, 6)) {
        let ag = build(&g, &s).unwrap();
        let h = ag.as_oriented_graph();
        let fast = ag.downward_4_cycle().map(|c| c.map(|x| x.0));
        let slow = contains_downward_4_cycle(&h).map(|c| c.map(|x| x.0));
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn canonical_form_ignores_labels((g, _, perm) in permuted_instance()) {
        let h = g.relabel(&perm);
        prop_assert_eq!(canonical_form(&g), canonical_form(&h));
        let m = digraph_isomorphic(&g, &h);
        prop_assert!(m.is_some_and(|m| m.verify(&g, &h)));
    }

    #[test]
    fn relabeled_instances_have_isomorphic_assignment_graphs(
        (g, s, perm) in permuted_instance(),
    ) {
        let h = g.relabel(&perm);
        let ids: Vec<VertexId> = perm.iter().map(|&p| VertexId(p)).collect();
        let a = build(&g, &s).unwrap();
        let b = build(&h, &s.permuted(&ids)).unwrap();
        prop_assert_eq!(a.state_count(), b.state_count());
        prop_assert!(digraph_isomorphic(&a.as_oriented_graph(), &b.as_oriented_graph()).is_some());
    }

    #[test]
    fn instances_round_trip_through_text((g, s) in instance(6, 9)) {
        let text = write_instance(&g, &s);
        let back = parse_instance::<Pebbles>(&text).unwrap();
        prop_assert_eq!(&back.graph, &g);
        prop_assert_eq!(&back.assignment, &s);
    }
}

#[test]
fn dense_oracle_agrees_with_vector_oracle() {
    let mut dense = DenseClosure::default();
    for g in pebblab::theorems::corpus::graphs_up_to(4) {
        let e = edge_pairs(&g);
        for c in bounded_total_counts(g.vertex_count(), DENSE_CAP) {
            let moves = dense.run(&e, &c);
            let (states, edges) = naive_closure_vec(&e, c.iter().map(|&x| x as u64).collect());
            assert_eq!((dense.len(), moves), (states.len(), edges.len()));
            assert!(states.iter().all(|x| dense.contains(&x.iter().map(|&c| c as u8).collect::<Vec<_>>())));
        }
    }
}
