use congest_sssp::graph::{gen_graph, GraphKind};
use congest_sssp::hopset::{
    build_hopset, distributed_ksets, distributed_ksets_traced, hop_limit, hopset_depth, sample_virtual,
    verify_set_equalities,
};
use congest_sssp::oracle::{build_skeleton_oracle, canonical_paths_oracle, dijkstra, event_a_holds, limited_bf_oracle};
use congest_sssp::sim::build_bfs_tree;
use congest_sssp::{Distance, UndirectedGraph};
use proptest::prelude::*;

fn random(n: usize, m: usize, lo: i64, hi: i64, seed: u64) -> UndirectedGraph {
    gen_graph(GraphKind::Random, n, m, (lo, hi), seed).unwrap()
}

#[test]
fn ksets_match_oracle_on_random_64() {
    let g = random(64, 256, 1, 100, 7);
    let vs = sample_virtual(64, 12.0 / 64.0, 3, &[]).members;
    let (sets, ledger) = distributed_ksets(&g, &vs, 3, 20, 1).unwrap();
    assert_eq!(sets, limited_bf_oracle(&g, &vs, 20, 3));
    assert_eq!(ledger.rounds, 20 * 3);
}

#[test]
fn ksets_are_monotone_per_super_round() {
    let g = random(40, 60, 0, 5, 2);
    let vs = sample_virtual(40, 0.3, 5, &[]).members;
    let (_, _, history) = distributed_ksets_traced(&g, &vs, 4, 12, 2).unwrap();
    for per_vertex in &history {
        for w in per_vertex.windows(2) {
            // Entry i can only get better: a set never loses ground position-wise.
            assert!(w[1].len() >= w[0].len());
            for (new, old) in w[1].iter().zip(w[0].iter()) {
                assert!(new.len() <= old.len());
            }
        }
    }
    for (v, per_vertex) in history.iter().enumerate() {
        for (i, set) in per_vertex.iter().enumerate() {
            assert_eq!(*set, limited_bf_oracle(&g, &vs, i, 4)[v]);
        }
    }
}

#[test]
fn hopset_edges_are_skeleton_distances_under_event_a() {
    let (n, q, k, seed) = (128, 0.15, 3, 11);
    let g = random(n, 384, 1, 100, seed);
    let vs = sample_virtual(n, q, seed, &[0]).members;
    let h = hop_limit(n, q, 2.0);
    let coll = canonical_paths_oracle(&g).unwrap();
    assert!(event_a_holds(&coll, &vs, h));
    let (tree, _) = build_bfs_tree(&g, 0, 1).unwrap();
    let built = build_hopset(&g, &vs, k, hopset_depth(n, q, k, 2.0), 1, &tree).unwrap();
    let skel = build_skeleton_oracle(&g, &vs, h);
    let sg = skel.as_graph();
    for e in &built.hopset.edges {
        let d = dijkstra(&sg, skel.index_of(e.from).unwrap());
        assert_eq!(e.len.dist, d[skel.index_of(e.to).unwrap()]);
    }
    let ledger = built.ledger;
    let d_rt = tree.height as u64;
    let m = built.hopset.len() as u64;
    assert_eq!(ledger.ksets.rounds, built.depth as u64 * (k as u64 + 1));
    assert!(ledger.upcast.rounds <= d_rt + m);
    assert!(ledger.broadcast.rounds <= d_rt + m);
}

#[test]
fn set_equalities_hold_when_event_a_does() {
    let mut applicable = 0;
    for seed in 0..12 {
        let g = random(96, 110 + 25 * seed as usize, 0, 20, seed);
        let vs = sample_virtual(96, 0.3, seed, &[]).members;
        let r = verify_set_equalities(&g, &vs, 3, 12).unwrap();
        applicable += r.applicable as usize;
        assert!(r.violations.is_empty(), "seed {seed}: {:?}", r.violations[0]);
    }
    assert!(applicable > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ksets_equal_oracle(
        n in 2usize..24,
        extra in 0usize..30,
        hi in 0i64..6,
        seed in any::<u64>(),
        q in 0.1f64..0.9,
        k in 1usize..5,
        depth in 0usize..12,
        b in 1usize..4,
    ) {
        let m = (n - 1 + extra).min(n * (n - 1) / 2);
        let g = random(n, m, 0, hi, seed);
        let vs = sample_virtual(n, q, seed, &[0]).members;
        let (sets, ledger) = distributed_ksets(&g, &vs, k, depth, b).unwrap();
        prop_assert_eq!(sets, limited_bf_oracle(&g, &vs, depth, k));
        prop_assert_eq!(ledger.rounds, (depth * k.div_ceil(b)) as u64);
        prop_assert!(ledger.peak_edge_load <= b as u64);
    }

    #[test]
    fn no_finite_tuple_below_true_distance(n in 2usize..20, seed in any::<u64>(), k in 1usize..4) {
        let g = random(n, (2 * n).min(n * (n - 1) / 2), 0, 9, seed);
        let vs = sample_virtual(n, 0.4, seed, &[0]).members;
        let (sets, _) = distributed_ksets(&g, &vs, k, n, 1).unwrap();
        for (v, set) in sets.iter().enumerate() {
            for t in set {
                let d = dijkstra(&g, t.origin)[v];
                prop_assert!(t.dist >= d && t.dist != Distance::INFINITY);
            }
        }
    }
}
