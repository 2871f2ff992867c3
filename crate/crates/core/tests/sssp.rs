use congest_sssp::graph::{gen_graph, path_graph, GraphKind};
use congest_sssp::oracle::dijkstra;
use congest_sssp::sim::build_bfs_tree;
use congest_sssp::sssp::{
    check_spt, diameter_2approx, run_multi_source, run_sssp, Part1Mode, SsspConfig, VirtualChoice,
};
use congest_sssp::{Distance, UndirectedGraph};
use proptest::prelude::*;

fn random(n: usize, m: usize, lo: i64, hi: i64, seed: u64) -> UndirectedGraph {
    gen_graph(GraphKind::Random, n, m, (lo, hi), seed).unwrap()
}

fn cfg(seed: u64) -> SsspConfig {
    SsspConfig { seed, ..SsspConfig::default() }
}

#[test]
fn random_graphs_match_dijkstra_with_valid_trees() {
    let mut retries = 0;
    for seed in 0..20u64 {
        let n = 32 + (seed as usize * 11) % 120;
        let g = random(n, 3 * n, 0, 100, seed);
        let r = run_sssp(&g, seed as usize % n, &cfg(seed)).unwrap();
        assert_eq!(r.dist, dijkstra(&g, r.source), "seed {seed}");
        check_spt(r.source, &r.dist, &r.parent, |u, v| g.weight(u, v)).unwrap();
        retries += r.retries;
    }
    assert!(retries < 3, "{retries} retries");
}

#[test]
fn unverified_runs_are_exact_too() {
    for seed in 0..10u64 {
        let g = random(80, 200, 0, 30, seed);
        let c = SsspConfig { verify: false, ..cfg(seed) };
        let r = run_sssp(&g, 0, &c).unwrap();
        assert_eq!(r.dist, dijkstra(&g, 0), "seed {seed}");
    }
}

#[test]
fn changed_only_part_one_gives_same_distances_with_fewer_messages() {
    let g = random(120, 360, 1, 50, 4);
    let all = run_sssp(&g, 3, &cfg(4)).unwrap();
    let changed = run_sssp(&g, 3, &SsspConfig { part1: Part1Mode::Changed, ..cfg(4) }).unwrap();
    assert_eq!(all.dist, changed.dist);
    assert!(changed.ledger.part1.messages <= all.ledger.part1.messages);
}

#[test]
fn estimates_never_increase_and_never_undershoot() {
    for seed in 0..6u64 {
        let g = random(100, 250, 0, 20, seed);
        let c = SsspConfig { trace: true, ..cfg(seed) };
        let r = run_sssp(&g, 0, &c).unwrap();
        let truth = dijkstra(&g, 0);
        let vs = &r.run.virtual_set;
        for w in r.run.trace.windows(2) {
            for (a, b) in w[0][0].iter().zip(&w[1][0]) {
                assert!(b <= a);
            }
        }
        for it in &r.run.trace {
            for (i, &v) in vs.iter().enumerate() {
                assert!(it[0][i] >= truth[v]);
            }
        }
        assert!(r.run.fixpoint_detected);
        assert!(r.run.last_change <= r.run.max_iterations);
    }
}

#[test]
fn single_virtual_degenerates_to_bellman_ford() {
    let g = path_graph(6, 2);
    let c = SsspConfig { virtuals: VirtualChoice::Forced(vec![]), k: Some(3), ..cfg(0) };
    let r = run_sssp(&g, 0, &c).unwrap();
    assert_eq!(r.run.virtuals, 1);
    assert_eq!(r.run.k, 0);
    assert_eq!(r.run.hopset_edges, 0);
    assert_eq!(r.dist, dijkstra(&g, 0));
}

#[test]
fn multi_source_matches_each_dijkstra() {
    for (seed, s) in [(1u64, 2usize), (2, 8), (3, 30)] {
        let g = random(150, 400, 0, 60, seed);
        let sources: Vec<usize> = (0..s).map(|i| (i * 37 + 5) % 150).collect();
        let m = run_multi_source(&g, &sources, &cfg(seed)).unwrap();
        if s == 30 {
            assert!(m.batches > 1);
        }
        for row in &m.rows {
            assert_eq!(row.dist, dijkstra(&g, row.source));
            check_spt(row.source, &row.dist, &row.parent, |u, v| g.weight(u, v)).unwrap();
        }
    }
}

#[test]
fn bandwidth_shortens_the_hopset_phase() {
    let g = random(200, 600, 1, 100, 9);
    let base = SsspConfig { virtuals: VirtualChoice::SampleWith(0.2), k: Some(8), ..cfg(9) };
    let mut last = None;
    for b in [1, 4, 16] {
        let r = run_sssp(&g, 0, &SsspConfig { b, ..base.clone() }).unwrap();
        assert_eq!(r.dist, dijkstra(&g, 0));
        let rounds = (r.ledger.hopset().rounds, r.ledger.part1.rounds);
        if let Some((h, p)) = last {
            assert!(rounds.0 <= h && rounds.1 <= p, "b={b}: {rounds:?} after {last:?}");
        }
        last = Some(rounds);
    }
}

#[test]
fn diameter_bracket() {
    for seed in 0..8u64 {
        let g = random(60, 150, 1, 40, seed);
        let r = run_sssp(&g, 0, &cfg(seed)).unwrap();
        let (tree, _) = build_bfs_tree(&g, 0, 1).unwrap();
        let (ecc, _) = diameter_2approx(&g, &r, &tree).unwrap();
        let diam = (0..60).flat_map(|u| dijkstra(&g, u)).max().unwrap();
        assert!(ecc <= diam && diam.finite().unwrap() <= 2 * ecc.finite().unwrap());
    }
}

#[test]
fn result_serializes_to_json() {
    let g = path_graph(4, 1);
    let r = run_sssp(&g, 0, &cfg(0)).unwrap();
    let v: serde_json::Value = serde_json::to_value(&r).unwrap();
    assert_eq!(v["dist"], serde_json::json!([0, 1, 2, 3]));
    assert!(v["ledger"]["sweep"]["rounds"].is_u64());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn exact_on_small_random_graphs(
        n in 2usize..40,
        extra in 0usize..40,
        hi in 0i64..10,
        seed in any::<u64>(),
        b in 1usize..4,
        src in any::<prop::sample::Index>(),
    ) {
        let m = (n - 1 + extra).min(n * (n - 1) / 2);
        let g = random(n, m, 0, hi, seed);
        let r = run_sssp(&g, src.index(n), &SsspConfig { b, ..cfg(seed) }).unwrap();
        prop_assert_eq!(&r.dist, &dijkstra(&g, r.source));
        prop_assert!(check_spt(r.source, &r.dist, &r.parent, |u, v| g.weight(u, v)).is_ok());
        prop_assert!(r.ledger.total().peak_edge_load <= b as u64);
    }

    #[test]
    fn forced_virtual_sets_are_exact(n in 3usize..30, seed in any::<u64>(), k in 1usize..5, mask in any::<u32>()) {
        let g = random(n, (2 * n).min(n * (n - 1) / 2), 0, 9, seed);
        let vs: Vec<usize> = (0..n).filter(|v| mask >> (v % 32) & 1 == 1).collect();
        let c = SsspConfig { virtuals: VirtualChoice::Forced(vs), k: Some(k), verify: false, ..cfg(seed) };
        let r = run_sssp(&g, 0, &c).unwrap();
        let truth = dijkstra(&g, 0);
        // Forced sets need not satisfy the sampling event; distances can only overshoot.
        for (d, t) in r.dist.iter().zip(&truth) {
            prop_assert!(d >= t);
        }
        prop_assert!(r.dist.contains(&Distance::ZERO));
    }
}
