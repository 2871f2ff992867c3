use congest_sssp::graph::{gen_digraph, gen_graph, plant_negative_cycle, reweight_with_potential, GraphKind};
use congest_sssp::hopset::definitional_hopset;
use congest_sssp::oracle::{bellman_ford_directed, dijkstra, dijkstra_directed};
use congest_sssp::sssp::check_spt;
use congest_sssp::stream::{
    build_k_neighborhood, directed_stream_sssp, directed_stream_verified, stream_hopset, stream_multi_source,
    stream_sssp, DirectedConfig, FileStream, MemoryStream, UNDIRECTED_WORDS_C,
};
use congest_sssp::{DirectedGraph, UndirectedGraph, Weight};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random(n: usize, m: usize, lo: i64, hi: i64, seed: u64) -> UndirectedGraph {
    gen_graph(GraphKind::Random, n, m, (lo, hi), seed).unwrap()
}

fn arc_weight(g: &DirectedGraph) -> impl Fn(usize, usize) -> Option<Weight> + '_ {
    move |u, v| g.weight(u, v)
}

#[test]
fn neighborhood_lists_are_the_k_lightest_edges() {
    for seed in 0..10u64 {
        let g = random(60, 200, 0, 9, seed);
        let k = 1 + seed as usize % 6;
        let (nbhd, ledger) = build_k_neighborhood(&mut MemoryStream::undirected(&g), k).unwrap();
        assert_eq!(ledger.passes, 1);
        for v in 0..g.n() {
            let mut all: Vec<(Weight, usize)> = g.neighbors(v).iter().map(|nb| (nb.weight, nb.id)).collect();
            all.sort_unstable();
            let want: Vec<(usize, Weight)> = all.into_iter().take(k).map(|(w, u)| (u, w)).collect();
            assert_eq!(nbhd.lists[v], want, "seed {seed} vertex {v}");
        }
    }
}

#[test]
fn exact_with_pass_and_memory_bounds() {
    for seed in 0..30u64 {
        let n = 20 + (seed as usize * 13) % 200;
        let g = random(n, 3 * n, 0, 50, seed);
        let sqrt = (n as f64).sqrt().ceil() as usize;
        for k in [4, 16, sqrt] {
            let src = seed as usize % n;
            let r = stream_sssp(&mut MemoryStream::undirected(&g), src, k).unwrap();
            let row = &r.rows[0];
            assert_eq!(row.dist, dijkstra(&g, src), "seed {seed} k {k}");
            check_spt(src, &row.dist, &row.parent, |u, v| g.weight(u, v)).unwrap();
            assert!(r.ledger.passes <= 1 + (4 * n as u64).div_ceil(r.k as u64));
            assert!(r.ledger.peak_words <= UNDIRECTED_WORDS_C * n as u64 * (r.k as u64 + 1));
        }
    }
}

#[test]
fn multi_source_rows_are_exact() {
    let g = random(120, 400, 1, 30, 5);
    let sources = [0, 17, 44, 90, 119];
    let r = stream_multi_source(&mut MemoryStream::undirected(&g), &sources, 8).unwrap();
    assert!(r.ledger.peak_words <= UNDIRECTED_WORDS_C * 120 * (8 + 5));
    for (row, &s) in r.rows.iter().zip(&sources) {
        assert_eq!(row.source, s);
        assert_eq!(row.dist, dijkstra(&g, s));
        check_spt(s, &row.dist, &row.parent, |u, v| g.weight(u, v)).unwrap();
    }
}

#[test]
fn runs_are_deterministic() {
    let g = random(90, 300, 0, 20, 2);
    let a = stream_sssp(&mut MemoryStream::undirected(&g), 3, 6).unwrap();
    let b = stream_sssp(&mut MemoryStream::undirected(&g), 3, 6).unwrap();
    assert_eq!(a, b);
}

#[test]
fn file_stream_matches_memory_stream() {
    let g = random(50, 120, 0, 15, 8);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    g.save(&path).unwrap();
    let from_file = stream_sssp(&mut FileStream::open(&path).unwrap(), 0, 5).unwrap();
    let from_memory = stream_sssp(&mut MemoryStream::undirected(&g), 0, 5).unwrap();
    assert_eq!(from_file, from_memory);
}

#[test]
fn planted_negative_cycles_are_detected() {
    for seed in 0..20u64 {
        let base = gen_digraph(60, 200, (0, 20), seed).unwrap();
        let (g, _) = plant_negative_cycle(&base, 3 + seed as usize % 6, 1, seed);
        let r = directed_stream_sssp(
            &mut MemoryStream::directed(&g),
            &[0],
            &DirectedConfig { k: 8, seed, ..Default::default() },
        )
        .unwrap();
        assert!(r.cycle.detected, "seed {seed}");
        assert!(r.rows.is_empty());
        assert_eq!(r.ledger.passes, 2 * r.gamma as u64);
        if let Some(w) = &r.cycle.witness {
            assert_eq!(w.first(), w.last());
            let total: Weight = w.windows(2).map(|p| g.weight(p[0], p[1]).unwrap()).sum();
            assert!(total < 0, "seed {seed}: witness weight {total}");
        }
    }
}

#[test]
fn nonnegative_and_reweighted_digraphs_are_exact() {
    for seed in 0..20u64 {
        let g = gen_digraph(70, 250, (0, 40), seed).unwrap();
        let cfg = DirectedConfig { k: 4 + seed as usize % 8, seed, ..Default::default() };
        let r = directed_stream_verified(&g, &[0, 5], &cfg).unwrap();
        assert!(!r.cycle.detected);
        for row in &r.rows {
            assert_eq!(row.dist, dijkstra_directed(&g, row.source));
            check_spt(row.source, &row.dist, &row.parent, arc_weight(&g)).unwrap();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p: Vec<Weight> = (0..70).map(|_| rng.gen_range(-30..=30)).collect();
        let h = reweight_with_potential(&g, &p);
        let r = directed_stream_sssp(&mut MemoryStream::directed(&h), &[0], &cfg).unwrap();
        assert!(!r.cycle.detected);
        assert_eq!(r.rows[0].dist, bellman_ford_directed(&h, 0).unwrap());
        check_spt(0, &r.rows[0].dist, &r.rows[0].parent, arc_weight(&h)).unwrap();
    }
}

#[test]
fn directed_stream_rejects_undirected_input() {
    let g = random(10, 20, 0, 5, 0);
    assert!(directed_stream_sssp(&mut MemoryStream::undirected(&g), &[0], &DirectedConfig::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn neighborhood_hopset_equals_definitional_hopset(
        n in 3usize..40,
        extra in 0usize..60,
        hi in 0i64..8,
        k in 1usize..6,
        seed in any::<u64>(),
    ) {
        let m = (n - 1 + extra).min(n * (n - 1) / 2);
        let g = random(n, m, 0, hi, seed);
        let k = k.min(n - 1);
        let (nbhd, _) = build_k_neighborhood(&mut MemoryStream::undirected(&g), k).unwrap();
        let ours = stream_hopset(&nbhd, k);
        prop_assert_eq!(&ours.hopset, &definitional_hopset(&g, k));
        for e in &ours.hopset.edges {
            let path = ours.unfold(e.from, e.to).unwrap();
            let w: Weight = path.iter().map(|p| p.2).sum();
            prop_assert_eq!(e.len.dist.finite(), Some(w));
            for &(x, y, w) in &path {
                prop_assert_eq!(g.weight(x, y), Some(w));
            }
        }
    }

    #[test]
    fn undirected_stream_is_exact(n in 2usize..50, extra in 0usize..80, hi in 0i64..12, k in 1usize..10, seed in any::<u64>()) {
        let m = (n - 1 + extra).min(n * (n - 1) / 2);
        let g = random(n, m, 0, hi, seed);
        let r = stream_sssp(&mut MemoryStream::undirected(&g), 0, k).unwrap();
        prop_assert_eq!(&r.rows[0].dist, &dijkstra(&g, 0));
        prop_assert!(check_spt(0, &r.rows[0].dist, &r.rows[0].parent, |u, v| g.weight(u, v)).is_ok());
    }

    #[test]
    fn directed_stream_agrees_with_bellman_ford(n in 2usize..30, extra in 0usize..60, lo in -6i64..1, seed in any::<u64>()) {
        let m = (n - 1 + extra).min(n * (n - 1));
        let g = gen_digraph(n, m, (lo, 10), seed).unwrap();
        let r = directed_stream_sssp(&mut MemoryStream::directed(&g), &[0], &DirectedConfig { k: 3, seed, ..Default::default() })
            .unwrap();
        match bellman_ford_directed(&g, 0) {
            Ok(d) => {
                prop_assert!(!r.cycle.detected);
                prop_assert_eq!(&r.rows[0].dist, &d);
            }
            Err(_) => prop_assert!(r.cycle.detected),
        }
    }
}
