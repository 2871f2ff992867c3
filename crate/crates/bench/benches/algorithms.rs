use congest_sssp::hopset::definitional_hopset;
use congest_sssp::oracle::dijkstra;
use congest_sssp::sssp::{run_sssp, SsspConfig};
use congest_sssp::stream::{directed_stream_sssp, stream_sssp, DirectedConfig, MemoryStream};
use congest_sssp_bench::{sparse_digraph, sparse_graph};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn distributed(c: &mut Criterion) {
    let mut group = c.benchmark_group("distributed_sssp");
    group.sample_size(10);
    for n in [128, 256, 512] {
        let g = sparse_graph(n, 1);
        let cfg = SsspConfig { verify: false, ..SsspConfig::default() };
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| b.iter(|| run_sssp(g, 0, &cfg).unwrap()));
    }
    group.finish();
}

fn streaming(c: &mut Criterion) {
    let mut group = c.benchmark_group("stream_sssp");
    for n in [256, 1024] {
        let g = sparse_graph(n, 2);
        let k = (n as f64).sqrt().ceil() as usize;
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| {
            b.iter(|| stream_sssp(&mut MemoryStream::undirected(g), 0, k).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("directed_stream_sssp");
    group.sample_size(10);
    for n in [128, 256] {
        let g = sparse_digraph(n, 3);
        let cfg = DirectedConfig { k: 16, ..DirectedConfig::default() };
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| {
            b.iter(|| directed_stream_sssp(&mut MemoryStream::directed(g), &[0], &cfg).unwrap())
        });
    }
    group.finish();
}

fn oracles(c: &mut Criterion) {
    let g = sparse_graph(1024, 4);
    c.bench_function("dijkstra_1024", |b| b.iter(|| dijkstra(&g, 0)));
    let small = sparse_graph(96, 5);
    c.bench_function("definitional_hopset_96_k8", |b| b.iter(|| definitional_hopset(&small, 8)));
}

criterion_group!(benches, distributed, streaming, oracles);
criterion_main!(benches);
