use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use linkrank_bench::fixture_graph;
use linkrank_core::metrics::{avg_clustering, degree_ccdf, largest_scc, Direction};
use linkrank_core::pagerank::{pagerank, PageRankOptions};
use linkrank_core::temporal::snapshot;

fn graph_kernels(c: &mut Criterion) {
    let g = fixture_graph(20_000, 10.0);
    let mut group = c.benchmark_group("graph_kernels_20k");
    group.sample_size(20);

    group.bench_function("pagerank", |b| {
        b.iter(|| pagerank(black_box(&g), &PageRankOptions::default()).unwrap())
    });
    group.bench_function("largest_scc", |b| b.iter(|| largest_scc(black_box(&g))));
    group.bench_function("avg_clustering", |b| {
        b.iter(|| avg_clustering(black_box(&g)).unwrap())
    });
    group.bench_function("degree_ccdf_in", |b| {
        b.iter(|| degree_ccdf(black_box(&g), Direction::In).unwrap())
    });
    group.bench_function("snapshot_mid_range", |b| {
        let cutoff = "2014-06".parse().unwrap();
        b.iter(|| snapshot(black_box(&g), cutoff))
    });
    group.finish();
}

criterion_group!(benches, graph_kernels);
criterion_main!(benches);
