//! Graph-kernel correctness against brute-force oracles on randomized
//! small graphs, plus the sampled path-length accuracy bound.

mod common;

use common::*;
use linkrank_core::metrics::{
    account_followership, avg_clustering, avg_path_length, degree_ccdf, degree_summary,
    largest_scc, Direction, SampleSpec,
};
use rand::Rng;

#[test]
fn degree_summary_matches_brute_force_scan() {
    for seed in 0..100u64 {
        let mut r = rng(seed);
        let n = r.random_range(1..=50);
        let p = r.random_range(0.02..0.3);
        let g = random_digraph(n, p, &mut r);
        let s = degree_summary(&g);
        let (nodes, edges, zero_in, zero_out) = brute_degree_summary(&g);
        assert_eq!((s.nodes, s.edges, s.zero_in_degree, s.zero_out_degree),
                   (nodes, edges, zero_in, zero_out), "seed {seed}");
    }
}

#[test]
fn followership_matches_brute_force_scan() {
    for seed in 0..100u64 {
        let mut r = rng(1000 + seed);
        let n = r.random_range(2..=30);
        let g = random_digraph(n, 0.2, &mut r);
        let account = r.random_range(0..n as u32);
        let got = account_followership(&g, &format!("n{account}")).unwrap();
        assert_eq!(got, brute_followership(&g, account), "seed {seed}");
    }
}

#[test]
fn clustering_matches_brute_force_on_small_graphs() {
    for seed in 0..150u64 {
        let mut r = rng(2000 + seed);
        let n = r.random_range(1..=10);
        let p = r.random_range(0.1..0.7);
        let g = random_digraph(n, p, &mut r);
        let fast = avg_clustering(&g).unwrap();
        let brute = brute_clustering(&g);
        assert!((fast - brute).abs() < 1e-12, "seed {seed}: {fast} vs {brute}");
    }
}

#[test]
fn largest_scc_matches_mutual_reachability_oracle() {
    for seed in 0..150u64 {
        let mut r = rng(3000 + seed);
        let n = r.random_range(1..=12);
        let p = r.random_range(0.05..0.5);
        let g = random_digraph(n, p, &mut r);
        assert_eq!(largest_scc(&g), brute_largest_scc(&g), "seed {seed}");
    }
}

#[test]
fn exact_path_length_matches_floyd_warshall() {
    let mut checked = 0;
    for seed in 0..400u64 {
        let mut r = rng(4000 + seed);
        let n = r.random_range(2..=10);
        let p = r.random_range(0.2..0.8);
        let g = random_digraph(n, p, &mut r);
        let within = largest_scc(&g);
        if within.len() < 2 {
            continue;
        }
        let Some(expected) = floyd_warshall_avg(&g, &within) else { continue };
        let got = avg_path_length(&g, &within, None).unwrap();
        assert!((got - expected).abs() < 1e-12, "seed {seed}: {got} vs {expected}");
        checked += 1;
    }
    assert!(checked >= 100, "only {checked} strongly connected cases");
}

#[test]
fn ccdf_starts_at_one_and_never_increases() {
    for seed in 0..100u64 {
        let mut r = rng(5000 + seed);
        let n = r.random_range(1..=60);
        let g = random_digraph(n, 0.1, &mut r);
        for direction in [Direction::In, Direction::Out] {
            let curve = degree_ccdf(&g, direction).unwrap();
            assert_eq!(curve[0], (0, 1.0), "seed {seed}");
            assert!(curve.windows(2).all(|w| w[1].1 <= w[0].1), "seed {seed}");
            assert!(curve.windows(2).all(|w| w[1].0 > w[0].0), "seed {seed}");
        }
    }
}

/// Strongly connected graph: a directed cycle plus random chords.
fn connected_graph(n: usize, extra: usize, r: &mut rand_chacha::ChaCha12Rng) -> linkrank_core::SocialGraph {
    let mut edges: Vec<(u32, u32)> = (0..n as u32).map(|u| (u, (u + 1) % n as u32)).collect();
    for _ in 0..extra {
        let u = r.random_range(0..n as u32);
        let v = r.random_range(0..n as u32);
        if u != v {
            edges.push((u, v));
        }
    }
    graph_from(n, &edges)
}

#[test]
fn sampled_path_length_tracks_exact_within_five_percent() {
    for seed in 0..10u64 {
        let mut r = rng(6000 + seed);
        let n = 1000;
        let g = connected_graph(n, 4000, &mut r);
        let within: Vec<u32> = (0..n as u32).collect();
        let exact = avg_path_length(&g, &within, None).unwrap();
        let sampled = avg_path_length(
            &g,
            &within,
            Some(SampleSpec { sources: 250, seed: seed * 7 + 1 }),
        )
        .unwrap();
        let rel = (sampled - exact).abs() / exact;
        assert!(rel < 0.05, "seed {seed}: exact {exact}, sampled {sampled}, rel {rel}");
    }
}

#[test]
fn sampling_more_sources_than_members_is_exact() {
    let mut r = rng(99);
    let g = connected_graph(20, 40, &mut r);
    let within: Vec<u32> = (0..20).collect();
    let exact = avg_path_length(&g, &within, None).unwrap();
    let sampled =
        avg_path_length(&g, &within, Some(SampleSpec { sources: 20, seed: 1 })).unwrap();
    assert_eq!(exact, sampled);
}
