//! PageRank against an independent dense power-iteration oracle, mass
//! conservation, regular-graph uniformity, permutation equivariance, and
//! the labeling rule against a full-sort oracle.

mod common;

use common::*;
use linkrank_core::graph::{build_graph, LinkingOption, UserRecord};
use linkrank_core::pagerank::{label_high, pagerank, InfluenceLabel, PageRankOptions};
use rand::Rng;

#[test]
fn matches_dense_oracle_on_random_graphs() {
    for seed in 0..50u64 {
        let mut r = rng(seed);
        let g = random_digraph(10, r.random_range(0.1..0.5), &mut r);
        let got = pagerank(&g, &PageRankOptions::default()).unwrap();
        let expected = dense_pagerank(&g, 0.85, 1e-14, 10_000);
        for (i, (a, b)) in got.values.iter().zip(&expected).enumerate() {
            assert!((a - b).abs() < 1e-9, "seed {seed} node {i}: {a} vs {b}");
        }
    }
}

#[test]
fn scores_always_sum_to_one() {
    for seed in 0..50u64 {
        let mut r = rng(100 + seed);
        let n = r.random_range(1..=40);
        let g = random_digraph(n, 0.15, &mut r);
        let got = pagerank(&g, &PageRankOptions::default()).unwrap();
        let sum: f64 = got.values.iter().sum();
        assert!((sum - 1.0).abs() < 1e-9, "seed {seed}: sum {sum}");
        assert!(got.values.iter().all(|&s| s > 0.0), "seed {seed}");
    }
}

#[test]
fn directed_cycle_is_uniform() {
    for n in [2usize, 3, 7, 50, 333] {
        let edges: Vec<(u32, u32)> = (0..n as u32).map(|u| (u, (u + 1) % n as u32)).collect();
        let g = graph_from(n, &edges);
        let got = pagerank(&g, &PageRankOptions::default()).unwrap();
        for &s in &got.values {
            assert!((s - 1.0 / n as f64).abs() < 1e-9, "n {n}: {s}");
        }
    }
}

#[test]
fn node_permutation_permutes_scores() {
    for seed in 0..20u64 {
        let mut r = rng(200 + seed);
        let n = 12usize;
        let g = random_digraph(n, 0.3, &mut r);

        // permuted copy: user list reversed, edges renamed accordingly
        let users: Vec<UserRecord> = (0..n)
            .rev()
            .map(|i| UserRecord {
                user_id: format!("n{i}"),
                registered_at: "2013-01".parse().unwrap(),
                linking_option: LinkingOption::Neither,
                twitter: None,
            })
            .collect();
        let edges: Vec<(String, String)> =
            g.edges().map(|(u, v)| (format!("n{u}"), format!("n{v}"))).collect();
        let permuted = build_graph(users, &edges).unwrap();

        let a = pagerank(&g, &PageRankOptions::default()).unwrap();
        let b = pagerank(&permuted, &PageRankOptions::default()).unwrap();
        for u in 0..n as u32 {
            let original = a.values[u as usize];
            let moved = b.values[permuted.node_index(&format!("n{u}")).unwrap() as usize];
            assert!((original - moved).abs() < 1e-12, "seed {seed} node {u}");
        }
    }
}

#[test]
fn labeling_matches_full_sort_oracle() {
    for seed in 0..120u64 {
        let mut r = rng(300 + seed);
        let n = r.random_range(1..=1000);
        // duplicates on purpose: a coarse value grid forces ties
        let scores: Vec<f64> =
            (0..n).map(|_| r.random_range(1..=40) as f64 / 40.0).collect();
        let percentile = r.random_range(0.001..0.999);
        let got = label_high(&scores, percentile).unwrap();
        let (threshold, expected) = brute_high_labels(&scores, percentile);
        assert_eq!(got.threshold, threshold, "seed {seed}");
        for (label, &want_high) in got.labels.iter().zip(&expected) {
            assert_eq!(*label == InfluenceLabel::High, want_high, "seed {seed}");
        }
        let cap = ((percentile * n as f64 - 1e-9).ceil() as usize).max(1);
        assert!(got.high_count <= cap, "seed {seed}: {} > {cap}", got.high_count);
    }
}

#[test]
fn two_hundred_distinct_scores_top_two() {
    let scores: Vec<f64> = (1..=200).map(|i| i as f64 / 200.0).collect();
    let got = label_high(&scores, 0.01).unwrap();
    assert_eq!(got.high_count, 2);
    assert!(got.labels[199] == InfluenceLabel::High && got.labels[198] == InfluenceLabel::High);
}

#[test]
fn non_convergence_is_reported_not_fatal() {
    let mut r = rng(42);
    let g = random_digraph(30, 0.2, &mut r);
    let opts = PageRankOptions { max_iter: 2, ..Default::default() };
    let got = pagerank(&g, &opts).unwrap();
    assert!(!got.converged);
    assert_eq!(got.iterations_run, 2);
    assert!(got.residual > 0.0);
}
