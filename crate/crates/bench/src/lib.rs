//! Shared fixtures for the benchmark targets: a synthetic crawl of a
//! configurable size, parsed back into the graph and dataset types.

use linkrank_core::graph::{build_graph, SocialGraph};
use linkrank_core::ml::{build_dataset, eligible_pool_sizes, LabeledDataset, SplitCounts};
use linkrank_core::pagerank::{pagerank_with_labels, PageRankOptions, PageRankResult};
use linkrank_core::synth::{generate, SynthConfig};

pub fn fixture_graph(n_users: usize, avg_degree: f64) -> SocialGraph {
    let cfg = SynthConfig {
        n_users,
        target_avg_degree: avg_degree,
        seed: 1337,
        ..Default::default()
    };
    let out = generate(&cfg).expect("generation succeeds");
    let users: Vec<linkrank_core::UserRecord> = String::from_utf8(out.users_jsonl)
        .expect("utf8")
        .lines()
        .map(|line| serde_json::from_str(line).expect("valid record"))
        .collect();
    let edges: Vec<(String, String)> = String::from_utf8(out.edges_tsv)
        .expect("utf8")
        .lines()
        .map(|line| {
            let (a, b) = line.split_once('\t').expect("tab");
            (a.to_string(), b.to_string())
        })
        .collect();
    build_graph(users, &edges).expect("well-formed output")
}

pub fn fixture_labeled(g: &SocialGraph) -> (PageRankResult, LabeledDataset, LabeledDataset) {
    let pr = pagerank_with_labels(g, &PageRankOptions::default(), 0.01).expect("pagerank");
    let (high, low) = eligible_pool_sizes(g, &pr);
    let counts = SplitCounts::default().scaled_to(high, low);
    let (train, test) = build_dataset(
        g,
        &pr,
        counts.n_high_train,
        counts.n_low_train,
        counts.n_high_test,
        counts.n_low_test,
        7,
    )
    .expect("split");
    (pr, train, test)
}
