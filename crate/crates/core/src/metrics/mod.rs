//! Structural statistics of the social graph: degree summaries and CCDFs,
//! clustering coefficient, largest SCC, and average shortest-path length.

mod clustering;
mod paths;
mod scc;

pub use clustering::avg_clustering;
pub use paths::{avg_path_length, SampleSpec};
pub use scc::largest_scc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::SocialGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DegreeSummary {
    pub nodes: u64,
    pub edges: u64,
    pub zero_in_degree: u64,
    pub zero_out_degree: u64,
}

pub fn degree_summary(g: &SocialGraph) -> DegreeSummary {
    let mut zero_in = 0u64;
    let mut zero_out = 0u64;
    for u in g.nodes() {
        if g.in_degree(u) == 0 {
            zero_in += 1;
        }
        if g.out_degree(u) == 0 {
            zero_out += 1;
        }
    }
    DegreeSummary {
        nodes: g.node_count() as u64,
        edges: g.edge_count(),
        zero_in_degree: zero_in,
        zero_out_degree: zero_out,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    In,
    Out,
}

/// Complementary CDF of the degree distribution: for each degree `k`
/// present in the graph (plus `k = 0`), the fraction of nodes with degree
/// `≥ k`. The curve starts at 1.0 and is non-increasing.
pub fn degree_ccdf(g: &SocialGraph, direction: Direction) -> Result<Vec<(u64, f64)>> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut degrees: Vec<u64> = g
        .nodes()
        .map(|u| match direction {
            Direction::In => g.in_degree(u) as u64,
            Direction::Out => g.out_degree(u) as u64,
        })
        .collect();
    degrees.sort_unstable();

    let nf = n as f64;
    let mut curve = Vec::new();
    if degrees[0] != 0 {
        curve.push((0, 1.0));
    }
    let mut i = 0;
    while i < n {
        let k = degrees[i];
        // nodes with degree >= k are those at positions i..n
        curve.push((k, (n - i) as f64 / nf));
        while i < n && degrees[i] == k {
            i += 1;
        }
    }
    Ok(curve)
}

/// Follower counts for one account: its in-degree, and the number of
/// users whose only out-edge points at it.
pub fn account_followership(g: &SocialGraph, account: &str) -> Result<(u64, u64)> {
    let node = g
        .node_index(account)
        .ok_or_else(|| Error::UnknownAccount(account.to_string()))?;
    let followers = g.in_degree(node) as u64;
    let exclusive = g
        .in_neighbors(node)
        .iter()
        .filter(|&&u| g.out_degree(u) == 1)
        .count() as u64;
    Ok((followers, exclusive))
}

/// How the average path length in [`GraphReport`] was computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PathLengthMode {
    Exact,
    Sampled { sources: usize, seed: u64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct AccountStats {
    pub account: String,
    pub followers: u64,
    pub exclusive_followers: u64,
}

/// The full structural report emitted by the `metrics` CLI subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct GraphReport {
    pub nodes: u64,
    pub edges: u64,
    pub zero_in_degree: u64,
    pub zero_out_degree: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub account: Option<AccountStats>,
    pub avg_clustering: f64,
    pub lscc_size: u64,
    /// None when the largest SCC has a single node.
    pub avg_path_length: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path_length_mode: Option<PathLengthMode>,
}

#[derive(Debug, Clone)]
pub struct ReportOptions {
    /// Account to report followership for, if any.
    pub account: Option<String>,
    /// Largest SCC size for which all-pairs BFS is still run exactly.
    pub exact_path_limit: usize,
    /// Number of BFS sources in sampled mode.
    pub sample_sources: usize,
    pub seed: u64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions { account: None, exact_path_limit: 10_000, sample_sources: 1_000, seed: 0 }
    }
}

pub fn graph_report(g: &SocialGraph, opts: &ReportOptions) -> Result<GraphReport> {
    if g.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let summary = degree_summary(g);
    let account = match &opts.account {
        Some(id) => {
            let (followers, exclusive_followers) = account_followership(g, id)?;
            Some(AccountStats { account: id.clone(), followers, exclusive_followers })
        }
        None => None,
    };
    let avg_clustering = avg_clustering(g)?;
    let lscc = largest_scc(g);

    let (avg_path_length, path_length_mode) = if lscc.len() < 2 {
        (None, None)
    } else if lscc.len() <= opts.exact_path_limit {
        (Some(avg_path_length(g, &lscc, None)?), Some(PathLengthMode::Exact))
    } else {
        let spec = SampleSpec { sources: opts.sample_sources, seed: opts.seed };
        let value = avg_path_length(g, &lscc, Some(spec))?;
        (
            Some(value),
            Some(PathLengthMode::Sampled { sources: spec.sources.min(lscc.len()), seed: spec.seed }),
        )
    };

    Ok(GraphReport {
        nodes: summary.nodes,
        edges: summary.edges,
        zero_in_degree: summary.zero_in_degree,
        zero_out_degree: summary.zero_out_degree,
        account,
        avg_clustering,
        lscc_size: lscc.len() as u64,
        avg_path_length,
        path_length_mode,
    })
}
