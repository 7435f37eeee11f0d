//! Monthly snapshot reconstruction and per-linking-option cohort curves.
//!
//! A snapshot at month `m` keeps exactly the users registered in or
//! before `m` and the edges between them — the standard reconstruction
//! from registration timestamps. It cannot express unfollows or deleted
//! accounts, and each user's *current* linking option is projected onto
//! all past months (a `both` user counts as `both` even before the second
//! option existed); both limits are inherent to the method.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{BuildStats, LinkingOption, SocialGraph};
use crate::month::Month;
use crate::pagerank::{InfluenceLabel, PageRankResult};

/// Induced subgraph on users registered at or before `cutoff`.
///
/// Surviving users keep their relative order, so node indices are simply
/// renumbered and repeated snapshots compose exactly:
/// `snapshot(snapshot(g, a), b) == snapshot(g, min(a, b))`.
pub fn snapshot(g: &SocialGraph, cutoff: Month) -> SocialGraph {
    let mut remap: Vec<Option<u32>> = vec![None; g.node_count()];
    let mut users = Vec::new();
    for u in g.nodes() {
        let record = g.user(u);
        if record.registered_at <= cutoff {
            remap[u as usize] = Some(users.len() as u32);
            users.push(record.clone());
        }
    }
    let index: HashMap<String, u32> =
        users.iter().enumerate().map(|(i, u)| (u.user_id.clone(), i as u32)).collect();

    // Renumbering is monotone, so the filtered pairs stay sorted.
    let pairs: Vec<(u32, u32)> = g
        .edges()
        .filter_map(|(u, v)| match (remap[u as usize], remap[v as usize]) {
            (Some(a), Some(b)) => Some((a, b)),
            _ => None,
        })
        .collect();

    SocialGraph::from_clean_parts(users, index, &pairs, BuildStats::default())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkingCounts {
    pub neither: u64,
    pub tw_only: u64,
    pub fb_only: u64,
    pub both: u64,
}

impl LinkingCounts {
    fn of(g: &SocialGraph) -> LinkingCounts {
        let mut counts = LinkingCounts { neither: 0, tw_only: 0, fb_only: 0, both: 0 };
        for user in g.users() {
            match user.linking_option {
                LinkingOption::Neither => counts.neither += 1,
                LinkingOption::TwOnly => counts.tw_only += 1,
                LinkingOption::FbOnly => counts.fb_only += 1,
                LinkingOption::Both => counts.both += 1,
            }
        }
        counts
    }

    pub fn get(&self, option: LinkingOption) -> u64 {
        match option {
            LinkingOption::Neither => self.neither,
            LinkingOption::TwOnly => self.tw_only,
            LinkingOption::FbOnly => self.fb_only,
            LinkingOption::Both => self.both,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SnapshotStat {
    pub month: Month,
    pub nodes: u64,
    pub edges: u64,
    /// edges / nodes; 0 for an empty snapshot.
    pub avg_degree: f64,
    pub linking_counts: LinkingCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnapshotSeries {
    pub entries: Vec<SnapshotStat>,
}

/// One [`SnapshotStat`] per month in `from..=to`. Months are rebuilt in
/// parallel from the shared source graph.
pub fn snapshot_series(g: &SocialGraph, from: Month, to: Month) -> Result<SnapshotSeries> {
    if from > to {
        return Err(Error::InvalidMonthRange { from, to });
    }
    let months: Vec<Month> = from.range_inclusive(to).collect();
    let entries: Vec<SnapshotStat> = months
        .par_iter()
        .map(|&month| {
            let snap = snapshot(g, month);
            let nodes = snap.node_count() as u64;
            let edges = snap.edge_count();
            SnapshotStat {
                month,
                nodes,
                edges,
                avg_degree: if nodes == 0 { 0.0 } else { edges as f64 / nodes as f64 },
                linking_counts: LinkingCounts::of(&snap),
            }
        })
        .collect();
    Ok(SnapshotSeries { entries })
}

/// Fraction of users per linking option; all four options are present and
/// the fractions sum to 1.
pub fn linking_distribution(g: &SocialGraph) -> Result<BTreeMap<LinkingOption, f64>> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let counts = LinkingCounts::of(g);
    Ok(LinkingOption::ALL
        .iter()
        .map(|&o| (o, counts.get(o) as f64 / n as f64))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CohortMetric {
    OutDegree,
    InDegree,
    Pagerank,
}

impl CohortMetric {
    pub fn as_str(self) -> &'static str {
        match self {
            CohortMetric::OutDegree => "out_degree",
            CohortMetric::InDegree => "in_degree",
            CohortMetric::Pagerank => "pagerank",
        }
    }
}

/// Per-option empirical CDFs of one metric, plus (when PageRank labels
/// are supplied and at least one user is High) the linking-option
/// composition of the High group.
#[derive(Debug, Clone, Serialize)]
pub struct CohortCurves {
    pub metric: CohortMetric,
    /// Right-continuous step functions sampled at each distinct observed
    /// value; every curve ends at 1.0. Options follow the canonical order.
    pub curves: Vec<(LinkingOption, Vec<(f64, f64)>)>,
    /// Options with no users, left out of `curves`.
    pub omitted: Vec<LinkingOption>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub composition: Option<BTreeMap<LinkingOption, f64>>,
}

pub fn cohort_cdf(
    g: &SocialGraph,
    metric: CohortMetric,
    pr: Option<&PageRankResult>,
) -> Result<CohortCurves> {
    if g.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    if metric == CohortMetric::Pagerank {
        let scores = pr.ok_or_else(|| Error::InvalidParam {
            name: "pr".into(),
            reason: "metric=pagerank needs PageRank scores for this graph".into(),
        })?;
        if scores.scores.len() != g.node_count() {
            return Err(Error::InvalidParam {
                name: "pr".into(),
                reason: format!(
                    "scores cover {} nodes but the graph has {}",
                    scores.scores.len(),
                    g.node_count()
                ),
            });
        }
    }

    let value_of = |u: u32| -> f64 {
        match metric {
            CohortMetric::OutDegree => g.out_degree(u) as f64,
            CohortMetric::InDegree => g.in_degree(u) as f64,
            CohortMetric::Pagerank => pr.expect("checked above").scores[u as usize],
        }
    };

    let mut curves = Vec::new();
    let mut omitted = Vec::new();
    for option in LinkingOption::ALL {
        let mut values: Vec<f64> =
            g.nodes().filter(|&u| g.user(u).linking_option == option).map(value_of).collect();
        if values.is_empty() {
            omitted.push(option);
            continue;
        }
        values.sort_unstable_by(f64::total_cmp);
        let n = values.len();
        let mut points = Vec::new();
        let mut i = 0;
        while i < n {
            let x = values[i];
            while i < n && values[i] == x {
                i += 1;
            }
            points.push((x, i as f64 / n as f64));
        }
        curves.push((option, points));
    }

    let composition = match pr {
        Some(result) => high_pagerank_composition(g, result).ok(),
        None => None,
    };

    Ok(CohortCurves { metric, curves, omitted, composition })
}

/// Linking-option mix of the High-PageRank group; fractions sum to 1 and
/// options with no High users are omitted.
pub fn high_pagerank_composition(
    g: &SocialGraph,
    pr: &PageRankResult,
) -> Result<BTreeMap<LinkingOption, f64>> {
    assert_eq!(pr.labels.len(), g.node_count(), "labels must cover the graph");
    let mut counts: BTreeMap<LinkingOption, u64> = BTreeMap::new();
    let mut high_total = 0u64;
    for u in g.nodes() {
        if pr.labels[u as usize] == InfluenceLabel::High {
            *counts.entry(g.user(u).linking_option).or_insert(0) += 1;
            high_total += 1;
        }
    }
    if high_total == 0 {
        return Err(Error::NoHighUsers);
    }
    Ok(counts.into_iter().map(|(o, c)| (o, c as f64 / high_total as f64)).collect())
}
