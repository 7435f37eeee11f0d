//! PageRank influence scores and top-percentile high/low labeling.
//!
//! Rank flows along the follow direction: an edge `u → v` ("u follows v")
//! transfers rank from the follower to the followee, so heavily followed
//! users score high. Dangling nodes (zero out-degree) redistribute their
//! mass uniformly each iteration, which keeps the score sum at 1.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SocialGraph;

/// Binary influence class derived from the PageRank percentile threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfluenceLabel {
    High,
    Low,
}

impl InfluenceLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            InfluenceLabel::High => "high",
            InfluenceLabel::Low => "low",
        }
    }
}

impl std::fmt::Display for InfluenceLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PageRankOptions {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: u32,
}

impl Default for PageRankOptions {
    fn default() -> Self {
        PageRankOptions { damping: 0.85, tol: 1e-10, max_iter: 200 }
    }
}

/// Raw power-iteration output, before labeling.
#[derive(Debug, Clone)]
pub struct PageRankScores {
    pub values: Vec<f64>,
    pub iterations_run: u32,
    pub residual: f64,
    /// False when `max_iter` was reached before the L1 residual fell
    /// below `tol`; the scores are still returned.
    pub converged: bool,
}

/// Scores plus the percentile threshold and per-node labels.
#[derive(Debug, Clone)]
pub struct PageRankResult {
    pub scores: Vec<f64>,
    pub damping: f64,
    pub iterations_run: u32,
    pub residual: f64,
    pub converged: bool,
    pub percentile: f64,
    pub threshold: f64,
    pub labels: Vec<InfluenceLabel>,
}

impl PageRankResult {
    pub fn high_count(&self) -> usize {
        self.labels.iter().filter(|l| **l == InfluenceLabel::High).count()
    }
}

/// Power-iteration PageRank over the follow direction.
///
/// Accumulation order is fixed (each node sums its in-neighbors in CSR
/// order), so repeated runs are bit-identical at any worker count.
pub fn pagerank(g: &SocialGraph, opts: &PageRankOptions) -> Result<PageRankScores> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if !(opts.damping > 0.0 && opts.damping < 1.0) {
        return Err(Error::InvalidParam {
            name: "damping".into(),
            reason: format!("must be in (0,1), got {}", opts.damping),
        });
    }
    if opts.tol <= 0.0 || opts.tol.is_nan() {
        return Err(Error::InvalidParam {
            name: "tol".into(),
            reason: format!("must be positive, got {}", opts.tol),
        });
    }

    let d = opts.damping;
    let nf = n as f64;
    let inv_out: Vec<f64> = (0..n as u32)
        .map(|u| {
            let deg = g.out_degree(u);
            if deg == 0 { 0.0 } else { 1.0 / deg as f64 }
        })
        .collect();
    let dangling: Vec<u32> = (0..n as u32).filter(|&u| g.out_degree(u) == 0).collect();

    let mut scores = vec![1.0 / nf; n];
    let mut next = vec![0.0f64; n];
    let mut residual = f64::INFINITY;
    let mut iterations = 0u32;

    while iterations < opts.max_iter {
        // Sequential sums keep the result independent of thread count.
        let dangling_mass: f64 = dangling.iter().map(|&u| scores[u as usize]).sum();
        let base = (1.0 - d) / nf + d * dangling_mass / nf;

        next.par_iter_mut().enumerate().for_each(|(v, slot)| {
            let mut acc = 0.0f64;
            for &u in g.in_neighbors(v as u32) {
                acc += scores[u as usize] * inv_out[u as usize];
            }
            *slot = base + d * acc;
        });

        residual = scores.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut scores, &mut next);
        iterations += 1;
        if residual < opts.tol {
            break;
        }
    }

    Ok(PageRankScores {
        values: scores,
        iterations_run: iterations,
        residual,
        converged: residual < opts.tol,
    })
}

/// Threshold and labels from the top-percentile rule.
#[derive(Debug, Clone)]
pub struct HighLowLabels {
    pub threshold: f64,
    pub labels: Vec<InfluenceLabel>,
    pub high_count: usize,
}

/// Labels the top `percentile` of scores as High.
///
/// The threshold is the score ranked just below the top-`⌈percentile·n⌉`
/// block in descending order; a node is High exactly when its score is
/// strictly greater. Ties at the threshold therefore fall to Low, so the
/// High set never exceeds `⌈percentile·n⌉` and shrinks only under ties.
pub fn label_high(scores: &[f64], percentile: f64) -> Result<HighLowLabels> {
    if scores.is_empty() {
        return Err(Error::EmptyGraph);
    }
    if !(percentile > 0.0 && percentile < 1.0) {
        return Err(Error::InvalidParam {
            name: "percentile".into(),
            reason: format!("must be in (0,1), got {percentile}"),
        });
    }
    let n = scores.len();
    // Small slack so exact products like 0.01 * 200 don't round up.
    let k = ((percentile * n as f64 - 1e-9).ceil() as usize).max(1);

    let mut sorted: Vec<f64> = scores.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    // The score just below the top-k block; when the cut would fall past
    // the end, the minimum score serves, which keeps all-equal inputs
    // labeling nothing at any percentile.
    let threshold = sorted[k.min(n - 1)];

    let labels: Vec<InfluenceLabel> = scores
        .iter()
        .map(|&s| if s > threshold { InfluenceLabel::High } else { InfluenceLabel::Low })
        .collect();
    let high_count = labels.iter().filter(|l| **l == InfluenceLabel::High).count();
    Ok(HighLowLabels { threshold, labels, high_count })
}

/// Runs [`pagerank`] and [`label_high`] in one step.
pub fn pagerank_with_labels(
    g: &SocialGraph,
    opts: &PageRankOptions,
    percentile: f64,
) -> Result<PageRankResult> {
    let scores = pagerank(g, opts)?;
    let labeled = label_high(&scores.values, percentile)?;
    Ok(PageRankResult {
        scores: scores.values,
        damping: opts.damping,
        iterations_run: scores.iterations_run,
        residual: scores.residual,
        converged: scores.converged,
        percentile,
        threshold: labeled.threshold,
        labels: labeled.labels,
    })
}
