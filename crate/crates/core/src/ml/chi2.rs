//! Chi-square feature ranking against the binary influence label.
//!
//! Numeric features are discretized by equal-frequency binning before the
//! test. Bin edges are order statistics of the observed values, so the
//! statistic is invariant under any strictly monotone transform of a
//! feature. A 0/1 feature collapses to its two natural bins.

use crate::error::{Error, Result};
use crate::ml::{FeatureName, LabeledDataset};
use crate::pagerank::InfluenceLabel;

/// Ranks all six features by chi-square statistic, descending. Ties keep
/// the canonical feature order.
pub fn chi_square_rank(ds: &LabeledDataset, bins: usize) -> Result<Vec<(FeatureName, f64)>> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !ds.has_both_classes() {
        return Err(Error::SingleClass);
    }
    if bins < 2 {
        return Err(Error::InvalidParam {
            name: "bins".into(),
            reason: format!("need at least 2 bins, got {bins}"),
        });
    }

    let labels: Vec<bool> = ds.rows.iter().map(|r| r.label == InfluenceLabel::High).collect();
    let mut ranked: Vec<(FeatureName, f64)> = FeatureName::ALL
        .iter()
        .map(|&feature| {
            let values: Vec<f64> = ds.rows.iter().map(|r| r.features.get(feature)).collect();
            (feature, chi_square(&values, &labels, bins))
        })
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
    Ok(ranked)
}

/// Chi-square of one binned feature against the class label.
fn chi_square(values: &[f64], is_high: &[bool], bins: usize) -> f64 {
    let edges = equal_frequency_edges(values, bins);
    let b = edges.len();
    let mut table = vec![[0u64; 2]; b];
    for (&v, &high) in values.iter().zip(is_high) {
        let bin = edges.partition_point(|&e| e < v);
        table[bin][usize::from(high)] += 1;
    }

    let n = values.len() as f64;
    let col: [f64; 2] = [
        is_high.iter().filter(|&&h| !h).count() as f64,
        is_high.iter().filter(|&&h| h).count() as f64,
    ];
    let mut stat = 0.0;
    for row in &table {
        let row_total = (row[0] + row[1]) as f64;
        if row_total == 0.0 {
            continue;
        }
        for c in 0..2 {
            let expected = row_total * col[c] / n;
            let observed = row[c] as f64;
            stat += (observed - expected).powi(2) / expected;
        }
    }
    stat
}

/// Upper bin edges at the equal-frequency quantile positions, deduplicated
/// so repeated values never split a bin. The last edge is the maximum, so
/// `partition_point(e < v)` always lands in range.
fn equal_frequency_edges(values: &[f64], bins: usize) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len();
    let mut edges = Vec::with_capacity(bins);
    for i in 1..=bins {
        let pos = (i * n) / bins;
        let edge = sorted[pos.saturating_sub(1).min(n - 1)];
        if edges.last() != Some(&edge) {
            edges.push(edge);
        }
    }
    let max = sorted[n - 1];
    if edges.last() != Some(&max) {
        edges.push(max);
    }
    edges
}
