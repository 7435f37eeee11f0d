//! Classifier evaluation: confusion matrix at the 0.5 threshold,
//! precision/recall/F1, and rank-statistic AUC with ties counted half.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ml::{LabeledDataset, TrainedModel};
use crate::pagerank::InfluenceLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

/// Degenerate-denominator markers. A flagged metric is reported as 0
/// (precision/recall) or 0.5 (AUC) instead of dividing by zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricFlags {
    pub precision_undefined: bool,
    pub recall_undefined: bool,
    pub auc_undefined: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub auc: f64,
    pub confusion: Confusion,
    pub flags: MetricFlags,
}

/// Metrics from raw scores and true labels; High is the positive class
/// and a score is positive when strictly above 0.5.
pub fn evaluate_scores(scores: &[f64], labels: &[InfluenceLabel]) -> EvalMetrics {
    assert_eq!(scores.len(), labels.len());
    let mut c = Confusion { tp: 0, fp: 0, tn: 0, fn_: 0 };
    for (&s, &l) in scores.iter().zip(labels) {
        let predicted_high = s > 0.5;
        match (predicted_high, l == InfluenceLabel::High) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, false) => c.tn += 1,
            (false, true) => c.fn_ += 1,
        }
    }

    let mut flags = MetricFlags::default();
    let precision = if c.tp + c.fp == 0 {
        flags.precision_undefined = true;
        0.0
    } else {
        c.tp as f64 / (c.tp + c.fp) as f64
    };
    let recall = if c.tp + c.fn_ == 0 {
        flags.recall_undefined = true;
        0.0
    } else {
        c.tp as f64 / (c.tp + c.fn_) as f64
    };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    let auc = match auc_mann_whitney(scores, labels) {
        Some(a) => a,
        None => {
            flags.auc_undefined = true;
            0.5
        }
    };
    EvalMetrics { precision, recall, f1, auc, confusion: c, flags }
}

/// AUC as the Mann–Whitney rank statistic: the probability that a random
/// positive outscores a random negative, ties counted 0.5. `None` when a
/// class is missing.
pub fn auc_mann_whitney(scores: &[f64], labels: &[InfluenceLabel]) -> Option<f64> {
    let p = labels.iter().filter(|l| **l == InfluenceLabel::High).count();
    let n = labels.len() - p;
    if p == 0 || n == 0 {
        return None;
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_unstable_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // average ranks over tie groups (1-based)
    let mut rank = vec![0.0f64; scores.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let avg = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            rank[idx] = avg;
        }
        i = j;
    }

    let rank_sum_pos: f64 = labels
        .iter()
        .enumerate()
        .filter(|(_, l)| **l == InfluenceLabel::High)
        .map(|(i, _)| rank[i])
        .sum();
    let p = p as f64;
    Some((rank_sum_pos - p * (p + 1.0) / 2.0) / (p * n as f64))
}

/// Scores the test set with the model and computes all metrics.
pub fn evaluate(model: &TrainedModel, test: &LabeledDataset) -> Result<EvalMetrics> {
    if test.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let scores: Vec<f64> = test.rows.iter().map(|r| model.predict(&r.features).score).collect();
    let labels: Vec<InfluenceLabel> = test.rows.iter().map(|r| r.label).collect();
    Ok(evaluate_scores(&scores, &labels))
}
