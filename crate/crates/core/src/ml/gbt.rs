//! Gradient-boosted regression trees on logistic loss.
//!
//! Each round fits a regression tree to the first- and second-order
//! gradients of the logistic loss, with exact greedy splits. Split gain
//! and leaf weights follow the regularized objective: L2 (`lambda`) on
//! leaf weights, L1 (`alpha`) via soft-thresholding of the gradient sum,
//! and a per-split penalty (`gamma`). Row subsampling (`subsample`) and
//! per-tree feature subsampling (`colsample_bytree`) draw from a stream
//! keyed on (seed, round), so training is reproducible at any thread
//! count.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ml::LabeledDataset;
use crate::pagerank::InfluenceLabel;
use crate::seeding::{rng_for, DOMAIN_GBT_ROUND};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GbtParams {
    pub learning_rate: f64,
    pub max_depth: usize,
    pub min_child_weight: f64,
    /// Minimum gain required to keep a split.
    pub gamma: f64,
    pub subsample: f64,
    pub colsample_bytree: f64,
    /// L1 regularization on leaf weights.
    pub alpha: f64,
    /// L2 regularization on leaf weights.
    pub lambda: f64,
    pub n_rounds: usize,
}

impl Default for GbtParams {
    fn default() -> Self {
        GbtParams {
            learning_rate: 0.37,
            max_depth: 6,
            min_child_weight: 1.0,
            gamma: 0.0,
            subsample: 0.6,
            colsample_bytree: 0.9,
            alpha: 0.005,
            lambda: 1.0,
            n_rounds: 100,
        }
    }
}

impl GbtParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &str, reason: String| Error::InvalidParam { name: name.into(), reason };
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(bad("learning_rate", format!("must be positive, got {}", self.learning_rate)));
        }
        if !(self.subsample > 0.0 && self.subsample <= 1.0) {
            return Err(bad("subsample", format!("must be in (0,1], got {}", self.subsample)));
        }
        if !(self.colsample_bytree > 0.0 && self.colsample_bytree <= 1.0) {
            return Err(bad(
                "colsample_bytree",
                format!("must be in (0,1], got {}", self.colsample_bytree),
            ));
        }
        for (name, v) in [
            ("min_child_weight", self.min_child_weight),
            ("gamma", self.gamma),
            ("alpha", self.alpha),
            ("lambda", self.lambda),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(bad(name, format!("must be non-negative, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RegNode {
    Split { feature: usize, threshold: f64, left: u32, right: u32 },
    Leaf { value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegTree {
    nodes: Vec<RegNode>,
}

impl RegTree {
    pub fn predict(&self, x: &[f64; 6]) -> f64 {
        let mut at = 0usize;
        loop {
            match self.nodes[at] {
                RegNode::Leaf { value } => return value,
                RegNode::Split { feature, threshold, left, right } => {
                    at = if x[feature] < threshold { left as usize } else { right as usize };
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbtModel {
    base_margin: f64,
    trees: Vec<RegTree>,
}

impl GbtModel {
    pub fn margin(&self, x: &[f64; 6]) -> f64 {
        self.base_margin + self.trees.iter().map(|t| t.predict(x)).sum::<f64>()
    }

    pub fn score(&self, x: &[f64; 6]) -> f64 {
        sigmoid(self.margin(x))
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Soft-threshold of the gradient sum by the L1 strength.
fn shrink(g: f64, alpha: f64) -> f64 {
    if g > alpha {
        g - alpha
    } else if g < -alpha {
        g + alpha
    } else {
        0.0
    }
}

pub fn fit(params: &GbtParams, train: &LabeledDataset, seed: u64) -> Result<GbtModel> {
    params.validate()?;
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !train.has_both_classes() {
        return Err(Error::SingleClass);
    }

    let n = train.len();
    let x: Vec<[f64; 6]> = train.rows.iter().map(|r| r.features.as_array()).collect();
    let y: Vec<f64> = train
        .rows
        .iter()
        .map(|r| if r.label == InfluenceLabel::High { 1.0 } else { 0.0 })
        .collect();

    // Log-odds prior: exactly 0 on balanced classes, so a 0-round model
    // scores 0.5 everywhere.
    let pos_rate = (y.iter().sum::<f64>() / n as f64).clamp(1e-6, 1.0 - 1e-6);
    let base_margin = (pos_rate / (1.0 - pos_rate)).ln();

    let mut margins = vec![base_margin; n];
    let mut trees = Vec::with_capacity(params.n_rounds);
    let n_features = 6usize;

    for round in 0..params.n_rounds {
        let mut grad = vec![0.0f64; n];
        let mut hess = vec![0.0f64; n];
        for i in 0..n {
            let p = sigmoid(margins[i]);
            grad[i] = p - y[i];
            hess[i] = (p * (1.0 - p)).max(1e-16);
        }

        let mut rng = rng_for(seed, DOMAIN_GBT_ROUND, round as u64);
        let rows: Vec<u32> = if params.subsample < 1.0 {
            let mut all: Vec<u32> = (0..n as u32).collect();
            all.shuffle(&mut rng);
            let take = ((params.subsample * n as f64).floor() as usize).max(1);
            all.truncate(take);
            all.sort_unstable();
            all
        } else {
            (0..n as u32).collect()
        };
        let features: Vec<usize> = if params.colsample_bytree < 1.0 {
            let take = ((params.colsample_bytree * n_features as f64).round() as usize)
                .clamp(1, n_features);
            let mut all: Vec<usize> = (0..n_features).collect();
            all.shuffle(&mut rng);
            all.truncate(take);
            all.sort_unstable();
            all
        } else {
            (0..n_features).collect()
        };

        let mut builder = TreeBuilder { x: &x, grad: &grad, hess: &hess, params, features };
        let mut nodes = Vec::new();
        builder.grow(rows, 0, &mut nodes);
        let tree = RegTree { nodes };

        for i in 0..n {
            margins[i] += tree.predict(&x[i]);
        }
        trees.push(tree);
    }

    Ok(GbtModel { base_margin, trees })
}

struct TreeBuilder<'a> {
    x: &'a [[f64; 6]],
    grad: &'a [f64],
    hess: &'a [f64],
    params: &'a GbtParams,
    features: Vec<usize>,
}

struct BestSplit {
    gain: f64,
    feature: usize,
    threshold: f64,
}

impl TreeBuilder<'_> {
    /// Appends the subtree for `rows` to `nodes`, returning its root index.
    fn grow(&mut self, rows: Vec<u32>, depth: usize, nodes: &mut Vec<RegNode>) -> u32 {
        let g_sum: f64 = rows.iter().map(|&i| self.grad[i as usize]).sum();
        let h_sum: f64 = rows.iter().map(|&i| self.hess[i as usize]).sum();

        let make_leaf = |nodes: &mut Vec<RegNode>| -> u32 {
            let w = -shrink(g_sum, self.params.alpha) / (h_sum + self.params.lambda);
            nodes.push(RegNode::Leaf { value: self.params.learning_rate * w });
            (nodes.len() - 1) as u32
        };

        if depth >= self.params.max_depth || rows.len() < 2 {
            return make_leaf(nodes);
        }
        let Some(split) = self.best_split(&rows, g_sum, h_sum) else {
            return make_leaf(nodes);
        };

        let (left_rows, right_rows): (Vec<u32>, Vec<u32>) = rows
            .into_iter()
            .partition(|&i| self.x[i as usize][split.feature] < split.threshold);

        let at = nodes.len();
        nodes.push(RegNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            left: 0,
            right: 0,
        });
        let left = self.grow(left_rows, depth + 1, nodes);
        let right = self.grow(right_rows, depth + 1, nodes);
        if let RegNode::Split { left: l, right: r, .. } = &mut nodes[at] {
            *l = left;
            *r = right;
        }
        at as u32
    }

    /// Exact greedy scan; features ascending, strict improvement only, so
    /// ties resolve to the first candidate.
    fn best_split(&self, rows: &[u32], g_sum: f64, h_sum: f64) -> Option<BestSplit> {
        let lambda = self.params.lambda;
        let alpha = self.params.alpha;
        let score = |g: f64, h: f64| shrink(g, alpha).powi(2) / (h + lambda);
        let parent_score = score(g_sum, h_sum);

        let mut best: Option<BestSplit> = None;
        let mut sorted = rows.to_vec();
        for &feature in &self.features {
            sorted.sort_unstable_by(|&a, &b| {
                self.x[a as usize][feature]
                    .total_cmp(&self.x[b as usize][feature])
                    .then(a.cmp(&b))
            });
            let mut g_left = 0.0;
            let mut h_left = 0.0;
            for w in 0..sorted.len() - 1 {
                let i = sorted[w] as usize;
                g_left += self.grad[i];
                h_left += self.hess[i];
                let here = self.x[i][feature];
                let next = self.x[sorted[w + 1] as usize][feature];
                if here == next {
                    continue;
                }
                let h_right = h_sum - h_left;
                if h_left < self.params.min_child_weight || h_right < self.params.min_child_weight
                {
                    continue;
                }
                let g_right = g_sum - g_left;
                let gain = 0.5 * (score(g_left, h_left) + score(g_right, h_right) - parent_score)
                    - self.params.gamma;
                if gain > 0.0 && best.as_ref().is_none_or(|b| gain > b.gain) {
                    best = Some(BestSplit { gain, feature, threshold: (here + next) / 2.0 });
                }
            }
        }
        best
    }
}
