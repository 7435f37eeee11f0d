//! Classification trees: the shared greedy splitter (Gini or information
//! gain, optional per-split feature subsampling) plus the standalone
//! single-tree classifier with pessimistic-error pruning.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ml::LabeledDataset;
use crate::pagerank::InfluenceLabel;
use crate::seeding::{rng_for, DOMAIN_FOREST_TREE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ClsNode {
    Split { feature: usize, threshold: f64, left: u32, right: u32 },
    Leaf { count: u32, pos: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClsTree {
    pub(crate) nodes: Vec<ClsNode>,
}

impl ClsTree {
    /// Laplace-smoothed High probability of the leaf reached by `x`.
    pub fn prob_high(&self, x: &[f64; 6]) -> f64 {
        let mut at = 0usize;
        loop {
            match self.nodes[at] {
                ClsNode::Leaf { count, pos } => {
                    return (f64::from(pos) + 1.0) / (f64::from(count) + 2.0);
                }
                ClsNode::Split { feature, threshold, left, right } => {
                    at = if x[feature] < threshold { left as usize } else { right as usize };
                }
            }
        }
    }

    #[cfg(test)]
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitCriterion {
    Gini,
    InfoGain,
}

pub struct TreeFitConfig {
    pub criterion: SplitCriterion,
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    /// Number of features drawn per split; `None` scans all six.
    pub features_per_split: Option<usize>,
}

/// Grows a tree on the given rows. `rng` is consumed in deterministic DFS
/// order, so a fixed (rows, config, rng state) yields a fixed tree.
pub fn fit_tree(
    x: &[[f64; 6]],
    y: &[bool],
    rows: &[u32],
    cfg: &TreeFitConfig,
    rng: &mut ChaCha12Rng,
) -> ClsTree {
    let mut grower = Grower { x, y, cfg, rng };
    let mut nodes = Vec::new();
    grower.grow(rows.to_vec(), 0, &mut nodes);
    ClsTree { nodes }
}

struct Grower<'a> {
    x: &'a [[f64; 6]],
    y: &'a [bool],
    cfg: &'a TreeFitConfig,
    rng: &'a mut ChaCha12Rng,
}

impl Grower<'_> {
    fn grow(&mut self, rows: Vec<u32>, depth: usize, nodes: &mut Vec<ClsNode>) -> u32 {
        let n = rows.len();
        let pos = rows.iter().filter(|&&i| self.y[i as usize]).count();

        let make_leaf = |nodes: &mut Vec<ClsNode>| -> u32 {
            nodes.push(ClsNode::Leaf { count: n as u32, pos: pos as u32 });
            (nodes.len() - 1) as u32
        };

        let depth_capped = self.cfg.max_depth.is_some_and(|cap| depth >= cap);
        if depth_capped || pos == 0 || pos == n || n < 2 * self.cfg.min_leaf || n < 2 {
            return make_leaf(nodes);
        }

        let features: Vec<usize> = match self.cfg.features_per_split {
            Some(k) if k < 6 => {
                let mut all: Vec<usize> = (0..6).collect();
                all.shuffle(self.rng);
                all.truncate(k.max(1));
                all.sort_unstable();
                all
            }
            _ => (0..6).collect(),
        };

        let Some((feature, threshold)) = self.best_split(&rows, pos, &features) else {
            return make_leaf(nodes);
        };

        let (left_rows, right_rows): (Vec<u32>, Vec<u32>) =
            rows.into_iter().partition(|&i| self.x[i as usize][feature] < threshold);

        let at = nodes.len();
        nodes.push(ClsNode::Split { feature, threshold, left: 0, right: 0 });
        let left = self.grow(left_rows, depth + 1, nodes);
        let right = self.grow(right_rows, depth + 1, nodes);
        if let ClsNode::Split { left: l, right: r, .. } = &mut nodes[at] {
            *l = left;
            *r = right;
        }
        at as u32
    }

    fn best_split(&self, rows: &[u32], pos: usize, features: &[usize]) -> Option<(usize, f64)> {
        let n = rows.len();
        let impurity = |pos: f64, n: f64| -> f64 {
            if n == 0.0 {
                return 0.0;
            }
            let p = pos / n;
            match self.cfg.criterion {
                SplitCriterion::Gini => 2.0 * p * (1.0 - p),
                SplitCriterion::InfoGain => {
                    let mut h = 0.0;
                    if p > 0.0 {
                        h -= p * p.log2();
                    }
                    if p < 1.0 {
                        h -= (1.0 - p) * (1.0 - p).log2();
                    }
                    h
                }
            }
        };
        let parent = impurity(pos as f64, n as f64);

        let mut best: Option<(f64, usize, f64)> = None;
        let mut sorted = rows.to_vec();
        for &feature in features {
            sorted.sort_unstable_by(|&a, &b| {
                self.x[a as usize][feature]
                    .total_cmp(&self.x[b as usize][feature])
                    .then(a.cmp(&b))
            });
            let mut pos_left = 0usize;
            for w in 0..n - 1 {
                let i = sorted[w] as usize;
                if self.y[i] {
                    pos_left += 1;
                }
                let here = self.x[i][feature];
                let next = self.x[sorted[w + 1] as usize][feature];
                if here == next {
                    continue;
                }
                let n_left = w + 1;
                let n_right = n - n_left;
                if n_left < self.cfg.min_leaf || n_right < self.cfg.min_leaf {
                    continue;
                }
                let weighted = (n_left as f64 * impurity(pos_left as f64, n_left as f64)
                    + n_right as f64 * impurity((pos - pos_left) as f64, n_right as f64))
                    / n as f64;
                let gain = parent - weighted;
                if gain > 1e-12 && best.is_none_or(|(g, _, _)| gain > g) {
                    best = Some((gain, feature, (here + next) / 2.0));
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    }
}

/// Parameters of the single information-gain tree. Confidence-factor
/// pruning is approximated by pessimistic-error pruning: a subtree is
/// replaced by a leaf when the leaf's upper-bound error estimate does not
/// exceed the subtree's. `pruning_strength` is the z value of the bound;
/// 0 drops the optimism correction and prunes most aggressively.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TreeParams {
    pub min_instances_per_leaf: usize,
    pub pruning_strength: f64,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams { min_instances_per_leaf: 9, pruning_strength: 0.9 }
    }
}

impl TreeParams {
    pub fn validate(&self) -> Result<()> {
        if self.min_instances_per_leaf == 0 {
            return Err(Error::InvalidParam {
                name: "min_instances_per_leaf".into(),
                reason: "must be at least 1".into(),
            });
        }
        if !(self.pruning_strength >= 0.0 && self.pruning_strength.is_finite()) {
            return Err(Error::InvalidParam {
                name: "pruning_strength".into(),
                reason: format!("must be non-negative, got {}", self.pruning_strength),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub(crate) tree: ClsTree,
}

impl TreeModel {
    pub fn score(&self, x: &[f64; 6]) -> f64 {
        self.tree.prob_high(x)
    }
}

pub fn fit_single_tree(params: &TreeParams, train: &LabeledDataset, seed: u64) -> Result<TreeModel> {
    params.validate()?;
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !train.has_both_classes() {
        return Err(Error::SingleClass);
    }
    let x: Vec<[f64; 6]> = train.rows.iter().map(|r| r.features.as_array()).collect();
    let y: Vec<bool> = train.rows.iter().map(|r| r.label == InfluenceLabel::High).collect();
    let rows: Vec<u32> = (0..train.len() as u32).collect();
    let cfg = TreeFitConfig {
        criterion: SplitCriterion::InfoGain,
        max_depth: None,
        min_leaf: params.min_instances_per_leaf,
        features_per_split: None,
    };
    // All features scanned at every split, so the rng is never consumed.
    let mut rng = rng_for(seed, DOMAIN_FOREST_TREE, u64::MAX);
    let grown = fit_tree(&x, &y, &rows, &cfg, &mut rng);
    Ok(TreeModel { tree: prune(grown, params.pruning_strength) })
}

/// Wilson upper confidence bound on the error rate.
fn upper_error(errors: f64, n: f64, z: f64) -> f64 {
    if n == 0.0 {
        return 0.0;
    }
    let f = errors / n;
    if z == 0.0 {
        return f;
    }
    let z2 = z * z;
    (f + z2 / (2.0 * n) + z * (f * (1.0 - f) / n + z2 / (4.0 * n * n)).sqrt()) / (1.0 + z2 / n)
}

fn prune(tree: ClsTree, z: f64) -> ClsTree {
    let mut out = Vec::new();
    prune_rec(&tree.nodes, 0, z, &mut out);
    ClsTree { nodes: out }
}

struct PrunedInfo {
    at: u32,
    count: u32,
    pos: u32,
    /// Estimated error count (n * upper bound) of the emitted subtree.
    estimate: f64,
}

fn prune_rec(nodes: &[ClsNode], at: usize, z: f64, out: &mut Vec<ClsNode>) -> PrunedInfo {
    match nodes[at] {
        ClsNode::Leaf { count, pos } => {
            let errors = pos.min(count - pos);
            let estimate = f64::from(count) * upper_error(f64::from(errors), f64::from(count), z);
            out.push(ClsNode::Leaf { count, pos });
            PrunedInfo { at: (out.len() - 1) as u32, count, pos, estimate }
        }
        ClsNode::Split { feature, threshold, left, right } => {
            let slot = out.len();
            out.push(ClsNode::Split { feature, threshold, left: 0, right: 0 });
            let l = prune_rec(nodes, left as usize, z, out);
            let r = prune_rec(nodes, right as usize, z, out);
            let count = l.count + r.count;
            let pos = l.pos + r.pos;
            let errors_if_leaf = pos.min(count - pos);
            let leaf_estimate =
                f64::from(count) * upper_error(f64::from(errors_if_leaf), f64::from(count), z);
            let subtree_estimate = l.estimate + r.estimate;
            if leaf_estimate <= subtree_estimate {
                out.truncate(slot);
                out.push(ClsNode::Leaf { count, pos });
                PrunedInfo { at: (out.len() - 1) as u32, count, pos, estimate: leaf_estimate }
            } else {
                if let ClsNode::Split { left: ls, right: rs, .. } = &mut out[slot] {
                    *ls = l.at;
                    *rs = r.at;
                }
                PrunedInfo { at: slot as u32, count, pos, estimate: subtree_estimate }
            }
        }
    }
}
