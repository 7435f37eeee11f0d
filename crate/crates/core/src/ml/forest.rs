//! Random forest: bootstrap-bagged Gini trees with per-split feature
//! subsampling. Tree `t` draws from a stream keyed on (seed, t), so the
//! forest is identical no matter how the trees are scheduled.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ml::dtree::{fit_tree, ClsTree, SplitCriterion, TreeFitConfig};
use crate::ml::LabeledDataset;
use crate::pagerank::InfluenceLabel;
use crate::seeding::{rng_for, DOMAIN_FOREST_TREE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ForestParams {
    pub n_trees: usize,
    pub features_per_split: usize,
    pub max_depth: usize,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams { n_trees: 100, features_per_split: 3, max_depth: 9 }
    }
}

impl ForestParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &str, reason: String| Error::InvalidParam { name: name.into(), reason };
        if self.n_trees == 0 {
            return Err(bad("n_trees", "must be at least 1".into()));
        }
        if !(1..=6).contains(&self.features_per_split) {
            return Err(bad(
                "features_per_split",
                format!("must be in 1..=6, got {}", self.features_per_split),
            ));
        }
        if self.max_depth == 0 {
            return Err(bad("max_depth", "must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    trees: Vec<ClsTree>,
}

impl ForestModel {
    /// Mean of the per-tree leaf probabilities, summed in tree order.
    pub fn score(&self, x: &[f64; 6]) -> f64 {
        let total: f64 = self.trees.iter().map(|t| t.prob_high(x)).sum();
        total / self.trees.len() as f64
    }
}

pub fn fit(params: &ForestParams, train: &LabeledDataset, seed: u64) -> Result<ForestModel> {
    params.validate()?;
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !train.has_both_classes() {
        return Err(Error::SingleClass);
    }
    let n = train.len();
    let x: Vec<[f64; 6]> = train.rows.iter().map(|r| r.features.as_array()).collect();
    let y: Vec<bool> = train.rows.iter().map(|r| r.label == InfluenceLabel::High).collect();
    let cfg = TreeFitConfig {
        criterion: SplitCriterion::Gini,
        max_depth: Some(params.max_depth),
        min_leaf: 1,
        features_per_split: Some(params.features_per_split),
    };

    let trees: Vec<ClsTree> = (0..params.n_trees as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_for(seed, DOMAIN_FOREST_TREE, t);
            // bootstrap sample, drawn before any split decisions
            let rows: Vec<u32> = (0..n)
                .map(|_| rand::Rng::random_range(&mut rng, 0..n as u32))
                .collect();
            fit_tree(&x, &y, &rows, &cfg, &mut rng)
        })
        .collect();

    Ok(ForestModel { trees })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ml::test_support::dataset;
    use crate::pagerank::InfluenceLabel::{High, Low};

    fn separable() -> LabeledDataset {
        let mut rows = Vec::new();
        for i in 0..25u64 {
            rows.push(([0.0, 200.0 + i as f64, 0.0, 0.0, 10.0, 1.0], High));
            rows.push(([0.0, i as f64, 0.0, 0.0, 0.0, 0.0], Low));
        }
        dataset(&rows)
    }

    #[test]
    fn learns_separable_data() {
        let params = ForestParams { n_trees: 30, ..Default::default() };
        let model = fit(&params, &separable(), 5).unwrap();
        assert!(model.score(&[0.0, 220.0, 0.0, 0.0, 10.0, 1.0]) > 0.8);
        assert!(model.score(&[0.0, 2.0, 0.0, 0.0, 0.0, 0.0]) < 0.2);
    }

    #[test]
    fn same_seed_same_forest() {
        let params = ForestParams { n_trees: 15, ..Default::default() };
        let a = fit(&params, &separable(), 11).unwrap();
        let b = fit(&params, &separable(), 11).unwrap();
        assert_eq!(a, b);
        let c = fit(&params, &separable(), 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn invalid_feature_count_is_named() {
        let params = ForestParams { features_per_split: 7, ..Default::default() };
        match fit(&params, &separable(), 0) {
            Err(Error::InvalidParam { name, .. }) => assert_eq!(name, "features_per_split"),
            other => panic!("expected InvalidParam, got {other:?}"),
        }
    }
}
