//! The influence-prediction pipeline: linked-account features, labeled
//! datasets, chi-square feature ranking, five classifier families, and
//! evaluation (hold-out, cross-validation, grid search).
//!
//! Only users with a linked Twitter account carry features, so every
//! dataset is restricted to `tw_only` / `both` users.

mod chi2;
mod cv;
mod dtree;
mod eval;
mod gbt;
mod logistic;
mod model;
mod naive_bayes;
mod forest;

pub use chi2::chi_square_rank;
pub use cv::{cross_validate, grid_search, CvSummary, GridSearchResult, MeanMetrics};
pub use dtree::TreeParams;
pub use eval::{auc_mann_whitney, evaluate, evaluate_scores, Confusion, EvalMetrics, MetricFlags};
pub use forest::ForestParams;
pub use gbt::GbtParams;
pub use logistic::LogisticParams;
pub use model::{train, Algorithm, ModelParams, Prediction, TrainedModel};
pub use naive_bayes::BayesParams;

use std::collections::HashSet;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SocialGraph;
use crate::pagerank::{InfluenceLabel, PageRankResult};
use crate::seeding::{rng_for, DOMAIN_DATASET};

/// The six linked-account features.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub followings: u64,
    pub followers: u64,
    pub tweets: u64,
    pub likes: u64,
    pub lists: u64,
    /// 1 when the profile has a biography, 0 otherwise. Absent on the
    /// wire means 0.
    #[serde(default)]
    pub bio: u8,
}

impl FeatureVector {
    pub fn as_array(&self) -> [f64; 6] {
        [
            self.followings as f64,
            self.followers as f64,
            self.tweets as f64,
            self.likes as f64,
            self.lists as f64,
            f64::from(self.bio),
        ]
    }

    pub fn get(&self, feature: FeatureName) -> f64 {
        self.as_array()[feature as usize]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureName {
    Followings = 0,
    Followers = 1,
    Tweets = 2,
    Likes = 3,
    Lists = 4,
    Bio = 5,
}

impl FeatureName {
    pub const ALL: [FeatureName; 6] = [
        FeatureName::Followings,
        FeatureName::Followers,
        FeatureName::Tweets,
        FeatureName::Likes,
        FeatureName::Lists,
        FeatureName::Bio,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureName::Followings => "followings",
            FeatureName::Followers => "followers",
            FeatureName::Tweets => "tweets",
            FeatureName::Likes => "likes",
            FeatureName::Lists => "lists",
            FeatureName::Bio => "bio",
        }
    }
}

impl std::fmt::Display for FeatureName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Returns the user's feature vector, or an error for users without a
/// linked Twitter account.
pub fn extract_features(user: &crate::graph::UserRecord) -> Result<FeatureVector> {
    user.twitter
        .ok_or_else(|| Error::NotTwitterLinked(user.user_id.clone()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRow {
    pub user_id: String,
    pub features: FeatureVector,
    pub label: InfluenceLabel,
}

/// Feature rows with binary influence labels. User ids are unique.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub rows: Vec<DatasetRow>,
    /// Where the rows came from (split name, seed, ...).
    pub provenance: String,
}

impl LabeledDataset {
    pub fn new(rows: Vec<DatasetRow>, provenance: impl Into<String>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(rows.len());
        for row in &rows {
            if !seen.insert(row.user_id.clone()) {
                return Err(Error::DuplicateUserId(row.user_id.clone()));
            }
        }
        Ok(LabeledDataset { rows, provenance: provenance.into() })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// (high, low) counts.
    pub fn class_counts(&self) -> (usize, usize) {
        let high = self.rows.iter().filter(|r| r.label == InfluenceLabel::High).count();
        (high, self.rows.len() - high)
    }

    pub fn has_both_classes(&self) -> bool {
        let (high, low) = self.class_counts();
        high > 0 && low > 0
    }

    /// CSV interchange: `user_id,followings,followers,tweets,likes,lists,bio,label`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("user_id,followings,followers,tweets,likes,lists,bio,label\n");
        for r in &self.rows {
            let f = &r.features;
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.user_id, f.followings, f.followers, f.tweets, f.likes, f.lists, f.bio, r.label
            ));
        }
        out
    }

    pub fn from_csv(text: &str, provenance: impl Into<String>) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().unwrap_or("");
        if header.trim() != "user_id,followings,followers,tweets,likes,lists,bio,label" {
            return Err(Error::InvalidConfig(format!("unexpected dataset header {header:?}")));
        }
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 8 {
                return Err(Error::InvalidConfig(format!(
                    "dataset line {}: expected 8 fields, got {}",
                    i + 2,
                    fields.len()
                )));
            }
            let parse_u64 = |s: &str, what: &str| -> Result<u64> {
                s.trim().parse().map_err(|_| {
                    Error::InvalidConfig(format!("dataset line {}: bad {what} {s:?}", i + 2))
                })
            };
            let label = match fields[7].trim() {
                "high" => InfluenceLabel::High,
                "low" => InfluenceLabel::Low,
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "dataset line {}: bad label {other:?}",
                        i + 2
                    )))
                }
            };
            rows.push(DatasetRow {
                user_id: fields[0].trim().to_string(),
                features: FeatureVector {
                    followings: parse_u64(fields[1], "followings")?,
                    followers: parse_u64(fields[2], "followers")?,
                    tweets: parse_u64(fields[3], "tweets")?,
                    likes: parse_u64(fields[4], "likes")?,
                    lists: parse_u64(fields[5], "lists")?,
                    bio: parse_u64(fields[6], "bio")? as u8,
                },
                label,
            });
        }
        LabeledDataset::new(rows, provenance)
    }
}

/// Requested sizes for the balanced train/test split protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub n_high_train: usize,
    pub n_low_train: usize,
    pub n_high_test: usize,
    pub n_low_test: usize,
}

impl Default for SplitCounts {
    fn default() -> Self {
        SplitCounts { n_high_train: 8000, n_low_train: 8000, n_high_test: 2000, n_low_test: 2000 }
    }
}

impl SplitCounts {
    /// Shrinks the request proportionally when the eligible pools are
    /// smaller than asked, preserving the train:test and high:low ratios.
    pub fn scaled_to(&self, available_high: usize, available_low: usize) -> SplitCounts {
        let need_high = (self.n_high_train + self.n_high_test).max(1);
        let need_low = (self.n_low_train + self.n_low_test).max(1);
        let scale = 1.0f64
            .min(available_high as f64 / need_high as f64)
            .min(available_low as f64 / need_low as f64);
        let shrink = |n: usize| (n as f64 * scale).floor() as usize;
        SplitCounts {
            n_high_train: shrink(self.n_high_train),
            n_low_train: shrink(self.n_low_train),
            n_high_test: shrink(self.n_high_test),
            n_low_test: shrink(self.n_low_test),
        }
    }
}

/// Twitter-linked users labeled High/Low, the sampling pools for
/// [`build_dataset`].
pub fn eligible_pool_sizes(g: &SocialGraph, pr: &PageRankResult) -> (usize, usize) {
    let mut high = 0;
    let mut low = 0;
    for u in g.nodes() {
        if g.user(u).linking_option.twitter_linked() {
            match pr.labels[u as usize] {
                InfluenceLabel::High => high += 1,
                InfluenceLabel::Low => low += 1,
            }
        }
    }
    (high, low)
}

/// Seeded balanced sampling of Twitter-linked users into disjoint train
/// and test splits with exact class counts.
#[allow(clippy::too_many_arguments)]
pub fn build_dataset(
    g: &SocialGraph,
    pr: &PageRankResult,
    n_high: usize,
    n_low: usize,
    n_high_test: usize,
    n_low_test: usize,
    seed: u64,
) -> Result<(LabeledDataset, LabeledDataset)> {
    assert_eq!(pr.labels.len(), g.node_count(), "labels must cover the graph");

    let mut high_pool: Vec<u32> = Vec::new();
    let mut low_pool: Vec<u32> = Vec::new();
    for u in g.nodes() {
        if !g.user(u).linking_option.twitter_linked() {
            continue;
        }
        match pr.labels[u as usize] {
            InfluenceLabel::High => high_pool.push(u),
            InfluenceLabel::Low => low_pool.push(u),
        }
    }

    let need_high = n_high + n_high_test;
    let need_low = n_low + n_low_test;
    if high_pool.len() < need_high {
        return Err(Error::InsufficientClass {
            class: InfluenceLabel::High,
            requested: need_high,
            available: high_pool.len(),
        });
    }
    if low_pool.len() < need_low {
        return Err(Error::InsufficientClass {
            class: InfluenceLabel::Low,
            requested: need_low,
            available: low_pool.len(),
        });
    }

    let mut rng = rng_for(seed, DOMAIN_DATASET, 0);
    high_pool.shuffle(&mut rng);
    low_pool.shuffle(&mut rng);

    let row = |u: u32, label: InfluenceLabel| -> DatasetRow {
        DatasetRow {
            user_id: g.user_id(u).to_string(),
            features: g.user(u).twitter.expect("pool members are twitter-linked"),
            label,
        }
    };

    let mut train_rows = Vec::with_capacity(n_high + n_low);
    train_rows.extend(high_pool[..n_high].iter().map(|&u| row(u, InfluenceLabel::High)));
    train_rows.extend(low_pool[..n_low].iter().map(|&u| row(u, InfluenceLabel::Low)));

    let mut test_rows = Vec::with_capacity(n_high_test + n_low_test);
    test_rows.extend(
        high_pool[n_high..need_high].iter().map(|&u| row(u, InfluenceLabel::High)),
    );
    test_rows.extend(low_pool[n_low..need_low].iter().map(|&u| row(u, InfluenceLabel::Low)));

    Ok((
        LabeledDataset::new(train_rows, format!("train(seed={seed})"))?,
        LabeledDataset::new(test_rows, format!("test(seed={seed})"))?,
    ))
}
