//! Unified model facade: one entry point to train any of the five
//! classifier families, predict scores, and persist fitted models as
//! versioned JSON documents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ml::dtree::{fit_single_tree, TreeModel, TreeParams};
use crate::ml::forest::{self, ForestModel, ForestParams};
use crate::ml::gbt::{self, GbtModel, GbtParams};
use crate::ml::logistic::{self, LogisticModel, LogisticParams};
use crate::ml::naive_bayes::{self, BayesModel, BayesParams};
use crate::ml::{FeatureVector, LabeledDataset};
use crate::pagerank::InfluenceLabel;

const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    GradientBoostedTrees,
    RandomForest,
    DecisionTree,
    NaiveBayes,
    LogisticRegression,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::GradientBoostedTrees,
        Algorithm::RandomForest,
        Algorithm::DecisionTree,
        Algorithm::NaiveBayes,
        Algorithm::LogisticRegression,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::GradientBoostedTrees => "gradient_boosted_trees",
            Algorithm::RandomForest => "random_forest",
            Algorithm::DecisionTree => "decision_tree",
            Algorithm::NaiveBayes => "naive_bayes",
            Algorithm::LogisticRegression => "logistic_regression",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Typed hyperparameters, one variant per family. Serialized as the bare
/// field object; deserialization needs the algorithm context, see
/// [`ModelParams::from_json`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ModelParams {
    Gbt(GbtParams),
    Forest(ForestParams),
    Tree(TreeParams),
    Bayes(BayesParams),
    Logistic(LogisticParams),
}

impl ModelParams {
    pub fn default_for(algorithm: Algorithm) -> ModelParams {
        match algorithm {
            Algorithm::GradientBoostedTrees => ModelParams::Gbt(GbtParams::default()),
            Algorithm::RandomForest => ModelParams::Forest(ForestParams::default()),
            Algorithm::DecisionTree => ModelParams::Tree(TreeParams::default()),
            Algorithm::NaiveBayes => ModelParams::Bayes(BayesParams::default()),
            Algorithm::LogisticRegression => ModelParams::Logistic(LogisticParams::default()),
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        match self {
            ModelParams::Gbt(_) => Algorithm::GradientBoostedTrees,
            ModelParams::Forest(_) => Algorithm::RandomForest,
            ModelParams::Tree(_) => Algorithm::DecisionTree,
            ModelParams::Bayes(_) => Algorithm::NaiveBayes,
            ModelParams::Logistic(_) => Algorithm::LogisticRegression,
        }
    }

    /// Rebuilds the params with the given JSON fields replaced. Unknown
    /// field names are errors.
    pub fn with_overrides(&self, overrides: &serde_json::Map<String, serde_json::Value>) -> Result<ModelParams> {
        let mut value = serde_json::to_value(self).expect("params serialize");
        let map = value.as_object_mut().expect("params are an object");
        let known: Vec<String> = map.keys().cloned().collect();
        for (key, v) in overrides {
            if !known.contains(key) {
                return Err(Error::InvalidParam {
                    name: key.clone(),
                    reason: format!("unknown parameter for {}", self.algorithm()),
                });
            }
            map.insert(key.clone(), v.clone());
        }
        Self::from_json(self.algorithm(), value)
    }

    pub fn from_json(algorithm: Algorithm, value: serde_json::Value) -> Result<ModelParams> {
        let invalid = |e: serde_json::Error| Error::InvalidParam {
            name: format!("{algorithm} params"),
            reason: e.to_string(),
        };
        Ok(match algorithm {
            Algorithm::GradientBoostedTrees => {
                ModelParams::Gbt(serde_json::from_value(value).map_err(invalid)?)
            }
            Algorithm::RandomForest => {
                ModelParams::Forest(serde_json::from_value(value).map_err(invalid)?)
            }
            Algorithm::DecisionTree => {
                ModelParams::Tree(serde_json::from_value(value).map_err(invalid)?)
            }
            Algorithm::NaiveBayes => {
                ModelParams::Bayes(serde_json::from_value(value).map_err(invalid)?)
            }
            Algorithm::LogisticRegression => {
                ModelParams::Logistic(serde_json::from_value(value).map_err(invalid)?)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum ModelState {
    Gbt(GbtModel),
    Forest(ForestModel),
    Tree(TreeModel),
    Bayes(BayesModel),
    Logistic(LogisticModel),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    /// Class-High probability in [0, 1].
    pub score: f64,
    /// High exactly when `score > 0.5`.
    pub label: InfluenceLabel,
}

/// A fitted classifier. Prediction is a pure function of the stored
/// state; refitting with the same (data, params, seed) reproduces it
/// exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    algorithm: Algorithm,
    params: ModelParams,
    seed: u64,
    state: ModelState,
}

/// Fits a model of the family selected by `params`.
pub fn train(params: &ModelParams, train: &LabeledDataset, seed: u64) -> Result<TrainedModel> {
    let state = match params {
        ModelParams::Gbt(p) => ModelState::Gbt(gbt::fit(p, train, seed)?),
        ModelParams::Forest(p) => ModelState::Forest(forest::fit(p, train, seed)?),
        ModelParams::Tree(p) => ModelState::Tree(fit_single_tree(p, train, seed)?),
        ModelParams::Bayes(p) => ModelState::Bayes(naive_bayes::fit(p, train, seed)?),
        ModelParams::Logistic(p) => ModelState::Logistic(logistic::fit(p, train, seed)?),
    };
    Ok(TrainedModel { algorithm: params.algorithm(), params: params.clone(), seed, state })
}

impl TrainedModel {
    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn predict(&self, features: &FeatureVector) -> Prediction {
        let x = features.as_array();
        let score = match &self.state {
            ModelState::Gbt(m) => m.score(&x),
            ModelState::Forest(m) => m.score(&x),
            ModelState::Tree(m) => m.score(&x),
            ModelState::Bayes(m) => m.score(&x),
            ModelState::Logistic(m) => m.score(&x),
        };
        let label = if score > 0.5 { InfluenceLabel::High } else { InfluenceLabel::Low };
        Prediction { score, label }
    }

    /// Short identifier recorded in recommendation output.
    pub fn version_string(&self) -> String {
        format!("{}/v{}/seed{}", self.algorithm, MODEL_FORMAT_VERSION, self.seed)
    }

    pub fn to_json(&self) -> String {
        let doc = ModelDocument {
            format_version: MODEL_FORMAT_VERSION,
            algorithm: self.algorithm,
            params: serde_json::to_value(&self.params).expect("params serialize"),
            seed: self.seed,
            state: serde_json::to_value(&self.state).expect("state serialize"),
        };
        serde_json::to_string_pretty(&doc).expect("model serialize")
    }

    pub fn from_json(text: &str) -> Result<TrainedModel> {
        let doc: ModelDocument =
            serde_json::from_str(text).map_err(|e| Error::MalformedModel(e.to_string()))?;
        if doc.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::MalformedModel(format!(
                "unsupported format_version {}, expected {}",
                doc.format_version, MODEL_FORMAT_VERSION
            )));
        }
        let params = ModelParams::from_json(doc.algorithm, doc.params)?;
        let state: ModelState = serde_json::from_value(doc.state)
            .map_err(|e| Error::MalformedModel(format!("bad state: {e}")))?;
        let state_algorithm = match &state {
            ModelState::Gbt(_) => Algorithm::GradientBoostedTrees,
            ModelState::Forest(_) => Algorithm::RandomForest,
            ModelState::Tree(_) => Algorithm::DecisionTree,
            ModelState::Bayes(_) => Algorithm::NaiveBayes,
            ModelState::Logistic(_) => Algorithm::LogisticRegression,
        };
        if state_algorithm != doc.algorithm {
            return Err(Error::MalformedModel(format!(
                "state is {state_algorithm} but document says {}",
                doc.algorithm
            )));
        }
        Ok(TrainedModel { algorithm: doc.algorithm, params, seed: doc.seed, state })
    }
}

#[derive(Serialize, Deserialize)]
struct ModelDocument {
    format_version: u32,
    algorithm: Algorithm,
    params: serde_json::Value,
    seed: u64,
    state: serde_json::Value,
}
