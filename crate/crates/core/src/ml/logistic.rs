//! L2-regularized logistic regression, fitted by full-batch gradient
//! descent. The count features are heavy-tailed, so the trainer applies
//! log1p to them and standardizes everything on training statistics; the
//! transform is stored in the model and replayed at prediction time.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ml::LabeledDataset;
use crate::pagerank::InfluenceLabel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LogisticParams {
    pub iterations: usize,
    pub learning_rate: f64,
    pub l2: f64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams { iterations: 800, learning_rate: 0.3, l2: 1e-4 }
    }
}

impl LogisticParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &str, reason: String| Error::InvalidParam { name: name.into(), reason };
        if self.iterations == 0 {
            return Err(bad("iterations", "must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(bad("learning_rate", format!("must be positive, got {}", self.learning_rate)));
        }
        if !(self.l2 >= 0.0 && self.l2.is_finite()) {
            return Err(bad("l2", format!("must be non-negative, got {}", self.l2)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    weights: [f64; 6],
    bias: f64,
    mean: [f64; 6],
    std: [f64; 6],
}

impl LogisticModel {
    fn transform(x: &[f64; 6]) -> [f64; 6] {
        let mut z = *x;
        for v in z.iter_mut().take(5) {
            *v = v.ln_1p();
        }
        z
    }

    fn standardize(&self, x: &[f64; 6]) -> [f64; 6] {
        let z = Self::transform(x);
        let mut out = [0.0; 6];
        for f in 0..6 {
            out[f] = if self.std[f] > 0.0 { (z[f] - self.mean[f]) / self.std[f] } else { 0.0 };
        }
        out
    }

    pub fn score(&self, x: &[f64; 6]) -> f64 {
        let z = self.standardize(x);
        let margin: f64 = self.bias + z.iter().zip(&self.weights).map(|(a, w)| a * w).sum::<f64>();
        1.0 / (1.0 + (-margin).exp())
    }
}

pub fn fit(params: &LogisticParams, train: &LabeledDataset, _seed: u64) -> Result<LogisticModel> {
    params.validate()?;
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !train.has_both_classes() {
        return Err(Error::SingleClass);
    }
    let n = train.len();
    let nf = n as f64;
    let raw: Vec<[f64; 6]> =
        train.rows.iter().map(|r| LogisticModel::transform(&r.features.as_array())).collect();
    let y: Vec<f64> = train
        .rows
        .iter()
        .map(|r| if r.label == InfluenceLabel::High { 1.0 } else { 0.0 })
        .collect();

    let mut mean = [0.0f64; 6];
    for row in &raw {
        for f in 0..6 {
            mean[f] += row[f];
        }
    }
    for m in &mut mean {
        *m /= nf;
    }
    let mut std = [0.0f64; 6];
    for row in &raw {
        for f in 0..6 {
            std[f] += (row[f] - mean[f]).powi(2);
        }
    }
    for s in &mut std {
        *s = (*s / nf).sqrt();
        if *s < 1e-12 {
            *s = 0.0; // constant feature, zeroed by standardize
        }
    }

    let z: Vec<[f64; 6]> = raw
        .iter()
        .map(|row| {
            let mut out = [0.0; 6];
            for f in 0..6 {
                out[f] = if std[f] > 0.0 { (row[f] - mean[f]) / std[f] } else { 0.0 };
            }
            out
        })
        .collect();

    let mut weights = [0.0f64; 6];
    let mut bias = 0.0f64;
    for _ in 0..params.iterations {
        let mut grad_w = [0.0f64; 6];
        let mut grad_b = 0.0f64;
        for (zi, &yi) in z.iter().zip(&y) {
            let margin: f64 =
                bias + zi.iter().zip(&weights).map(|(a, w)| a * w).sum::<f64>();
            let err = 1.0 / (1.0 + (-margin).exp()) - yi;
            for f in 0..6 {
                grad_w[f] += err * zi[f];
            }
            grad_b += err;
        }
        for f in 0..6 {
            weights[f] -= params.learning_rate * (grad_w[f] / nf + params.l2 * weights[f]);
        }
        bias -= params.learning_rate * grad_b / nf;
    }

    Ok(LogisticModel { weights, bias, mean, std })
}
