//! Naive Bayes: Gaussian likelihood for the five count features,
//! Bernoulli with Laplace smoothing for the bio flag.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ml::LabeledDataset;
use crate::pagerank::InfluenceLabel;

/// No tunables; kept so the parameter plumbing is uniform across families.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BayesParams {}

const VAR_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ClassStats {
    log_prior: f64,
    /// mean/variance for features 0..5 (variance floored)
    mean: [f64; 5],
    var: [f64; 5],
    /// smoothed P(bio = 1 | class)
    bio_p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BayesModel {
    high: ClassStats,
    low: ClassStats,
}

impl BayesModel {
    pub fn score(&self, x: &[f64; 6]) -> f64 {
        let lh = log_likelihood(&self.high, x);
        let ll = log_likelihood(&self.low, x);
        // softmax over the two joint log-probabilities
        let m = lh.max(ll);
        let eh = (lh - m).exp();
        let el = (ll - m).exp();
        eh / (eh + el)
    }
}

fn log_likelihood(stats: &ClassStats, x: &[f64; 6]) -> f64 {
    let mut total = stats.log_prior;
    // zip over the 5 numeric features; x[5] is the bio flag
    for ((&value, &mean), &var) in x.iter().zip(&stats.mean).zip(&stats.var) {
        let d = value - mean;
        total += -0.5 * ((2.0 * std::f64::consts::PI * var).ln() + d * d / var);
    }
    let p = stats.bio_p;
    total += if x[5] > 0.5 { p.ln() } else { (1.0 - p).ln() };
    total
}

fn class_stats(rows: &[[f64; 6]], log_prior: f64) -> ClassStats {
    let n = rows.len() as f64;
    let mut mean = [0.0f64; 5];
    let mut var = [0.0f64; 5];
    for row in rows {
        for f in 0..5 {
            mean[f] += row[f];
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    for row in rows {
        for f in 0..5 {
            var[f] += (row[f] - mean[f]).powi(2);
        }
    }
    for v in &mut var {
        *v = (*v / n).max(VAR_FLOOR);
    }
    let bio_ones = rows.iter().filter(|r| r[5] > 0.5).count() as f64;
    // Laplace: (ones + 1) / (n + 2)
    let bio_p = (bio_ones + 1.0) / (n + 2.0);
    ClassStats { log_prior, mean, var, bio_p }
}

pub fn fit(params: &BayesParams, train: &LabeledDataset, _seed: u64) -> Result<BayesModel> {
    let BayesParams {} = params;
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !train.has_both_classes() {
        return Err(Error::SingleClass);
    }
    let mut high_rows = Vec::new();
    let mut low_rows = Vec::new();
    for r in &train.rows {
        let arr = r.features.as_array();
        match r.label {
            InfluenceLabel::High => high_rows.push(arr),
            InfluenceLabel::Low => low_rows.push(arr),
        }
    }
    let n = train.len() as f64;
    Ok(BayesModel {
        high: class_stats(&high_rows, (high_rows.len() as f64 / n).ln()),
        low: class_stats(&low_rows, (low_rows.len() as f64 / n).ln()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ml::test_support::dataset;
    use crate::pagerank::InfluenceLabel::{High, Low};

    #[test]
    fn posterior_matches_hand_computed_bayes_rule() {
        // Numeric features constant (identical Gaussians cancel); only bio
        // carries signal. 4 rows: High {bio=1, bio=1}, Low {bio=1, bio=0}.
        let ds = dataset(&[
            ([7.0, 7.0, 7.0, 7.0, 7.0, 1.0], High),
            ([7.0, 7.0, 7.0, 7.0, 7.0, 1.0], High),
            ([7.0, 7.0, 7.0, 7.0, 7.0, 1.0], Low),
            ([7.0, 7.0, 7.0, 7.0, 7.0, 0.0], Low),
        ]);
        let model = fit(&BayesParams::default(), &ds, 0).unwrap();
        // Laplace-smoothed: P(1|H) = 3/4, P(1|L) = 2/4; priors 1/2 each.
        // P(H | bio=1) = (1/2)(3/4) / [(1/2)(3/4) + (1/2)(1/2)] = 3/5
        let x1 = [7.0, 7.0, 7.0, 7.0, 7.0, 1.0];
        assert!((model.score(&x1) - 0.6).abs() < 1e-12, "got {}", model.score(&x1));
        // P(H | bio=0) = (1/4) / (1/4 + 1/2) = 1/3
        let x0 = [7.0, 7.0, 7.0, 7.0, 7.0, 0.0];
        assert!((model.score(&x0) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_features_separate_classes() {
        let mut rows = Vec::new();
        for i in 0..20 {
            rows.push(([0.0, 1000.0 + i as f64, 0.0, 0.0, 0.0, 0.0], High));
            rows.push(([0.0, 10.0 + i as f64, 0.0, 0.0, 0.0, 0.0], Low));
        }
        let ds = dataset(&rows);
        let model = fit(&BayesParams::default(), &ds, 0).unwrap();
        assert!(model.score(&[0.0, 1005.0, 0.0, 0.0, 0.0, 0.0]) > 0.99);
        assert!(model.score(&[0.0, 12.0, 0.0, 0.0, 0.0, 0.0]) < 0.01);
    }

    #[test]
    fn single_class_errors() {
        let ds = dataset(&[([1.0, 1.0, 1.0, 1.0, 1.0, 0.0], High)]);
        assert!(matches!(fit(&BayesParams::default(), &ds, 0), Err(Error::SingleClass)));
    }
}
