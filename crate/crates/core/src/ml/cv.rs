//! K-fold cross-validation and exhaustive grid search.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ml::model::{train, ModelParams};
use crate::ml::{evaluate, Algorithm, EvalMetrics, LabeledDataset};
use crate::seeding::{derive_seed, rng_for, DOMAIN_CV_FOLD, DOMAIN_CV_SHUFFLE};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub auc: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CvSummary {
    pub k: usize,
    pub mean: MeanMetrics,
    pub folds: Vec<EvalMetrics>,
}

/// Seeded k-fold cross-validation: indices are shuffled once, split into
/// folds as equal as divisibility allows, and each fold serves once as
/// validation. Fold fits run in parallel; fold `i` trains with a seed
/// derived from (seed, i), so the summary is schedule-independent.
pub fn cross_validate(
    params: &ModelParams,
    ds: &LabeledDataset,
    k: usize,
    seed: u64,
) -> Result<CvSummary> {
    if k < 2 {
        return Err(Error::InvalidParam {
            name: "k".into(),
            reason: format!("need at least 2 folds, got {k}"),
        });
    }
    if ds.len() < k {
        return Err(Error::InvalidParam {
            name: "k".into(),
            reason: format!("{k} folds but only {} rows", ds.len()),
        });
    }

    let n = ds.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng_for(seed, DOMAIN_CV_SHUFFLE, 0));

    // first n % k folds get one extra row
    let base = n / k;
    let extra = n % k;
    let mut bounds = Vec::with_capacity(k + 1);
    bounds.push(0usize);
    for i in 0..k {
        bounds.push(bounds[i] + base + usize::from(i < extra));
    }

    let folds: Vec<EvalMetrics> = (0..k)
        .into_par_iter()
        .map(|i| -> Result<EvalMetrics> {
            let val_idx = &order[bounds[i]..bounds[i + 1]];
            let val_rows: Vec<_> = val_idx.iter().map(|&j| ds.rows[j].clone()).collect();
            let train_rows: Vec<_> = order[..bounds[i]]
                .iter()
                .chain(&order[bounds[i + 1]..])
                .map(|&j| ds.rows[j].clone())
                .collect();
            let train_ds =
                LabeledDataset::new(train_rows, format!("cv-fold-{i}-train(seed={seed})"))?;
            let val_ds = LabeledDataset::new(val_rows, format!("cv-fold-{i}-val(seed={seed})"))?;
            let model = train(params, &train_ds, derive_seed(seed, DOMAIN_CV_FOLD, i as u64))?;
            evaluate(&model, &val_ds)
        })
        .collect::<Result<Vec<_>>>()?;

    let kf = k as f64;
    let mean = MeanMetrics {
        precision: folds.iter().map(|m| m.precision).sum::<f64>() / kf,
        recall: folds.iter().map(|m| m.recall).sum::<f64>() / kf,
        f1: folds.iter().map(|m| m.f1).sum::<f64>() / kf,
        auc: folds.iter().map(|m| m.auc).sum::<f64>() / kf,
    };
    Ok(CvSummary { k, mean, folds })
}

#[derive(Debug, Clone, Serialize)]
pub struct GridPoint {
    pub overrides: serde_json::Map<String, serde_json::Value>,
    pub mean_f1: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridSearchResult {
    pub best_params: ModelParams,
    pub best_f1: f64,
    pub points: Vec<GridPoint>,
}

/// Exhaustive sweep over the Cartesian product of the grid axes, scored
/// by mean cross-validation F1. Axes iterate like nested loops in the
/// given order (last axis fastest); ties keep the earliest point.
pub fn grid_search(
    algorithm: Algorithm,
    grid: &[(String, Vec<serde_json::Value>)],
    ds: &LabeledDataset,
    k: usize,
    seed: u64,
) -> Result<GridSearchResult> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    for (name, values) in grid {
        if values.is_empty() {
            return Err(Error::EmptyGridAxis(name.clone()));
        }
    }

    let base = ModelParams::default_for(algorithm);
    let total: usize = grid.iter().map(|(_, v)| v.len()).product();

    // materialize all points up front so they can be scored in parallel
    // while keeping enumeration order for the tie-break
    let mut points = Vec::with_capacity(total);
    for idx in 0..total {
        let mut overrides = serde_json::Map::new();
        let mut rem = idx;
        for (name, values) in grid.iter().rev() {
            overrides.insert(name.clone(), values[rem % values.len()].clone());
            rem /= values.len();
        }
        points.push(overrides);
    }

    let scored: Vec<Result<GridPoint>> = points
        .into_par_iter()
        .map(|overrides| {
            let params = base.with_overrides(&overrides)?;
            let summary = cross_validate(&params, ds, k, seed)?;
            Ok(GridPoint { overrides, mean_f1: summary.mean.f1 })
        })
        .collect();

    let mut best: Option<(usize, f64)> = None;
    let mut evaluated = Vec::with_capacity(total);
    for (i, point) in scored.into_iter().enumerate() {
        let point = point?;
        if best.is_none_or(|(_, f1)| point.mean_f1 > f1) {
            best = Some((i, point.mean_f1));
        }
        evaluated.push(point);
    }
    let (best_idx, best_f1) = best.expect("grid has at least one point");
    let best_params = base.with_overrides(&evaluated[best_idx].overrides)?;
    Ok(GridSearchResult { best_params, best_f1, points: evaluated })
}
