//! The `pipeline` subcommand: one TOML config drives the full experiment
//! order — generate (or ingest) → metrics → pagerank → dataset split →
//! chi-square ranking → model training → evaluation — with every stage's
//! output written under one directory.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::json;

use linkrank_core::graph::{build_graph, ingest_edges, ingest_users, SocialGraph};
use linkrank_core::metrics::{degree_ccdf, graph_report, Direction, ReportOptions};
use linkrank_core::ml::{
    build_dataset, chi_square_rank, eligible_pool_sizes, evaluate, train, Algorithm, EvalMetrics,
    ModelParams, SplitCounts,
};
use linkrank_core::pagerank::{pagerank_with_labels, PageRankOptions};
use linkrank_core::synth::{generate, SynthConfig};
use linkrank_core::temporal::linking_distribution;

use crate::commands::pagerank_csv;
use crate::manifest::{digest_hex, RunManifest};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// Generate the dataset (exclusive with `inputs`).
    pub synth: Option<SynthConfig>,
    /// Use existing crawl files (exclusive with `synth`).
    pub inputs: Option<InputsSection>,
    #[serde(default)]
    pub metrics: MetricsSection,
    #[serde(default)]
    pub pagerank: PagerankSection,
    #[serde(default)]
    pub dataset: DatasetSection,
    #[serde(default)]
    pub chi2: Chi2Section,
    #[serde(default)]
    pub models: ModelsSection,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputsSection {
    pub users: PathBuf,
    pub edges: PathBuf,
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsSection {
    pub enabled: bool,
    pub account: Option<String>,
    pub exact_path_limit: usize,
    pub sample_sources: usize,
    pub seed: u64,
}

impl Default for MetricsSection {
    fn default() -> Self {
        MetricsSection {
            enabled: true,
            account: None,
            exact_path_limit: 10_000,
            sample_sources: 1_000,
            seed: 0,
        }
    }
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PagerankSection {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: u32,
    pub percentile: f64,
}

impl Default for PagerankSection {
    fn default() -> Self {
        PagerankSection { damping: 0.85, tol: 1e-10, max_iter: 200, percentile: 0.01 }
    }
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetSection {
    pub n_high_train: usize,
    pub n_low_train: usize,
    pub n_high_test: usize,
    pub n_low_test: usize,
    /// Shrink the requested counts proportionally when the eligible
    /// pools are smaller.
    pub auto_scale: bool,
    pub seed: u64,
}

impl Default for DatasetSection {
    fn default() -> Self {
        let c = SplitCounts::default();
        DatasetSection {
            n_high_train: c.n_high_train,
            n_low_train: c.n_low_train,
            n_high_test: c.n_high_test,
            n_low_test: c.n_low_test,
            auto_scale: true,
            seed: 7,
        }
    }
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Chi2Section {
    pub bins: usize,
}

impl Default for Chi2Section {
    fn default() -> Self {
        Chi2Section { bins: 10 }
    }
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelsSection {
    /// Algorithm names to train, in order.
    pub train: Vec<String>,
    pub seed: u64,
    /// Per-algorithm hyperparameter overrides, keyed by algorithm name.
    pub params: serde_json::Map<String, serde_json::Value>,
}

impl Default for ModelsSection {
    fn default() -> Self {
        ModelsSection {
            train: vec![
                "gradient_boosted_trees".into(),
                "random_forest".into(),
                "logistic_regression".into(),
            ],
            seed: 11,
            params: serde_json::Map::new(),
        }
    }
}

#[derive(Serialize)]
struct ModelOutcome {
    algorithm: Algorithm,
    metrics: EvalMetrics,
}

pub fn run(config_path: &Path, out_dir: &Path) -> Result<()> {
    let mut manifest = RunManifest::start("pipeline");
    manifest.input(config_path)?;
    let text = fs::read_to_string(config_path)
        .with_context(|| format!("cannot read {}", config_path.display()))?;
    let config: PipelineConfig =
        toml::from_str(&text).with_context(|| format!("bad config {}", config_path.display()))?;
    fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create {}", out_dir.display()))?;

    let mut file_digests: Vec<(String, String)> = Vec::new();
    let mut write_out = |name: &str, contents: &[u8]| -> Result<()> {
        fs::write(out_dir.join(name), contents)
            .with_context(|| format!("cannot write {}", out_dir.join(name).display()))?;
        file_digests.push((name.to_string(), digest_hex(contents)));
        Ok(())
    };

    // stage 1: data
    let graph: SocialGraph = match (&config.synth, &config.inputs) {
        (Some(synth), None) => {
            manifest.seed(synth.seed);
            let output = generate(synth)?;
            write_out("users.jsonl", &output.users_jsonl)?;
            write_out("edges.tsv", &output.edges_tsv)?;
            println!(
                "[pipeline] generated {} users, {} edges",
                output.report.users_written, output.report.edges_written
            );
            let users = ingest_users(out_dir.join("users.jsonl"))?;
            let edges = ingest_edges(out_dir.join("edges.tsv"))?;
            build_graph(users.records, &edges.edges)?
        }
        (None, Some(inputs)) => {
            manifest.input(&inputs.users)?;
            manifest.input(&inputs.edges)?;
            let users = ingest_users(&inputs.users)?;
            let edges = ingest_edges(&inputs.edges)?;
            println!(
                "[pipeline] ingested {} users, {} edges",
                users.records.len(),
                edges.edges.len()
            );
            build_graph(users.records, &edges.edges)?
        }
        (Some(_), Some(_)) => bail!("config has both [synth] and [inputs]; pick one"),
        (None, None) => bail!("config needs a [synth] or an [inputs] section"),
    };

    // stage 2: metrics
    let report = if config.metrics.enabled {
        let report = graph_report(
            &graph,
            &ReportOptions {
                account: config.metrics.account.clone(),
                exact_path_limit: config.metrics.exact_path_limit,
                sample_sources: config.metrics.sample_sources,
                seed: config.metrics.seed,
            },
        )?;
        write_out("report.json", (serde_json::to_string_pretty(&report)? + "\n").as_bytes())?;
        for (direction, suffix) in [(Direction::Out, "out"), (Direction::In, "in")] {
            let mut csv = String::from("degree,ccdf\n");
            for (k, fraction) in degree_ccdf(&graph, direction)? {
                let _ = writeln!(csv, "{k},{fraction}");
            }
            write_out(&format!("ccdf_{suffix}.csv"), csv.as_bytes())?;
        }
        println!(
            "[pipeline] metrics: clustering {:.4}, lscc {} nodes",
            report.avg_clustering, report.lscc_size
        );
        Some(report)
    } else {
        None
    };

    // stage 3: pagerank + labels
    let pr_opts = PageRankOptions {
        damping: config.pagerank.damping,
        tol: config.pagerank.tol,
        max_iter: config.pagerank.max_iter,
    };
    let pr = pagerank_with_labels(&graph, &pr_opts, config.pagerank.percentile)?;
    write_out("pagerank.csv", pagerank_csv(&graph, &pr).as_bytes())?;
    println!(
        "[pipeline] pagerank: threshold {:e}, {} high users, {} iterations",
        pr.threshold,
        pr.high_count(),
        pr.iterations_run
    );

    // stage 4: dataset split
    let requested = SplitCounts {
        n_high_train: config.dataset.n_high_train,
        n_low_train: config.dataset.n_low_train,
        n_high_test: config.dataset.n_high_test,
        n_low_test: config.dataset.n_low_test,
    };
    let (avail_high, avail_low) = eligible_pool_sizes(&graph, &pr);
    let counts = if config.dataset.auto_scale {
        requested.scaled_to(avail_high, avail_low)
    } else {
        requested
    };
    if counts != requested {
        println!(
            "[pipeline] scaled split to {}/{} train + {}/{} test (pools: {avail_high} high, {avail_low} low)",
            counts.n_high_train, counts.n_low_train, counts.n_high_test, counts.n_low_test
        );
    }
    if counts.n_high_train == 0 || counts.n_low_train == 0 {
        bail!("eligible pools too small to train: {avail_high} high, {avail_low} low");
    }
    manifest.seed(config.dataset.seed);
    let (train_ds, test_ds) = build_dataset(
        &graph,
        &pr,
        counts.n_high_train,
        counts.n_low_train,
        counts.n_high_test,
        counts.n_low_test,
        config.dataset.seed,
    )?;
    write_out("train.csv", train_ds.to_csv().as_bytes())?;
    write_out("test.csv", test_ds.to_csv().as_bytes())?;

    // stage 5: feature ranking
    let ranking = chi_square_rank(&train_ds, config.chi2.bins)?;
    let mut csv = String::from("feature,chi2\n");
    for (feature, value) in &ranking {
        let _ = writeln!(csv, "{feature},{value}");
    }
    write_out("chi2.csv", csv.as_bytes())?;
    println!(
        "[pipeline] chi2 ranking: {}",
        ranking.iter().map(|(f, _)| f.as_str()).collect::<Vec<_>>().join(" > ")
    );

    // stage 6: train + evaluate
    manifest.seed(config.models.seed);
    let mut outcomes: Vec<ModelOutcome> = Vec::new();
    for name in &config.models.train {
        let algorithm = match name.as_str() {
            "gradient_boosted_trees" | "gbt" => Algorithm::GradientBoostedTrees,
            "random_forest" => Algorithm::RandomForest,
            "decision_tree" => Algorithm::DecisionTree,
            "naive_bayes" => Algorithm::NaiveBayes,
            "logistic_regression" => Algorithm::LogisticRegression,
            other => bail!("unknown algorithm {other:?} in [models].train"),
        };
        let mut params = ModelParams::default_for(algorithm);
        if let Some(overrides) = config.models.params.get(algorithm.as_str()) {
            let map = overrides
                .as_object()
                .with_context(|| format!("[models.params.{algorithm}] must be a table"))?;
            params = params.with_overrides(map)?;
        }
        let model = train(&params, &train_ds, config.models.seed)?;
        write_out(&format!("model_{algorithm}.json"), (model.to_json() + "\n").as_bytes())?;
        if test_ds.is_empty() {
            println!("[pipeline] {algorithm}: trained (no test rows requested)");
            continue;
        }
        let metrics = evaluate(&model, &test_ds)?;
        write_out(
            &format!("eval_{algorithm}.json"),
            (serde_json::to_string_pretty(&metrics)? + "\n").as_bytes(),
        )?;
        println!(
            "[pipeline] {algorithm}: precision {:.3} recall {:.3} f1 {:.3} auc {:.3}",
            metrics.precision, metrics.recall, metrics.f1, metrics.auc
        );
        outcomes.push(ModelOutcome { algorithm, metrics });
    }

    // stage 7: summary
    let summary = json!({
        "nodes": graph.node_count(),
        "edges": graph.edge_count(),
        "linking_distribution": linking_distribution(&graph)?,
        "metrics": report,
        "pagerank": {
            "threshold": pr.threshold,
            "high_count": pr.high_count(),
            "iterations_run": pr.iterations_run,
            "converged": pr.converged,
            "percentile": pr.percentile,
        },
        "split": {
            "requested": requested,
            "used": counts,
            "eligible_high": avail_high,
            "eligible_low": avail_low,
        },
        "chi2": ranking.iter().map(|(f, v)| json!({"feature": f, "chi2": v})).collect::<Vec<_>>(),
        "models": outcomes,
        "files": file_digests.iter().map(|(name, sha256)| json!({"file": name, "sha256": sha256})).collect::<Vec<_>>(),
    });
    fs::write(out_dir.join("summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
    manifest.write_to(&out_dir.join("manifest.json"))?;
    println!("[pipeline] done -> {}", out_dir.display());
    Ok(())
}
