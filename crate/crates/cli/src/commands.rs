//! Subcommand implementations. Each run writes its primary outputs plus a
//! manifest; everything written is deterministic for fixed inputs, flags,
//! and seeds (manifests differ in wall time only).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde_json::json;

use linkrank_core::attraction::{recommend, FriendProfile};
use linkrank_core::graph::{build_graph, ingest_edges, ingest_users, SocialGraph};
use linkrank_core::metrics::{degree_ccdf, graph_report, Direction, ReportOptions};
use linkrank_core::ml::{
    chi_square_rank, cross_validate, evaluate, grid_search, train, Algorithm, LabeledDataset,
    ModelParams, TrainedModel,
};
use linkrank_core::month::Month;
use linkrank_core::pagerank::{pagerank_with_labels, PageRankOptions, PageRankResult};
use linkrank_core::synth::{generate, SynthConfig};
use linkrank_core::temporal::{
    cohort_cdf, high_pagerank_composition, linking_distribution, snapshot_series, CohortMetric,
};

use crate::manifest::RunManifest;
use crate::pipeline;
use crate::Command;

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Generate { config, seed, out_dir } => cmd_generate(config, seed, out_dir),
        Command::IngestCheck { users, edges, out } => cmd_ingest_check(users, edges, out),
        Command::Metrics { users, edges, out, account, exact_path_limit, sample_sources, seed } => {
            cmd_metrics(users, edges, out, account, exact_path_limit, sample_sources, seed)
        }
        Command::Pagerank { users, edges, out, damping, tol, max_iter, percentile } => {
            cmd_pagerank(users, edges, out, damping, tol, max_iter, percentile)
        }
        Command::Timeline { users, edges, out, from, to } => {
            cmd_timeline(users, edges, out, from, to)
        }
        Command::Cohorts {
            users,
            edges,
            out,
            metric,
            composition_out,
            damping,
            tol,
            max_iter,
            percentile,
        } => cmd_cohorts(
            users,
            edges,
            out,
            metric,
            composition_out,
            PageRankOptions { damping, tol, max_iter },
            percentile,
        ),
        Command::Chi2 { dataset, out, bins } => cmd_chi2(dataset, out, bins),
        Command::Train { dataset, algorithm, out, seed, sets } => {
            cmd_train(dataset, algorithm, out, seed, sets)
        }
        Command::Eval { model, dataset, out } => cmd_eval(model, dataset, out),
        Command::Cv { dataset, algorithm, out, folds, seed, sets } => {
            cmd_cv(dataset, algorithm, out, folds, seed, sets)
        }
        Command::Gridsearch { dataset, algorithm, grid, out, folds, seed } => {
            cmd_gridsearch(dataset, algorithm, grid, out, folds, seed)
        }
        Command::Recommend { input, model, out, top_k } => cmd_recommend(input, model, out, top_k),
        Command::Pipeline { config, out_dir } => pipeline::run(&config, &out_dir),
    }
}

// ---- shared helpers -------------------------------------------------------

pub fn load_graph(users_path: &Path, edges_path: &Path) -> Result<(SocialGraph, serde_json::Value)> {
    let users = ingest_users(users_path)?;
    let edges = ingest_edges(edges_path)?;
    if users.skipped_lines > 0 {
        eprintln!("warning: skipped {} malformed user lines", users.skipped_lines);
    }
    if edges.skipped_lines > 0 {
        eprintln!("warning: skipped {} malformed edge lines", edges.skipped_lines);
    }
    let users_read = users.records.len();
    let edges_read = edges.edges.len();
    let graph = build_graph(users.records, &edges.edges)?;
    let stats = graph.build_stats();
    let summary = json!({
        "users_read": users_read,
        "skipped_user_lines": users.skipped_lines,
        "edges_read": edges_read,
        "skipped_edge_lines": edges.skipped_lines,
        "nodes": graph.node_count(),
        "edges": graph.edge_count(),
        "self_loops_dropped": stats.self_loops_dropped,
        "duplicate_edges_collapsed": stats.duplicate_edges_collapsed,
    });
    Ok((graph, summary))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .with_context(|| format!("cannot create {}", parent.display()))?;
        }
    }
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn read_dataset(path: &Path) -> Result<LabeledDataset> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(LabeledDataset::from_csv(&text, path.display().to_string())?)
}

fn parse_algorithm(name: &str) -> Result<Algorithm> {
    Ok(match name {
        "gradient_boosted_trees" | "gbt" => Algorithm::GradientBoostedTrees,
        "random_forest" => Algorithm::RandomForest,
        "decision_tree" => Algorithm::DecisionTree,
        "naive_bayes" => Algorithm::NaiveBayes,
        "logistic_regression" => Algorithm::LogisticRegression,
        other => bail!(
            "unknown algorithm {other:?}; expected gradient_boosted_trees, random_forest, \
             decision_tree, naive_bayes, or logistic_regression"
        ),
    })
}

/// `--set name=value` overrides; values are parsed as JSON scalars.
fn parse_overrides(sets: &[String]) -> Result<serde_json::Map<String, serde_json::Value>> {
    let mut map = serde_json::Map::new();
    for entry in sets {
        let (name, raw) = entry
            .split_once('=')
            .with_context(|| format!("--set {entry:?}: expected NAME=VALUE"))?;
        let value: serde_json::Value = serde_json::from_str(raw)
            .with_context(|| format!("--set {entry:?}: value is not a JSON literal"))?;
        map.insert(name.to_string(), value);
    }
    Ok(map)
}

fn params_for(algorithm: Algorithm, sets: &[String]) -> Result<ModelParams> {
    let overrides = parse_overrides(sets)?;
    Ok(ModelParams::default_for(algorithm).with_overrides(&overrides)?)
}

pub fn pagerank_csv(graph: &SocialGraph, result: &PageRankResult) -> String {
    let mut out = String::from("user_id,score,label\n");
    for u in graph.nodes() {
        let _ = writeln!(
            out,
            "{},{},{}",
            graph.user_id(u),
            result.scores[u as usize],
            result.labels[u as usize]
        );
    }
    out
}

// ---- subcommands ----------------------------------------------------------

fn cmd_generate(config: Option<PathBuf>, seed: Option<u64>, out_dir: PathBuf) -> Result<()> {
    let mut manifest = RunManifest::start("generate");
    let mut cfg: SynthConfig = match &config {
        Some(path) => {
            manifest.input(path)?;
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            // TOML by default; .json configs are accepted as well
            if path.extension().is_some_and(|e| e == "json") {
                serde_json::from_str(&text)
                    .with_context(|| format!("bad config {}", path.display()))?
            } else {
                toml::from_str(&text).with_context(|| format!("bad config {}", path.display()))?
            }
        }
        None => SynthConfig::default(),
    };
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    manifest.seed(cfg.seed);

    let output = generate(&cfg)?;
    write_file(&out_dir.join("users.jsonl"), &output.users_jsonl)?;
    write_file(&out_dir.join("edges.tsv"), &output.edges_tsv)?;
    manifest.write_to(&out_dir.join("generate.manifest.json"))?;
    println!(
        "generated {} users, {} edges ({} planted, {} surge, {} twitter-linked)",
        output.report.users_written,
        output.report.edges_written,
        output.report.planted_users,
        output.report.surge_users,
        output.report.eligible_users,
    );
    Ok(())
}

fn cmd_ingest_check(users: PathBuf, edges: PathBuf, out: Option<PathBuf>) -> Result<()> {
    let mut manifest = RunManifest::start("ingest-check");
    manifest.input(&users)?;
    manifest.input(&edges)?;
    let (graph, mut summary) = load_graph(&users, &edges)?;
    if graph.node_count() > 0 {
        let distribution = linking_distribution(&graph)?;
        summary.as_object_mut().expect("summary is an object").insert(
            "linking_distribution".to_string(),
            serde_json::to_value(&distribution)?,
        );
    }
    let text = serde_json::to_string_pretty(&summary)?;
    println!("{text}");
    if let Some(path) = out {
        write_file(&path, text + "\n")?;
        manifest.write_for(&path)?;
    }
    Ok(())
}

fn cmd_metrics(
    users: PathBuf,
    edges: PathBuf,
    out: PathBuf,
    account: Option<String>,
    exact_path_limit: usize,
    sample_sources: usize,
    seed: u64,
) -> Result<()> {
    let mut manifest = RunManifest::start("metrics");
    manifest.input(&users)?;
    manifest.input(&edges)?;
    manifest.seed(seed);
    let (graph, _) = load_graph(&users, &edges)?;

    let report = graph_report(
        &graph,
        &ReportOptions { account, exact_path_limit, sample_sources, seed },
    )?;
    write_file(&out, serde_json::to_string_pretty(&report)? + "\n")?;

    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    for (direction, suffix) in [(Direction::Out, "out"), (Direction::In, "in")] {
        let curve = degree_ccdf(&graph, direction)?;
        let mut csv = String::from("degree,ccdf\n");
        for (k, fraction) in curve {
            let _ = writeln!(csv, "{k},{fraction}");
        }
        write_file(&out.with_file_name(format!("{stem}_ccdf_{suffix}.csv")), csv)?;
    }
    manifest.write_for(&out)?;
    println!("metrics written to {}", out.display());
    Ok(())
}

fn cmd_pagerank(
    users: PathBuf,
    edges: PathBuf,
    out: PathBuf,
    damping: f64,
    tol: f64,
    max_iter: u32,
    percentile: f64,
) -> Result<()> {
    let mut manifest = RunManifest::start("pagerank");
    manifest.input(&users)?;
    manifest.input(&edges)?;
    let (graph, _) = load_graph(&users, &edges)?;
    let result =
        pagerank_with_labels(&graph, &PageRankOptions { damping, tol, max_iter }, percentile)?;
    write_file(&out, pagerank_csv(&graph, &result))?;
    manifest.write_for(&out)?;
    if !result.converged {
        eprintln!(
            "warning: did not converge in {} iterations (residual {:e})",
            result.iterations_run, result.residual
        );
    }
    println!(
        "threshold {:e} ({} high of {} nodes, {} iterations)",
        result.threshold,
        result.high_count(),
        graph.node_count(),
        result.iterations_run
    );
    Ok(())
}

fn cmd_timeline(
    users: PathBuf,
    edges: PathBuf,
    out: PathBuf,
    from: Option<String>,
    to: Option<String>,
) -> Result<()> {
    let mut manifest = RunManifest::start("timeline");
    manifest.input(&users)?;
    manifest.input(&edges)?;
    let (graph, _) = load_graph(&users, &edges)?;
    if graph.node_count() == 0 {
        bail!("empty graph has no timeline");
    }
    let earliest = graph.users().iter().map(|u| u.registered_at).min().expect("non-empty");
    let latest = graph.users().iter().map(|u| u.registered_at).max().expect("non-empty");
    let from: Month = match from {
        Some(s) => s.parse()?,
        None => earliest,
    };
    let to: Month = match to {
        Some(s) => s.parse()?,
        None => latest,
    };
    let series = snapshot_series(&graph, from, to)?;
    let mut csv = String::from("month,nodes,edges,avg_degree,n_neither,n_tw,n_fb,n_both\n");
    for entry in &series.entries {
        let c = entry.linking_counts;
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            entry.month, entry.nodes, entry.edges, entry.avg_degree,
            c.neither, c.tw_only, c.fb_only, c.both
        );
    }
    write_file(&out, csv)?;
    manifest.write_for(&out)?;
    println!("timeline {from}..{to} written to {}", out.display());
    Ok(())
}

fn cmd_cohorts(
    users: PathBuf,
    edges: PathBuf,
    out: PathBuf,
    metric: String,
    composition_out: Option<PathBuf>,
    pr_opts: PageRankOptions,
    percentile: f64,
) -> Result<()> {
    let mut manifest = RunManifest::start("cohorts");
    manifest.input(&users)?;
    manifest.input(&edges)?;
    let (graph, _) = load_graph(&users, &edges)?;

    let metric = match metric.as_str() {
        "out_degree" => CohortMetric::OutDegree,
        "in_degree" => CohortMetric::InDegree,
        "pagerank" => CohortMetric::Pagerank,
        other => bail!("unknown metric {other:?}; expected out_degree, in_degree, or pagerank"),
    };
    let needs_pagerank = metric == CohortMetric::Pagerank || composition_out.is_some();
    let pr = if needs_pagerank {
        Some(pagerank_with_labels(&graph, &pr_opts, percentile)?)
    } else {
        None
    };

    let curves = cohort_cdf(&graph, metric, pr.as_ref())?;
    let mut csv = String::from("option,x,cdf\n");
    for (option, points) in &curves.curves {
        for (x, f) in points {
            let _ = writeln!(csv, "{option},{x},{f}");
        }
    }
    write_file(&out, csv)?;
    for option in &curves.omitted {
        eprintln!("note: no {option} users; option omitted from the curves");
    }
    if let Some(path) = composition_out {
        let composition =
            high_pagerank_composition(&graph, pr.as_ref().expect("computed above"))?;
        write_file(&path, serde_json::to_string_pretty(&composition)? + "\n")?;
    }
    manifest.write_for(&out)?;
    println!("cohort curves written to {}", out.display());
    Ok(())
}

fn cmd_chi2(dataset: PathBuf, out: PathBuf, bins: usize) -> Result<()> {
    let mut manifest = RunManifest::start("chi2");
    manifest.input(&dataset)?;
    let ds = read_dataset(&dataset)?;
    let ranked = chi_square_rank(&ds, bins)?;
    let mut csv = String::from("feature,chi2\n");
    for (feature, value) in &ranked {
        let _ = writeln!(csv, "{feature},{value}");
    }
    write_file(&out, csv)?;
    manifest.write_for(&out)?;
    for (feature, value) in ranked {
        println!("{feature}: {value:.2}");
    }
    Ok(())
}

fn cmd_train(
    dataset: PathBuf,
    algorithm: String,
    out: PathBuf,
    seed: u64,
    sets: Vec<String>,
) -> Result<()> {
    let mut manifest = RunManifest::start("train");
    manifest.input(&dataset)?;
    manifest.seed(seed);
    let ds = read_dataset(&dataset)?;
    let params = params_for(parse_algorithm(&algorithm)?, &sets)?;
    let model = train(&params, &ds, seed)?;
    write_file(&out, model.to_json() + "\n")?;
    manifest.write_for(&out)?;
    println!("trained {} on {} rows -> {}", model.algorithm(), ds.len(), out.display());
    Ok(())
}

fn cmd_eval(model: PathBuf, dataset: PathBuf, out: PathBuf) -> Result<()> {
    let mut manifest = RunManifest::start("eval");
    manifest.input(&model)?;
    manifest.input(&dataset)?;
    let text =
        fs::read_to_string(&model).with_context(|| format!("cannot read {}", model.display()))?;
    let model = TrainedModel::from_json(&text)?;
    let ds = read_dataset(&dataset)?;
    let metrics = evaluate(&model, &ds)?;
    write_file(&out, serde_json::to_string_pretty(&metrics)? + "\n")?;
    manifest.write_for(&out)?;
    println!(
        "precision {:.3} recall {:.3} f1 {:.3} auc {:.3}",
        metrics.precision, metrics.recall, metrics.f1, metrics.auc
    );
    Ok(())
}

fn cmd_cv(
    dataset: PathBuf,
    algorithm: String,
    out: PathBuf,
    folds: usize,
    seed: u64,
    sets: Vec<String>,
) -> Result<()> {
    let mut manifest = RunManifest::start("cv");
    manifest.input(&dataset)?;
    manifest.seed(seed);
    let ds = read_dataset(&dataset)?;
    let params = params_for(parse_algorithm(&algorithm)?, &sets)?;
    let summary = cross_validate(&params, &ds, folds, seed)?;
    write_file(&out, serde_json::to_string_pretty(&summary)? + "\n")?;
    manifest.write_for(&out)?;
    println!(
        "{folds}-fold mean: precision {:.3} recall {:.3} f1 {:.3} auc {:.3}",
        summary.mean.precision, summary.mean.recall, summary.mean.f1, summary.mean.auc
    );
    Ok(())
}

fn cmd_gridsearch(
    dataset: PathBuf,
    algorithm: String,
    grid: PathBuf,
    out: PathBuf,
    folds: usize,
    seed: u64,
) -> Result<()> {
    let mut manifest = RunManifest::start("gridsearch");
    manifest.input(&dataset)?;
    manifest.input(&grid)?;
    manifest.seed(seed);
    let ds = read_dataset(&dataset)?;
    let algorithm = parse_algorithm(&algorithm)?;
    let text =
        fs::read_to_string(&grid).with_context(|| format!("cannot read {}", grid.display()))?;
    let axes: Vec<(String, Vec<serde_json::Value>)> =
        serde_json::from_str(&text).context("grid must be [[\"name\", [values...]], ...]")?;
    let result = grid_search(algorithm, &axes, &ds, folds, seed)?;
    write_file(&out, serde_json::to_string_pretty(&result)? + "\n")?;
    manifest.write_for(&out)?;
    println!("best mean F1 {:.3} over {} points", result.best_f1, result.points.len());
    Ok(())
}

#[derive(serde::Deserialize)]
struct RecommendInput {
    for_user: String,
    friends: Vec<FriendProfile>,
}

fn cmd_recommend(
    input: PathBuf,
    model: PathBuf,
    out: PathBuf,
    top_k: Option<usize>,
) -> Result<()> {
    let mut manifest = RunManifest::start("recommend");
    manifest.input(&input)?;
    manifest.input(&model)?;
    let request: RecommendInput = serde_json::from_str(
        &fs::read_to_string(&input).with_context(|| format!("cannot read {}", input.display()))?,
    )
    .context("recommend input must be {\"for_user\", \"friends\": [...]}")?;
    let model = TrainedModel::from_json(
        &fs::read_to_string(&model).with_context(|| format!("cannot read {}", model.display()))?,
    )?;
    let list = recommend(&request.for_user, &request.friends, &model, top_k)?;
    write_file(&out, serde_json::to_string_pretty(&list)? + "\n")?;
    manifest.write_for(&out)?;
    println!(
        "{} recommendations for {} ({} predicted high)",
        list.entries.len(),
        list.for_user,
        list.entries.iter().filter(|e| e.predicted == linkrank_core::InfluenceLabel::High).count()
    );
    Ok(())
}
