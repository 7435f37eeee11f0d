//! `linkrank` — scriptable pipeline over crawl-format social graph data:
//! synthetic data generation, structural metrics, PageRank influence
//! labeling, temporal snapshots, feature ranking, classifier training and
//! evaluation, and friend-invite recommendations.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/processing error.

mod commands;
mod manifest;
mod pipeline;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "linkrank", version, about, max_term_width = 100)]
struct Cli {
    /// Worker threads for parallel stages (0 = all cores). Results do not
    /// depend on this setting.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic crawl dataset (users.jsonl + edges.tsv)
    Generate {
        /// TOML generator config; omitted fields take defaults
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the config seed
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
    },
    /// Validate crawl files and report ingestion/build counters
    IngestCheck {
        #[arg(long)]
        users: PathBuf,
        #[arg(long)]
        edges: PathBuf,
        /// Write the summary JSON here as well as printing it
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Structural report (JSON) plus degree CCDF curves (CSV)
    Metrics {
        #[arg(long)]
        users: PathBuf,
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Account to report followership for
        #[arg(long)]
        account: Option<String>,
        /// Largest SCC size still measured by exact all-pairs BFS
        #[arg(long, default_value_t = 10_000)]
        exact_path_limit: usize,
        /// BFS sources when the path length is sampled
        #[arg(long, default_value_t = 1_000)]
        sample_sources: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// PageRank scores and high/low labels (CSV)
    Pagerank {
        #[arg(long)]
        users: PathBuf,
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.85)]
        damping: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 200)]
        max_iter: u32,
        #[arg(long, default_value_t = 0.01)]
        percentile: f64,
    },
    /// Monthly snapshot series (CSV)
    Timeline {
        #[arg(long)]
        users: PathBuf,
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// First month (default: earliest registration)
        #[arg(long)]
        from: Option<String>,
        /// Last month (default: latest registration)
        #[arg(long)]
        to: Option<String>,
    },
    /// Per-linking-option CDF curves (CSV), optional High-group composition (JSON)
    Cohorts {
        #[arg(long)]
        users: PathBuf,
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// out_degree | in_degree | pagerank
        #[arg(long, default_value = "out_degree")]
        metric: String,
        /// Also write the linking-option composition of High-PageRank users
        #[arg(long)]
        composition_out: Option<PathBuf>,
        #[arg(long, default_value_t = 0.85)]
        damping: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 200)]
        max_iter: u32,
        #[arg(long, default_value_t = 0.01)]
        percentile: f64,
    },
    /// Chi-square feature ranking of a labeled dataset (CSV)
    Chi2 {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10)]
        bins: usize,
    },
    /// Train a classifier and persist it as JSON
    Train {
        #[arg(long)]
        dataset: PathBuf,
        /// gradient_boosted_trees | random_forest | decision_tree | naive_bayes | logistic_regression
        #[arg(long)]
        algorithm: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Hyperparameter override, repeatable: --set name=value
        #[arg(long = "set", value_name = "NAME=VALUE")]
        sets: Vec<String>,
    },
    /// Evaluate a persisted model on a labeled dataset (JSON metrics)
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// K-fold cross-validation (JSON summary)
    Cv {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        algorithm: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "set", value_name = "NAME=VALUE")]
        sets: Vec<String>,
    },
    /// Exhaustive grid search by mean cross-validation F1 (JSON)
    Gridsearch {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        algorithm: String,
        /// JSON grid: [["name", [v1, v2]], ...] — axes sweep in order
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Rank a friend list by predicted influence (JSON)
    Recommend {
        /// JSON input: {"for_user": ..., "friends": [{"friend_id", "features"}]}
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        top_k: Option<usize>,
    },
    /// Run the full experiment (generate → metrics → pagerank → dataset →
    /// chi2 → train → eval) from one TOML config
    Pipeline {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders help/version on stdout with success status
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };

    if cli.threads > 0 {
        if let Err(e) =
            rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global()
        {
            eprintln!("error: cannot configure {} threads: {e}", cli.threads);
            return ExitCode::from(2);
        }
    }

    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
