//! Analytics toolkit for directed follow graphs of online social networks.
//!
//! The crate covers the full path from raw crawl output to influence
//! predictions:
//!
//! - [`graph`] — ingest `users.jsonl` / `edges.tsv` crawl files into an
//!   immutable CSR [`graph::SocialGraph`] with per-node attributes.
//! - [`metrics`] — structural statistics: degree summaries and CCDFs,
//!   clustering coefficient, largest strongly connected component, and
//!   average shortest-path length (exact or sampled).
//! - [`pagerank`] — power-iteration PageRank on the follow direction and
//!   top-percentile high/low influence labeling.
//! - [`temporal`] — monthly snapshot reconstruction from registration
//!   timestamps and per-linking-option cohort curves.
//! - [`ml`] — feature extraction from linked accounts, chi-square feature
//!   ranking, five classifier families, and evaluation with hold-out,
//!   cross-validation, and grid search.
//! - [`synth`] — deterministic synthetic crawl generator with power-law
//!   degrees, a registration surge, and planted influence features.
//! - [`attraction`] — friend-invite ranking that puts predicted
//!   high-influence users first.

pub mod attraction;
pub mod error;
pub mod graph;
pub mod metrics;
pub mod ml;
pub mod month;
pub mod pagerank;
mod seeding;
pub mod synth;
pub mod temporal;

pub use error::{Error, Result};
pub use graph::{LinkingOption, SocialGraph, UserRecord};
pub use month::Month;
pub use pagerank::InfluenceLabel;
