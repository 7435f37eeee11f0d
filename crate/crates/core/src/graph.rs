//! Crawl-format ingestion and the immutable directed social graph.
//!
//! Input formats:
//! - `users.jsonl` — one JSON object per line with keys `user_id`,
//!   `registered_at` (`"YYYY-MM"`), `linking_option`
//!   (`"neither" | "tw_only" | "fb_only" | "both"`), and an optional
//!   `twitter` object holding the linked-account features.
//! - `edges.tsv` — `src<TAB>dst<LF>`, no header. An edge `u → v` means
//!   `u` follows `v`.
//!
//! Node indices are dense `u32`s assigned in first-seen order of the user
//! list; all algorithms operate on indices and map back to ids only at the
//! output boundary.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ml::FeatureVector;
use crate::month::Month;

/// Which external accounts a user has linked to their profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkingOption {
    Neither,
    TwOnly,
    FbOnly,
    Both,
}

impl LinkingOption {
    pub const ALL: [LinkingOption; 4] = [
        LinkingOption::Neither,
        LinkingOption::TwOnly,
        LinkingOption::FbOnly,
        LinkingOption::Both,
    ];

    /// True when the user has linked a Twitter account, i.e. has feature data.
    pub fn twitter_linked(self) -> bool {
        matches!(self, LinkingOption::TwOnly | LinkingOption::Both)
    }

    /// The wire name used in `users.jsonl` and CSV outputs.
    pub fn as_str(self) -> &'static str {
        match self {
            LinkingOption::Neither => "neither",
            LinkingOption::TwOnly => "tw_only",
            LinkingOption::FbOnly => "fb_only",
            LinkingOption::Both => "both",
        }
    }
}

impl std::fmt::Display for LinkingOption {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One crawled user.
///
/// Invariant: `twitter` is present exactly when `linking_option` is
/// `TwOnly` or `Both`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserRecord {
    pub user_id: String,
    pub registered_at: Month,
    pub linking_option: LinkingOption,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twitter: Option<FeatureVector>,
}

impl UserRecord {
    /// Checks the type invariants; returns a reason string on violation.
    fn validate(&self) -> std::result::Result<(), String> {
        if self.user_id.is_empty() {
            return Err("empty user_id".into());
        }
        if self.twitter.is_some() != self.linking_option.twitter_linked() {
            return Err(format!(
                "twitter features {} but linking_option is {}",
                if self.twitter.is_some() { "present" } else { "absent" },
                self.linking_option
            ));
        }
        if let Some(tw) = &self.twitter {
            if tw.bio > 1 {
                return Err(format!("bio must be 0 or 1, got {}", tw.bio));
            }
        }
        Ok(())
    }
}

/// Result of reading a `users.jsonl` file.
#[derive(Debug)]
pub struct UserIngest {
    pub records: Vec<UserRecord>,
    /// Malformed lines that were skipped.
    pub skipped_lines: u64,
}

/// Result of reading an `edges.tsv` file. Duplicates are preserved;
/// deduplication happens in [`build_graph`].
#[derive(Debug)]
pub struct EdgeIngest {
    pub edges: Vec<(String, String)>,
    pub skipped_lines: u64,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

/// Reads user records from a JSONL file.
///
/// Malformed lines (bad JSON, invariant violations) are skipped and
/// counted; a duplicate `user_id` is fatal.
pub fn ingest_users(path: impl AsRef<Path>) -> Result<UserIngest> {
    let path = path.as_ref();
    let reader = open(path)?;
    let mut records: Vec<UserRecord> = Vec::new();
    let mut seen: HashMap<String, ()> = HashMap::new();
    let mut skipped = 0u64;
    for line in reader.lines() {
        let line = line.map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        let line = line.trim_end_matches('\r');
        let record: UserRecord = match serde_json::from_str(line) {
            Ok(r) => r,
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        if record.validate().is_err() {
            skipped += 1;
            continue;
        }
        if seen.insert(record.user_id.clone(), ()).is_some() {
            return Err(Error::DuplicateUserId(record.user_id));
        }
        records.push(record);
    }
    Ok(UserIngest { records, skipped_lines: skipped })
}

/// Reads follow edges from a TSV file, preserving order and duplicates.
///
/// A line is skipped (and counted) unless it contains exactly one TAB
/// separating two non-empty ids.
pub fn ingest_edges(path: impl AsRef<Path>) -> Result<EdgeIngest> {
    let path = path.as_ref();
    let reader = open(path)?;
    let mut edges = Vec::new();
    let mut skipped = 0u64;
    for line in reader.lines() {
        let line = line.map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        let line = line.trim_end_matches('\r');
        match line.split_once('\t') {
            Some((src, dst)) if !src.is_empty() && !dst.is_empty() && !dst.contains('\t') => {
                edges.push((src.to_string(), dst.to_string()));
            }
            _ => skipped += 1,
        }
    }
    Ok(EdgeIngest { edges, skipped_lines: skipped })
}

/// Cleanup counters from graph construction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct BuildStats {
    pub self_loops_dropped: u64,
    pub duplicate_edges_collapsed: u64,
}

/// An immutable directed graph in CSR form (both directions), with the
/// user attribute table and the id ↔ index map.
///
/// Neighbor lists are sorted by index; there are no self-loops and no
/// duplicate edges. Construction is single-threaded; afterwards the graph
/// is safe to read from any number of threads.
#[derive(Debug, Clone)]
pub struct SocialGraph {
    out_offsets: Vec<usize>,
    out_targets: Vec<u32>,
    in_offsets: Vec<usize>,
    in_sources: Vec<u32>,
    users: Vec<UserRecord>,
    index: HashMap<String, u32>,
    stats: BuildStats,
}

/// Equality is structural: same CSR arrays and the same attribute table.
/// Construction counters ([`BuildStats`]) do not participate.
impl PartialEq for SocialGraph {
    fn eq(&self, other: &Self) -> bool {
        self.out_offsets == other.out_offsets
            && self.out_targets == other.out_targets
            && self.in_offsets == other.in_offsets
            && self.in_sources == other.in_sources
            && self.users == other.users
    }
}

impl SocialGraph {
    pub fn node_count(&self) -> usize {
        self.users.len()
    }

    pub fn edge_count(&self) -> u64 {
        self.out_targets.len() as u64
    }

    pub fn nodes(&self) -> impl Iterator<Item = u32> + '_ {
        0..self.node_count() as u32
    }

    /// Successors of `u`: the users `u` follows. Sorted by index.
    pub fn out_neighbors(&self, u: u32) -> &[u32] {
        let u = u as usize;
        &self.out_targets[self.out_offsets[u]..self.out_offsets[u + 1]]
    }

    /// Predecessors of `u`: the followers of `u`. Sorted by index.
    pub fn in_neighbors(&self, u: u32) -> &[u32] {
        let u = u as usize;
        &self.in_sources[self.in_offsets[u]..self.in_offsets[u + 1]]
    }

    pub fn out_degree(&self, u: u32) -> usize {
        self.out_neighbors(u).len()
    }

    pub fn in_degree(&self, u: u32) -> usize {
        self.in_neighbors(u).len()
    }

    pub fn user(&self, u: u32) -> &UserRecord {
        &self.users[u as usize]
    }

    pub fn users(&self) -> &[UserRecord] {
        &self.users
    }

    pub fn user_id(&self, u: u32) -> &str {
        &self.users[u as usize].user_id
    }

    pub fn node_index(&self, user_id: &str) -> Option<u32> {
        self.index.get(user_id).copied()
    }

    /// All edges in CSR order: grouped by source, targets ascending.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.nodes()
            .flat_map(move |u| self.out_neighbors(u).iter().map(move |&v| (u, v)))
    }

    pub fn build_stats(&self) -> BuildStats {
        self.stats
    }
}

/// Builds the graph from user records and raw (possibly duplicated) edges.
///
/// Self-loops are dropped and duplicate edges collapsed, with counts
/// reported in [`BuildStats`]. An edge endpoint that does not resolve to a
/// known `user_id` is fatal: crawl output is closed over the traversal, so
/// a dangling reference signals corrupt input.
pub fn build_graph(users: Vec<UserRecord>, edges: &[(String, String)]) -> Result<SocialGraph> {
    let mut index: HashMap<String, u32> = HashMap::with_capacity(users.len());
    for (i, user) in users.iter().enumerate() {
        if index.insert(user.user_id.clone(), i as u32).is_some() {
            return Err(Error::DuplicateUserId(user.user_id.clone()));
        }
    }

    let mut stats = BuildStats::default();
    let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(edges.len());
    for (src, dst) in edges {
        let u = *index.get(src).ok_or_else(|| Error::UnknownUser(src.clone()))?;
        let v = *index.get(dst).ok_or_else(|| Error::UnknownUser(dst.clone()))?;
        if u == v {
            stats.self_loops_dropped += 1;
        } else {
            pairs.push((u, v));
        }
    }
    pairs.sort_unstable();
    let before = pairs.len();
    pairs.dedup();
    stats.duplicate_edges_collapsed = (before - pairs.len()) as u64;

    Ok(SocialGraph::from_clean_parts(users, index, &pairs, stats))
}

impl SocialGraph {
    /// CSR assembly from edges that are already index pairs, sorted,
    /// deduplicated and loop-free.
    pub(crate) fn from_clean_parts(
        users: Vec<UserRecord>,
        index: HashMap<String, u32>,
        pairs: &[(u32, u32)],
        stats: BuildStats,
    ) -> SocialGraph {
        let n = users.len();

        // Out-CSR: pairs are grouped by source with ascending targets.
        let mut out_offsets = vec![0usize; n + 1];
        for &(u, _) in pairs {
            out_offsets[u as usize + 1] += 1;
        }
        for i in 1..=n {
            out_offsets[i] += out_offsets[i - 1];
        }
        let out_targets: Vec<u32> = pairs.iter().map(|&(_, v)| v).collect();

        // In-CSR by counting sort on target; source order stays ascending
        // because pairs are sorted.
        let mut in_offsets = vec![0usize; n + 1];
        for &(_, v) in pairs {
            in_offsets[v as usize + 1] += 1;
        }
        for i in 1..=n {
            in_offsets[i] += in_offsets[i - 1];
        }
        let mut cursor = in_offsets.clone();
        let mut in_sources = vec![0u32; pairs.len()];
        for &(u, v) in pairs {
            in_sources[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }

        SocialGraph { out_offsets, out_targets, in_offsets, in_sources, users, index, stats }
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn user(id: &str) -> UserRecord {
        UserRecord {
            user_id: id.to_string(),
            registered_at: "2013-05".parse().unwrap(),
            linking_option: LinkingOption::Neither,
            twitter: None,
        }
    }

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn ingest_users_empty_file() {
        let f = write_temp("");
        let got = ingest_users(f.path()).unwrap();
        assert!(got.records.is_empty());
        assert_eq!(got.skipped_lines, 0);
    }

    #[test]
    fn ingest_users_round_trips_fields() {
        let f = write_temp(concat!(
            "{\"user_id\":\"a\",\"registered_at\":\"2013-05\",\"linking_option\":\"neither\"}\n",
            "{\"user_id\":\"b\",\"registered_at\":\"2014-07\",\"linking_option\":\"tw_only\",\
             \"twitter\":{\"followings\":10,\"followers\":20,\"tweets\":5,\"likes\":3,\"lists\":1,\"bio\":1}}\n",
            "{\"user_id\":\"c\",\"registered_at\":\"2016-01\",\"linking_option\":\"fb_only\"}\n",
        ));
        let got = ingest_users(f.path()).unwrap();
        assert_eq!(got.skipped_lines, 0);
        assert_eq!(got.records.len(), 3);
        assert_eq!(got.records[0].user_id, "a");
        assert_eq!(got.records[1].linking_option, LinkingOption::TwOnly);
        let tw = got.records[1].twitter.as_ref().unwrap();
        assert_eq!((tw.followings, tw.followers, tw.tweets), (10, 20, 5));
        assert_eq!((tw.likes, tw.lists, tw.bio), (3, 1, 1));
        assert_eq!(got.records[2].registered_at.to_string(), "2016-01");
    }

    #[test]
    fn ingest_users_skips_missing_id() {
        let f = write_temp(concat!(
            "{\"user_id\":\"a\",\"registered_at\":\"2013-05\",\"linking_option\":\"neither\"}\n",
            "{\"registered_at\":\"2013-05\",\"linking_option\":\"neither\"}\n",
            "{\"user_id\":\"b\",\"registered_at\":\"2013-05\",\"linking_option\":\"neither\"}\n",
        ));
        let got = ingest_users(f.path()).unwrap();
        assert_eq!(got.records.len(), 2);
        assert_eq!(got.skipped_lines, 1);
    }

    #[test]
    fn ingest_users_skips_invariant_violations() {
        // tw_only without twitter object, and fb_only with one
        let f = write_temp(concat!(
            "{\"user_id\":\"a\",\"registered_at\":\"2013-05\",\"linking_option\":\"tw_only\"}\n",
            "{\"user_id\":\"b\",\"registered_at\":\"2013-05\",\"linking_option\":\"fb_only\",\
             \"twitter\":{\"followings\":1,\"followers\":1,\"tweets\":1,\"likes\":1,\"lists\":1,\"bio\":0}}\n",
        ));
        let got = ingest_users(f.path()).unwrap();
        assert!(got.records.is_empty());
        assert_eq!(got.skipped_lines, 2);
    }

    #[test]
    fn ingest_users_duplicate_id_is_fatal() {
        let f = write_temp(concat!(
            "{\"user_id\":\"a\",\"registered_at\":\"2013-05\",\"linking_option\":\"neither\"}\n",
            "{\"user_id\":\"a\",\"registered_at\":\"2013-06\",\"linking_option\":\"neither\"}\n",
        ));
        match ingest_users(f.path()) {
            Err(Error::DuplicateUserId(id)) => assert_eq!(id, "a"),
            other => panic!("expected DuplicateUserId, got {other:?}"),
        }
    }

    #[test]
    fn ingest_edges_basic() {
        let f = write_temp("a\tb\n");
        let got = ingest_edges(f.path()).unwrap();
        assert_eq!(got.edges, vec![("a".to_string(), "b".to_string())]);
        assert_eq!(got.skipped_lines, 0);
    }

    #[test]
    fn ingest_edges_preserves_duplicates() {
        let f = write_temp("a\tb\na\tb\n");
        let got = ingest_edges(f.path()).unwrap();
        assert_eq!(got.edges.len(), 2);
        assert_eq!(got.edges[0], got.edges[1]);
    }

    #[test]
    fn ingest_edges_skips_lines_without_one_tab() {
        let f = write_temp("abc\na\tb\tc\na\tb\n");
        let got = ingest_edges(f.path()).unwrap();
        assert_eq!(got.edges.len(), 1);
        assert_eq!(got.skipped_lines, 2);
    }

    #[test]
    fn build_graph_degrees() {
        let users = vec![user("a"), user("b"), user("c")];
        let edges = [("a", "b"), ("b", "c"), ("a", "c")]
            .map(|(s, d)| (s.to_string(), d.to_string()));
        let g = build_graph(users, &edges).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        let out: Vec<usize> = g.nodes().map(|u| g.out_degree(u)).collect();
        let inn: Vec<usize> = g.nodes().map(|u| g.in_degree(u)).collect();
        assert_eq!(out, [2, 1, 0]);
        assert_eq!(inn, [0, 1, 2]);
    }

    #[test]
    fn build_graph_drops_self_loops() {
        let users = vec![user("a")];
        let edges = [("a".to_string(), "a".to_string())];
        let g = build_graph(users, &edges).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.build_stats().self_loops_dropped, 1);
    }

    #[test]
    fn build_graph_collapses_duplicates() {
        let users = vec![user("a"), user("b")];
        let edges = [
            ("a".to_string(), "b".to_string()),
            ("a".to_string(), "b".to_string()),
        ];
        let g = build_graph(users, &edges).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.build_stats().duplicate_edges_collapsed, 1);
    }

    #[test]
    fn build_graph_unknown_endpoint_is_fatal() {
        let users = vec![user("a")];
        let edges = [("a".to_string(), "ghost".to_string())];
        match build_graph(users, &edges) {
            Err(Error::UnknownUser(id)) => assert_eq!(id, "ghost"),
            other => panic!("expected UnknownUser, got {other:?}"),
        }
    }

    #[test]
    fn adjacency_is_sorted_and_cross_consistent() {
        let g = test_support::graph_from_edges(5, &[(0, 3), (0, 1), (3, 1), (2, 0), (4, 2), (1, 4)]);
        for u in g.nodes() {
            assert!(g.out_neighbors(u).windows(2).all(|w| w[0] < w[1]));
            assert!(g.in_neighbors(u).windows(2).all(|w| w[0] < w[1]));
            for &v in g.out_neighbors(u) {
                assert!(g.in_neighbors(v).contains(&u));
            }
        }
        let out_sum: usize = g.nodes().map(|u| g.out_degree(u)).sum();
        let in_sum: usize = g.nodes().map(|u| g.in_degree(u)).sum();
        assert_eq!(out_sum as u64, g.edge_count());
        assert_eq!(in_sum as u64, g.edge_count());
    }
}
