//! Crate-wide error type.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("duplicate user_id {0:?}")]
    DuplicateUserId(String),

    #[error("edge references unknown user_id {0:?}")]
    UnknownUser(String),

    #[error("unknown account {0:?}")]
    UnknownAccount(String),

    #[error("empty graph")]
    EmptyGraph,

    #[error("invalid month {0:?}, expected YYYY-MM")]
    InvalidMonth(String),

    #[error("invalid month range: {from} > {to}")]
    InvalidMonthRange {
        from: crate::month::Month,
        to: crate::month::Month,
    },

    #[error("node set must contain at least 2 nodes, got {0}")]
    NodeSetTooSmall(usize),

    #[error("node set is not strongly connected: node {missing} unreachable from node {from}")]
    NotStronglyConnected { from: u32, missing: u32 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParam { name: String, reason: String },

    #[error("user {0:?} is not Twitter-linked")]
    NotTwitterLinked(String),

    #[error("no high-PageRank users at this percentile")]
    NoHighUsers,

    #[error("insufficient {class} users: requested {requested}, available {available}")]
    InsufficientClass {
        class: crate::pagerank::InfluenceLabel,
        requested: usize,
        available: usize,
    },

    #[error("dataset contains a single class only")]
    SingleClass,

    #[error("empty dataset")]
    EmptyDataset,

    #[error("grid axis {0:?} is empty")]
    EmptyGridAxis(String),

    #[error("grid is empty")]
    EmptyGrid,

    #[error("duplicate friend_id {0:?}")]
    DuplicateFriendId(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("model file is malformed: {0}")]
    MalformedModel(String),
}
