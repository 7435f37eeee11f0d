//! Friend-invite ranking: score a user's friends on the established
//! network with a trained influence model and put predicted-High users
//! first. Friends already present on the new network are the caller's
//! concern; this module never consults the social graph.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ml::{FeatureVector, TrainedModel};
use crate::pagerank::InfluenceLabel;

/// One friend profile from the established network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FriendProfile {
    pub friend_id: String,
    pub features: FeatureVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub friend_id: String,
    pub score: f64,
    pub predicted: InfluenceLabel,
}

/// Invite list for one user, ordered: predicted High first, then score
/// descending, then friend id ascending. When fewer friends are predicted
/// High than the requested slots, the highest-scoring Low friends fill
/// the rest — the ordering does that on its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendationList {
    pub for_user: String,
    pub entries: Vec<Recommendation>,
    pub model_ref: String,
}

pub fn recommend(
    for_user: &str,
    friends: &[FriendProfile],
    model: &TrainedModel,
    top_k: Option<usize>,
) -> Result<RecommendationList> {
    let mut seen = HashSet::with_capacity(friends.len());
    for friend in friends {
        if !seen.insert(friend.friend_id.as_str()) {
            return Err(Error::DuplicateFriendId(friend.friend_id.clone()));
        }
    }

    let mut entries: Vec<Recommendation> = friends
        .iter()
        .map(|friend| {
            let prediction = model.predict(&friend.features);
            Recommendation {
                friend_id: friend.friend_id.clone(),
                score: prediction.score,
                predicted: prediction.label,
            }
        })
        .collect();
    entries.sort_by(|a, b| {
        a.predicted
            .cmp(&b.predicted) // High sorts before Low
            .then_with(|| b.score.total_cmp(&a.score))
            .then_with(|| a.friend_id.cmp(&b.friend_id))
    });
    if let Some(k) = top_k {
        entries.truncate(k);
    }

    Ok(RecommendationList {
        for_user: for_user.to_string(),
        entries,
        model_ref: model.version_string(),
    })
}
