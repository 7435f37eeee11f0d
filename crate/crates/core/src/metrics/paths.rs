//! Average directed shortest-path length within a strongly connected
//! node set, exact (BFS from every member) or sampled (BFS from a seeded
//! subset of sources).

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::SocialGraph;

#[derive(Debug, Clone, Copy)]
pub struct SampleSpec {
    pub sources: usize,
    pub seed: u64,
}

/// Mean directed shortest-path length over ordered pairs `(u, v)`,
/// `u ≠ v`, both in `within`.
///
/// BFS is restricted to the induced subgraph on `within`; for a true SCC
/// this changes nothing, since any shortest path between two members stays
/// inside the component. A member unreachable from some source makes the
/// set not strongly connected and is reported as an error.
///
/// With `sample`, BFS runs only from `sources` members drawn uniformly
/// without replacement (seeded); their per-source distance sums are
/// averaged. Asking for at least as many sources as members degenerates to
/// the exact computation.
pub fn avg_path_length(
    g: &SocialGraph,
    within: &[u32],
    sample: Option<SampleSpec>,
) -> Result<f64> {
    let k = within.len();
    if k < 2 {
        return Err(Error::NodeSetTooSmall(k));
    }

    let mut member = vec![false; g.node_count()];
    for &u in within {
        member[u as usize] = true;
    }

    let sources: Vec<u32> = match sample {
        Some(spec) if spec.sources < k => {
            let mut pool = within.to_vec();
            let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
            pool.shuffle(&mut rng);
            pool.truncate(spec.sources.max(1));
            pool
        }
        _ => within.to_vec(),
    };

    // One BFS per source in parallel; the totals are folded in source
    // order, and each total is an integer, so the result is exact and
    // schedule-independent.
    let sums: Vec<Result<u64>> = sources
        .par_iter()
        .map(|&src| bfs_distance_sum(g, src, &member, k))
        .collect();

    let mut total = 0u64;
    for sum in sums {
        total += sum?;
    }
    Ok(total as f64 / (sources.len() as f64 * (k - 1) as f64))
}

fn bfs_distance_sum(g: &SocialGraph, src: u32, member: &[bool], k: usize) -> Result<u64> {
    let mut dist: Vec<u32> = vec![u32::MAX; g.node_count()];
    let mut queue = VecDeque::new();
    dist[src as usize] = 0;
    queue.push_back(src);
    let mut sum = 0u64;
    let mut reached = 1usize;
    while let Some(u) = queue.pop_front() {
        for &v in g.out_neighbors(u) {
            if member[v as usize] && dist[v as usize] == u32::MAX {
                dist[v as usize] = dist[u as usize] + 1;
                sum += u64::from(dist[v as usize]);
                reached += 1;
                queue.push_back(v);
            }
        }
    }
    if reached < k {
        let missing = member
            .iter()
            .enumerate()
            .find(|&(v, &m)| m && dist[v] == u32::MAX)
            .map(|(v, _)| v as u32)
            .unwrap_or(src);
        return Err(Error::NotStronglyConnected { from: src, missing });
    }
    Ok(sum)
}
