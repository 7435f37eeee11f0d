//! Average local clustering coefficient on the undirected projection.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::SocialGraph;

/// Mean local clustering coefficient over all nodes.
///
/// The coefficient is computed on the undirected projection (`u–v` exists
/// iff `u→v` or `v→u`); nodes with fewer than two undirected neighbors
/// contribute 0 to the mean.
///
/// Triangles are enumerated once each via degree ordering and the three
/// corner counters are bumped atomically, so the counts (and therefore the
/// mean, which is reduced in index order) do not depend on the parallel
/// schedule.
pub fn avg_clustering(g: &SocialGraph) -> Result<f64> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }

    // Undirected projection as a CSR: sorted merge of in + out lists.
    let mut offsets = vec![0usize; n + 1];
    let mut adjacency: Vec<u32> = Vec::new();
    for u in g.nodes() {
        let merged = merge_dedup(g.out_neighbors(u), g.in_neighbors(u));
        offsets[u as usize + 1] = offsets[u as usize] + merged.len();
        adjacency.extend_from_slice(&merged);
    }
    let neighbors = |u: u32| &adjacency[offsets[u as usize]..offsets[u as usize + 1]];
    let degree = |u: u32| offsets[u as usize + 1] - offsets[u as usize];

    // Forward orientation: keep neighbors strictly greater by (degree, id).
    let rank = |u: u32| (degree(u), u);
    let forward: Vec<Vec<u32>> = (0..n as u32)
        .map(|u| neighbors(u).iter().copied().filter(|&v| rank(v) > rank(u)).collect())
        .collect();

    let triangles: Vec<AtomicU64> = (0..n).map(|_| AtomicU64::new(0)).collect();
    (0..n as u32).into_par_iter().for_each(|u| {
        let fu = &forward[u as usize];
        for &v in fu {
            for w in intersect(fu, &forward[v as usize]) {
                triangles[u as usize].fetch_add(1, Ordering::Relaxed);
                triangles[v as usize].fetch_add(1, Ordering::Relaxed);
                triangles[w as usize].fetch_add(1, Ordering::Relaxed);
            }
        }
    });

    let mut total = 0.0f64;
    for u in 0..n {
        let d = offsets[u + 1] - offsets[u];
        if d >= 2 {
            let tri = triangles[u].load(Ordering::Relaxed) as f64;
            total += 2.0 * tri / (d as f64 * (d - 1) as f64);
        }
    }
    Ok(total / n as f64)
}

fn merge_dedup(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) if x == y => {
                i += 1;
                j += 1;
                x
            }
            (Some(&x), Some(&y)) if x < y => {
                i += 1;
                x
            }
            (Some(_), Some(&y)) => {
                j += 1;
                y
            }
            (Some(&x), None) => {
                i += 1;
                x
            }
            (None, Some(&y)) => {
                j += 1;
                y
            }
            (None, None) => unreachable!(),
        };
        out.push(next);
    }
    out
}

fn intersect<'a>(a: &'a [u32], b: &'a [u32]) -> impl Iterator<Item = u32> + 'a {
    let mut i = 0;
    let mut j = 0;
    std::iter::from_fn(move || {
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    let hit = a[i];
                    i += 1;
                    j += 1;
                    return Some(hit);
                }
            }
        }
        None
    })
}
