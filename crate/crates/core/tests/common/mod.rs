//! Shared oracles for the integration suites: independent brute-force
//! implementations that the fast kernels are checked against. Everything
//! here favors obviousness over speed and shares no code with the
//! library's algorithm paths.

// compiled once per test target; each target uses its own subset, and
// matrix-style index loops are the point of oracle code
#![allow(dead_code, clippy::needless_range_loop)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use linkrank_core::graph::{build_graph, LinkingOption, SocialGraph, UserRecord};

pub fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Random simple digraph on `n` nodes with edge probability `p`.
pub fn random_digraph(n: usize, p: f64, rng: &mut ChaCha12Rng) -> SocialGraph {
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in 0..n as u32 {
            if u != v && rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    graph_from(n, &edges)
}

pub fn graph_from(n: usize, edges: &[(u32, u32)]) -> SocialGraph {
    let users: Vec<UserRecord> = (0..n)
        .map(|i| UserRecord {
            user_id: format!("n{i}"),
            registered_at: "2013-01".parse().unwrap(),
            linking_option: LinkingOption::Neither,
            twitter: None,
        })
        .collect();
    let named: Vec<(String, String)> =
        edges.iter().map(|&(u, v)| (format!("n{u}"), format!("n{v}"))).collect();
    build_graph(users, &named).unwrap()
}

/// Adjacency matrix of the directed graph.
pub fn adjacency(g: &SocialGraph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut m = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        m[u as usize][v as usize] = true;
    }
    m
}

/// Per-node degree scan straight off the adjacency matrix.
pub fn brute_degree_summary(g: &SocialGraph) -> (u64, u64, u64, u64) {
    let m = adjacency(g);
    let n = g.node_count();
    let edges: usize = m.iter().map(|row| row.iter().filter(|&&b| b).count()).sum();
    let zero_out = (0..n).filter(|&u| m[u].iter().all(|&b| !b)).count();
    let zero_in = (0..n).filter(|&v| (0..n).all(|u| !m[u][v])).count();
    (n as u64, edges as u64, zero_in as u64, zero_out as u64)
}

/// Followership by scanning every node's full out-list.
pub fn brute_followership(g: &SocialGraph, account: u32) -> (u64, u64) {
    let m = adjacency(g);
    let n = g.node_count();
    let a = account as usize;
    let followers = (0..n).filter(|&u| m[u][a]).count() as u64;
    let exclusive = (0..n)
        .filter(|&u| m[u][a] && m[u].iter().filter(|&&b| b).count() == 1)
        .count() as u64;
    (followers, exclusive)
}

/// Average local clustering coefficient by neighbor-pair counting on the
/// undirected projection.
pub fn brute_clustering(g: &SocialGraph) -> f64 {
    let n = g.node_count();
    let dir = adjacency(g);
    let mut und = vec![vec![false; n]; n];
    for u in 0..n {
        for v in 0..n {
            if dir[u][v] || dir[v][u] {
                und[u][v] = true;
                und[v][u] = true;
            }
        }
    }
    let mut total = 0.0;
    for u in 0..n {
        let neighbors: Vec<usize> = (0..n).filter(|&v| und[u][v]).collect();
        let d = neighbors.len();
        if d < 2 {
            continue;
        }
        let mut linked = 0usize;
        for i in 0..d {
            for j in i + 1..d {
                if und[neighbors[i]][neighbors[j]] {
                    linked += 1;
                }
            }
        }
        total += linked as f64 / (d * (d - 1) / 2) as f64;
    }
    total / n as f64
}

/// Transitive closure by repeated squaring of the boolean matrix.
pub fn reachability(g: &SocialGraph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut reach = adjacency(g);
    for v in 0..n {
        reach[v][v] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    reach
}

/// All SCCs by pairwise mutual reachability; returns the largest with the
/// smallest-minimum-index tie-break, sorted.
pub fn brute_largest_scc(g: &SocialGraph) -> Vec<u32> {
    let n = g.node_count();
    let reach = reachability(g);
    let mut assigned = vec![false; n];
    let mut best: Vec<u32> = Vec::new();
    for u in 0..n {
        if assigned[u] {
            continue;
        }
        let component: Vec<u32> =
            (0..n).filter(|&v| reach[u][v] && reach[v][u]).map(|v| v as u32).collect();
        for &v in &component {
            assigned[v as usize] = true;
        }
        let better = component.len() > best.len()
            || (component.len() == best.len()
                && component.iter().min() < best.iter().min());
        if better {
            best = component;
        }
    }
    best.sort_unstable();
    best
}

/// All-pairs shortest paths by Floyd–Warshall on the induced subgraph.
pub fn floyd_warshall_avg(g: &SocialGraph, within: &[u32]) -> Option<f64> {
    let k = within.len();
    if k < 2 {
        return None;
    }
    let position: std::collections::HashMap<u32, usize> =
        within.iter().enumerate().map(|(i, &u)| (u, i)).collect();
    const INF: u64 = u64::MAX / 4;
    let mut dist = vec![vec![INF; k]; k];
    for i in 0..k {
        dist[i][i] = 0;
    }
    for (u, v) in g.edges() {
        if let (Some(&i), Some(&j)) = (position.get(&u), position.get(&v)) {
            dist[i][j] = 1;
        }
    }
    for mid in 0..k {
        for i in 0..k {
            for j in 0..k {
                let through = dist[i][mid] + dist[mid][j];
                if through < dist[i][j] {
                    dist[i][j] = through;
                }
            }
        }
    }
    let mut total = 0u64;
    for i in 0..k {
        for j in 0..k {
            if i != j {
                if dist[i][j] >= INF {
                    return None; // not strongly connected
                }
                total += dist[i][j];
            }
        }
    }
    Some(total as f64 / (k * (k - 1)) as f64)
}

/// Dense power-iteration PageRank over the explicit transition matrix;
/// written against the textbook formula, not the CSR code path.
pub fn dense_pagerank(g: &SocialGraph, damping: f64, tol: f64, max_iter: usize) -> Vec<f64> {
    let n = g.node_count();
    let m = adjacency(g);
    let out_deg: Vec<usize> = (0..n).map(|u| m[u].iter().filter(|&&b| b).count()).collect();
    let nf = n as f64;
    let mut scores = vec![1.0 / nf; n];
    for _ in 0..max_iter {
        let dangling: f64 =
            (0..n).filter(|&u| out_deg[u] == 0).map(|u| scores[u]).sum();
        let mut next = vec![(1.0 - damping) / nf + damping * dangling / nf; n];
        for u in 0..n {
            if out_deg[u] > 0 {
                let share = damping * scores[u] / out_deg[u] as f64;
                for (v, &has_edge) in m[u].iter().enumerate() {
                    if has_edge {
                        next[v] += share;
                    }
                }
            }
        }
        let residual: f64 = scores.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        scores = next;
        if residual < tol {
            break;
        }
    }
    scores
}

/// Sort descending, cut at rank ceil(p*n), drop ties at the cut.
pub fn brute_high_labels(scores: &[f64], percentile: f64) -> (f64, Vec<bool>) {
    let n = scores.len();
    let k = ((percentile * n as f64 - 1e-9).ceil() as usize).max(1);
    let mut sorted: Vec<f64> = scores.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let threshold = sorted[k.min(n - 1)];
    (threshold, scores.iter().map(|&s| s > threshold).collect())
}

/// AUC by comparing every positive against every negative.
pub fn pairwise_auc(scores: &[f64], is_positive: &[bool]) -> Option<f64> {
    let positives: Vec<f64> = scores
        .iter()
        .zip(is_positive)
        .filter(|(_, &p)| p)
        .map(|(&s, _)| s)
        .collect();
    let negatives: Vec<f64> = scores
        .iter()
        .zip(is_positive)
        .filter(|(_, &p)| !p)
        .map(|(&s, _)| s)
        .collect();
    if positives.is_empty() || negatives.is_empty() {
        return None;
    }
    let mut total = 0.0;
    for &p in &positives {
        for &q in &negatives {
            total += if p > q {
                1.0
            } else if p == q {
                0.5
            } else {
                0.0
            };
        }
    }
    Some(total / (positives.len() * negatives.len()) as f64)
}
