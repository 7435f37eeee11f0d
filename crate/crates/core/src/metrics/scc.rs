//! Largest strongly connected component via iterative Tarjan.

use crate::graph::SocialGraph;

const UNVISITED: u32 = u32::MAX;

/// Returns the node set of the maximum-cardinality SCC, sorted by index.
///
/// When several components tie on size, the one containing the smallest
/// node index wins. The DFS uses an explicit stack, so deep graphs (long
/// chains, large cycles) cannot overflow the call stack.
pub fn largest_scc(g: &SocialGraph) -> Vec<u32> {
    let n = g.node_count();
    if n == 0 {
        return Vec::new();
    }

    let mut index = vec![UNVISITED; n];
    let mut lowlink = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut next_index = 0u32;

    let mut best: Vec<u32> = Vec::new();

    // (node, position in its out-neighbor list)
    let mut work: Vec<(u32, usize)> = Vec::new();

    for root in 0..n as u32 {
        if index[root as usize] != UNVISITED {
            continue;
        }
        work.push((root, 0));
        while let Some(&mut (v, ref mut cursor)) = work.last_mut() {
            if *cursor == 0 {
                index[v as usize] = next_index;
                lowlink[v as usize] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v as usize] = true;
            }
            let neighbors = g.out_neighbors(v);
            let mut descended = false;
            while *cursor < neighbors.len() {
                let w = neighbors[*cursor];
                *cursor += 1;
                if index[w as usize] == UNVISITED {
                    work.push((w, 0));
                    descended = true;
                    break;
                } else if on_stack[w as usize] {
                    lowlink[v as usize] = lowlink[v as usize].min(index[w as usize]);
                }
            }
            if descended {
                continue;
            }

            // v is finished
            work.pop();
            if let Some(&(parent, _)) = work.last() {
                lowlink[parent as usize] = lowlink[parent as usize].min(lowlink[v as usize]);
            }
            if lowlink[v as usize] == index[v as usize] {
                let mut component = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w as usize] = false;
                    component.push(w);
                    if w == v {
                        break;
                    }
                }
                if better(&component, &best) {
                    component.sort_unstable();
                    best = component;
                }
            }
        }
    }
    best
}

/// Larger wins; equal sizes fall back to the smaller minimum node index.
fn better(candidate: &[u32], current: &[u32]) -> bool {
    if candidate.len() != current.len() {
        return candidate.len() > current.len();
    }
    match (candidate.iter().min(), current.iter().min()) {
        (Some(c), Some(b)) => c < b,
        (Some(_), None) => true,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::test_support::graph_from_edges;

    #[test]
    fn directed_cycle_is_one_component() {
        let g = graph_from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert_eq!(largest_scc(&g), vec![0, 1, 2, 3]);
    }

    #[test]
    fn dag_has_singleton_components() {
        let g = graph_from_edges(3, &[(0, 1), (1, 2)]);
        assert_eq!(largest_scc(&g).len(), 1);
    }

    #[test]
    fn tie_breaks_to_smallest_index() {
        // {0,1} and {2,3} are both size-2 SCCs
        let g = graph_from_edges(4, &[(0, 1), (1, 0), (1, 2), (2, 3), (3, 2)]);
        assert_eq!(largest_scc(&g), vec![0, 1]);
    }

    #[test]
    fn deep_chain_does_not_overflow() {
        let n = 200_000;
        let edges: Vec<(u32, u32)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        let g = graph_from_edges(n as usize, &edges);
        assert_eq!(largest_scc(&g).len(), 1);
    }

    #[test]
    fn long_cycle_found_without_recursion() {
        let n = 100_000u32;
        let mut edges: Vec<(u32, u32)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        edges.push((n - 1, 0));
        let g = graph_from_edges(n as usize, &edges);
        assert_eq!(largest_scc(&g).len(), n as usize);
    }
}
