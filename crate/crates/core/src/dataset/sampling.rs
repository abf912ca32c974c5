//! Negative-edge samplers.

use std::collections::HashSet;

use rand::seq::{index, SliceRandom};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::traverse::Bfs;
use crate::graph::{Edge, Graph, NodeId};
use crate::rng;

fn ordered(u: NodeId, v: NodeId) -> Edge {
    (u.min(v), u.max(v))
}

/// `count` distinct non-edges drawn uniformly by rejection over random node
/// pairs, in draw order.
pub fn sample_negatives_uniform(g: &Graph, count: usize, seed: u64) -> Result<Vec<Edge>> {
    sample_negatives_uniform_excluding(g, count, seed, &HashSet::new())
}

/// Like [`sample_negatives_uniform`], never returning a pair in `exclude`.
/// Pairs in `exclude` must be ordered `(min, max)`.
pub fn sample_negatives_uniform_excluding(
    g: &Graph,
    count: usize,
    seed: u64,
    exclude: &HashSet<Edge>,
) -> Result<Vec<Edge>> {
    let excluded_non_edges = exclude
        .iter()
        .filter(|&&(u, v)| u != v && g.contains(u) && g.contains(v) && !g.has_edge(u, v))
        .count() as u128;
    let available = g.non_edge_count() - excluded_non_edges;
    if count as u128 > available {
        return Err(Error::Infeasible(format!(
            "requested {count} negative edges but only {available} non-edges are available"
        )));
    }
    let mut rng = rng::stream(seed, "negatives-uniform");
    if count == 0 {
        return Ok(Vec::new());
    }
    let n = g.node_count() as NodeId;

    // Rejection needs many draws once the request approaches the whole pool;
    // enumerate small pools instead.
    if (count as u128) * 2 > available {
        let pool: Vec<Edge> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|&(u, v)| !g.has_edge(u, v) && !exclude.contains(&(u, v)))
            .collect();
        return Ok(index::sample(&mut rng, pool.len(), count)
            .iter()
            .map(|i| pool[i])
            .collect());
    }

    let mut seen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u == v {
            continue;
        }
        let pair = ordered(u, v);
        if g.has_edge(u, v) || exclude.contains(&pair) || !seen.insert(pair) {
            continue;
        }
        out.push(pair);
    }
    Ok(out)
}

/// Pairs found at an exact hop distance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumSample {
    pub d: u32,
    pub pairs: Vec<Edge>,
    /// Set when fewer than the requested number of pairs were found.
    pub shortfall: bool,
}

/// Root budget for distance-stratified sampling.
fn root_budget(n: usize, count: usize) -> usize {
    n.min(count.saturating_mul(10).max(1000))
}

/// Samples `count` node pairs at shortest-path distance exactly `d` by
/// harvesting the depth-`d` BFS frontier of random roots. Each root
/// contributes a bounded number of partners so no single neighborhood
/// dominates. Returns fewer pairs, flagged, when the root budget runs out.
pub fn sample_negatives_at_distance(
    g: &Graph,
    d: u32,
    count: usize,
    seed: u64,
) -> Result<StratumSample> {
    sample_negatives_at_distance_excluding(g, d, count, seed, &HashSet::new())
}

pub fn sample_negatives_at_distance_excluding(
    g: &Graph,
    d: u32,
    count: usize,
    seed: u64,
    exclude: &HashSet<Edge>,
) -> Result<StratumSample> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "distance strata start at 2 (non-edges), got {d}"
        )));
    }
    let mut rng = rng::indexed_stream(seed, "negatives-at-distance", d as u64);
    let n = g.node_count();
    let mut roots: Vec<NodeId> = (0..n as NodeId).collect();
    roots.shuffle(&mut rng);
    roots.truncate(root_budget(n, count));
    let per_root = count.div_ceil(20).max(4);

    let mut bfs = Bfs::new(n);
    let mut seen = HashSet::new();
    let mut pairs = Vec::new();
    let mut frontier = Vec::new();
    for root in roots {
        if pairs.len() >= count {
            break;
        }
        frontier.clear();
        bfs.run(g, root, None, d);
        // visiting order is by distance, so the frontier is the tail
        frontier.extend(bfs.visited().iter().rev().take_while(|&&v| bfs.dist(v) == d));
        frontier.sort_unstable();
        frontier.shuffle(&mut rng);
        let mut taken = 0;
        for &v in &frontier {
            if taken == per_root {
                break;
            }
            let pair = ordered(root, v);
            if exclude.contains(&pair) || !seen.insert(pair) {
                continue;
            }
            pairs.push(pair);
            taken += 1;
        }
    }
    pairs.shuffle(&mut rng);
    let shortfall = pairs.len() < count;
    pairs.truncate(count);
    Ok(StratumSample { d, pairs, shortfall })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::graph::shortest_path_length;

    #[test]
    fn complete_graph_has_no_negatives() {
        assert!(matches!(
            sample_negatives_uniform(&triangle(), 1, 0),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn path_has_one_negative() {
        assert_eq!(sample_negatives_uniform(&path(3), 1, 4).unwrap(), vec![(0, 2)]);
        assert!(sample_negatives_uniform(&path(3), 2, 4).is_err());
    }

    #[test]
    fn uniform_samples_are_distinct_non_edges() {
        let g = gnp(1000, 0.004, 1);
        let s = sample_negatives_uniform(&g, 5000, 2).unwrap();
        assert_eq!(s.len(), 5000);
        assert_eq!(s.iter().collect::<HashSet<_>>().len(), 5000);
        assert!(s.iter().all(|&(u, v)| u < v && !g.has_edge(u, v)));
        assert_eq!(s, sample_negatives_uniform(&g, 5000, 2).unwrap());
    }

    #[test]
    fn exclusion_is_honored() {
        let g = graph(4, &[(0, 1), (2, 3)]);
        let exclude: HashSet<Edge> = [(0, 2), (0, 3), (1, 2)].into();
        let s = sample_negatives_uniform_excluding(&g, 1, 9, &exclude).unwrap();
        assert_eq!(s, vec![(1, 3)]);
        assert!(sample_negatives_uniform_excluding(&g, 2, 9, &exclude).is_err());
    }

    #[test]
    fn path_stratum_is_enumerated() {
        let s = sample_negatives_at_distance(&path(5), 2, 10, 3).unwrap();
        let found: HashSet<Edge> = s.pairs.iter().copied().collect();
        assert_eq!(found, [(0, 2), (1, 3), (2, 4)].into());
        assert!(s.shortfall);
    }

    #[test]
    fn distance_below_two_is_rejected() {
        assert!(sample_negatives_at_distance(&path(5), 1, 10, 3).is_err());
    }

    #[test]
    fn strata_have_exact_distance() {
        let g = gnp(400, 0.01, 5);
        for d in 2..6 {
            let s = sample_negatives_at_distance(&g, d, 300, 8).unwrap();
            assert!(!s.pairs.is_empty());
            for &(u, v) in &s.pairs {
                assert_eq!(shortest_path_length(&g, u, v, 100).unwrap(), Some(d));
            }
            assert_eq!(s, sample_negatives_at_distance(&g, d, 300, 8).unwrap());
        }
    }
}
