//! Immutable undirected simple graphs in compressed adjacency form.

mod io;
mod powerlaw;
mod stats;
pub(crate) mod traverse;

pub use io::{load_edge_list, parse_edge_list, write_edge_list, IdMap, LoadReport, LoadedGraph};
pub use powerlaw::{fit_power_law, PowerLawFit};
pub use stats::{compute_stats, degree_distribution, DegreeBin, GraphStats};
pub use traverse::{
    bfs_distances, components, sampled_diameter, shortest_path_length, Components, UNREACHABLE,
};

use rand::seq::index;

use crate::error::{Error, Result};
use crate::rng;

pub type NodeId = u32;
pub type Edge = (NodeId, NodeId);

/// Counts of input records discarded while canonicalizing an edge list.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct BuildReport {
    pub self_loops: usize,
    pub duplicates: usize,
}

/// Undirected simple graph over dense node ids `0..node_count`.
///
/// Neighbor lists are stored back to back and kept sorted ascending, so two
/// graphs with the same edge set compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<NodeId>,
}

impl Graph {
    /// Builds a graph, silently dropping self-loops and repeated edges.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<(Graph, BuildReport)>
    where
        I: IntoIterator<Item = Edge>,
    {
        if node_count > NodeId::MAX as usize {
            return Err(Error::InvalidArgument(format!(
                "node count {node_count} exceeds the id space"
            )));
        }
        let mut report = BuildReport::default();
        let mut pairs = Vec::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w as usize >= node_count {
                    return Err(Error::InvalidNode(w));
                }
            }
            if u == v {
                report.self_loops += 1;
                continue;
            }
            pairs.push((u.min(v), u.max(v)));
        }
        pairs.sort_unstable();
        let before = pairs.len();
        pairs.dedup();
        report.duplicates = before - pairs.len();

        let mut offsets = vec![0usize; node_count + 1];
        for &(u, v) in &pairs {
            offsets[u as usize + 1] += 1;
            offsets[v as usize + 1] += 1;
        }
        for i in 0..node_count {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut neighbors = vec![0; pairs.len() * 2];
        for &(u, v) in &pairs {
            neighbors[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
            neighbors[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        for u in 0..node_count {
            neighbors[offsets[u]..offsets[u + 1]].sort_unstable();
        }
        Ok((Graph { offsets, neighbors }, report))
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.neighbors[self.offsets[u as usize]..self.offsets[u as usize + 1]]
    }

    #[inline]
    pub fn degree(&self, u: NodeId) -> usize {
        self.offsets[u as usize + 1] - self.offsets[u as usize]
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Position of `u`'s neighbor list in the flat adjacency array. Used to
    /// align per-adjacency-entry data such as edge weights.
    pub(crate) fn adjacency_range(&self, u: NodeId) -> std::ops::Range<usize> {
        self.offsets[u as usize]..self.offsets[u as usize + 1]
    }

    pub(crate) fn adjacency_len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn contains(&self, u: NodeId) -> bool {
        (u as usize) < self.node_count()
    }

    pub fn check_node(&self, u: NodeId) -> Result<()> {
        if self.contains(u) {
            Ok(())
        } else {
            Err(Error::InvalidNode(u))
        }
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        if !self.contains(u) || !self.contains(v) {
            return false;
        }
        let (a, b) = if self.degree(u) <= self.degree(v) { (u, v) } else { (v, u) };
        self.neighbors(a).binary_search(&b).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.node_count() as NodeId).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        0..self.node_count() as NodeId
    }

    /// Stable identifier of the node count and edge set.
    pub fn fingerprint(&self) -> String {
        let mut bytes = Vec::with_capacity(8 + self.neighbors.len() * 4);
        bytes.extend_from_slice(&(self.node_count() as u64).to_le_bytes());
        for (u, v) in self.edges() {
            bytes.extend_from_slice(&u.to_le_bytes());
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        format!("g-{:016x}", rng::fnv1a(&bytes))
    }

    /// Number of unordered node pairs that are not edges.
    pub fn non_edge_count(&self) -> u128 {
        let n = self.node_count() as u128;
        n * n.saturating_sub(1) / 2 - self.edge_count() as u128
    }
}

/// Removes `round(fraction * |E|)` edges chosen uniformly at random.
///
/// The removed edges are returned in the order they were drawn. Nodes are kept,
/// so the corrupted graph may contain isolates.
pub fn remove_edges(g: &Graph, fraction: f64, seed: u64) -> Result<(Graph, Vec<Edge>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "removal fraction must lie in (0, 1), got {fraction}"
        )));
    }
    let edges: Vec<Edge> = g.edges().collect();
    let k = (fraction * edges.len() as f64).round() as usize;
    if k == 0 {
        return Err(Error::InvalidArgument(format!(
            "removal fraction {fraction} of {} edges removes nothing",
            edges.len()
        )));
    }
    let mut rng = rng::stream(seed, "remove-edges");
    let picks = index::sample(&mut rng, edges.len(), k);
    let mut drop = vec![false; edges.len()];
    let mut removed = Vec::with_capacity(k);
    for i in picks.iter() {
        drop[i] = true;
        removed.push(edges[i]);
    }
    let kept = edges
        .iter()
        .zip(&drop)
        .filter(|(_, &d)| !d)
        .map(|(&e, _)| e);
    let (corrupted, _) = Graph::from_edges(g.node_count(), kept)?;
    Ok((corrupted, removed))
}

/// Removes node `v` and its incident edges. Ids above `v` shift down by one
/// so the result stays dense.
pub fn remove_node(g: &Graph, v: NodeId) -> Result<Graph> {
    g.check_node(v)?;
    let relabel = |u: NodeId| if u > v { u - 1 } else { u };
    let edges = g
        .edges()
        .filter(|&(a, b)| a != v && b != v)
        .map(|(a, b)| (relabel(a), relabel(b)));
    Graph::from_edges(g.node_count() - 1, edges).map(|(g, _)| g)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use rand::Rng as _;

    pub fn graph(n: usize, edges: &[Edge]) -> Graph {
        Graph::from_edges(n, edges.iter().copied()).unwrap().0
    }

    pub fn triangle() -> Graph {
        graph(3, &[(0, 1), (1, 2), (2, 0)])
    }

    pub fn path(n: usize) -> Graph {
        let edges: Vec<Edge> = (1..n as NodeId).map(|i| (i - 1, i)).collect();
        graph(n, &edges)
    }

    /// Star with node 0 at the center.
    pub fn star(leaves: usize) -> Graph {
        let edges: Vec<Edge> = (1..=leaves as NodeId).map(|i| (0, i)).collect();
        graph(leaves + 1, &edges)
    }

    pub fn gnp(n: usize, p: f64, seed: u64) -> Graph {
        let mut rng = rng::stream(seed, "test-gnp");
        let mut edges = Vec::new();
        for u in 0..n as NodeId {
            for v in u + 1..n as NodeId {
                if rng.random::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
        graph(n, &edges)
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    #[test]
    fn drops_loops_and_duplicates() {
        let (g, report) = Graph::from_edges(2, [(0, 1), (1, 0), (1, 1)]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(report, BuildReport { self_loops: 1, duplicates: 1 });
    }

    #[test]
    fn rejects_out_of_range_ids() {
        assert!(matches!(
            Graph::from_edges(2, [(0, 2)]),
            Err(Error::InvalidNode(2))
        ));
    }

    #[test]
    fn remove_one_third_of_triangle() {
        let (c, removed) = remove_edges(&triangle(), 1.0 / 3.0, 5).unwrap();
        assert_eq!(c.edge_count(), 2);
        assert_eq!(removed.len(), 1);
        assert!(!c.has_edge(removed[0].0, removed[0].1));
    }

    #[test]
    fn remove_edges_is_deterministic() {
        let g = gnp(60, 0.1, 3);
        assert_eq!(remove_edges(&g, 0.3, 9).unwrap(), remove_edges(&g, 0.3, 9).unwrap());
    }

    #[test]
    fn remove_edges_rejects_empty_removals() {
        assert!(remove_edges(&triangle(), 0.1, 1).is_err());
        assert!(remove_edges(&triangle(), 0.0, 1).is_err());
        assert!(remove_edges(&triangle(), 1.0, 1).is_err());
    }

    #[test]
    fn removing_star_center_isolates_leaves() {
        let g = remove_node(&star(3), 0).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn removing_triangle_node_leaves_an_edge() {
        let g = remove_node(&triangle(), 2).unwrap();
        assert_eq!(g, graph(2, &[(0, 1)]));
        assert!(remove_node(&triangle(), 3).is_err());
    }

    #[test]
    fn remove_node_keeps_degree_sums() {
        let g = gnp(80, 0.08, 11);
        for v in [0, 17, 79] {
            let h = remove_node(&g, v).unwrap();
            let expected = g.edge_count() - g.degree(v);
            assert_eq!(h.edge_count(), expected);
            assert_eq!(h.degrees().iter().sum::<usize>(), 2 * expected);
        }
    }

    proptest! {
        #[test]
        fn canonical_form(n in 2usize..40, raw in prop::collection::vec((0u32..40, 0u32..40), 0..120)) {
            let edges: Vec<Edge> = raw.into_iter().map(|(a, b)| (a % n as u32, b % n as u32)).collect();
            let (g, _) = Graph::from_edges(n, edges.iter().copied()).unwrap();
            prop_assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.edge_count());
            for u in g.nodes() {
                let nb = g.neighbors(u);
                prop_assert!(nb.windows(2).all(|w| w[0] < w[1]));
                for &v in nb {
                    prop_assert!(v != u);
                    prop_assert!(g.neighbors(v).binary_search(&u).is_ok());
                }
            }
            let mut reversed = edges.clone();
            reversed.reverse();
            let (h, _) = Graph::from_edges(n, reversed.into_iter().map(|(a, b)| (b, a))).unwrap();
            prop_assert_eq!(g, h);
        }

        #[test]
        fn removed_edges_restore_original(seed in 0u64..1000, fraction in 0.05f64..0.95) {
            let g = gnp(40, 0.15, seed);
            prop_assume!(g.edge_count() >= 4);
            let Ok((c, removed)) = remove_edges(&g, fraction, seed) else { return Ok(()) };
            prop_assert_eq!(removed.len(), (fraction * g.edge_count() as f64).round() as usize);
            let kept: BTreeSet<Edge> = c.edges().collect();
            let gone: BTreeSet<Edge> = removed.iter().copied().collect();
            prop_assert_eq!(gone.len(), removed.len());
            prop_assert!(kept.is_disjoint(&gone));
            let (restored, _) = Graph::from_edges(g.node_count(), kept.into_iter().chain(gone)).unwrap();
            prop_assert_eq!(restored, g);
        }
    }
}
