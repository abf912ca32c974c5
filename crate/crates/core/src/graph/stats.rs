use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::traverse::{components, estimate_diameter};
use super::{Graph, NodeId};
use crate::error::{Error, Result};

/// Whole-graph structural summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
    /// Triangles, each counted once.
    pub closed_triads: u64,
    /// Connected triples whose end points are not adjacent.
    pub open_triads: u64,
    pub fraction_closed: f64,
    pub max_wcc_fraction: f64,
    /// Equal to `max_wcc_fraction`: the graph is undirected.
    pub max_scc_fraction: f64,
    pub approx_full_diameter: u32,
    pub effective_diameter_90: f64,
    pub wcc_count: usize,
    pub avg_clustering_coeff: f64,
}

/// Number of edges among the neighbors of `u`.
pub(crate) fn local_triangles(g: &Graph, u: NodeId) -> u64 {
    let nu = g.neighbors(u);
    let mut twice = 0u64;
    for &v in nu {
        twice += sorted_intersection_len(nu, g.neighbors(v)) as u64;
    }
    twice / 2
}

pub(crate) fn sorted_intersection_len(a: &[NodeId], b: &[NodeId]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

pub fn compute_stats(g: &Graph, diameter_sample: usize, seed: u64) -> Result<GraphStats> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if diameter_sample == 0 {
        return Err(Error::InvalidArgument("diameter sample must be at least 1".into()));
    }
    let per_node: Vec<(u64, u64)> = (0..n as NodeId)
        .into_par_iter()
        .map(|u| {
            let k = g.degree(u) as u64;
            (local_triangles(g, u), k * k.saturating_sub(1) / 2)
        })
        .collect();
    let corner_sum: u64 = per_node.iter().map(|&(t, _)| t).sum();
    let triples: u64 = per_node.iter().map(|&(_, w)| w).sum();
    let closed = corner_sum / 3;
    let open = triples - corner_sum;
    let avg_clustering = per_node
        .iter()
        .map(|&(t, w)| if w == 0 { 0.0 } else { t as f64 / w as f64 })
        .sum::<f64>()
        / n as f64;

    let comps = components(g);
    let largest = comps.largest().map_or(0, |(_, s)| s);
    let max_wcc = largest as f64 / n as f64;
    let diameter = estimate_diameter(g, None, diameter_sample, seed)?;

    Ok(GraphStats {
        nodes: n,
        edges: g.edge_count(),
        closed_triads: closed,
        open_triads: open,
        fraction_closed: if closed + open == 0 {
            0.0
        } else {
            closed as f64 / (closed + open) as f64
        },
        max_wcc_fraction: max_wcc,
        max_scc_fraction: max_wcc,
        approx_full_diameter: diameter.full,
        effective_diameter_90: diameter.effective_90,
        wcc_count: comps.count(),
        avg_clustering_coeff: avg_clustering,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeBin {
    pub degree: usize,
    pub count: usize,
    /// Fraction of nodes with degree at least `degree`.
    pub ccdf: f64,
}

pub fn degree_distribution(g: &Graph) -> Vec<DegreeBin> {
    let n = g.node_count();
    let mut counts = std::collections::BTreeMap::new();
    for k in g.degrees() {
        *counts.entry(k).or_insert(0usize) += 1;
    }
    let mut at_least = n;
    counts
        .into_iter()
        .map(|(degree, count)| {
            let bin = DegreeBin {
                degree,
                count,
                ccdf: at_least as f64 / n as f64,
            };
            at_least -= count;
            bin
        })
        .collect()
}
