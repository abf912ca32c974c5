use rand::seq::index;
use rayon::prelude::*;

use super::{Graph, NodeId};
use crate::error::{Error, Result};
use crate::rng;

/// Distance marker for nodes not reached (disconnected or beyond the cap).
pub const UNREACHABLE: u32 = u32::MAX;

/// Graphs up to this size get an exact diameter (BFS from every node of the
/// largest component) instead of a sampled estimate.
pub(crate) const EXACT_DIAMETER_LIMIT: usize = 1000;

/// Reusable breadth-first search state. Only touched entries are reset
/// between runs, so repeated searches on a large graph stay cheap.
pub(crate) struct Bfs {
    dist: Vec<u32>,
    order: Vec<NodeId>,
}

impl Bfs {
    pub(crate) fn new(n: usize) -> Self {
        Bfs {
            dist: vec![UNREACHABLE; n],
            order: Vec::new(),
        }
    }

    fn reset(&mut self) {
        for &u in &self.order {
            self.dist[u as usize] = UNREACHABLE;
        }
        self.order.clear();
    }

    /// Runs a search from `src`, skipping dead nodes and not expanding past
    /// `cap` hops.
    pub(crate) fn run(&mut self, g: &Graph, src: NodeId, alive: Option<&[bool]>, cap: u32) {
        self.reset();
        self.dist[src as usize] = 0;
        self.order.push(src);
        let mut head = 0;
        while head < self.order.len() {
            let u = self.order[head];
            head += 1;
            let du = self.dist[u as usize];
            if du >= cap {
                continue;
            }
            for &v in g.neighbors(u) {
                if self.dist[v as usize] == UNREACHABLE && alive.is_none_or(|a| a[v as usize]) {
                    self.dist[v as usize] = du + 1;
                    self.order.push(v);
                }
            }
        }
    }

    /// Nodes reached by the last run, in visiting (non-decreasing distance) order.
    pub(crate) fn visited(&self) -> &[NodeId] {
        &self.order
    }

    pub(crate) fn dist(&self, v: NodeId) -> u32 {
        self.dist[v as usize]
    }
}

/// Hop distances from `src` to every node, [`UNREACHABLE`] where no path of at
/// most `cap` hops exists.
pub fn bfs_distances(g: &Graph, src: NodeId, cap: u32) -> Result<Vec<u32>> {
    g.check_node(src)?;
    let mut bfs = Bfs::new(g.node_count());
    bfs.run(g, src, None, cap);
    Ok(bfs.dist)
}

/// Hop distance between `u` and `v`, or `None` when they are disconnected or
/// further apart than `cap`.
pub fn shortest_path_length(g: &Graph, u: NodeId, v: NodeId, cap: u32) -> Result<Option<u32>> {
    g.check_node(u)?;
    g.check_node(v)?;
    if u == v {
        return Ok(Some(0));
    }
    let mut bfs = Bfs::new(g.node_count());
    bfs.run(g, u, None, cap);
    let d = bfs.dist(v);
    Ok((d != UNREACHABLE).then_some(d))
}

/// Connected components. Labels are assigned in order of the smallest node id
/// in each component; dead nodes get the label `u32::MAX`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Components {
    pub label: Vec<u32>,
    pub sizes: Vec<usize>,
}

impl Components {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    /// Label and size of the largest component, the lowest label on ties.
    pub fn largest(&self) -> Option<(u32, usize)> {
        self.sizes
            .iter()
            .enumerate()
            .fold(None, |best: Option<(u32, usize)>, (i, &s)| match best {
                Some((_, bs)) if bs >= s => best,
                _ => Some((i as u32, s)),
            })
    }

    pub fn members(&self, label: u32) -> Vec<NodeId> {
        self.label
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == label)
            .map(|(u, _)| u as NodeId)
            .collect()
    }
}

pub fn components(g: &Graph) -> Components {
    components_masked(g, None)
}

pub(crate) fn components_masked(g: &Graph, alive: Option<&[bool]>) -> Components {
    let n = g.node_count();
    let mut label = vec![u32::MAX; n];
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for s in 0..n {
        if label[s] != u32::MAX || alive.is_some_and(|a| !a[s]) {
            continue;
        }
        let c = sizes.len() as u32;
        label[s] = c;
        stack.push(s as NodeId);
        let mut size = 0;
        while let Some(u) = stack.pop() {
            size += 1;
            for &v in g.neighbors(u) {
                if label[v as usize] == u32::MAX && alive.is_none_or(|a| a[v as usize]) {
                    label[v as usize] = c;
                    stack.push(v);
                }
            }
        }
        sizes.push(size);
    }
    Components { label, sizes }
}

/// Diameter figures derived from BFS trees rooted at a sample of nodes.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct DiameterEstimate {
    /// Largest eccentricity seen among the roots.
    pub full: u32,
    /// Linearly interpolated 90th percentile of the sampled distances.
    pub effective_90: f64,
}

/// Picks BFS roots inside the largest component: every member for small
/// graphs, otherwise `sample` members drawn without replacement. Roots are
/// returned sorted.
fn pick_roots(members: Vec<NodeId>, total_nodes: usize, sample: usize, seed: u64) -> Vec<NodeId> {
    if total_nodes <= EXACT_DIAMETER_LIMIT || members.len() <= sample {
        return members;
    }
    let mut rng = rng::stream(seed, "diameter-roots");
    let mut roots: Vec<NodeId> = index::sample(&mut rng, members.len(), sample)
        .iter()
        .map(|i| members[i])
        .collect();
    roots.sort_unstable();
    roots
}

pub(crate) fn estimate_diameter(
    g: &Graph,
    alive: Option<&[bool]>,
    sample: usize,
    seed: u64,
) -> Result<DiameterEstimate> {
    if sample == 0 {
        return Err(Error::InvalidArgument("diameter sample must be at least 1".into()));
    }
    let comps = components_masked(g, alive);
    let Some((largest, _)) = comps.largest() else {
        return Ok(DiameterEstimate { full: 0, effective_90: 0.0 });
    };
    let live = alive.map_or(g.node_count(), |a| a.iter().filter(|&&x| x).count());
    let roots = pick_roots(comps.members(largest), live, sample, seed);

    let n = g.node_count();
    let histogram = roots
        .par_iter()
        .map_init(
            || Bfs::new(n),
            |bfs, &root| {
                let mut hist: Vec<u64> = Vec::new();
                bfs.run(g, root, alive, UNREACHABLE - 1);
                for &v in bfs.visited() {
                    let d = bfs.dist(v) as usize;
                    if hist.len() <= d {
                        hist.resize(d + 1, 0);
                    }
                    hist[d] += 1;
                }
                hist
            },
        )
        .reduce(Vec::new, |mut a, b| {
            if a.len() < b.len() {
                a.resize(b.len(), 0);
            }
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        });
    Ok(DiameterEstimate {
        full: histogram.len().saturating_sub(1) as u32,
        effective_90: interpolated_percentile(&histogram, 0.9),
    })
}

/// Hop value at which the cumulative count of pairs (distance ≥ 1) reaches
/// `q` of the total, interpolating linearly between integer hop counts.
fn interpolated_percentile(hist: &[u64], q: f64) -> f64 {
    let total: u64 = hist.iter().skip(1).sum();
    if total == 0 {
        return 0.0;
    }
    let target = q * total as f64;
    let mut below = 0.0;
    for (h, &count) in hist.iter().enumerate().skip(1) {
        let upto = below + count as f64;
        if upto >= target {
            if count == 0 {
                return h as f64;
            }
            return (h - 1) as f64 + (target - below) / count as f64;
        }
        below = upto;
    }
    (hist.len() - 1) as f64
}

/// Largest BFS eccentricity over `sample` seeded roots in the largest
/// component (exact for graphs of at most 1000 nodes).
pub fn sampled_diameter(g: &Graph, sample: usize, seed: u64) -> Result<u32> {
    estimate_diameter(g, None, sample, seed).map(|d| d.full)
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    fn floyd_warshall(g: &Graph) -> Vec<Vec<u32>> {
        let n = g.node_count();
        let mut d = vec![vec![UNREACHABLE; n]; n];
        for u in 0..n {
            d[u][u] = 0;
        }
        for (u, v) in g.edges() {
            d[u as usize][v as usize] = 1;
            d[v as usize][u as usize] = 1;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if d[i][k] != UNREACHABLE && d[k][j] != UNREACHABLE {
                        d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
                    }
                }
            }
        }
        d
    }

    #[test]
    fn simple_distances() {
        assert_eq!(shortest_path_length(&triangle(), 0, 1, 10).unwrap(), Some(1));
        assert_eq!(shortest_path_length(&path(4), 0, 3, 10).unwrap(), Some(3));
        assert_eq!(shortest_path_length(&path(4), 0, 3, 2).unwrap(), None);
        assert!(shortest_path_length(&path(4), 0, 4, 10).is_err());
    }

    #[test]
    fn all_pairs_match_floyd_warshall() {
        let g = gnp(100, 0.03, 21);
        let oracle = floyd_warshall(&g);
        for u in g.nodes() {
            let dist = bfs_distances(&g, u, UNREACHABLE - 1).unwrap();
            assert_eq!(dist, oracle[u as usize]);
            for v in g.nodes().step_by(7) {
                let expected = oracle[u as usize][v as usize];
                let got = shortest_path_length(&g, u, v, 1000).unwrap();
                assert_eq!(got, (expected != UNREACHABLE).then_some(expected));
            }
        }
    }

    #[test]
    fn components_of_two_pieces() {
        let g = graph(6, &[(0, 1), (1, 2), (3, 4)]);
        let c = components(&g);
        assert_eq!(c.sizes, vec![3, 2, 1]);
        assert_eq!(c.largest(), Some((0, 3)));
        assert_eq!(c.members(1), vec![3, 4]);
    }

    #[test]
    fn masked_components_skip_dead_nodes() {
        let g = path(5);
        let alive = [true, true, false, true, true];
        let c = components_masked(&g, Some(&alive));
        assert_eq!(c.sizes, vec![2, 2]);
        assert_eq!(c.label[2], u32::MAX);
    }

    #[test]
    fn path_diameter_is_exact_on_small_graphs() {
        let d = estimate_diameter(&path(5), None, 1, 0).unwrap();
        assert_eq!(d.full, 4);
        // ordered pairs by distance 1:8 2:6 3:4 4:2, total 20, 90% = 18
        assert!((d.effective_90 - 3.0).abs() < 1e-12);
    }

    #[test]
    fn percentile_interpolation() {
        assert_eq!(interpolated_percentile(&[0, 10], 0.9), 0.9);
        assert_eq!(interpolated_percentile(&[0], 0.9), 0.0);
        assert!((interpolated_percentile(&[5, 5, 5], 0.5) - 1.0).abs() < 1e-12);
    }
}
