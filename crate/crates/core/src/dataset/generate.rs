//! Synthetic graphs with a power-law degree sequence.
//!
//! Degrees are drawn from P(k) ∝ k^-alpha on `[min_degree, n - 1]` and wired
//! with a configuration model. Optionally part of each node's stubs are
//! reserved as triangle corners (two stubs per corner) that are wired in
//! triples, which gives the graph triadic closure without changing the degree
//! sequence. Pairings that would create a self-loop or a repeated edge are
//! rejected and retried; whatever cannot be placed within the retry budget is
//! dropped.

use std::collections::HashSet;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::Binomial;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, NodeId};
use crate::rng::{self, Rng};

const SEQUENCE_ATTEMPTS: usize = 100;
const RESHUFFLE_ROUNDS: usize = 20;
const SWAP_ATTEMPTS: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawGraphConfig {
    pub n: usize,
    pub alpha: f64,
    pub min_degree: usize,
    /// Probability that each pair of a node's stubs becomes a triangle corner.
    pub triangle_prob: f64,
}

impl PowerLawGraphConfig {
    pub fn new(n: usize, alpha: f64) -> Self {
        PowerLawGraphConfig {
            n,
            alpha,
            min_degree: 1,
            triangle_prob: 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 10 {
            return Err(Error::InvalidArgument(format!("need n ≥ 10, got {}", self.n)));
        }
        if !(self.alpha > 2.0) {
            return Err(Error::InvalidArgument(format!(
                "need alpha > 2, got {}",
                self.alpha
            )));
        }
        if self.min_degree == 0 || self.min_degree >= self.n {
            return Err(Error::InvalidArgument(format!(
                "min degree must lie in [1, n - 1], got {}",
                self.min_degree
            )));
        }
        if !(0.0..=1.0).contains(&self.triangle_prob) {
            return Err(Error::InvalidArgument(format!(
                "triangle probability must lie in [0, 1], got {}",
                self.triangle_prob
            )));
        }
        Ok(())
    }
}

/// Power-law graph with minimum degree 1 and no triangle stubs.
pub fn generate_power_law_graph(n: usize, alpha: f64, seed: u64) -> Result<Graph> {
    generate(&PowerLawGraphConfig::new(n, alpha), seed)
}

pub fn generate(config: &PowerLawGraphConfig, seed: u64) -> Result<Graph> {
    config.validate()?;
    let mut rng = rng::stream(seed, "power-law-graph");
    let degrees = degree_sequence(config, &mut rng)?;
    let mut wiring = Wiring::default();
    let singles = wiring.place_triangles(&degrees, config.triangle_prob, &mut rng);
    wiring.place_singles(singles, &mut rng);
    Graph::from_edges(config.n, wiring.edges).map(|(g, _)| g)
}

fn degree_sequence(config: &PowerLawGraphConfig, rng: &mut Rng) -> Result<Vec<usize>> {
    let n = config.n;
    let support: Vec<usize> = (config.min_degree..n).collect();
    let weights = support.iter().map(|&k| (k as f64).powf(-config.alpha));
    let dist = WeightedIndex::new(weights)
        .map_err(|e| Error::InvalidArgument(format!("degree distribution: {e}")))?;
    for _ in 0..SEQUENCE_ATTEMPTS {
        let mut degrees: Vec<usize> = (0..n).map(|_| support[dist.sample(rng)]).collect();
        if degrees.iter().sum::<usize>() % 2 == 1 {
            let i = rng.random_range(0..n);
            if degrees[i] + 1 < n {
                degrees[i] += 1;
            } else {
                degrees[i] -= 1;
            }
        }
        if is_graphical(&degrees) {
            return Ok(degrees);
        }
    }
    Err(Error::Infeasible(format!(
        "no graphical degree sequence after {SEQUENCE_ATTEMPTS} draws"
    )))
}

/// Erdős–Gallai test.
fn is_graphical(degrees: &[usize]) -> bool {
    let mut d = degrees.to_vec();
    d.sort_unstable_by(|a, b| b.cmp(a));
    if d.iter().sum::<usize>() % 2 == 1 {
        return false;
    }
    let n = d.len();
    let mut prefix = 0u64;
    // suffix[i] = Σ_{j ≥ i} d_j, used as Σ min(d_j, r) once d_j ≤ r
    let mut suffix = vec![0u64; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + d[i] as u64;
    }
    let mut tail_start = n;
    for r in 1..=n {
        prefix += d[r - 1] as u64;
        let r64 = r as u64;
        // first index ≥ r whose degree is ≤ r
        while tail_start > r && d[tail_start - 1] <= r {
            tail_start -= 1;
        }
        let split = tail_start.max(r);
        let bounded = (split - r) as u64 * r64 + suffix[split];
        if prefix > r64 * (r64 - 1) + bounded {
            return false;
        }
    }
    true
}

#[derive(Default)]
struct Wiring {
    edges: Vec<Edge>,
    present: HashSet<Edge>,
}

fn ordered(u: NodeId, v: NodeId) -> Edge {
    (u.min(v), u.max(v))
}

impl Wiring {
    fn can_add(&self, u: NodeId, v: NodeId) -> bool {
        u != v && !self.present.contains(&ordered(u, v))
    }

    fn add(&mut self, u: NodeId, v: NodeId) {
        let e = ordered(u, v);
        self.present.insert(e);
        self.edges.push(e);
    }

    /// Wires triangle corners in random triples. Returns the single-edge stub
    /// list, including two stubs for every corner that could not be placed.
    fn place_triangles(&mut self, degrees: &[usize], prob: f64, rng: &mut Rng) -> Vec<NodeId> {
        let mut singles = Vec::new();
        let mut corners = Vec::new();
        for (u, &k) in degrees.iter().enumerate() {
            let t = if prob > 0.0 && k >= 2 {
                Binomial::new((k / 2) as u64, prob)
                    .expect("probability validated")
                    .sample(rng) as usize
            } else {
                0
            };
            corners.extend(std::iter::repeat_n(u as NodeId, t));
            singles.extend(std::iter::repeat_n(u as NodeId, k - 2 * t));
        }
        for _ in 0..RESHUFFLE_ROUNDS {
            if corners.len() < 3 {
                break;
            }
            corners.shuffle(rng);
            let mut rejected = Vec::new();
            let whole = corners.len() / 3 * 3;
            for t in corners[..whole].chunks_exact(3) {
                let (a, b, c) = (t[0], t[1], t[2]);
                if self.can_add(a, b) && self.can_add(b, c) && self.can_add(a, c) {
                    self.add(a, b);
                    self.add(b, c);
                    self.add(a, c);
                } else {
                    rejected.extend_from_slice(t);
                }
            }
            rejected.extend_from_slice(&corners[whole..]);
            let stalled = rejected.len() == corners.len();
            corners = rejected;
            if stalled {
                break;
            }
        }
        for u in corners {
            singles.extend([u, u]);
        }
        singles
    }

    fn place_singles(&mut self, mut stubs: Vec<NodeId>, rng: &mut Rng) {
        if stubs.len() % 2 == 1 {
            stubs.pop();
        }
        for _ in 0..RESHUFFLE_ROUNDS {
            if stubs.is_empty() {
                return;
            }
            stubs.shuffle(rng);
            let mut rejected = Vec::new();
            for p in stubs.chunks_exact(2) {
                if self.can_add(p[0], p[1]) {
                    self.add(p[0], p[1]);
                } else {
                    rejected.extend_from_slice(p);
                }
            }
            let stalled = rejected.len() == stubs.len();
            stubs = rejected;
            if stalled {
                break;
            }
        }
        // leftovers: rewire (a, b) + (c, d) into (a, c) + (b, d)
        for p in stubs.chunks_exact(2) {
            let (a, b) = (p[0], p[1]);
            for _ in 0..SWAP_ATTEMPTS {
                if self.edges.is_empty() {
                    break;
                }
                let i = rng.random_range(0..self.edges.len());
                let (c, d) = self.edges[i];
                let (c, d) = if rng.random::<bool>() { (c, d) } else { (d, c) };
                if [c, d].contains(&a) || [c, d].contains(&b) {
                    continue;
                }
                if self.can_add(a, c) && self.can_add(b, d) {
                    self.present.remove(&ordered(c, d));
                    self.edges.swap_remove(i);
                    self.add(a, c);
                    self.add(b, d);
                    break;
                }
            }
        }
    }
}
