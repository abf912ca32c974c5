//! Weighted PageRank and node-removal attack simulations.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gbm::GbmModel;
use crate::graph::traverse::{components_masked, estimate_diameter};
use crate::graph::{Graph, IdMap, NodeId};
use crate::metrics::{features_batch, Metric};
use crate::rng;

/// Weight given to zero-weight edges so every edge stays traversable.
pub const WEIGHT_FLOOR: f64 = 1e-6;

/// A graph with one weight per adjacency entry, symmetric across each edge.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    pub base: Graph,
    weights: Vec<f64>,
}

impl WeightedGraph {
    /// `edge_weights` follows the order of [`Graph::edges`].
    pub fn from_edge_weights(base: Graph, edge_weights: &[f64]) -> Result<Self> {
        if edge_weights.len() != base.edge_count() {
            return Err(Error::ArityMismatch {
                expected: base.edge_count(),
                actual: edge_weights.len(),
            });
        }
        if let Some(w) = edge_weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidArgument(format!("edge weights must be finite and ≥ 0, got {w}")));
        }
        let mut weights = vec![0.0; base.adjacency_len()];
        let mut next = edge_weights.iter();
        for u in base.nodes() {
            for (pos, &v) in base.adjacency_range(u).zip(base.neighbors(u)) {
                weights[pos] = if u < v {
                    *next.next().expect("one weight per edge")
                } else {
                    let back = base.neighbors(v).binary_search(&u).expect("symmetric adjacency");
                    weights[base.adjacency_range(v).start + back]
                };
            }
        }
        Ok(WeightedGraph { base, weights })
    }

    pub fn uniform(base: Graph, w: f64) -> Result<Self> {
        let weights = vec![w; base.edge_count()];
        Self::from_edge_weights(base, &weights)
    }

    pub fn weight(&self, u: NodeId, v: NodeId) -> Option<f64> {
        if !self.base.contains(u) {
            return None;
        }
        let i = self.base.neighbors(u).binary_search(&v).ok()?;
        Some(self.weights[self.base.adjacency_range(u).start + i])
    }

    /// Weights in [`Graph::edges`] order.
    pub fn edge_weights(&self) -> Vec<f64> {
        self.base.edges().map(|(u, v)| self.weight(u, v).unwrap()).collect()
    }

    fn row(&self, u: NodeId) -> &[f64] {
        &self.weights[self.base.adjacency_range(u)]
    }
}

/// Weights every edge with the model's predicted link probability.
pub fn weight_graph(g: &Graph, model: &GbmModel) -> Result<WeightedGraph> {
    let edges: Vec<_> = g.edges().collect();
    let scores = model.predict_batch(&features_batch(g, &edges)?)?;
    WeightedGraph::from_edge_weights(g.clone(), &scores)
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndexWeights {
    pub graph: WeightedGraph,
    /// The metric took one value on every edge, so all weights are 1.
    pub uniform: bool,
}

/// Weights every edge with one similarity index, min-max scaled to [0, 1].
pub fn single_index_weights(g: &Graph, metric: Metric) -> Result<IndexWeights> {
    let edges: Vec<_> = g.edges().collect();
    let raw: Vec<f64> = features_batch(g, &edges)?
        .iter()
        .map(|f| f.get(metric))
        .collect();
    let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let uniform = !(hi > lo);
    let scaled: Vec<f64> = if uniform {
        vec![1.0; raw.len()]
    } else {
        raw.iter().map(|x| (x - lo) / (hi - lo)).collect()
    };
    Ok(IndexWeights {
        graph: WeightedGraph::from_edge_weights(g.clone(), &scaled)?,
        uniform,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PageRankParams {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PageRankParams {
    fn default() -> Self {
        PageRankParams {
            damping: 0.85,
            tol: 1e-10,
            max_iter: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PageRankScores {
    pub scores: Vec<f64>,
    pub damping: f64,
    pub iterations_run: usize,
    /// L1 change of the final iteration.
    pub residual: f64,
}

impl PageRankScores {
    /// Node ids by descending score, lower id first on ties.
    pub fn ranking(&self) -> Vec<NodeId> {
        let mut order: Vec<NodeId> = (0..self.scores.len() as NodeId).collect();
        order.sort_by(|&a, &b| {
            self.scores[b as usize]
                .total_cmp(&self.scores[a as usize])
                .then(a.cmp(&b))
        });
        order
    }
}

pub fn pagerank(g: &Graph, params: &PageRankParams) -> Result<PageRankScores> {
    power_iteration(g, None, params)
}

pub fn weighted_pagerank(wg: &WeightedGraph, params: &PageRankParams) -> Result<PageRankScores> {
    power_iteration(&wg.base, Some(wg), params)
}

fn power_iteration(g: &Graph, wg: Option<&WeightedGraph>, params: &PageRankParams) -> Result<PageRankScores> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let d = params.damping;
    if !(d > 0.0 && d < 1.0) {
        return Err(Error::InvalidArgument(format!("damping must lie in (0, 1), got {d}")));
    }
    if !(params.tol > 0.0) || params.max_iter == 0 {
        return Err(Error::InvalidArgument("tolerance and iteration cap must be positive".into()));
    }
    let w = |u: NodeId, pos: usize| wg.map_or(1.0, |wg| wg.row(u)[pos].max(WEIGHT_FLOOR));
    let out: Vec<f64> = (0..n as NodeId)
        .map(|u| (0..g.degree(u)).map(|i| w(u, i)).sum())
        .collect();
    let nf = n as f64;
    let mut x = vec![1.0 / nf; n];
    let mut share = vec![0.0; n];
    let mut iterations_run = 0;
    let mut residual = f64::INFINITY;
    while iterations_run < params.max_iter && residual >= params.tol {
        let mut dangling = 0.0;
        for u in 0..n {
            if out[u] > 0.0 {
                share[u] = x[u] / out[u];
            } else {
                share[u] = 0.0;
                dangling += x[u];
            }
        }
        let base = (1.0 - d) / nf + d * dangling / nf;
        let next: Vec<f64> = (0..n as NodeId)
            .into_par_iter()
            .map(|v| {
                let inflow: f64 = g
                    .neighbors(v)
                    .iter()
                    .enumerate()
                    .map(|(i, &u)| share[u as usize] * w(v, i))
                    .sum();
                base + d * inflow
            })
            .collect();
        residual = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        x = next;
        iterations_run += 1;
    }
    Ok(PageRankScores {
        scores: x,
        damping: d,
        iterations_run,
        residual,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    Random,
    DegreeDynamic,
    PageRankStatic,
    WeightedPageRankStatic,
    SingleIndexPageRank(Metric),
    Hybrid,
}

impl Strategy {
    pub fn needs_model(self) -> bool {
        matches!(self, Strategy::WeightedPageRankStatic | Strategy::Hybrid)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Random => f.write_str("random"),
            Strategy::DegreeDynamic => f.write_str("degree_dynamic"),
            Strategy::PageRankStatic => f.write_str("pagerank_static"),
            Strategy::WeightedPageRankStatic => f.write_str("weighted_pagerank_static"),
            Strategy::SingleIndexPageRank(m) => write!(f, "single_index_pagerank_{m}"),
            Strategy::Hybrid => f.write_str("hybrid"),
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "random" => Strategy::Random,
            "degree_dynamic" => Strategy::DegreeDynamic,
            "pagerank_static" => Strategy::PageRankStatic,
            "weighted_pagerank_static" => Strategy::WeightedPageRankStatic,
            "hybrid" => Strategy::Hybrid,
            other => match other.strip_prefix("single_index_pagerank_") {
                Some(m) => Strategy::SingleIndexPageRank(m.parse()?),
                None => return Err(Error::InvalidArgument(format!("unknown attack strategy {other}"))),
            },
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackOptions {
    pub strategy: Strategy,
    pub budget: usize,
    /// Measure after every this many removals (and after the last one).
    pub measure_every: usize,
    pub diameter_sample: usize,
    pub seed: u64,
    pub pagerank: PageRankParams,
    /// Removals the hybrid strategy plays ahead under each base policy.
    pub hybrid_lookahead: usize,
    /// Removals of the winning policy the hybrid commits to per decision.
    pub hybrid_commit: usize,
}

impl AttackOptions {
    pub fn new(strategy: Strategy, budget: usize, seed: u64) -> Self {
        AttackOptions {
            strategy,
            budget,
            measure_every: 1,
            diameter_sample: 100,
            seed,
            pagerank: PageRankParams::default(),
            hybrid_lookahead: 1,
            hybrid_commit: 1,
        }
    }
}

/// `round(fraction · n)` nodes.
pub fn budget_from_fraction(g: &Graph, fraction: f64) -> Result<usize> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidArgument(format!("budget fraction must lie in [0, 1], got {fraction}")));
    }
    Ok((fraction * g.node_count() as f64).round() as usize)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    /// Largest component over surviving nodes.
    pub lcc_fraction: f64,
    pub sampled_diameter: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackStep {
    pub step: usize,
    pub removed_node: NodeId,
    pub measurement: Option<Measurement>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackTrace {
    pub strategy: Strategy,
    pub seed: u64,
    pub budget: usize,
    pub initial: Measurement,
    pub steps: Vec<AttackStep>,
    /// The graph ran out of nodes before the budget was spent.
    pub truncated: bool,
    /// Single-index weights were constant.
    pub uniform_weights: bool,
}

impl AttackTrace {
    pub fn checkpoints(&self) -> impl Iterator<Item = (usize, Measurement)> + '_ {
        self.steps
            .iter()
            .filter_map(|s| s.measurement.map(|m| (s.step, m)))
    }

    pub fn final_lcc_fraction(&self) -> f64 {
        self.checkpoints().last().map_or(self.initial.lcc_fraction, |(_, m)| m.lcc_fraction)
    }

    pub fn file_name(&self) -> String {
        format!("attack_{}_seed{}_budget{}.csv", self.strategy, self.seed, self.budget)
    }
}

struct Survivors<'g> {
    g: &'g Graph,
    alive: Vec<bool>,
    count: usize,
}

impl Survivors<'_> {
    fn measure(&self, sample: usize, seed: u64) -> Result<Measurement> {
        if self.count == 0 {
            return Ok(Measurement { lcc_fraction: 0.0, sampled_diameter: 0 });
        }
        let diameter = estimate_diameter(self.g, Some(&self.alive), sample, seed)?;
        Ok(Measurement {
            lcc_fraction: largest(self.g, &self.alive) as f64 / self.count as f64,
            sampled_diameter: diameter.full,
        })
    }
}

fn largest(g: &Graph, alive: &[bool]) -> usize {
    components_masked(g, Some(alive)).largest().map_or(0, |(_, s)| s)
}

/// First survivor at or after `cursor` in a static ranking.
fn next_ranked(order: &[NodeId], cursor: &mut usize, alive: &[bool]) -> Option<NodeId> {
    while *cursor < order.len() && !alive[order[*cursor] as usize] {
        *cursor += 1;
    }
    order.get(*cursor).copied()
}

/// Plays `h` removals of each base policy from the current state, summing
/// the largest component size after every `every`-th removal and after the
/// last, and keeps the block with the smaller sum, the ranked block on ties.
/// With `h = 1` this compares the two single candidates directly.
fn plan_hybrid_block(
    g: &Graph,
    alive: &[bool],
    degrees: &DegreeQueue,
    order: &[NodeId],
    cursor: usize,
    h: usize,
    every: usize,
) -> VecDeque<NodeId> {
    let mut ranked_alive = alive.to_vec();
    let mut cursor = cursor;
    let mut ranked = VecDeque::with_capacity(h);
    let mut ranked_area = 0;
    for i in 1..=h {
        let Some(v) = next_ranked(order, &mut cursor, &ranked_alive) else { break };
        ranked_alive[v as usize] = false;
        ranked.push_back(v);
        if i % every == 0 || i == h {
            ranked_area += largest(g, &ranked_alive);
        }
    }
    let mut degree_alive = alive.to_vec();
    let mut queue = degrees.clone();
    let mut by_degree = VecDeque::with_capacity(h);
    let mut degree_area = 0;
    for i in 1..=h {
        let Some(v) = queue.peek(&degree_alive) else { break };
        queue.remove(g, &degree_alive, v);
        degree_alive[v as usize] = false;
        by_degree.push_back(v);
        if i % every == 0 || i == h {
            degree_area += largest(g, &degree_alive);
        }
    }
    if ranked == by_degree || ranked_area <= degree_area {
        ranked
    } else {
        by_degree
    }
}

/// Max-current-degree queue with lazy invalidation, lowest id first on ties.
#[derive(Clone)]
struct DegreeQueue {
    degree: Vec<usize>,
    heap: BinaryHeap<(usize, Reverse<NodeId>)>,
}

impl DegreeQueue {
    fn new(g: &Graph) -> Self {
        let degree = g.degrees();
        let heap = degree
            .iter()
            .enumerate()
            .map(|(v, &k)| (k, Reverse(v as NodeId)))
            .collect();
        DegreeQueue { degree, heap }
    }

    fn peek(&mut self, alive: &[bool]) -> Option<NodeId> {
        while let Some(&(k, Reverse(v))) = self.heap.peek() {
            if alive[v as usize] && self.degree[v as usize] == k {
                return Some(v);
            }
            self.heap.pop();
        }
        None
    }

    fn remove(&mut self, g: &Graph, alive: &[bool], v: NodeId) {
        for &u in g.neighbors(v) {
            if alive[u as usize] {
                self.degree[u as usize] -= 1;
                self.heap.push((self.degree[u as usize], Reverse(u)));
            }
        }
    }
}

/// Removes up to `budget` nodes one at a time following `options.strategy`,
/// measuring the surviving graph at checkpoints. Node ids stay those of `g`.
pub fn attack(g: &Graph, options: &AttackOptions, model: Option<&GbmModel>) -> Result<AttackTrace> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if options.measure_every == 0 || options.hybrid_lookahead == 0 || options.hybrid_commit == 0 {
        return Err(Error::InvalidArgument(
            "measure_every, hybrid_lookahead and hybrid_commit must be at least 1".into(),
        ));
    }
    let strategy = options.strategy;
    let model = match (strategy.needs_model(), model) {
        (true, None) => {
            return Err(Error::InvalidArgument(format!("strategy {strategy} needs a trained model")))
        }
        (_, m) => m,
    };
    let mut uniform_weights = false;
    let static_order: Vec<NodeId> = match strategy {
        Strategy::Random => {
            let mut order: Vec<NodeId> = g.nodes().collect();
            order.shuffle(&mut rng::stream(options.seed, "attack-random"));
            order
        }
        Strategy::DegreeDynamic => Vec::new(),
        Strategy::PageRankStatic => pagerank(g, &options.pagerank)?.ranking(),
        Strategy::WeightedPageRankStatic | Strategy::Hybrid => {
            let wg = weight_graph(g, model.expect("checked above"))?;
            weighted_pagerank(&wg, &options.pagerank)?.ranking()
        }
        Strategy::SingleIndexPageRank(metric) => {
            let w = single_index_weights(g, metric)?;
            uniform_weights = w.uniform;
            weighted_pagerank(&w.graph, &options.pagerank)?.ranking()
        }
    };

    let mut s = Survivors { g, alive: vec![true; n], count: n };
    let checkpoint_seed = |step: usize| rng::derive_indexed(options.seed, "attack-diameter", step as u64);
    let initial = s.measure(options.diameter_sample, checkpoint_seed(0))?;
    let mut degrees = matches!(strategy, Strategy::DegreeDynamic | Strategy::Hybrid).then(|| DegreeQueue::new(g));
    let mut cursor = 0;
    let budget = options.budget.min(n);
    let mut steps = Vec::with_capacity(budget);

    let mut planned: VecDeque<NodeId> = VecDeque::new();

    for step in 1..=budget {
        let v = match strategy {
            Strategy::DegreeDynamic => degrees.as_mut().unwrap().peek(&s.alive),
            Strategy::Hybrid => {
                if planned.is_empty() {
                    next_ranked(&static_order, &mut cursor, &s.alive);
                    let lookahead = options.hybrid_lookahead.min(s.count);
                    let commit = options.hybrid_commit.min(budget - step + 1);
                    planned = plan_hybrid_block(
                        g,
                        &s.alive,
                        degrees.as_ref().unwrap(),
                        &static_order,
                        cursor,
                        lookahead,
                        options.hybrid_commit,
                    );
                    planned.truncate(commit);
                }
                planned.pop_front()
            }
            _ => next_ranked(&static_order, &mut cursor, &s.alive),
        }
        .expect("a survivor remains while step ≤ n");
        if let Some(q) = degrees.as_mut() {
            q.remove(g, &s.alive, v);
        }
        s.alive[v as usize] = false;
        s.count -= 1;
        let measurement = if step % options.measure_every == 0 || step == budget {
            Some(s.measure(options.diameter_sample, checkpoint_seed(step))?)
        } else {
            None
        };
        steps.push(AttackStep { step, removed_node: v, measurement });
    }
    Ok(AttackTrace {
        strategy,
        seed: options.seed,
        budget: options.budget,
        initial,
        steps,
        truncated: options.budget > n,
        uniform_weights,
    })
}

pub const ATTACK_CSV_HEADER: &str = "step,removed_node,lcc_fraction,sampled_diameter";

/// Step 0 holds the intact graph's measurement and an empty node field;
/// unmeasured steps leave both measurement fields empty. Node ids are
/// translated through `ids` if given.
pub fn write_attack_csv(trace: &AttackTrace, ids: Option<&IdMap>, mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "{ATTACK_CSV_HEADER}")?;
    writeln!(w, "0,,{},{}", trace.initial.lcc_fraction, trace.initial.sampled_diameter)?;
    for s in &trace.steps {
        let node = ids.map_or(s.removed_node as u64, |ids| ids.original(s.removed_node));
        match s.measurement {
            Some(m) => writeln!(w, "{},{node},{},{}", s.step, m.lcc_fraction, m.sampled_diameter)?,
            None => writeln!(w, "{},{node},,", s.step)?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::Strategy;
    use super::*;
    use crate::gbm::{GbmParams, TreeNode};
    use crate::graph::fixtures::*;
    use crate::metrics::features;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn constant_model(leaf: f64) -> GbmModel {
        let mut m = GbmModel::empty(
            Metric::ALL.iter().map(|m| m.name().to_string()).collect(),
            GbmParams { learning_rate: 1.0, ..Default::default() },
        );
        m.trees.push(TreeNode::Leaf { value: leaf });
        m
    }

    fn tight() -> PageRankParams {
        PageRankParams { tol: 1e-15, max_iter: 10_000, ..Default::default() }
    }

    #[test]
    fn cycle_is_uniform() {
        let r = pagerank(&triangle(), &PageRankParams::default()).unwrap();
        for s in &r.scores {
            assert!((s - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn star_matches_closed_form() {
        // c = (1 - d)/4 + 3 d l and l = (1 - d)/4 + d c / 3
        let d: f64 = 0.85;
        let center = (1.0 + 3.0 * d) / (4.0 * (1.0 + d));
        let leaf = (1.0 - center) / 3.0;
        let r = pagerank(&star(3), &tight()).unwrap();
        assert!((r.scores[0] - center).abs() < 1e-8);
        for s in &r.scores[1..] {
            assert!((s - leaf).abs() < 1e-8);
        }
        assert!(r.scores[0] > r.scores[1]);
    }

    #[test]
    fn isolated_nodes_redistribute() {
        let g = graph(5, &[(0, 1), (1, 2)]);
        let r = pagerank(&g, &tight()).unwrap();
        assert!((r.scores.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(r.scores.iter().all(|&s| s > 0.0));
        assert_eq!(r.scores[3], r.scores[4]);
    }

    #[test]
    fn weights_from_model_and_index() {
        let g = gnp(120, 0.05, 8);
        let wg = weight_graph(&g, &constant_model(0.5)).unwrap();
        assert!(wg.edge_weights().iter().all(|&w| w == 0.5));

        let m = constant_model(0.25);
        let wg = weight_graph(&g, &m).unwrap();
        for (u, v) in g.edges().step_by(7) {
            assert_eq!(wg.weight(u, v), wg.weight(v, u));
            let direct = crate::gbm::predict(&m, &features(&g, u, v).unwrap()).unwrap();
            assert_eq!(wg.weight(u, v), Some(direct));
        }

        let iw = single_index_weights(&triangle(), Metric::Jaccard).unwrap();
        assert!(iw.uniform);
        let iw = single_index_weights(&star(4), Metric::PreferentialAttachment).unwrap();
        assert!(iw.uniform);
        assert!(iw.graph.edge_weights().iter().all(|&w| w == 1.0));
    }

    #[test]
    fn single_index_matches_recomputation() {
        let g = gnp(300, 0.03, 2);
        let iw = single_index_weights(&g, Metric::AdamicAdar).unwrap();
        assert!(!iw.uniform);
        let raw: Vec<f64> = g.edges().map(|(u, v)| features(&g, u, v).unwrap().adamic_adar).collect();
        let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for ((u, v), x) in g.edges().zip(&raw) {
            let w = iw.graph.weight(u, v).unwrap();
            assert!((w - (x - lo) / (hi - lo)).abs() < 1e-12);
            assert_eq!(Some(w), iw.graph.weight(v, u));
        }
    }

    #[test]
    fn star_degree_attack() {
        let g = star(3);
        let trace = attack(&g, &AttackOptions::new(Strategy::DegreeDynamic, 1, 0), None).unwrap();
        assert_eq!(trace.initial.lcc_fraction, 1.0);
        assert_eq!(trace.steps[0].removed_node, 0);
        assert_eq!(trace.final_lcc_fraction(), 1.0 / 3.0);
    }

    #[test]
    fn degree_attack_removes_current_maximum() {
        let g = gnp(200, 0.04, 3);
        let trace = attack(&g, &AttackOptions::new(Strategy::DegreeDynamic, 60, 0), None).unwrap();
        let mut alive = vec![true; g.node_count()];
        for s in &trace.steps {
            let deg = |v: NodeId| g.neighbors(v).iter().filter(|&&u| alive[u as usize]).count();
            let best = g.nodes().filter(|&v| alive[v as usize]).map(deg).max().unwrap();
            assert_eq!(deg(s.removed_node), best);
            alive[s.removed_node as usize] = false;
        }
    }

    #[test]
    fn model_required() {
        let g = triangle();
        let opts = AttackOptions::new(Strategy::Hybrid, 1, 0);
        assert!(attack(&g, &opts, None).is_err());
        assert!(attack(&g, &opts, Some(&constant_model(0.5))).is_ok());
    }

    #[test]
    fn budget_beyond_graph_truncates() {
        let g = path(4);
        let trace = attack(&g, &AttackOptions::new(Strategy::Random, 9, 1), None).unwrap();
        assert!(trace.truncated);
        assert_eq!(trace.steps.len(), 4);
        assert_eq!(trace.final_lcc_fraction(), 0.0);
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in [
            Strategy::Random,
            Strategy::DegreeDynamic,
            Strategy::PageRankStatic,
            Strategy::WeightedPageRankStatic,
            Strategy::SingleIndexPageRank(Metric::Jaccard),
            Strategy::Hybrid,
        ] {
            assert_eq!(s.to_string().parse::<Strategy>().unwrap(), s);
        }
        assert!("greedy".parse::<Strategy>().is_err());
    }

    #[test]
    fn csv_layout() {
        let g = path(5);
        let mut opts = AttackOptions::new(Strategy::PageRankStatic, 3, 2);
        opts.measure_every = 2;
        let trace = attack(&g, &opts, None).unwrap();
        let mut buf = Vec::new();
        write_attack_csv(&trace, None, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[1], "0,,1,4");
        assert!(lines[2].ends_with(",,"));
        assert!(!lines[3].ends_with(",,"));
        assert_eq!(trace.file_name(), "attack_pagerank_static_seed2_budget3.csv");
    }

    fn largest_by_search(g: &Graph, alive: &[bool]) -> usize {
        let mut seen = vec![false; g.node_count()];
        let mut best = 0;
        for s in g.nodes() {
            if seen[s as usize] || !alive[s as usize] {
                continue;
            }
            seen[s as usize] = true;
            let mut queue = vec![s];
            let mut size = 0;
            while let Some(u) = queue.pop() {
                size += 1;
                for &v in g.neighbors(u) {
                    if alive[v as usize] && !seen[v as usize] {
                        seen[v as usize] = true;
                        queue.push(v);
                    }
                }
            }
            best = best.max(size);
        }
        best
    }

    #[test]
    fn single_step_hybrid_matches_direct_comparison() {
        let g = gnp(150, 0.03, 9);
        let model = constant_model(0.7);
        let trace = attack(&g, &AttackOptions::new(Strategy::Hybrid, 60, 0), Some(&model)).unwrap();
        let ranking = pagerank(&g, &PageRankParams::default()).unwrap().ranking();
        let mut alive = vec![true; g.node_count()];
        for s in &trace.steps {
            let a = *ranking.iter().find(|&&v| alive[v as usize]).unwrap();
            let deg = |v: NodeId| g.neighbors(v).iter().filter(|&&u| alive[u as usize]).count();
            let b = g
                .nodes()
                .filter(|&v| alive[v as usize])
                .max_by_key(|&v| (deg(v), Reverse(v)))
                .unwrap();
            let after = |v: NodeId, alive: &mut Vec<bool>| {
                alive[v as usize] = false;
                let size = largest_by_search(&g, alive);
                alive[v as usize] = true;
                size
            };
            let pick = if after(b, &mut alive) < after(a, &mut alive) { b } else { a };
            assert_eq!(s.removed_node, pick);
            alive[pick as usize] = false;
        }
    }

    #[test]
    fn hybrid_commits_blocks() {
        let g = gnp(200, 0.03, 4);
        let model = constant_model(0.7);
        let mut opts = AttackOptions::new(Strategy::Hybrid, 40, 0);
        opts.hybrid_lookahead = 20;
        opts.hybrid_commit = 10;
        opts.measure_every = 10;
        let trace = attack(&g, &opts, Some(&model)).unwrap();
        assert_eq!(trace.steps.len(), 40);
        assert_eq!(trace, attack(&g, &opts, Some(&model)).unwrap());
        let dd = attack(&g, &AttackOptions { strategy: Strategy::DegreeDynamic, ..opts.clone() }, None).unwrap();
        let pr = attack(&g, &AttackOptions { strategy: Strategy::PageRankStatic, ..opts.clone() }, None).unwrap();
        // each block is a prefix-consistent run of one base policy
        let first: Vec<NodeId> = trace.steps[..10].iter().map(|s| s.removed_node).collect();
        let dd_first: Vec<NodeId> = dd.steps[..10].iter().map(|s| s.removed_node).collect();
        let pr_first: Vec<NodeId> = pr.steps[..10].iter().map(|s| s.removed_node).collect();
        assert!(first == dd_first || first == pr_first);
    }

    proptest! {
        #[test]
        fn pagerank_is_a_distribution(seed in 0u64..1000, n in 2usize..60) {
            let g = gnp(n, 0.1, seed);
            let r = pagerank(&g, &PageRankParams::default()).unwrap();
            prop_assert!((r.scores.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!(r.scores.iter().all(|&s| s > 0.0));
            prop_assert!(r.residual < 1e-10 || r.iterations_run == 100);
        }

        #[test]
        fn weight_scale_invariance(seed in 0u64..1000, c in 0.01f64..50.0) {
            let g = gnp(40, 0.12, seed);
            let plain = pagerank(&g, &tight()).unwrap();
            let scaled = weighted_pagerank(&WeightedGraph::uniform(g.clone(), c).unwrap(), &tight()).unwrap();
            for (a, b) in plain.scores.iter().zip(&scaled.scores) {
                prop_assert!((a - b).abs() < 1e-10);
            }
        }

        #[test]
        fn no_node_removed_twice(seed in 0u64..1000, pick in 0usize..4) {
            let g = gnp(50, 0.08, seed);
            let strategy = [Strategy::Random, Strategy::DegreeDynamic, Strategy::PageRankStatic, Strategy::Hybrid][pick];
            let mut opts = AttackOptions::new(strategy, 50, seed);
            opts.measure_every = 10;
            let trace = attack(&g, &opts, Some(&constant_model(0.4))).unwrap();
            let removed: HashSet<NodeId> = trace.steps.iter().map(|s| s.removed_node).collect();
            prop_assert_eq!(removed.len(), 50);
        }
    }
}
