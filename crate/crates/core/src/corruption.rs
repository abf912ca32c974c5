//! Corrupted-network experiments: remove a fraction of edges, retrain on what
//! is left and check how well the model recovers the removed links.

use std::io::Write;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlation::{pearson, slope, spearman};
use crate::dataset::{build_balanced_dataset, label_pairs, sample_negatives_uniform_excluding, split, Label};
use crate::error::{Error, Result};
use crate::eval::{auc, evaluate};
use crate::gbm::{train, GbmParams};
use crate::graph::{compute_stats, remove_edges, Edge, Graph};
use crate::rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorruptionOptions {
    /// Draw every R_p as a prefix of one edge permutation instead of
    /// independently per p.
    pub nested: bool,
    pub diameter_sample: usize,
    pub train_fraction: f64,
    pub positive_cap: Option<usize>,
}

impl Default for CorruptionOptions {
    fn default() -> Self {
        CorruptionOptions {
            nested: false,
            diameter_sample: 100,
            train_fraction: 0.75,
            positive_cap: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorruptionRun {
    pub p: f64,
    pub corrupted_graph_id: String,
    pub removed_edges: Vec<Edge>,
    pub model_auc: Option<f64>,
    /// `None` when R_p is empty or the run failed.
    pub hidden_link_auc: Option<f64>,
    pub sampled_diameter: u32,
    pub max_wcc_fraction: f64,
    pub avg_clustering_coeff: f64,
    pub seed: u64,
    /// Why an AUC is missing.
    pub note: Option<String>,
}

/// Default grid 0.05, 0.10, …, 0.50.
pub fn default_p_values() -> Vec<f64> {
    (1..=10).map(|i| i as f64 * 0.05).collect()
}

fn run_seed(seed: u64, p: f64) -> u64 {
    rng::derive_indexed(seed, "corruption-run", (p * 1e6).round() as u64)
}

/// Splits `g` into (C_p, R_p), from a shared permutation when `order` is set.
fn corrupt(g: &Graph, p: f64, seed: u64, order: Option<&[Edge]>) -> Result<(Graph, Vec<Edge>)> {
    if p == 0.0 {
        return Ok((g.clone(), Vec::new()));
    }
    match order {
        None => remove_edges(g, p, seed),
        Some(order) => {
            let k = (p * order.len() as f64).round() as usize;
            let removed = order[..k].to_vec();
            let (c, _) = Graph::from_edges(g.node_count(), order[k..].iter().copied())?;
            Ok((c, removed))
        }
    }
}

pub fn run_corruption_experiment(
    g: &Graph,
    p_values: &[f64],
    seed: u64,
    params: &GbmParams,
    options: &CorruptionOptions,
) -> Result<Vec<CorruptionRun>> {
    params.validate()?;
    if let Some(&p) = p_values.iter().find(|&&p| !(0.0..1.0).contains(&p)) {
        return Err(Error::InvalidArgument(format!("removal fraction must lie in [0, 1), got {p}")));
    }
    let order = options.nested.then(|| {
        let mut edges: Vec<Edge> = g.edges().collect();
        edges.shuffle(&mut rng::stream(seed, "corruption-nested"));
        edges
    });
    p_values
        .par_iter()
        .map(|&p| run_one(g, p, seed, params, options, order.as_deref()))
        .collect()
}

fn run_one(
    g: &Graph,
    p: f64,
    seed: u64,
    params: &GbmParams,
    options: &CorruptionOptions,
    order: Option<&[Edge]>,
) -> Result<CorruptionRun> {
    let s = run_seed(seed, p);
    let (c, removed) = corrupt(g, p, rng::derive_seed(s, "remove"), order)?;
    let stats = compute_stats(&c, options.diameter_sample, rng::derive_seed(s, "stats"))?;
    let mut run = CorruptionRun {
        p,
        corrupted_graph_id: c.fingerprint(),
        removed_edges: removed,
        model_auc: None,
        hidden_link_auc: None,
        sampled_diameter: stats.approx_full_diameter,
        max_wcc_fraction: stats.max_wcc_fraction,
        avg_clustering_coeff: stats.avg_clustering_coeff,
        seed,
        note: None,
    };
    match score(g, &c, &run.removed_edges, s, params, options) {
        Ok((model_auc, hidden)) => {
            run.model_auc = Some(model_auc);
            run.hidden_link_auc = hidden;
            if hidden.is_none() {
                run.note = Some("no removed edges: hidden-link AUC undefined".into());
            }
        }
        Err(e) => run.note = Some(e.to_string()),
    }
    Ok(run)
}

fn score(
    g: &Graph,
    c: &Graph,
    removed: &[Edge],
    s: u64,
    params: &GbmParams,
    options: &CorruptionOptions,
) -> Result<(f64, Option<f64>)> {
    let data = build_balanced_dataset(c, rng::derive_seed(s, "dataset"), options.positive_cap)?;
    let parts = split(&data, options.train_fraction, rng::derive_seed(s, "split"))?;
    let (model, _) = train(&parts.train, params)?;
    let model_auc = evaluate(&model, &parts.test)?.auc;
    if removed.is_empty() {
        return Ok((model_auc, None));
    }
    let negatives = sample_negatives_uniform_excluding(
        g,
        removed.len(),
        rng::derive_seed(s, "hidden-negatives"),
        &data.pairs(),
    )?;
    let labeled: Vec<(Edge, Label)> = removed
        .iter()
        .map(|&e| (e, Label::Positive))
        .chain(negatives.into_iter().map(|e| (e, Label::Negative)))
        .collect();
    let samples = label_pairs(c, &labeled)?;
    let features: Vec<_> = samples.iter().map(|x| x.features).collect();
    let scored: Vec<(f64, bool)> = model
        .predict_batch(&features)?
        .into_iter()
        .zip(&samples)
        .map(|(score, x)| (score, x.label.is_positive()))
        .collect();
    Ok((model_auc, Some(auc(&scored)?.auc)))
}

pub const CORRUPTION_CSV_HEADER: &str =
    "p,model_auc,hidden_link_auc,sampled_diameter,max_wcc_fraction,avg_clustering_coeff,seed";

/// One row per run; a missing AUC is an empty field.
pub fn write_corruption_csv(runs: &[CorruptionRun], mut w: impl Write) -> std::io::Result<()> {
    let opt = |x: Option<f64>| x.map_or(String::new(), |v| v.to_string());
    writeln!(w, "{CORRUPTION_CSV_HEADER}")?;
    for r in runs {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.p,
            opt(r.model_auc),
            opt(r.hidden_link_auc),
            r.sampled_diameter,
            r.max_wcc_fraction,
            r.avg_clustering_coeff,
            r.seed
        )?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub x: String,
    pub y: String,
    /// Runs where both series are defined.
    pub n: usize,
    pub pearson: Option<f64>,
    pub spearman: Option<f64>,
    /// Least-squares slope of y on x.
    pub slope: Option<f64>,
    /// Set when a series is constant or too short.
    pub undefined: bool,
}

/// Correlations between every pair of run series: p, both AUCs and the three
/// structural measurements.
pub fn correlate_structure_vs_auc(runs: &[CorruptionRun]) -> Result<Vec<Correlation>> {
    if runs.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "correlation needs at least 3 runs, got {}",
            runs.len()
        )));
    }
    let series: [(&str, fn(&CorruptionRun) -> Option<f64>); 6] = [
        ("p", |r| Some(r.p)),
        ("model_auc", |r| r.model_auc),
        ("hidden_link_auc", |r| r.hidden_link_auc),
        ("sampled_diameter", |r| Some(r.sampled_diameter as f64)),
        ("max_wcc_fraction", |r| Some(r.max_wcc_fraction)),
        ("avg_clustering_coeff", |r| Some(r.avg_clustering_coeff)),
    ];
    let mut out = Vec::new();
    for (i, (xn, xf)) in series.iter().enumerate() {
        for (yn, yf) in &series[i + 1..] {
            let (x, y): (Vec<f64>, Vec<f64>) = runs
                .iter()
                .filter_map(|r| Some((xf(r)?, yf(r)?)))
                .unzip();
            let pearson = pearson(&x, &y);
            out.push(Correlation {
                x: xn.to_string(),
                y: yn.to_string(),
                n: x.len(),
                pearson,
                spearman: spearman(&x, &y),
                slope: slope(&x, &y),
                undefined: pearson.is_none(),
            });
        }
    }
    Ok(out)
}

/// Looks up the entry for a pair of series in either order.
pub fn find_correlation<'a>(table: &'a [Correlation], a: &str, b: &str) -> Option<&'a Correlation> {
    table
        .iter()
        .find(|c| (c.x == a && c.y == b) || (c.x == b && c.y == a))
}
