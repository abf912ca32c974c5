//! ROC analysis, prediction imbalance, greedy forward feature selection and
//! hidden-link probability by hop distance.

use std::collections::HashSet;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{sample_negatives_at_distance_excluding, Dataset};
use crate::error::{Error, Result};
use crate::gbm::{predict, train_on, GbmModel, GbmParams};
use crate::graph::{Edge, Graph};
use crate::metrics::{features_batch, Metric};
use crate::rng;

/// Scores at or above this value count as a predicted link.
pub const DECISION_THRESHOLD: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RocReport {
    pub auc: f64,
    /// (false-positive rate, true-positive rate) from (0, 0) to (1, 1).
    pub roc_points: Vec<(f64, f64)>,
    pub err_pos: f64,
    pub err_neg: f64,
    pub prediction_imbalance: f64,
}

impl RocReport {
    /// Trapezoidal area under `roc_points`.
    pub fn trapezoid_area(&self) -> f64 {
        self.roc_points
            .windows(2)
            .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
            .sum()
    }
}

/// AUC as the Mann–Whitney statistic (ties count one half), plus the ROC
/// curve and per-class error rates at [`DECISION_THRESHOLD`].
pub fn auc(scores: &[(f64, bool)]) -> Result<RocReport> {
    let positives = scores.iter().filter(|s| s.1).count();
    let negatives = scores.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::SingleClass);
    }
    if scores.iter().any(|s| s.0.is_nan()) {
        return Err(Error::InvalidArgument("scores must not be NaN".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].0.total_cmp(&scores[b].0));

    // rank sum of positives, tie groups sharing their average rank
    let mut positive_rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]].0 == scores[order[i]].0 {
            j += 1;
        }
        let rank = (i + j + 2) as f64 / 2.0;
        let pos_in_group = order[i..=j].iter().filter(|&&k| scores[k].1).count();
        positive_rank_sum += rank * pos_in_group as f64;
        i = j + 1;
    }
    let p = positives as f64;
    let n = negatives as f64;
    let u = positive_rank_sum - p * (p + 1.0) / 2.0;
    let auc = u / (p * n);

    let mut roc_points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut k = order.len();
    while k > 0 {
        let score = scores[order[k - 1]].0;
        while k > 0 && scores[order[k - 1]].0 == score {
            if scores[order[k - 1]].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            k -= 1;
        }
        roc_points.push((fp as f64 / n, tp as f64 / p));
    }

    let missed = scores.iter().filter(|s| s.1 && s.0 < DECISION_THRESHOLD).count();
    let false_alarms = scores.iter().filter(|s| !s.1 && s.0 >= DECISION_THRESHOLD).count();
    let err_pos = missed as f64 / p;
    let err_neg = false_alarms as f64 / n;
    Ok(RocReport {
        auc,
        roc_points,
        err_pos,
        err_neg,
        prediction_imbalance: (err_pos - err_neg).abs(),
    })
}

/// Scores every sample of `data` with `model` and summarizes the result.
pub fn evaluate(model: &GbmModel, data: &Dataset) -> Result<RocReport> {
    let features: Vec<_> = data.samples.iter().map(|s| s.features).collect();
    let scores = model.predict_batch(&features)?;
    let labeled: Vec<(f64, bool)> = scores
        .into_iter()
        .zip(&data.samples)
        .map(|(s, x)| (s, x.label.is_positive()))
        .collect();
    auc(&labeled)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionRound {
    /// Test AUC of each candidate appended to the features selected so far.
    pub candidates: Vec<(Metric, f64)>,
    pub best: Metric,
    pub best_auc: f64,
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureSelectionReport {
    pub rounds: Vec<SelectionRound>,
    pub selected: Vec<Metric>,
    /// Test AUC after each accepted round.
    pub selected_aucs: Vec<f64>,
    /// 1-based round at which selection stopped.
    pub stopping_round: usize,
}

/// Greedy forward selection over the similarity indices. A round trains one
/// model per unselected index (appended to the current selection) and keeps
/// the one with the best test AUC, lowest index on ties. Selection stops when
/// the best improvement is at most `epsilon`; the first round always selects.
pub fn forward_select(
    train: &Dataset,
    test: &Dataset,
    params: &GbmParams,
    epsilon: f64,
) -> Result<FeatureSelectionReport> {
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be ≥ 0, got {epsilon}")));
    }
    let mut report = FeatureSelectionReport {
        rounds: Vec::new(),
        selected: Vec::new(),
        selected_aucs: Vec::new(),
        stopping_round: 1,
    };
    loop {
        report.stopping_round = report.rounds.len() + 1;
        let current = report.selected_aucs.last().copied();
        // AUC is bounded by 1, so no candidate can clear the bar
        if current.is_some_and(|a| a + epsilon >= 1.0) {
            break;
        }
        let remaining: Vec<Metric> = Metric::ALL
            .into_iter()
            .filter(|m| !report.selected.contains(m))
            .collect();
        if remaining.is_empty() {
            break;
        }
        let candidates: Vec<(Metric, f64)> = remaining
            .par_iter()
            .map(|&m| {
                let mut columns = report.selected.clone();
                columns.push(m);
                let (model, _) = train_on(train, &columns, params)?;
                Ok((m, evaluate(&model, test)?.auc))
            })
            .collect::<Result<_>>()?;
        let (best, best_auc) = candidates
            .iter()
            .copied()
            .fold(None, |acc: Option<(Metric, f64)>, (m, a)| match acc {
                Some((_, ba)) if ba >= a => acc,
                _ => Some((m, a)),
            })
            .expect("at least one candidate");
        let accepted = current.is_none_or(|c| best_auc - c > epsilon);
        report.rounds.push(SelectionRound {
            candidates,
            best,
            best_auc,
            accepted,
        });
        if !accepted {
            break;
        }
        report.selected.push(best);
        report.selected_aucs.push(best_auc);
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceProbe {
    pub d: u32,
    /// Mean predicted link probability, `None` for an empty stratum.
    pub mean_score: Option<f64>,
    pub samples: usize,
    pub shortfall: bool,
}

pub fn hidden_link_probability_by_distance(
    model: &GbmModel,
    g: &Graph,
    d_range: RangeInclusive<u32>,
    count_per_d: usize,
    seed: u64,
) -> Result<Vec<DistanceProbe>> {
    hidden_link_probability_by_distance_excluding(model, g, d_range, count_per_d, seed, &HashSet::new())
}

/// Mean model score over non-edges sampled at each hop distance in
/// `d_range`, never using a pair from `exclude`.
pub fn hidden_link_probability_by_distance_excluding(
    model: &GbmModel,
    g: &Graph,
    d_range: RangeInclusive<u32>,
    count_per_d: usize,
    seed: u64,
    exclude: &HashSet<Edge>,
) -> Result<Vec<DistanceProbe>> {
    if *d_range.start() < 2 || *d_range.end() > 10 || d_range.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "distance range must lie within 2..=10, got {}..={}",
            d_range.start(),
            d_range.end()
        )));
    }
    model.metric_columns()?;
    let stream = rng::derive_seed(seed, "hidden-by-distance");
    d_range
        .map(|d| {
            let stratum = sample_negatives_at_distance_excluding(g, d, count_per_d, stream, exclude)?;
            let features = features_batch(g, &stratum.pairs)?;
            let scores = features
                .iter()
                .map(|f| predict(model, f))
                .collect::<Result<Vec<f64>>>()?;
            let mean_score =
                (!scores.is_empty()).then(|| scores.iter().sum::<f64>() / scores.len() as f64);
            Ok(DistanceProbe {
                d,
                mean_score,
                samples: scores.len(),
                shortfall: stratum.shortfall,
            })
        })
        .collect()
}
