//! Depth-limited least-squares regression trees over equal-frequency
//! histogram thresholds.

use serde::{Deserialize, Serialize};

use super::GbmParams;
use crate::dataset::FeatureMatrix;

/// A split sends rows with `x[feature] <= threshold` to the left child.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeNode {
    Split {
        #[serde(rename = "f")]
        feature: usize,
        #[serde(rename = "t")]
        threshold: f64,
        #[serde(rename = "l")]
        left: Box<TreeNode>,
        #[serde(rename = "r")]
        right: Box<TreeNode>,
    },
    Leaf {
        #[serde(rename = "v")]
        value: f64,
    },
}

impl TreeNode {
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { value } => return *value,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => node = if x[*feature] <= *threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn leaves(&self) -> Vec<f64> {
        match self {
            TreeNode::Leaf { value } => vec![*value],
            TreeNode::Split { left, right, .. } => {
                let mut v = left.leaves();
                v.extend(right.leaves());
                v
            }
        }
    }

    /// Checks structural validity against a column count.
    pub(crate) fn validate(&self, cols: usize) -> Result<(), String> {
        match self {
            TreeNode::Leaf { value } if value.is_finite() => Ok(()),
            TreeNode::Leaf { value } => Err(format!("non-finite leaf value {value}")),
            TreeNode::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                if *feature >= cols {
                    return Err(format!("split on column {feature} of {cols}"));
                }
                if !threshold.is_finite() {
                    return Err(format!("non-finite threshold {threshold}"));
                }
                left.validate(cols)?;
                right.validate(cols)
            }
        }
    }
}

/// Minimum squared-error reduction for a split to be taken.
const MIN_GAIN: f64 = 1e-12;

pub(crate) struct TreeGrower<'a> {
    x: &'a FeatureMatrix,
    params: &'a GbmParams,
    /// Row indices sorted by (value, row) for every column.
    presorted: Vec<Vec<u32>>,
    goes_left: Vec<bool>,
}

struct Candidate {
    gain: f64,
    feature: usize,
    threshold: f64,
}

impl<'a> TreeGrower<'a> {
    pub(crate) fn new(x: &'a FeatureMatrix, params: &'a GbmParams) -> Self {
        let presorted = (0..x.cols())
            .map(|j| {
                let mut order: Vec<u32> = (0..x.rows as u32).collect();
                order.sort_by(|&a, &b| {
                    x.get(a as usize, j)
                        .total_cmp(&x.get(b as usize, j))
                        .then(a.cmp(&b))
                });
                order
            })
            .collect();
        TreeGrower {
            x,
            params,
            presorted,
            goes_left: vec![false; x.rows],
        }
    }

    /// Fits one tree to `residuals`; writes each row's leaf value to `fitted`.
    pub(crate) fn grow(&mut self, residuals: &[f64], fitted: &mut [f64]) -> TreeNode {
        let lists = self.presorted.clone();
        self.grow_node(lists, 0, residuals, fitted)
    }

    fn grow_node(
        &mut self,
        lists: Vec<Vec<u32>>,
        depth: usize,
        residuals: &[f64],
        fitted: &mut [f64],
    ) -> TreeNode {
        let rows = &lists[0];
        let count = rows.len();
        let best = if depth < self.params.max_depth && count >= 2 * self.params.min_leaf {
            self.best_split(&lists, residuals)
        } else {
            None
        };
        let Some(split) = best else {
            let value = rows.iter().map(|&r| residuals[r as usize]).sum::<f64>() / count as f64;
            for &r in rows {
                fitted[r as usize] = value;
            }
            return TreeNode::Leaf { value };
        };

        for &r in rows {
            self.goes_left[r as usize] = self.x.get(r as usize, split.feature) <= split.threshold;
        }
        let (left, right): (Vec<Vec<u32>>, Vec<Vec<u32>>) = lists
            .into_iter()
            .map(|list| list.into_iter().partition(|&r| self.goes_left[r as usize]))
            .unzip();
        let left = self.grow_node(left, depth + 1, residuals, fitted);
        let right = self.grow_node(right, depth + 1, residuals, fitted);
        TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    fn best_split(&self, lists: &[Vec<u32>], residuals: &[f64]) -> Option<Candidate> {
        let count = lists[0].len();
        let n = count as f64;
        let min_leaf = self.params.min_leaf.max(1);
        let bins = self.params.n_bins;
        let mut best: Option<Candidate> = None;
        let mut prefix = Vec::with_capacity(count + 1);
        let mut values = Vec::with_capacity(count);

        for (feature, list) in lists.iter().enumerate() {
            values.clear();
            values.extend(list.iter().map(|&r| self.x.get(r as usize, feature)));
            prefix.clear();
            prefix.push(0.0);
            let mut acc = 0.0;
            for &r in list {
                acc += residuals[r as usize];
                prefix.push(acc);
            }
            let total = acc;
            let base = total * total / n;

            let mut last_threshold = None;
            for i in 1..bins {
                let rank = (i * count).div_ceil(bins).saturating_sub(1);
                let threshold = values[rank];
                if last_threshold == Some(threshold) {
                    continue;
                }
                last_threshold = Some(threshold);
                let n_left = values.partition_point(|&v| v <= threshold);
                let n_right = count - n_left;
                if n_left < min_leaf || n_right < min_leaf {
                    continue;
                }
                let s_left = prefix[n_left];
                let s_right = total - s_left;
                let gain = s_left * s_left / n_left as f64 + s_right * s_right / n_right as f64 - base;
                if gain > MIN_GAIN && best.as_ref().is_none_or(|b| gain > b.gain) {
                    best = Some(Candidate {
                        gain,
                        feature,
                        threshold,
                    });
                }
            }
        }
        best
    }
}
