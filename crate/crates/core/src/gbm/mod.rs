//! Gradient boosting of least-squares regression trees.
//!
//! Training starts from `f(x) = 0` with residuals equal to the 0/1 labels.
//! Each round fits a tree to the current residuals, adds it to the ensemble
//! shrunk by the learning rate, and subtracts the shrunk fit from the
//! residuals. Scores are clamped to `[0, 1]` and read as link probabilities.

mod tree;

pub use tree::TreeNode;

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, FeatureMatrix};
use crate::error::{Error, Result};
use crate::metrics::{FeatureVector, Metric};
use tree::TreeGrower;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GbmParams {
    pub max_depth: usize,
    pub n_trees: usize,
    /// Fewest training rows allowed in each child of a split.
    pub min_leaf: usize,
    pub n_bins: usize,
    pub learning_rate: f64,
}

impl Default for GbmParams {
    fn default() -> Self {
        GbmParams {
            max_depth: 5,
            n_trees: 50,
            min_leaf: 10,
            n_bins: 20,
            learning_rate: 0.1,
        }
    }
}

impl GbmParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_bins < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least 2 histogram bins, got {}",
                self.n_bins
            )));
        }
        if self.min_leaf == 0 {
            return Err(Error::InvalidArgument("min_leaf must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "learning rate must lie in (0, 1], got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GbmModel {
    pub version: u32,
    pub params: GbmParams,
    pub base_score: f64,
    pub feature_names: Vec<String>,
    pub trees: Vec<TreeNode>,
}

/// Mean squared residual after each boosting round.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub losses: Vec<f64>,
}

impl GbmModel {
    /// A model without trees; predicts `base_score` everywhere.
    pub fn empty(feature_names: Vec<String>, params: GbmParams) -> Self {
        GbmModel {
            version: MODEL_FORMAT_VERSION,
            params,
            base_score: 0.0,
            feature_names,
            trees: Vec::new(),
        }
    }

    /// Unclamped ensemble output.
    pub fn raw_score(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.feature_names.len() {
            return Err(Error::ArityMismatch {
                expected: self.feature_names.len(),
                actual: x.len(),
            });
        }
        let sum: f64 = self.trees.iter().map(|t| t.evaluate(x)).sum();
        Ok(self.base_score + self.params.learning_rate * sum)
    }

    /// Link probability for one feature row.
    pub fn predict_row(&self, x: &[f64]) -> Result<f64> {
        self.raw_score(x).map(|s| s.clamp(0.0, 1.0))
    }

    /// Columns of [`FeatureVector`] the model reads, in model order.
    pub fn metric_columns(&self) -> Result<Vec<Metric>> {
        self.feature_names.iter().map(|n| n.parse()).collect()
    }

    pub fn predict_batch(&self, rows: &[FeatureVector]) -> Result<Vec<f64>> {
        let columns = self.metric_columns()?;
        let mut x = vec![0.0; columns.len()];
        rows.iter()
            .map(|f| {
                for (slot, &m) in x.iter_mut().zip(&columns) {
                    *slot = f.get(m);
                }
                self.predict_row(&x)
            })
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Header {
            version: u32,
        }
        let header: Header =
            serde_json::from_str(text).map_err(|e| Error::CorruptModel(e.to_string()))?;
        if header.version != MODEL_FORMAT_VERSION {
            return Err(Error::ModelVersion {
                expected: MODEL_FORMAT_VERSION,
                found: header.version,
            });
        }
        let model: GbmModel =
            serde_json::from_str(text).map_err(|e| Error::CorruptModel(e.to_string()))?;
        for tree in &model.trees {
            tree.validate(model.feature_names.len())
                .map_err(Error::CorruptModel)?;
        }
        Ok(model)
    }
}

/// Link probability of a pair from its full feature vector.
pub fn predict(model: &GbmModel, features: &FeatureVector) -> Result<f64> {
    let row: Vec<f64> = model
        .metric_columns()?
        .into_iter()
        .map(|m| features.get(m))
        .collect();
    model.predict_row(&row)
}

pub fn save_model(model: &GbmModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, model.to_json()? + "\n").map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<GbmModel> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    GbmModel::from_json(&text)
}

/// Trains on every similarity index of `data`.
pub fn train(data: &Dataset, params: &GbmParams) -> Result<(GbmModel, TrainReport)> {
    train_on(data, &Metric::ALL, params)
}

/// Trains on the chosen similarity indices of `data`.
pub fn train_on(
    data: &Dataset,
    columns: &[Metric],
    params: &GbmParams,
) -> Result<(GbmModel, TrainReport)> {
    if data.is_empty() {
        return Err(Error::InvalidArgument("training data is empty".into()));
    }
    if columns.is_empty() {
        return Err(Error::InvalidArgument("no feature columns selected".into()));
    }
    let (x, y) = data.to_matrix(columns)?;
    train_matrix(&x, &y, params)
}

pub fn train_matrix(
    x: &FeatureMatrix,
    targets: &[f64],
    params: &GbmParams,
) -> Result<(GbmModel, TrainReport)> {
    params.validate()?;
    if x.rows == 0 || x.rows != targets.len() {
        return Err(Error::InvalidArgument(format!(
            "{} feature rows for {} targets",
            x.rows,
            targets.len()
        )));
    }
    if x.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("feature values must be finite".into()));
    }
    let positives = targets.iter().filter(|&&t| t == 1.0).count();
    if positives + targets.iter().filter(|&&t| t == 0.0).count() != targets.len() {
        return Err(Error::InvalidArgument("targets must be 0 or 1".into()));
    }
    if positives == 0 || positives == targets.len() {
        return Err(Error::SingleClass);
    }

    let mut model = GbmModel::empty(x.names.clone(), *params);
    let mut residuals = targets.to_vec();
    let mut fitted = vec![0.0; x.rows];
    let mut report = TrainReport::default();
    let mut grower = TreeGrower::new(x, params);
    for _ in 0..params.n_trees {
        let tree = grower.grow(&residuals, &mut fitted);
        for (r, f) in residuals.iter_mut().zip(&fitted) {
            *r -= params.learning_rate * f;
        }
        report
            .losses
            .push(residuals.iter().map(|r| r * r).sum::<f64>() / x.rows as f64);
        model.trees.push(tree);
    }
    Ok((model, report))
}
