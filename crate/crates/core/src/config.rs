//! Flat JSON run configuration shared by every CLI subcommand.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gbm::GbmParams;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub graph: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,

    pub max_depth: usize,
    pub n_trees: usize,
    pub min_leaf: usize,
    pub n_bins: usize,
    pub learning_rate: f64,

    pub diameter_sample: usize,
    pub positive_cap: Option<usize>,
    pub negatives_per_positive: usize,
    pub train_fraction: f64,
    pub epsilon: f64,
    pub p_values: Vec<f64>,
    pub nested: bool,
    pub d_min: u32,
    pub d_max: u32,
    pub count_per_d: usize,
    pub budget: Option<usize>,
    pub budget_fraction: f64,
    pub measure_every: usize,
    pub hybrid_lookahead: usize,
    pub hybrid_commit: usize,
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let gbm = GbmParams::default();
        RunConfig {
            seed: None,
            graph: None,
            model: None,
            out_dir: None,
            max_depth: gbm.max_depth,
            n_trees: gbm.n_trees,
            min_leaf: gbm.min_leaf,
            n_bins: gbm.n_bins,
            learning_rate: gbm.learning_rate,
            diameter_sample: 100,
            positive_cap: None,
            negatives_per_positive: 1,
            train_fraction: 0.75,
            epsilon: 0.005,
            p_values: crate::corruption::default_p_values(),
            nested: false,
            d_min: 2,
            d_max: 10,
            count_per_d: 1000,
            budget: None,
            budget_fraction: 0.1,
            measure_every: 10,
            hybrid_lookahead: 1,
            hybrid_commit: 1,
            damping: 0.85,
            tol: 1e-10,
            max_iter: 100,
        }
    }
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn gbm(&self) -> GbmParams {
        GbmParams {
            max_depth: self.max_depth,
            n_trees: self.n_trees,
            min_leaf: self.min_leaf,
            n_bins: self.n_bins,
            learning_rate: self.learning_rate,
        }
    }
}

/// Parses `start:stop:step` (inclusive, up to rounding) or a comma list.
pub fn parse_fractions(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidArgument(format!("cannot parse fraction list `{text}`"));
    let number = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
            if !(step > 0.0) || stop < start {
                return Err(bad());
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize;
            // round away float drift so 0.05:0.50:0.05 gives 0.15, not 0.15000000000000002
            Ok((0..=count)
                .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
                .collect())
        }
        [_] => text.split(',').map(number).collect(),
        _ => Err(bad()),
    }
}
