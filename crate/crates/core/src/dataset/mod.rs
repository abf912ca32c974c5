//! Labeled node-pair datasets for supervised link prediction.

mod generate;
mod io;
mod sampling;

pub use generate::{generate, generate_power_law_graph, PowerLawGraphConfig};
pub use io::{read_feature_csv, write_feature_csv, DatasetManifest, FEATURE_CSV_HEADER};
pub use sampling::{
    sample_negatives_at_distance, sample_negatives_at_distance_excluding,
    sample_negatives_uniform, sample_negatives_uniform_excluding, StratumSample,
};

use std::collections::HashSet;

use rand::seq::{index, SliceRandom};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, NodeId};
use crate::metrics::{features_batch, FeatureVector, Metric};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }

    pub fn target(self) -> f64 {
        if self.is_positive() {
            1.0
        } else {
            0.0
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeSample {
    pub u: NodeId,
    pub v: NodeId,
    pub label: Label,
    pub features: FeatureVector,
    /// Hop distance of the pair when it was drawn from a distance stratum.
    pub stratum_d: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub samples: Vec<EdgeSample>,
    pub source_graph_id: String,
    pub seed: u64,
}

/// Row-major feature matrix with named columns.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    pub names: Vec<String>,
    pub rows: usize,
    pub values: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(names: Vec<String>, values: Vec<f64>) -> Result<Self> {
        let cols = names.len();
        if cols == 0 || !values.len().is_multiple_of(cols) {
            return Err(Error::InvalidArgument(format!(
                "{} values do not fill {cols} columns",
                values.len()
            )));
        }
        Ok(FeatureMatrix {
            rows: values.len() / cols,
            names,
            values,
        })
    }

    pub fn cols(&self) -> usize {
        self.names.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let c = self.cols();
        &self.values[i * c..(i + 1) * c]
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols() + col]
    }
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// (positive, negative) counts.
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.samples.iter().filter(|s| s.label.is_positive()).count();
        (pos, self.samples.len() - pos)
    }

    /// Feature columns `columns` of every sample, plus the 0/1 targets.
    pub fn to_matrix(&self, columns: &[Metric]) -> Result<(FeatureMatrix, Vec<f64>)> {
        let names = columns.iter().map(|m| m.name().to_string()).collect();
        let values = self
            .samples
            .iter()
            .flat_map(|s| columns.iter().map(|&m| s.features.get(m)))
            .collect();
        let targets = self.samples.iter().map(|s| s.label.target()).collect();
        Ok((FeatureMatrix::new(names, values)?, targets))
    }

    pub fn pairs(&self) -> HashSet<Edge> {
        self.samples.iter().map(|s| (s.u.min(s.v), s.u.max(s.v))).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Split {
    pub train: Dataset,
    pub test: Dataset,
}

/// How many positives to keep and how many negatives to draw per positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DatasetShape {
    pub positive_cap: Option<usize>,
    pub negatives_per_positive: usize,
}

impl Default for DatasetShape {
    fn default() -> Self {
        DatasetShape {
            positive_cap: None,
            negatives_per_positive: 1,
        }
    }
}

/// Every edge (or `positive_cap` of them) as positives and the same number of
/// uniformly drawn non-edges as negatives, features computed on `g`.
pub fn build_balanced_dataset(g: &Graph, seed: u64, positive_cap: Option<usize>) -> Result<Dataset> {
    build_dataset(
        g,
        seed,
        DatasetShape {
            positive_cap,
            negatives_per_positive: 1,
        },
    )
}

pub fn build_dataset(g: &Graph, seed: u64, shape: DatasetShape) -> Result<Dataset> {
    if g.edge_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut positives: Vec<Edge> = g.edges().collect();
    if let Some(cap) = shape.positive_cap {
        if cap == 0 {
            return Err(Error::InvalidArgument("positive cap must be at least 1".into()));
        }
        if cap < positives.len() {
            let mut rng = rng::stream(seed, "dataset-positives");
            let picks = index::sample(&mut rng, positives.len(), cap);
            positives = picks.iter().map(|i| positives[i]).collect();
        }
    }
    let negatives = sample_negatives_uniform(
        g,
        positives.len() * shape.negatives_per_positive,
        rng::derive_seed(seed, "dataset-negatives"),
    )?;
    let labeled: Vec<(Edge, Label)> = positives
        .into_iter()
        .map(|e| (e, Label::Positive))
        .chain(negatives.into_iter().map(|e| (e, Label::Negative)))
        .collect();
    let mut samples = label_pairs(g, &labeled)?;
    samples.shuffle(&mut rng::stream(seed, "dataset-order"));
    Ok(Dataset {
        samples,
        source_graph_id: g.fingerprint(),
        seed,
    })
}

/// Computes features on `g` for labeled pairs.
pub fn label_pairs(g: &Graph, pairs: &[(Edge, Label)]) -> Result<Vec<EdgeSample>> {
    let raw: Vec<Edge> = pairs.iter().map(|&(e, _)| e).collect();
    let features = features_batch(g, &raw)?;
    Ok(pairs
        .iter()
        .zip(features)
        .map(|(&((u, v), label), features)| EdgeSample {
            u,
            v,
            label,
            features,
            stratum_d: None,
        })
        .collect())
}

/// Class-stratified split: `round(train_fraction · count)` of each class goes
/// to the training side.
pub fn split(dataset: &Dataset, train_fraction: f64, seed: u64) -> Result<Split> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let mut rng = rng::stream(seed, "split");
    let (mut pos, mut neg): (Vec<&EdgeSample>, Vec<&EdgeSample>) =
        dataset.samples.iter().partition(|s| s.label.is_positive());
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (class, name) in [(&mut pos, "positive"), (&mut neg, "negative")] {
        class.shuffle(&mut rng);
        let k = (train_fraction * class.len() as f64).round() as usize;
        if k == 0 || k == class.len() {
            return Err(Error::InvalidArgument(format!(
                "splitting {} {name} samples at {train_fraction} leaves one side without that class",
                class.len()
            )));
        }
        train.extend(class[..k].iter().map(|&s| s.clone()));
        test.extend(class[k..].iter().map(|&s| s.clone()));
    }
    train.shuffle(&mut rng);
    test.shuffle(&mut rng);
    let side = |samples| Dataset {
        samples,
        source_graph_id: dataset.source_graph_id.clone(),
        seed: dataset.seed,
    };
    Ok(Split {
        train: side(train),
        test: side(test),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    fn synthetic(pos: usize, neg: usize) -> Dataset {
        let samples = (0..pos + neg)
            .map(|i| EdgeSample {
                u: i as NodeId,
                v: (i + 1) as NodeId,
                label: if i < pos { Label::Positive } else { Label::Negative },
                features: FeatureVector::default(),
                stratum_d: None,
            })
            .collect();
        Dataset {
            samples,
            source_graph_id: "synthetic".into(),
            seed: 0,
        }
    }

    #[test]
    fn path_cannot_be_balanced() {
        assert!(matches!(
            build_balanced_dataset(&path(3), 1, None),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn capped_four_cycle() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert!(build_balanced_dataset(&g, 1, None).is_err());
        let d = build_balanced_dataset(&g, 1, Some(2)).unwrap();
        assert_eq!(d.class_counts(), (2, 2));
        let negs: HashSet<Edge> = d
            .samples
            .iter()
            .filter(|s| !s.label.is_positive())
            .map(|s| (s.u, s.v))
            .collect();
        assert_eq!(negs, [(0, 2), (1, 3)].into());
    }

    #[test]
    fn labels_agree_with_graph() {
        let g = gnp(300, 0.02, 6);
        let d = build_balanced_dataset(&g, 3, None).unwrap();
        assert_eq!(d.class_counts(), (g.edge_count(), g.edge_count()));
        for s in &d.samples {
            assert_eq!(s.label.is_positive(), g.has_edge(s.u, s.v));
            assert_eq!(s.features, crate::metrics::features(&g, s.u, s.v).unwrap());
        }
        assert_eq!(d, build_balanced_dataset(&g, 3, None).unwrap());
    }

    #[test]
    fn imbalanced_shape() {
        let g = gnp(300, 0.02, 6);
        let shape = DatasetShape {
            positive_cap: Some(100),
            negatives_per_positive: 5,
        };
        assert_eq!(build_dataset(&g, 3, shape).unwrap().class_counts(), (100, 500));
    }

    #[test]
    fn split_arithmetic() {
        let s = split(&synthetic(4, 4), 0.75, 2).unwrap();
        assert_eq!(s.train.class_counts(), (3, 3));
        assert_eq!(s.test.class_counts(), (1, 1));
        assert_eq!(s, split(&synthetic(4, 4), 0.75, 2).unwrap());
        assert!(split(&synthetic(1, 1), 0.75, 2).is_err());
        assert!(split(&synthetic(4, 4), 1.0, 2).is_err());
    }

    #[test]
    fn large_split_stays_balanced_and_disjoint() {
        let s = split(&synthetic(10_000, 10_000), 0.75, 8).unwrap();
        assert_eq!(s.train.class_counts(), (7500, 7500));
        assert_eq!(s.test.class_counts(), (2500, 2500));
        assert!(s.train.pairs().is_disjoint(&s.test.pairs()));
    }
}
