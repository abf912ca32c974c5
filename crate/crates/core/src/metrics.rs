//! Neighborhood similarity indices used as link-prediction features.
//!
//! With φ(i) the neighbor set and k_i the degree of node i:
//!
//! | index                   | value                               |
//! |-------------------------|-------------------------------------|
//! | common neighbors        | \|φ(x) ∩ φ(y)\|                     |
//! | Salton                  | CN / √(k_x k_y)                     |
//! | Leicht–Holme–Newman     | CN / (k_x k_y)                      |
//! | Sørensen                | CN / (k_x + k_y)                    |
//! | Jaccard                 | CN / \|φ(x) ∪ φ(y)\|                |
//! | hub promoted            | CN / min(k_x, k_y)                  |
//! | preferential attachment | k_x k_y                             |
//! | Adamic–Adar             | Σ_{z ∈ φ(x) ∩ φ(y)} 1 / ln k_z      |
//!
//! Ratio indices are 0 whenever the pair has no common neighbor, which also
//! covers isolated endpoints.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    CommonNeighbors,
    Salton,
    Lhn,
    Sorensen,
    Jaccard,
    Hub,
    PreferentialAttachment,
    AdamicAdar,
}

impl Metric {
    pub const ALL: [Metric; 8] = [
        Metric::CommonNeighbors,
        Metric::Salton,
        Metric::Lhn,
        Metric::Sorensen,
        Metric::Jaccard,
        Metric::Hub,
        Metric::PreferentialAttachment,
        Metric::AdamicAdar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::CommonNeighbors => "common_neighbors",
            Metric::Salton => "salton",
            Metric::Lhn => "lhn",
            Metric::Sorensen => "sorensen",
            Metric::Jaccard => "jaccard",
            Metric::Hub => "hub",
            Metric::PreferentialAttachment => "preferential_attachment",
            Metric::AdamicAdar => "adamic_adar",
        }
    }

    /// Column position in [`FeatureVector::to_array`].
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::UnknownFeature(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub common_neighbors: f64,
    pub salton: f64,
    pub lhn: f64,
    pub sorensen: f64,
    pub jaccard: f64,
    pub hub: f64,
    pub preferential_attachment: f64,
    pub adamic_adar: f64,
}

impl FeatureVector {
    pub fn to_array(&self) -> [f64; 8] {
        [
            self.common_neighbors,
            self.salton,
            self.lhn,
            self.sorensen,
            self.jaccard,
            self.hub,
            self.preferential_attachment,
            self.adamic_adar,
        ]
    }

    pub fn from_array(a: [f64; 8]) -> Self {
        FeatureVector {
            common_neighbors: a[0],
            salton: a[1],
            lhn: a[2],
            sorensen: a[3],
            jaccard: a[4],
            hub: a[5],
            preferential_attachment: a[6],
            adamic_adar: a[7],
        }
    }

    pub fn get(&self, metric: Metric) -> f64 {
        self.to_array()[metric.index()]
    }
}

/// All eight indices for the pair `(x, y)`.
pub fn features(g: &Graph, x: NodeId, y: NodeId) -> Result<FeatureVector> {
    g.check_node(x)?;
    g.check_node(y)?;
    if x == y {
        return Err(Error::SelfPair(x));
    }
    Ok(features_unchecked(g, x, y))
}

pub(crate) fn features_unchecked(g: &Graph, x: NodeId, y: NodeId) -> FeatureVector {
    let (nx, ny) = (g.neighbors(x), g.neighbors(y));
    let (kx, ky) = (nx.len() as f64, ny.len() as f64);

    let mut common = 0usize;
    let mut adamic_adar = 0.0;
    let (mut i, mut j) = (0, 0);
    while i < nx.len() && j < ny.len() {
        match nx[i].cmp(&ny[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                // a common neighbor is adjacent to both x and y, so its degree is at least 2
                adamic_adar += 1.0 / (g.degree(nx[i]) as f64).ln();
                i += 1;
                j += 1;
            }
        }
    }

    let preferential_attachment = kx * ky;
    if common == 0 {
        return FeatureVector {
            preferential_attachment,
            ..FeatureVector::default()
        };
    }
    let cn = common as f64;
    FeatureVector {
        common_neighbors: cn,
        salton: cn / preferential_attachment.sqrt(),
        lhn: cn / preferential_attachment,
        sorensen: cn / (kx + ky),
        jaccard: cn / (kx + ky - cn),
        hub: cn / kx.min(ky),
        preferential_attachment,
        adamic_adar,
    }
}

/// [`features`] for every pair, in input order.
pub fn features_batch(g: &Graph, pairs: &[(NodeId, NodeId)]) -> Result<Vec<FeatureVector>> {
    for (index, &(x, y)) in pairs.iter().enumerate() {
        let check = g
            .check_node(x)
            .and_then(|_| g.check_node(y))
            .and_then(|_| if x == y { Err(Error::SelfPair(x)) } else { Ok(()) });
        if let Err(e) = check {
            return Err(Error::AtPair {
                index,
                source: Box::new(e),
            });
        }
    }
    Ok(pairs
        .par_iter()
        .map(|&(x, y)| features_unchecked(g, x, y))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    const LN2_INV: f64 = std::f64::consts::LOG2_E;

    fn assert_close(a: &FeatureVector, b: &FeatureVector, tol: f64) {
        for (x, y) in a.to_array().iter().zip(b.to_array()) {
            assert!((x - y).abs() <= tol, "{a:?} != {b:?}");
        }
    }

    /// Direct set-algebra evaluation of every index.
    pub(crate) fn oracle(g: &Graph, x: NodeId, y: NodeId) -> FeatureVector {
        let nx: BTreeSet<NodeId> = g.nodes().filter(|&v| g.has_edge(x, v)).collect();
        let ny: BTreeSet<NodeId> = g.nodes().filter(|&v| g.has_edge(y, v)).collect();
        let inter: BTreeSet<_> = nx.intersection(&ny).copied().collect();
        let union: BTreeSet<_> = nx.union(&ny).copied().collect();
        let (kx, ky, cn) = (nx.len() as f64, ny.len() as f64, inter.len() as f64);
        let ratio = |den: f64| if inter.is_empty() { 0.0 } else { cn / den };
        FeatureVector {
            common_neighbors: cn,
            salton: ratio((kx * ky).sqrt()),
            lhn: ratio(kx * ky),
            sorensen: ratio(kx + ky),
            jaccard: ratio(union.len() as f64),
            hub: ratio(kx.min(ky)),
            preferential_attachment: kx * ky,
            adamic_adar: inter
                .iter()
                .map(|&z| 1.0 / (g.nodes().filter(|&v| g.has_edge(z, v)).count() as f64).ln())
                .sum(),
        }
    }

    #[test]
    fn triangle_pair() {
        let f = features(&triangle(), 0, 1).unwrap();
        let expected = FeatureVector {
            common_neighbors: 1.0,
            salton: 0.5,
            lhn: 0.25,
            sorensen: 0.25,
            jaccard: 1.0 / 3.0,
            hub: 0.5,
            preferential_attachment: 4.0,
            adamic_adar: LN2_INV,
        };
        assert_close(&f, &expected, 1e-15);
        assert!((f.adamic_adar - std::f64::consts::LOG2_E).abs() < 1e-12);
    }

    #[test]
    fn path_end_points() {
        let f = features(&path(3), 0, 2).unwrap();
        let expected = FeatureVector {
            common_neighbors: 1.0,
            salton: 1.0,
            lhn: 1.0,
            sorensen: 0.5,
            jaccard: 1.0,
            hub: 1.0,
            preferential_attachment: 1.0,
            adamic_adar: LN2_INV,
        };
        assert_close(&f, &expected, 1e-15);
    }

    #[test]
    fn pair_without_common_neighbors() {
        let g = graph(6, &[(0, 1), (0, 2), (3, 4)]);
        let f = features(&g, 0, 3).unwrap();
        assert_eq!(
            f,
            FeatureVector {
                preferential_attachment: 2.0,
                ..Default::default()
            }
        );
        let isolated = features(&g, 0, 5).unwrap();
        assert_eq!(isolated, FeatureVector::default());
    }

    #[test]
    fn invalid_pairs() {
        assert!(matches!(features(&triangle(), 1, 1), Err(Error::SelfPair(1))));
        assert!(matches!(features(&triangle(), 0, 9), Err(Error::InvalidNode(9))));
        match features_batch(&triangle(), &[(0, 1), (2, 2)]) {
            Err(Error::AtPair { index: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn batch_preserves_order() {
        assert!(features_batch(&triangle(), &[]).unwrap().is_empty());
        let both = features_batch(&triangle(), &[(0, 1), (0, 2)]).unwrap();
        assert_eq!(both[0], both[1]);

        let g = gnp(300, 0.03, 2);
        let mut r = crate::rng::stream(1, "test-pairs");
        let pairs: Vec<(NodeId, NodeId)> = (0..1000)
            .map(|_| {
                use rand::Rng as _;
                let x = r.random_range(0..300);
                let y = (x + r.random_range(1..300)) % 300;
                (x, y)
            })
            .collect();
        let batch = features_batch(&g, &pairs).unwrap();
        for (f, &(x, y)) in batch.iter().zip(&pairs) {
            assert_eq!(*f, features(&g, x, y).unwrap());
        }
    }

    #[test]
    fn all_pairs_match_oracle() {
        for seed in 0..5 {
            let g = gnp(60, 0.1, seed);
            for x in g.nodes() {
                for y in x + 1..g.node_count() as NodeId {
                    assert_close(&features(&g, x, y).unwrap(), &oracle(&g, x, y), 1e-12);
                }
            }
        }
    }

    #[test]
    fn metric_names_round_trip() {
        for m in Metric::ALL {
            assert_eq!(m.name().parse::<Metric>().unwrap(), m);
            assert_eq!(FeatureVector::from_array([1., 2., 3., 4., 5., 6., 7., 8.]).get(m), (m.index() + 1) as f64);
        }
        assert!("katz".parse::<Metric>().is_err());
    }

    proptest! {
        #[test]
        fn index_invariants(seed in 0u64..500, p in 0.02f64..0.3) {
            let g = gnp(30, p, seed);
            for x in g.nodes() {
                for y in x + 1..30 {
                    let f = features(&g, x, y).unwrap();
                    prop_assert_eq!(f, features(&g, y, x).unwrap());
                    let (kx, ky) = (g.degree(x) as f64, g.degree(y) as f64);
                    prop_assert!(f.to_array().iter().all(|&v| v >= 0.0));
                    prop_assert!(f.common_neighbors <= kx.min(ky));
                    prop_assert!(f.sorensen <= 0.5);
                    prop_assert!(f.jaccard <= f.hub && f.hub <= 1.0);
                    for v in [f.salton, f.sorensen, f.jaccard] {
                        prop_assert!(v <= 1.0);
                    }
                    if f.common_neighbors == 0.0 {
                        prop_assert_eq!(f.salton + f.lhn + f.sorensen + f.jaccard + f.hub + f.adamic_adar, 0.0);
                    }
                    let same_nbrs = kx > 0.0 && g.neighbors(x) == g.neighbors(y);
                    prop_assert_eq!(f.jaccard == 1.0, same_nbrs);
                }
            }
        }

        #[test]
        fn unrelated_edges_do_not_change_features(seed in 0u64..300) {
            let g = gnp(40, 0.06, seed);
            let (x, y) = (0, 1);
            let mut touched: BTreeSet<NodeId> = [x, y].into();
            touched.extend(g.neighbors(x));
            touched.extend(g.neighbors(y));
            let free: Vec<NodeId> = g.nodes().filter(|v| !touched.contains(v)).collect();
            prop_assume!(free.len() >= 2);
            let (a, b) = (free[0], free[free.len() - 1]);
            let (h, _) = Graph::from_edges(40, g.edges().chain([(a, b)])).unwrap();
            prop_assert_eq!(features(&g, x, y).unwrap(), features(&h, x, y).unwrap());
        }
    }
}
