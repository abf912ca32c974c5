use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{Dataset, EdgeSample, Label};
use crate::error::{Error, Result};
use crate::graph::IdMap;
use crate::metrics::FeatureVector;

pub const FEATURE_CSV_HEADER: &str = "u,v,label,common_neighbors,salton,lhn,sorensen,jaccard,hub,preferential_attachment,adamic_adar";

/// Sidecar describing a persisted dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub source_graph_id: String,
    pub seed: u64,
    pub counts: ClassCounts,
    /// Number of samples per distance stratum, keyed by hop count.
    pub strata: BTreeMap<u32, usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub positive: usize,
    pub negative: usize,
}

impl DatasetManifest {
    pub fn describe(dataset: &Dataset) -> Self {
        let (positive, negative) = dataset.class_counts();
        let mut strata = BTreeMap::new();
        for d in dataset.samples.iter().filter_map(|s| s.stratum_d) {
            *strata.entry(d).or_insert(0) += 1;
        }
        DatasetManifest {
            source_graph_id: dataset.source_graph_id.clone(),
            seed: dataset.seed,
            counts: ClassCounts { positive, negative },
            strata,
        }
    }
}

/// Writes one row per sample; node ids are translated through `ids` if given.
pub fn write_feature_csv(dataset: &Dataset, ids: Option<&IdMap>, mut w: impl Write) -> Result<()> {
    let io = |e| Error::io("<feature csv>", e);
    writeln!(w, "{FEATURE_CSV_HEADER}").map_err(io)?;
    for s in &dataset.samples {
        let (u, v) = match ids {
            Some(ids) => (ids.original(s.u), ids.original(s.v)),
            None => (s.u as u64, s.v as u64),
        };
        let label = u8::from(s.label.is_positive());
        write!(w, "{u},{v},{label}").map_err(io)?;
        for x in s.features.to_array() {
            write!(w, ",{x}").map_err(io)?;
        }
        writeln!(w).map_err(io)?;
    }
    Ok(())
}

pub fn read_feature_csv(reader: impl BufRead) -> Result<Vec<EdgeSample>> {
    let mut lines = reader.lines().enumerate();
    match lines.next() {
        Some((_, Ok(h))) if h.trim() == FEATURE_CSV_HEADER => {}
        Some((_, Err(e))) => return Err(Error::io("<feature csv>", e)),
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `{FEATURE_CSV_HEADER}`"),
            })
        }
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        let line = line.map_err(|e| Error::io("<feature csv>", e))?;
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: String| Error::Parse { line: line_no, message };
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != 11 {
            return Err(bad(format!("expected 11 fields, found {}", fields.len())));
        }
        let id = |s: &str| s.parse().map_err(|_| bad(format!("`{s}` is not a node id")));
        let u = id(fields[0])?;
        let v = id(fields[1])?;
        let label = match fields[2] {
            "1" => Label::Positive,
            "0" => Label::Negative,
            other => return Err(bad(format!("label must be 0 or 1, found `{other}`"))),
        };
        let mut values = [0.0; 8];
        for (slot, s) in values.iter_mut().zip(&fields[3..]) {
            *slot = s.parse().map_err(|_| bad(format!("`{s}` is not a number")))?;
        }
        out.push(EdgeSample {
            u,
            v,
            label,
            features: FeatureVector::from_array(values),
            stratum_d: None,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::build_balanced_dataset;
    use crate::graph::fixtures::gnp;

    #[test]
    fn csv_round_trip() {
        let g = gnp(80, 0.08, 2);
        let d = build_balanced_dataset(&g, 1, None).unwrap();
        let mut buf = Vec::new();
        write_feature_csv(&d, None, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(FEATURE_CSV_HEADER));
        assert_eq!(read_feature_csv(buf.as_slice()).unwrap(), d.samples);
    }

    #[test]
    fn bad_rows_are_located() {
        let text = format!("{FEATURE_CSV_HEADER}\n0,1,1,0,0,0,0,0,0,1,0\n0,2,2,0,0,0,0,0,0,1,0\n");
        assert!(matches!(
            read_feature_csv(text.as_bytes()),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(read_feature_csv("u,v\n".as_bytes()).is_err());
    }

    #[test]
    fn manifest_counts() {
        let g = gnp(80, 0.08, 2);
        let mut d = build_balanced_dataset(&g, 1, None).unwrap();
        d.samples[0].stratum_d = Some(3);
        let m = DatasetManifest::describe(&d);
        assert_eq!(m.counts.positive, g.edge_count());
        assert_eq!(m.strata.get(&3), Some(&1));
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<DatasetManifest>(&json).unwrap(), m);
    }
}
