//! Edge-list text format: one edge per line, two integer ids separated by a
//! tab or spaces, `#` starting a comment line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{BuildReport, Graph, NodeId};
use crate::error::{Error, Result};

/// Mapping between dense node ids and the ids found in the input file.
/// Dense id `i` is the `i`-th smallest original id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdMap {
    original: Vec<u64>,
}

impl IdMap {
    pub fn identity(n: usize) -> Self {
        IdMap {
            original: (0..n as u64).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.original.len()
    }

    pub fn is_empty(&self) -> bool {
        self.original.is_empty()
    }

    pub fn original(&self, dense: NodeId) -> u64 {
        self.original[dense as usize]
    }

    pub fn dense(&self, original: u64) -> Option<NodeId> {
        self.original
            .binary_search(&original)
            .ok()
            .map(|i| i as NodeId)
    }

    pub fn write(&self, mut w: impl Write) -> std::io::Result<()> {
        for (dense, original) in self.original.iter().enumerate() {
            writeln!(w, "{dense}\t{original}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct LoadReport {
    pub lines: usize,
    pub self_loops: usize,
    pub duplicates: usize,
}

#[derive(Clone, Debug)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub ids: IdMap,
    pub report: LoadReport,
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<LoadedGraph> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(BufReader::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

pub fn parse_edge_list(reader: impl BufRead) -> Result<LoadedGraph> {
    let mut raw = Vec::new();
    let mut lines = 0;
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io("<input>", e))?;
        let line_no = i + 1;
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        lines += 1;
        let mut fields = body.split_whitespace();
        let mut next = |what: &str| -> Result<u64> {
            let field = fields.next().ok_or_else(|| Error::Parse {
                line: line_no,
                message: format!("missing {what} node id"),
            })?;
            field.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("`{field}` is not a non-negative integer node id"),
            })
        };
        let u = next("source")?;
        let v = next("target")?;
        if fields.next().is_some() {
            return Err(Error::Parse {
                line: line_no,
                message: "expected exactly two node ids".into(),
            });
        }
        raw.push((u, v));
    }

    let mut original: Vec<u64> = raw.iter().flat_map(|&(u, v)| [u, v]).collect();
    original.sort_unstable();
    original.dedup();
    let ids = IdMap { original };
    let dense = |x: u64| ids.dense(x).expect("id collected above");
    let (graph, BuildReport { self_loops, duplicates }) =
        Graph::from_edges(ids.len(), raw.iter().map(|&(u, v)| (dense(u), dense(v))))?;
    if graph.edge_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    Ok(LoadedGraph {
        graph,
        ids,
        report: LoadReport {
            lines,
            self_loops,
            duplicates,
        },
    })
}

/// Writes `g` as a tab-separated edge list using the original ids from `ids`
/// when given.
pub fn write_edge_list(g: &Graph, ids: Option<&IdMap>, w: impl Write) -> std::io::Result<()> {
    let mut w = BufWriter::new(w);
    writeln!(w, "# nodes: {} edges: {}", g.node_count(), g.edge_count())?;
    for (u, v) in g.edges() {
        match ids {
            Some(ids) => writeln!(w, "{}\t{}", ids.original(u), ids.original(v))?,
            None => writeln!(w, "{u}\t{v}")?,
        }
    }
    w.flush()
}
