//! Node label files: one `node_token class_token` line per labeled node.

use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Single-label class assignment for a subset of a graph's nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct Labels {
    pub nodes: Vec<NodeId>,
    /// Class id per entry of `nodes`, indexing `class_names`.
    pub classes: Vec<usize>,
    /// Sorted distinct class tokens.
    pub class_names: Vec<String>,
}

impl Labels {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn class_count(&self) -> usize {
        self.class_names.len()
    }

    /// Fraction of the most common class.
    pub fn majority_prior(&self) -> f64 {
        let mut counts = vec![0usize; self.class_count()];
        for &c in &self.classes {
            counts[c] += 1;
        }
        counts.into_iter().max().unwrap_or(0) as f64 / self.len().max(1) as f64
    }
}

pub fn load_labels(path: impl AsRef<Path>, graph: &Graph) -> Result<Labels> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_labels(BufReader::new(file), path, graph)
}

pub fn parse_labels<R: BufRead>(reader: R, path: &Path, graph: &Graph) -> Result<Labels> {
    let mut raw: Vec<(NodeId, String)> = Vec::new();
    let mut seen: HashMap<NodeId, usize> = HashMap::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with('%') {
            continue;
        }
        let mut parts = t.split_whitespace();
        let (Some(tok), Some(class)) = (parts.next(), parts.next()) else {
            return Err(Error::parse(path, lineno, "expected `node class`"));
        };
        let v = graph.node_id(tok).ok_or_else(|| {
            Error::Data(format!("{}:{lineno}: labeled node {tok:?} is not in the graph", path.display()))
        })?;
        if let Some(prev) = seen.insert(v, lineno) {
            return Err(Error::Data(format!(
                "{}:{lineno}: node {tok:?} already labeled on line {prev}; multi-label data is not supported",
                path.display()
            )));
        }
        raw.push((v, class.to_owned()));
    }
    if raw.is_empty() {
        return Err(Error::Data(format!("{}: no labels", path.display())));
    }
    let class_names: Vec<String> = raw.iter().map(|r| r.1.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    let index: HashMap<&str, usize> = class_names.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
    let classes = raw.iter().map(|r| index[r.1.as_str()]).collect();
    Ok(Labels {
        nodes: raw.iter().map(|r| r.0).collect(),
        classes,
        class_names,
    })
}
