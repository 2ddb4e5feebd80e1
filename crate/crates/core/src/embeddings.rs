//! word2vec-compatible text embeddings: a `n d` header, then one
//! `token v_1 ... v_d` line per node.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::EmbeddingModel;

/// A token-indexed dense matrix, row per node.
#[derive(Clone, Debug, PartialEq)]
pub struct Embeddings {
    pub tokens: Vec<String>,
    pub dim: usize,
    pub data: Vec<f64>,
}

impl Embeddings {
    /// Center vectors of `model`, labelled with `graph`'s tokens.
    pub fn from_model(model: &EmbeddingModel, tokens: &[String]) -> Result<Self> {
        if tokens.len() != model.node_count() {
            return Err(Error::DimensionMismatch {
                left: tokens.len(),
                right: model.node_count(),
            });
        }
        Ok(Embeddings {
            tokens: tokens.to_vec(),
            dim: model.dim(),
            data: model.centers().to_vec(),
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Rows reordered to match `graph`'s internal ids.
    pub fn aligned_to(&self, graph: &Graph) -> Result<Embeddings> {
        let mut data = vec![0.0; graph.node_count() * self.dim];
        let mut seen = vec![false; graph.node_count()];
        for (i, tok) in self.tokens.iter().enumerate() {
            if let Some(v) = graph.node_id(tok) {
                let v = v as usize;
                data[v * self.dim..(v + 1) * self.dim].copy_from_slice(self.row(i));
                seen[v] = true;
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::Data(format!(
                "no embedding for node {:?}",
                graph.token(v as u32)
            )));
        }
        Ok(Embeddings {
            tokens: graph.tokens().to_vec(),
            dim: self.dim,
            data,
        })
    }

    pub fn write<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.len(), self.dim)?;
        let mut line = String::new();
        for (i, tok) in self.tokens.iter().enumerate() {
            line.clear();
            line.push_str(tok);
            for &x in self.row(i) {
                line.push(' ');
                line.push_str(&format_sig9(x));
            }
            line.push('\n');
            out.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::parse(BufReader::new(file), path)
    }

    pub fn parse<R: BufRead>(reader: R, path: &Path) -> Result<Self> {
        let mut lines = reader.lines();
        let header = match lines.next() {
            Some(l) => l.map_err(|e| Error::io(path, e))?,
            None => return Err(Error::parse(path, 1, "missing header")),
        };
        let fields: Vec<&str> = header.split_whitespace().collect();
        let (n, dim) = match fields.as_slice() {
            [n, d] => match (n.parse::<usize>(), d.parse::<usize>()) {
                (Ok(n), Ok(d)) if d > 0 => (n, d),
                _ => return Err(Error::parse(path, 1, format!("malformed header {header:?}"))),
            },
            _ => return Err(Error::parse(path, 1, format!("malformed header {header:?}"))),
        };
        let mut tokens = Vec::with_capacity(n);
        let mut data = Vec::with_capacity(n * dim);
        for (i, line) in lines.enumerate() {
            let lineno = i + 2;
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let tok = parts.next().unwrap();
            let before = data.len();
            for p in parts {
                let x: f64 = p
                    .parse()
                    .map_err(|_| Error::parse(path, lineno, format!("bad value {p:?}")))?;
                data.push(x);
            }
            if data.len() - before != dim {
                return Err(Error::parse(
                    path,
                    lineno,
                    format!("expected {dim} values, found {}", data.len() - before),
                ));
            }
            tokens.push(tok.to_owned());
        }
        if tokens.len() != n {
            return Err(Error::Data(format!(
                "{}: header promises {n} rows, found {}",
                path.display(),
                tokens.len()
            )));
        }
        Ok(Embeddings { tokens, dim, data })
    }
}

/// Shortest `%.9g`-style rendering: nine significant digits.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    let s = if (-5..9).contains(&exp) {
        let decimals = (8 - exp) as usize;
        let mut s = format!("{x:.decimals$}");
        if s.contains('.') {
            while s.ends_with('0') {
                s.pop();
            }
            if s.ends_with('.') {
                s.pop();
            }
        }
        s
    } else {
        format!("{x:.8e}")
    };
    s
}
