//! Link prediction on a held-out half of the edges.

use log::info;

use crate::error::{Error, Result};
use crate::eval::logreg::{BinaryLogReg, LogRegConfig};
use crate::eval::metrics::auc;
use crate::eval::split::{split_edges, EdgeSplit};
use crate::graph::{Graph, NodeId};
use crate::kernel::KernelSpec;
use crate::model::EmbeddingModel;
use crate::train::{train, TrainConfig, TrainReport};
use crate::walk::{generate_walks, WalkConfig};

/// Coordinate-wise squared difference `(x_i − y_i)²`.
pub fn edge_features(x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).collect())
}

fn feature_matrix(vectors: &[f64], dim: usize, pairs: &[(NodeId, NodeId)], out: &mut Vec<f64>) {
    for &(u, v) in pairs {
        let (u, v) = (u as usize, v as usize);
        let x = &vectors[u * dim..(u + 1) * dim];
        let y = &vectors[v * dim..(v + 1) * dim];
        out.extend(x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)));
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinkPredConfig {
    pub fraction: f64,
    pub allow_disconnect: bool,
    pub logreg: LogRegConfig,
    /// Seed of the edge split.
    pub seed: u64,
}

impl Default for LinkPredConfig {
    fn default() -> Self {
        LinkPredConfig {
            fraction: 0.5,
            allow_disconnect: false,
            logreg: LogRegConfig::default(),
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LinkPredResult {
    pub auc: f64,
    pub nodes: usize,
    pub edges: usize,
    pub test_pairs: usize,
    pub requested: usize,
    pub train_report: TrainReport,
}

/// Fits the edge classifier on the split's training pairs and returns the
/// AUC of its scores on the test pairs. `vectors` holds one `dim`-wide row
/// per node of the split graph.
pub fn score_split(split: &EdgeSplit, vectors: &[f64], dim: usize, cfg: &LogRegConfig) -> Result<f64> {
    let n = split.residual.node_count();
    if vectors.len() != n * dim {
        return Err(Error::DimensionMismatch {
            left: vectors.len(),
            right: n * dim,
        });
    }
    let mut xtr = Vec::new();
    feature_matrix(vectors, dim, &split.train_pos, &mut xtr);
    feature_matrix(vectors, dim, &split.train_neg, &mut xtr);
    let ytr: Vec<bool> = std::iter::repeat_n(true, split.train_pos.len())
        .chain(std::iter::repeat_n(false, split.train_neg.len()))
        .collect();
    let model = BinaryLogReg::fit(&xtr, dim, &ytr, cfg)?;

    let mut xte = Vec::new();
    feature_matrix(vectors, dim, &split.test_pos, &mut xte);
    feature_matrix(vectors, dim, &split.test_neg, &mut xte);
    let scores: Vec<f64> = xte.chunks_exact(dim).map(|r| model.decision(r)).collect();
    let yte: Vec<bool> = std::iter::repeat_n(true, split.test_pos.len())
        .chain(std::iter::repeat_n(false, split.test_neg.len()))
        .collect();
    auc(&scores, &yte)
}

/// Largest component, edge split, walks and training on the residual
/// graph, then the edge classifier on center-vector features.
pub fn run_link_prediction(
    g: &Graph,
    kernel: KernelSpec,
    walk_cfg: &WalkConfig,
    train_cfg: &TrainConfig,
    cfg: &LinkPredConfig,
) -> Result<LinkPredResult> {
    let lcc = g.largest_connected_component();
    let split = split_edges(&lcc, cfg.fraction, cfg.seed, cfg.allow_disconnect)?;
    let corpus = generate_walks(&split.residual, walk_cfg)?;
    let (model, report) = train(&corpus, train_cfg, kernel)?;
    let auc = score_model(&split, &model, &cfg.logreg)?;
    info!(
        "link prediction: {} nodes, {} test pairs, AUC {auc:.4}",
        lcc.node_count(),
        split.test_pos.len()
    );
    Ok(LinkPredResult {
        auc,
        nodes: lcc.node_count(),
        edges: lcc.edge_count(),
        test_pairs: split.test_pos.len(),
        requested: split.requested,
        train_report: report,
    })
}

pub fn score_model(split: &EdgeSplit, model: &EmbeddingModel, cfg: &LogRegConfig) -> Result<f64> {
    score_split(split, model.centers(), model.dim(), cfg)
}
