//! Downstream evaluation: node classification and link prediction.

pub mod classify;
pub mod labels;
pub mod linkpred;
pub mod logreg;
pub mod metrics;
pub mod split;

pub use classify::{run_classification, ClassifyConfig, RatioScore};
pub use labels::{load_labels, Labels};
pub use linkpred::{edge_features, run_link_prediction, LinkPredConfig, LinkPredResult};
pub use logreg::{LogReg, LogRegConfig};
pub use metrics::{auc, micro_f1};
pub use split::{split_edges, EdgeSplit};
