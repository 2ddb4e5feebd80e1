//! Kernel-based node embeddings learned from biased random walks.

pub mod embeddings;
pub mod eval;
pub mod error;
pub mod graph;
pub mod io;
pub mod kernel;
pub mod manifest;
pub mod model;
pub mod sampling;
pub mod train;
pub mod walk;

pub use embeddings::Embeddings;
pub use error::{Error, Result};
pub use graph::{Graph, NodeId};
pub use kernel::{KernelFamily, KernelSpec};
pub use model::{EmbeddingModel, LossGradient};
pub use train::{train, TrainConfig, TrainReport};
pub use walk::{generate_walks, WalkConfig, WalkCorpus};
