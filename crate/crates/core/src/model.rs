//! Center/context embedding matrices and the per-pair kernel loss.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::kernel::KernelSpec;
use crate::sampling::stream_rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairLabel {
    Positive,
    Negative,
}

/// Row-major `n × d` center (`A`) and context (`B`) matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingModel {
    n: usize,
    dim: usize,
    centers: Vec<f64>,
    contexts: Vec<f64>,
    kernel: KernelSpec,
}

impl EmbeddingModel {
    /// Entries of both matrices i.i.d. uniform on `[-0.5/d, 0.5/d]`.
    pub fn init(n: usize, dim: usize, kernel: KernelSpec, seed: u64) -> Result<Self> {
        if n == 0 || dim == 0 {
            return Err(Error::InvalidArgument(format!(
                "model needs n >= 1 and d >= 1, got n = {n}, d = {dim}"
            )));
        }
        let mut rng = stream_rng(seed, u64::MAX);
        let half = 0.5 / dim as f64;
        let mut draw = |len| -> Vec<f64> {
            (0..len).map(|_| rng.random_range(-half..=half)).collect()
        };
        let centers = draw(n * dim);
        let contexts = draw(n * dim);
        Ok(EmbeddingModel {
            n,
            dim,
            centers,
            contexts,
            kernel,
        })
    }

    pub fn from_parts(
        n: usize,
        dim: usize,
        centers: Vec<f64>,
        contexts: Vec<f64>,
        kernel: KernelSpec,
    ) -> Result<Self> {
        if centers.len() != n * dim || contexts.len() != n * dim {
            return Err(Error::DimensionMismatch {
                left: centers.len().max(contexts.len()),
                right: n * dim,
            });
        }
        Ok(EmbeddingModel {
            n,
            dim,
            centers,
            contexts,
            kernel,
        })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kernel(&self) -> KernelSpec {
        self.kernel
    }

    pub fn center(&self, v: NodeId) -> &[f64] {
        let s = v as usize * self.dim;
        &self.centers[s..s + self.dim]
    }

    pub fn context(&self, u: NodeId) -> &[f64] {
        let s = u as usize * self.dim;
        &self.contexts[s..s + self.dim]
    }

    pub fn center_mut(&mut self, v: NodeId) -> &mut [f64] {
        let s = v as usize * self.dim;
        &mut self.centers[s..s + self.dim]
    }

    pub fn context_mut(&mut self, u: NodeId) -> &mut [f64] {
        let s = u as usize * self.dim;
        &mut self.contexts[s..s + self.dim]
    }

    /// The exported representation, row per node.
    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn contexts(&self) -> &[f64] {
        &self.contexts
    }

    pub fn is_finite(&self) -> bool {
        self.centers.iter().chain(&self.contexts).all(|x| x.is_finite())
    }

    /// `κ(A_v, B_u)`.
    pub fn similarity(&self, v: NodeId, u: NodeId) -> f64 {
        let r = row_distance(self.center(v), self.context(u));
        self.kernel.eval_r(r).0
    }

    /// `(1 − κ)²` for a positive pair, `κ²` for a negative one.
    pub fn pair_loss(&self, v: NodeId, u: NodeId, label: PairLabel) -> f64 {
        let k = self.similarity(v, u);
        match label {
            PairLabel::Positive => (1.0 - k) * (1.0 - k),
            PairLabel::Negative => k * k,
        }
    }

    /// One SGD step on the sampled loss of center `v` with context `positive`
    /// and the given negatives. All gradients are taken at the current
    /// parameters and applied together. Returns the loss before the step.
    pub fn sgd_step(
        &mut self,
        v: NodeId,
        positive: NodeId,
        negatives: &[NodeId],
        lr: f64,
        scratch: &mut StepScratch,
    ) -> Result<f64> {
        if !(lr > 0.0) {
            return Err(Error::InvalidArgument(format!("learning rate must be positive, got {lr}")));
        }
        let kernel = self.kernel;
        scratch.load_targets(positive, negatives);
        step(&mut self.dense_params(), &kernel, v, lr, scratch)
    }

    /// Sampled loss `(1 − κ(A_v, B_pos))² + Σ_neg κ(A_v, B_neg)²`.
    pub fn sampled_loss(&self, v: NodeId, positive: NodeId, negatives: &[NodeId]) -> f64 {
        self.pair_loss(v, positive, PairLabel::Positive)
            + negatives
                .iter()
                .map(|&u| self.pair_loss(v, u, PairLabel::Negative))
                .sum::<f64>()
    }

    /// Analytic gradient of [`Self::sampled_loss`], computed by the same
    /// code path as [`Self::sgd_step`] without modifying the model.
    pub fn sampled_loss_gradient(&self, v: NodeId, positive: NodeId, negatives: &[NodeId]) -> Result<LossGradient> {
        let mut scratch = StepScratch::new(self.dim, negatives.len());
        scratch.load_targets(positive, negatives);
        let mut rec = Recorder {
            model: self,
            grad: LossGradient {
                loss: 0.0,
                center: vec![0.0; self.dim],
                contexts: vec![0.0; self.node_count() * self.dim],
            },
        };
        rec.grad.loss = step(&mut rec, &self.kernel, v, 1.0, &mut scratch)?;
        Ok(rec.grad)
    }

    pub(crate) fn dense_params(&mut self) -> DenseParams<'_> {
        DenseParams {
            dim: self.dim,
            centers: &mut self.centers,
            contexts: &mut self.contexts,
        }
    }
}

#[inline]
pub(crate) fn row_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Reusable buffers for [`EmbeddingModel::sgd_step`].
#[derive(Debug, Default)]
pub struct StepScratch {
    targets: Vec<NodeId>,
    center: Vec<f64>,
    diffs: Vec<f64>,
    coefs: Vec<f64>,
    grad: Vec<f64>,
}

impl StepScratch {
    pub fn new(dim: usize, negatives: usize) -> Self {
        StepScratch {
            targets: Vec::with_capacity(negatives + 1),
            center: vec![0.0; dim],
            diffs: vec![0.0; dim * (negatives + 1)],
            coefs: Vec::with_capacity(negatives + 1),
            grad: vec![0.0; dim],
        }
    }

    pub(crate) fn load_targets(&mut self, positive: NodeId, negatives: &[NodeId]) {
        self.targets.clear();
        self.targets.push(positive);
        self.targets.extend_from_slice(negatives);
    }

    pub(crate) fn targets_mut(&mut self) -> &mut Vec<NodeId> {
        &mut self.targets
    }
}

/// Row storage the SGD step reads from and adds into.
pub(crate) trait Params {
    fn dim(&self) -> usize;
    fn read_center(&self, v: NodeId, dst: &mut [f64]);
    fn read_context(&self, u: NodeId, dst: &mut [f64]);
    /// `A_v += scale · src`
    fn add_center(&mut self, v: NodeId, scale: f64, src: &[f64]);
    /// `B_u += scale · src`
    fn add_context(&mut self, u: NodeId, scale: f64, src: &[f64]);
}

pub(crate) struct DenseParams<'a> {
    pub dim: usize,
    pub centers: &'a mut [f64],
    pub contexts: &'a mut [f64],
}

impl Params for DenseParams<'_> {
    #[inline]
    fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn read_center(&self, v: NodeId, dst: &mut [f64]) {
        let s = v as usize * self.dim;
        dst.copy_from_slice(&self.centers[s..s + self.dim]);
    }

    #[inline]
    fn read_context(&self, u: NodeId, dst: &mut [f64]) {
        let s = u as usize * self.dim;
        dst.copy_from_slice(&self.contexts[s..s + self.dim]);
    }

    #[inline]
    fn add_center(&mut self, v: NodeId, scale: f64, src: &[f64]) {
        let s = v as usize * self.dim;
        axpy(&mut self.centers[s..s + self.dim], scale, src);
    }

    #[inline]
    fn add_context(&mut self, u: NodeId, scale: f64, src: &[f64]) {
        let s = u as usize * self.dim;
        axpy(&mut self.contexts[s..s + self.dim], scale, src);
    }
}

/// Matrices shared between hogwild workers. Individual entries are read and
/// written atomically with relaxed ordering; concurrent updates to the same
/// row may be lost, which hogwild SGD tolerates.
pub(crate) struct SharedParams {
    pub dim: usize,
    pub centers: Vec<AtomicU64>,
    pub contexts: Vec<AtomicU64>,
}

impl SharedParams {
    pub fn from_model(model: &EmbeddingModel) -> Self {
        let conv = |v: &[f64]| v.iter().map(|x| AtomicU64::new(x.to_bits())).collect();
        SharedParams {
            dim: model.dim,
            centers: conv(&model.centers),
            contexts: conv(&model.contexts),
        }
    }

    pub fn write_back(&self, model: &mut EmbeddingModel) {
        for (dst, src) in model.centers.iter_mut().zip(&self.centers) {
            *dst = f64::from_bits(src.load(Ordering::Relaxed));
        }
        for (dst, src) in model.contexts.iter_mut().zip(&self.contexts) {
            *dst = f64::from_bits(src.load(Ordering::Relaxed));
        }
    }

    pub fn is_finite(&self) -> bool {
        self.centers
            .iter()
            .chain(&self.contexts)
            .all(|x| f64::from_bits(x.load(Ordering::Relaxed)).is_finite())
    }
}

/// A worker's handle on [`SharedParams`].
pub(crate) struct SharedView<'a>(pub &'a SharedParams);

fn read_atomic(src: &[AtomicU64], dst: &mut [f64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d = f64::from_bits(s.load(Ordering::Relaxed));
    }
}

fn add_atomic(dst: &[AtomicU64], scale: f64, src: &[f64]) {
    for (d, s) in dst.iter().zip(src) {
        let cur = f64::from_bits(d.load(Ordering::Relaxed));
        d.store((cur + scale * s).to_bits(), Ordering::Relaxed);
    }
}

impl Params for SharedView<'_> {
    fn dim(&self) -> usize {
        self.0.dim
    }

    fn read_center(&self, v: NodeId, dst: &mut [f64]) {
        let s = v as usize * self.0.dim;
        read_atomic(&self.0.centers[s..s + self.0.dim], dst);
    }

    fn read_context(&self, u: NodeId, dst: &mut [f64]) {
        let s = u as usize * self.0.dim;
        read_atomic(&self.0.contexts[s..s + self.0.dim], dst);
    }

    fn add_center(&mut self, v: NodeId, scale: f64, src: &[f64]) {
        let s = v as usize * self.0.dim;
        add_atomic(&self.0.centers[s..s + self.0.dim], scale, src);
    }

    fn add_context(&mut self, u: NodeId, scale: f64, src: &[f64]) {
        let s = u as usize * self.0.dim;
        add_atomic(&self.0.contexts[s..s + self.0.dim], scale, src);
    }
}

/// Gradient of the sampled loss for one center.
#[derive(Clone, Debug, PartialEq)]
pub struct LossGradient {
    pub loss: f64,
    /// With respect to `A_v`.
    pub center: Vec<f64>,
    /// With respect to all of `B`, row-major; rows not sampled are zero.
    pub contexts: Vec<f64>,
}

/// Reads from a model and records the updates of a unit-rate step, which
/// are exactly the negated gradients.
struct Recorder<'a> {
    model: &'a EmbeddingModel,
    grad: LossGradient,
}

impl Params for Recorder<'_> {
    fn dim(&self) -> usize {
        self.model.dim
    }

    fn read_center(&self, v: NodeId, dst: &mut [f64]) {
        dst.copy_from_slice(self.model.center(v));
    }

    fn read_context(&self, u: NodeId, dst: &mut [f64]) {
        dst.copy_from_slice(self.model.context(u));
    }

    fn add_center(&mut self, _v: NodeId, scale: f64, src: &[f64]) {
        axpy(&mut self.grad.center, -scale, src);
    }

    fn add_context(&mut self, u: NodeId, scale: f64, src: &[f64]) {
        let s = u as usize * self.model.dim;
        axpy(&mut self.grad.contexts[s..s + self.model.dim], -scale, src);
    }
}

#[inline]
fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Core update shared by the dense and hogwild paths. `scratch.targets`
/// holds the positive context first, then the negatives.
///
/// With `δ_t = A_v − B_t`, `r_t = ‖δ_t‖²` and `c_t = 2κ'(r_t)`, each term's
/// gradient is `g_t δ_t` w.r.t. `A_v` and `−g_t δ_t` w.r.t. `B_t`, where
/// `g = −2(1 − κ)c` for the positive and `g = 2κc` for negatives.
pub(crate) fn step<P: Params>(
    params: &mut P,
    kernel: &KernelSpec,
    v: NodeId,
    lr: f64,
    scratch: &mut StepScratch,
) -> Result<f64> {
    let dim = params.dim();
    let StepScratch {
        targets,
        center,
        diffs,
        coefs,
        grad,
    } = scratch;
    if diffs.len() < dim * targets.len() {
        diffs.resize(dim * targets.len(), 0.0);
    }
    center.resize(dim, 0.0);
    grad.resize(dim, 0.0);
    params.read_center(v, center);
    coefs.clear();

    let mut loss = 0.0;
    for (i, &t) in targets.iter().enumerate() {
        let diff = &mut diffs[i * dim..(i + 1) * dim];
        params.read_context(t, diff);
        let mut r = 0.0;
        for (d, &x) in diff.iter_mut().zip(center.iter()) {
            *d = x - *d;
            r += *d * *d;
        }
        let (k, c) = kernel.eval_r(r);
        let g = if i == 0 {
            loss += (1.0 - k) * (1.0 - k);
            -2.0 * (1.0 - k) * c
        } else {
            loss += k * k;
            2.0 * k * c
        };
        if !g.is_finite() {
            return Err(Error::Numerical(format!(
                "non-finite gradient for pair ({v}, {t}) with {kernel}; check the kernel parameter"
            )));
        }
        coefs.push(g);
    }

    grad.iter_mut().for_each(|x| *x = 0.0);
    for (i, &t) in targets.iter().enumerate() {
        let diff = &diffs[i * dim..(i + 1) * dim];
        let g = coefs[i];
        if g == 0.0 {
            continue;
        }
        axpy(grad, g, diff);
        // B_t -= lr · (−g δ_t)
        params.add_context(t, lr * g, diff);
    }
    params.add_center(v, -lr, grad);
    Ok(loss)
}
