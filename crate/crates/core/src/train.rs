//! Negative-sampling SGD over the walk corpus.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use log::{debug, info};

use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::kernel::KernelSpec;
use crate::model::{step, DenseParams, EmbeddingModel, Params, SharedParams, SharedView, StepScratch};
use crate::sampling::{stream_rng, AliasTable, KneRng};
use crate::walk::{occurrence_frequencies, WalkCorpus};

/// Stream ids for training workers, disjoint from those used by walks.
const TRAIN_STREAM_BASE: u64 = 1 << 40;

/// Exponent applied to context frequencies in the noise distribution.
pub const NOISE_EXPONENT: f64 = 0.75;

/// Pairs per loss-reporting block; model finiteness is checked at the same
/// cadence.
pub const LOSS_BLOCK: usize = 100_000;

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub dim: usize,
    pub negatives: usize,
    pub lr0: f64,
    /// Floor of the linear decay; `None` means `lr0 · 1e-4`.
    pub lr_min: Option<f64>,
    pub epochs: usize,
    /// Center/context window; normally the walk window.
    pub window: usize,
    pub seed: u64,
    pub threads: usize,
    /// Single worker, corpus order: bit-reproducible output.
    pub deterministic: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 128,
            negatives: 5,
            lr0: 0.025,
            lr_min: None,
            epochs: 1,
            window: 10,
            seed: 0,
            threads: 1,
            deterministic: true,
        }
    }
}

impl TrainConfig {
    pub fn lr_floor(&self) -> f64 {
        self.lr_min.unwrap_or(self.lr0 * 1e-4)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.dim < 1 {
            return bad("dimension must be at least 1".into());
        }
        if !(self.lr0 > self.lr_floor() && self.lr_floor() > 0.0) {
            return bad(format!(
                "need lr0 > lr_min > 0, got lr0 = {}, lr_min = {}",
                self.lr0,
                self.lr_floor()
            ));
        }
        if self.epochs < 1 {
            return bad("epochs must be at least 1".into());
        }
        if self.window < 1 {
            return bad("window must be at least 1".into());
        }
        if self.threads < 1 {
            return bad("threads must be at least 1".into());
        }
        Ok(())
    }

    fn workers(&self) -> usize {
        if self.deterministic {
            1
        } else {
            self.threads
        }
    }
}

/// Draws nodes with probability proportional to `freq^0.75`.
#[derive(Clone, Debug)]
pub struct NegativeSampler {
    table: AliasTable,
}

impl NegativeSampler {
    pub fn new(freq: &[u64]) -> Result<Self> {
        if freq.iter().all(|&f| f == 0) {
            return Err(Error::Data("all context frequencies are zero".into()));
        }
        let weights: Vec<f64> = freq.iter().map(|&f| (f as f64).powf(NOISE_EXPONENT)).collect();
        Ok(NegativeSampler {
            table: AliasTable::new(&weights)?,
        })
    }

    #[inline]
    pub fn sample(&self, rng: &mut KneRng) -> NodeId {
        self.table.sample(rng) as NodeId
    }

    /// Appends `k` independent draws to `out`.
    pub fn draw(&self, k: usize, rng: &mut KneRng, out: &mut Vec<NodeId>) {
        out.extend((0..k).map(|_| self.sample(rng)));
    }

    pub fn pmf(&self) -> Vec<f64> {
        self.table.pmf()
    }
}

/// Training diagnostics.
#[derive(Clone, Debug, Default)]
pub struct TrainReport {
    pub pairs: u64,
    /// Mean sampled loss per pair, one entry per epoch.
    pub epoch_losses: Vec<f64>,
    /// Mean sampled loss over consecutive blocks of [`LOSS_BLOCK`] pairs, in
    /// processing order (per worker, concatenated, when parallel).
    pub loss_trace: Vec<f64>,
    pub seconds: f64,
}

impl TrainReport {
    pub fn mean_loss(&self) -> f64 {
        if self.epoch_losses.is_empty() {
            return f64::NAN;
        }
        self.epoch_losses.iter().sum::<f64>() / self.epoch_losses.len() as f64
    }
}

/// Linear decay in the number of processed center positions, clamped below.
#[inline]
fn learning_rate(cfg: &TrainConfig, processed: usize, total: usize) -> f64 {
    let lr = cfg.lr0 * (1.0 - processed as f64 / total as f64);
    lr.max(cfg.lr_floor())
}

struct LossMeter {
    block_sum: f64,
    block_pairs: usize,
    epoch_sum: f64,
    epoch_pairs: u64,
    trace: Vec<f64>,
}

impl LossMeter {
    fn new() -> Self {
        LossMeter {
            block_sum: 0.0,
            block_pairs: 0,
            epoch_sum: 0.0,
            epoch_pairs: 0,
            trace: Vec::new(),
        }
    }

    /// Returns true when a block just closed.
    #[inline]
    fn record(&mut self, loss: f64) -> bool {
        self.block_sum += loss;
        self.block_pairs += 1;
        self.epoch_sum += loss;
        self.epoch_pairs += 1;
        if self.block_pairs == LOSS_BLOCK {
            self.flush_block();
            true
        } else {
            false
        }
    }

    fn flush_block(&mut self) {
        if self.block_pairs > 0 {
            self.trace.push(self.block_sum / self.block_pairs as f64);
            self.block_sum = 0.0;
            self.block_pairs = 0;
        }
    }

    fn take_epoch(&mut self) -> (f64, u64) {
        let out = (self.epoch_sum, self.epoch_pairs);
        self.epoch_sum = 0.0;
        self.epoch_pairs = 0;
        out
    }
}

/// Runs one worker over `walks` (a range of walk indices) for one epoch.
#[allow(clippy::too_many_arguments)]
fn run_walks<P: Params>(
    params: &mut P,
    corpus: &WalkCorpus,
    walks: std::ops::Range<usize>,
    cfg: &TrainConfig,
    kernel: &KernelSpec,
    sampler: &NegativeSampler,
    rng: &mut KneRng,
    processed: &AtomicUsize,
    total: usize,
    meter: &mut LossMeter,
    finite: &dyn Fn(&P) -> bool,
) -> Result<()> {
    let mut scratch = StepScratch::new(cfg.dim, cfg.negatives);
    for wi in walks {
        let w = corpus.walk(wi);
        for l in 0..w.len() {
            let done = processed.fetch_add(1, Ordering::Relaxed);
            let lr = learning_rate(cfg, done, total);
            let lo = l.saturating_sub(cfg.window);
            let hi = (l + cfg.window).min(w.len() - 1);
            for k in lo..=hi {
                if k == l {
                    continue;
                }
                let targets = scratch.targets_mut();
                targets.clear();
                targets.push(w[k]);
                sampler.draw(cfg.negatives, rng, targets);
                let loss = step(params, kernel, w[l], lr, &mut scratch)?;
                if meter.record(loss) && !finite(params) {
                    return Err(Error::Numerical(format!(
                        "non-finite embedding entries after {} pairs",
                        meter.trace.len() * LOSS_BLOCK
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Learns center and context embeddings from `corpus`.
///
/// Streams the (center, context) pairs of every walk, draws `k` negatives
/// per pair from the `freq^0.75` noise distribution and applies one
/// [`EmbeddingModel::sgd_step`]. In deterministic mode a single worker visits
/// the corpus in order; otherwise walks are sharded over `threads` hogwild
/// workers updating shared parameters without locks.
pub fn train(
    corpus: &WalkCorpus,
    cfg: &TrainConfig,
    kernel: KernelSpec,
) -> Result<(EmbeddingModel, TrainReport)> {
    cfg.validate()?;
    let n = corpus.node_count();
    let freq = occurrence_frequencies(corpus, cfg.window);
    let sampler = NegativeSampler::new(&freq)?;
    let mut model = EmbeddingModel::init(n, cfg.dim, kernel, cfg.seed)?;
    let total = corpus.position_count() * cfg.epochs;
    let processed = AtomicUsize::new(0);
    let workers = cfg.workers().min(corpus.len().max(1));
    let started = Instant::now();
    let mut report = TrainReport::default();

    if workers == 1 {
        let mut rng = stream_rng(cfg.seed, TRAIN_STREAM_BASE);
        let mut meter = LossMeter::new();
        for epoch in 0..cfg.epochs {
            let mut params = model.dense_params();
            run_walks(
                &mut params,
                corpus,
                0..corpus.len(),
                cfg,
                &kernel,
                &sampler,
                &mut rng,
                &processed,
                total,
                &mut meter,
                &|p: &DenseParams| p.centers.iter().chain(p.contexts.iter()).all(|x| x.is_finite()),
            )?;
            let (sum, pairs) = meter.take_epoch();
            report.pairs += pairs;
            report.epoch_losses.push(sum / pairs.max(1) as f64);
            debug!("epoch {epoch}: mean loss {:.6}", sum / pairs.max(1) as f64);
        }
        meter.flush_block();
        report.loss_trace = meter.trace;
    } else {
        let shared = SharedParams::from_model(&model);
        let chunk = corpus.len().div_ceil(workers);
        let mut meters: Vec<LossMeter> = (0..workers).map(|_| LossMeter::new()).collect();
        let mut rngs: Vec<KneRng> = (0..workers).map(|w| stream_rng(cfg.seed, TRAIN_STREAM_BASE + w as u64)).collect();
        for epoch in 0..cfg.epochs {
            let results: Vec<Result<()>> = std::thread::scope(|s| {
                let handles: Vec<_> = meters
                    .iter_mut()
                    .zip(rngs.iter_mut())
                    .enumerate()
                    .map(|(w, (meter, rng))| {
                        let range = (w * chunk).min(corpus.len())..((w + 1) * chunk).min(corpus.len());
                        let shared = &shared;
                        let sampler = &sampler;
                        let processed = &processed;
                        let kernel = &kernel;
                        s.spawn(move || {
                            let mut view = SharedView(shared);
                            run_walks(
                                &mut view,
                                corpus,
                                range,
                                cfg,
                                kernel,
                                sampler,
                                rng,
                                processed,
                                total,
                                meter,
                                &|p: &SharedView| p.0.is_finite(),
                            )
                        })
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().expect("training worker panicked")).collect()
            });
            results.into_iter().collect::<Result<Vec<()>>>()?;
            let (sum, pairs) = meters.iter_mut().map(LossMeter::take_epoch).fold((0.0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
            report.pairs += pairs;
            report.epoch_losses.push(sum / pairs.max(1) as f64);
            debug!("epoch {epoch}: mean loss {:.6}", sum / pairs.max(1) as f64);
        }
        for mut m in meters {
            m.flush_block();
            report.loss_trace.extend(m.trace);
        }
        shared.write_back(&mut model);
    }

    report.seconds = started.elapsed().as_secs_f64();
    if !model.is_finite() {
        return Err(Error::Numerical("training produced non-finite embeddings".into()));
    }
    info!(
        "trained {} pairs in {:.1}s, mean loss {:.6}",
        report.pairs,
        report.seconds,
        report.mean_loss()
    );
    Ok((model, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::walk::{generate_walks, WalkConfig};

    fn tv(counts: &[u64], pmf: &[f64]) -> f64 {
        let total: u64 = counts.iter().sum();
        counts
            .iter()
            .zip(pmf)
            .map(|(&c, &p)| (c as f64 / total as f64 - p).abs())
            .sum::<f64>()
            / 2.0
    }

    #[test]
    fn noise_pmf_is_freq_to_three_quarters() {
        let freq = [16, 1, 0, 81];
        let s = NegativeSampler::new(&freq).unwrap();
        let w = [8.0, 1.0, 0.0, 27.0];
        for (p, wi) in s.pmf().iter().zip(w) {
            assert!((p - wi / 36.0).abs() < 1e-12);
        }
        assert!(NegativeSampler::new(&[0, 0]).is_err());
    }

    #[test]
    fn sixteen_to_one_draws_eight_to_one() {
        let s = NegativeSampler::new(&[16, 1]).unwrap();
        let mut rng = stream_rng(3, 0);
        let mut counts = [0u64; 2];
        for _ in 0..1_000_000 {
            counts[s.sample(&mut rng) as usize] += 1;
        }
        let ratio = counts[0] as f64 / counts[1] as f64;
        assert!((ratio / 8.0 - 1.0).abs() < 0.02, "ratio {ratio}");
        assert!(tv(&counts, &s.pmf()) < 0.01);
    }

    #[test]
    fn learning_rate_decays_linearly_to_floor() {
        let cfg = TrainConfig::default();
        assert_eq!(learning_rate(&cfg, 0, 100), 0.025);
        assert!((learning_rate(&cfg, 50, 100) - 0.0125).abs() < 1e-15);
        assert_eq!(learning_rate(&cfg, 100, 100), 0.025 * 1e-4);
        assert_eq!(learning_rate(&cfg, 1000, 100), 0.025 * 1e-4);
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        for bad in [
            TrainConfig { dim: 0, ..Default::default() },
            TrainConfig { lr0: 0.0, ..Default::default() },
            TrainConfig { lr_min: Some(1.0), ..Default::default() },
            TrainConfig { epochs: 0, ..Default::default() },
            TrainConfig { window: 0, ..Default::default() },
            TrainConfig { threads: 0, ..Default::default() },
        ] {
            assert!(matches!(bad.validate(), Err(Error::InvalidArgument(_))), "{bad:?}");
        }
    }

    /// Two 10-cliques joined by a single edge.
    fn two_cliques() -> Graph {
        let mut edges = Vec::new();
        for c in 0..2u32 {
            for i in 0..10 {
                for j in i + 1..10 {
                    edges.push((c * 10 + i, c * 10 + j));
                }
            }
        }
        edges.push((0, 10));
        Graph::from_edges((0..20).map(|i| i.to_string()).collect(), &edges).unwrap()
    }

    fn small_run(kernel: KernelSpec, seed: u64) -> (EmbeddingModel, TrainReport) {
        let g = two_cliques();
        let walks = WalkConfig { walks_per_node: 20, seed, ..Default::default() };
        let corpus = generate_walks(&g, &walks).unwrap();
        let cfg = TrainConfig { dim: 8, seed, epochs: 3, ..Default::default() };
        train(&corpus, &cfg, kernel).unwrap()
    }

    #[test]
    fn cliques_separate() {
        for kernel in [KernelSpec::gauss(2.0).unwrap(), KernelSpec::sch(1.0).unwrap()] {
            let (m, _) = small_run(kernel, 4);
            let (mut intra, mut inter) = ((0.0, 0), (0.0, 0));
            for u in 0..20u32 {
                for v in 0..20u32 {
                    if u == v {
                        continue;
                    }
                    let k = kernel.eval(m.center(u), m.center(v)).unwrap();
                    if (u < 10) == (v < 10) {
                        intra = (intra.0 + k, intra.1 + 1);
                    } else {
                        inter = (inter.0 + k, inter.1 + 1);
                    }
                }
            }
            assert!(intra.0 / intra.1 as f64 > inter.0 / inter.1 as f64, "{kernel}");
        }
    }

    #[test]
    fn sampled_loss_falls() {
        let (_, report) = small_run(KernelSpec::gauss(2.0).unwrap(), 1);
        let e = &report.epoch_losses;
        assert_eq!(e.len(), 3);
        assert!(e[2] < e[0], "{e:?}");
        assert_eq!(report.pairs as usize, 3 * context_pairs_of(20, 20, 10, 10));
    }

    /// Pairs in `walks` full-length walks of length `len` with window `w`.
    fn context_pairs_of(nodes: usize, walks: usize, len: usize, w: usize) -> usize {
        let per_walk: usize = (0..len).map(|l| crate::walk::contexts_at(l, len, w)).sum();
        nodes * walks * per_walk
    }

    #[test]
    fn deterministic_mode_is_reproducible() {
        let k = KernelSpec::sch(2.0).unwrap();
        let (a, _) = small_run(k, 9);
        let (b, _) = small_run(k, 9);
        assert_eq!(a, b);
        let (c, _) = small_run(k, 10);
        assert_ne!(a, c);
    }

    #[test]
    fn parallel_training_runs() {
        let g = two_cliques();
        let corpus = generate_walks(&g, &WalkConfig { walks_per_node: 10, ..Default::default() }).unwrap();
        let cfg = TrainConfig { dim: 8, threads: 3, deterministic: false, ..Default::default() };
        let (m, report) = train(&corpus, &cfg, KernelSpec::gauss(1.0).unwrap()).unwrap();
        assert!(m.is_finite());
        assert_eq!(report.pairs as usize, context_pairs_of(20, 10, 10, 10));
    }
}
