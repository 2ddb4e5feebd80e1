//! Node classification from center embeddings.

use log::warn;
use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::embeddings::Embeddings;
use crate::error::{Error, Result};
use crate::eval::labels::Labels;
use crate::eval::logreg::{LogReg, LogRegConfig};
use crate::eval::metrics::micro_f1;
use crate::sampling::stream_rng;

/// Training fractions matching the usual reporting grid.
pub const DEFAULT_RATIOS: [f64; 9] = [0.02, 0.04, 0.06, 0.08, 0.10, 0.30, 0.50, 0.70, 0.90];

#[derive(Clone, Debug, PartialEq)]
pub struct ClassifyConfig {
    pub ratios: Vec<f64>,
    pub repeats: usize,
    pub logreg: LogRegConfig,
    pub seed: u64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            ratios: DEFAULT_RATIOS.to_vec(),
            repeats: 50,
            logreg: LogRegConfig::default(),
            seed: 0,
        }
    }
}

impl ClassifyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ratios.is_empty() {
            return Err(Error::InvalidArgument("no training ratios given".into()));
        }
        if let Some(r) = self.ratios.iter().find(|&&r| !(r > 0.0 && r < 1.0)) {
            return Err(Error::InvalidArgument(format!("training ratio must lie in (0, 1), got {r}")));
        }
        if self.repeats == 0 {
            return Err(Error::InvalidArgument("repeats must be at least 1".into()));
        }
        self.logreg.validate()
    }
}

/// Micro-F1 summary for one training ratio.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioScore {
    pub ratio: f64,
    pub mean: f64,
    /// Sample standard deviation over repeats (0 for a single repeat).
    pub std: f64,
    pub scores: Vec<f64>,
    /// Repeats whose training split missed at least one class.
    pub incomplete_repeats: usize,
}

impl RatioScore {
    pub fn std_error(&self) -> f64 {
        self.std / (self.scores.len() as f64).sqrt()
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// For each ratio, `repeats` uniform splits of the labeled nodes into a
/// training part of `round(ratio · L)` nodes and a test part; a one-vs-rest
/// classifier is fitted on the training rows and scored on the rest.
///
/// `embeddings` must be aligned to the graph the labels were loaded against.
/// Repeats run in parallel, each with its own RNG stream.
pub fn run_classification(embeddings: &Embeddings, labels: &Labels, cfg: &ClassifyConfig) -> Result<Vec<RatioScore>> {
    cfg.validate()?;
    let dim = embeddings.dim;
    let total = labels.len();
    if total < 2 {
        return Err(Error::Data("need at least two labeled nodes".into()));
    }
    let mut x = Vec::with_capacity(total * dim);
    for &v in &labels.nodes {
        let row = embeddings
            .data
            .get(v as usize * dim..(v as usize + 1) * dim)
            .ok_or_else(|| Error::Data(format!("labeled node id {v} has no embedding row")))?;
        x.extend_from_slice(row);
    }
    let k = labels.class_count();

    let mut out = Vec::with_capacity(cfg.ratios.len());
    for (ri, &ratio) in cfg.ratios.iter().enumerate() {
        let n_train = ((ratio * total as f64).round() as usize).clamp(1, total - 1);
        let runs: Vec<Result<(f64, bool)>> = (0..cfg.repeats)
            .into_par_iter()
            .map(|rep| {
                let mut rng = stream_rng(cfg.seed, ((ri as u64) << 32) | rep as u64);
                let mut order: Vec<usize> = (0..total).collect();
                order.shuffle(&mut rng);
                let (train, test) = order.split_at(n_train);
                let gather = |idx: &[usize]| -> (Vec<f64>, Vec<usize>) {
                    let mut xs = Vec::with_capacity(idx.len() * dim);
                    let mut ys = Vec::with_capacity(idx.len());
                    for &i in idx {
                        xs.extend_from_slice(&x[i * dim..(i + 1) * dim]);
                        ys.push(labels.classes[i]);
                    }
                    (xs, ys)
                };
                let (xtr, ytr) = gather(train);
                let (xte, yte) = gather(test);
                let mut present = vec![false; k];
                ytr.iter().for_each(|&c| present[c] = true);
                let model = LogReg::fit(&xtr, dim, &ytr, k, &cfg.logreg)?;
                Ok((micro_f1(&model.predict(&xte), &yte)?, present.contains(&false)))
            })
            .collect();
        let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
        let scores: Vec<f64> = runs.iter().map(|r| r.0).collect();
        let incomplete = runs.iter().filter(|r| r.1).count();
        if incomplete == cfg.repeats {
            warn!("ratio {ratio}: some class is absent from every training split");
        }
        let (mean, std) = mean_std(&scores);
        out.push(RatioScore {
            ratio,
            mean,
            std,
            scores,
            incomplete_repeats: incomplete,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(n: usize) -> (Embeddings, Labels) {
        // Class = sign of the first coordinate.
        let mut data = Vec::new();
        let mut classes = Vec::new();
        for i in 0..n {
            let c = i % 2;
            let s = if c == 0 { -1.0 } else { 1.0 };
            data.extend_from_slice(&[s * (1.0 + (i % 7) as f64 * 0.1), (i % 5) as f64 * 0.1]);
            classes.push(c);
        }
        let e = Embeddings {
            tokens: (0..n).map(|i| i.to_string()).collect(),
            dim: 2,
            data,
        };
        let l = Labels {
            nodes: (0..n as u32).collect(),
            classes,
            class_names: vec!["a".into(), "b".into()],
        };
        (e, l)
    }

    #[test]
    fn separable_labels_score_one() {
        let (e, l) = toy(60);
        let cfg = ClassifyConfig {
            ratios: vec![0.5],
            repeats: 4,
            ..Default::default()
        };
        let r = run_classification(&e, &l, &cfg).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].mean, 1.0);
        assert_eq!(r[0].scores.len(), 4);
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let (e, l) = toy(40);
        let cfg = ClassifyConfig {
            ratios: vec![0.3, 0.7],
            repeats: 6,
            ..Default::default()
        };
        let a = run_classification(&e, &l, &cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| run_classification(&e, &l, &cfg).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_config() {
        let (e, l) = toy(10);
        for cfg in [
            ClassifyConfig { ratios: vec![1.0], ..Default::default() },
            ClassifyConfig { ratios: vec![], ..Default::default() },
            ClassifyConfig { repeats: 0, ..Default::default() },
        ] {
            assert!(matches!(run_classification(&e, &l, &cfg), Err(Error::InvalidArgument(_))));
        }
    }

    #[test]
    fn mean_and_std() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 1.0).abs() < 1e-15);
        assert_eq!(mean_std(&[4.0]), (4.0, 0.0));
    }
}
