//! One-vs-rest L2-regularized logistic regression, fitted by full-batch
//! gradient descent with a backtracking (Armijo) line search.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogRegConfig {
    /// Inverse regularization strength. Each binary problem minimizes
    /// `mean logistic loss + λ‖w‖²/2` with `λ = 1 / (c · m)`, which has the
    /// same minimizer as `c · Σ loss + ‖w‖²/2`.
    pub c: f64,
    pub max_iters: usize,
    /// Stop once the gradient norm falls below this.
    pub tol: f64,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        LogRegConfig {
            c: 1.0,
            max_iters: 500,
            tol: 1e-6,
        }
    }
}

impl LogRegConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "inverse regularization strength must be positive, got {}",
                self.c
            )));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be non-negative, got {}", self.tol)));
        }
        Ok(())
    }

    fn lambda(&self, m: usize) -> f64 {
        1.0 / (self.c * m as f64)
    }
}

/// A fitted binary classifier `P(y = 1 | x) = σ(w·x + b)`.
#[derive(Clone, Debug)]
pub struct BinaryLogReg {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub lambda: f64,
    pub iterations: usize,
    pub grad_norm: f64,
    /// Objective value after each accepted step, starting from `w = 0`.
    pub objective_trace: Vec<f64>,
}

/// `log(1 + e^z)` without overflow.
#[inline]
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

#[inline]
fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn matvec(x: &[f64], dim: usize, w: &[f64], b: f64, out: &mut [f64]) {
    for (o, row) in out.iter_mut().zip(x.chunks_exact(dim)) {
        *o = b + row.iter().zip(w).map(|(a, c)| a * c).sum::<f64>();
    }
}

/// Mean logistic loss for margins `z` (labels folded in as signs).
fn mean_loss(z: &[f64], y: &[bool]) -> f64 {
    z.iter()
        .zip(y)
        .map(|(&z, &y)| if y { softplus(-z) } else { softplus(z) })
        .sum::<f64>()
        / z.len() as f64
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum()
}

impl BinaryLogReg {
    /// Fits on `m` row-major rows of `x` with boolean targets `y`.
    pub fn fit(x: &[f64], dim: usize, y: &[bool], cfg: &LogRegConfig) -> Result<Self> {
        cfg.validate()?;
        let m = y.len();
        if dim == 0 || x.len() != m * dim {
            return Err(Error::DimensionMismatch { left: x.len(), right: m * dim });
        }
        if m == 0 {
            return Err(Error::InvalidArgument("empty training set".into()));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite feature value".into()));
        }
        let lambda = cfg.lambda(m);
        let objective = |z: &[f64], w: &[f64]| mean_loss(z, y) + 0.5 * lambda * norm2(w);

        let mut w = vec![0.0; dim];
        let mut b = 0.0;
        let mut z = vec![0.0; m];
        let mut gw = vec![0.0; dim];
        let mut xg = vec![0.0; m];
        let mut z_try = vec![0.0; m];
        let mut f = objective(&z, &w);
        let mut trace = vec![f];
        let mut step = 1.0;
        let mut grad_norm = f64::INFINITY;
        let mut iterations = 0;

        for it in 0..=cfg.max_iters {
            // Gradient at (w, b).
            gw.copy_from_slice(&w);
            gw.iter_mut().for_each(|g| *g *= lambda);
            let mut gb = 0.0;
            for (row, (&zi, &yi)) in x.chunks_exact(dim).zip(z.iter().zip(y)) {
                let r = (sigmoid(zi) - if yi { 1.0 } else { 0.0 }) / m as f64;
                gb += r;
                for (g, &a) in gw.iter_mut().zip(row) {
                    *g += r * a;
                }
            }
            let gsq = norm2(&gw) + gb * gb;
            grad_norm = gsq.sqrt();
            if grad_norm < cfg.tol || it == cfg.max_iters {
                break;
            }
            iterations = it + 1;

            // Margins are affine in the step length, so each trial is O(m).
            matvec(x, dim, &gw, gb, &mut xg);
            step *= 2.0;
            loop {
                for ((t, &zi), &d) in z_try.iter_mut().zip(&z).zip(&xg) {
                    *t = zi - step * d;
                }
                let w_try_sq: f64 = w.iter().zip(&gw).map(|(a, g)| (a - step * g).powi(2)).sum();
                let f_try = mean_loss(&z_try, y) + 0.5 * lambda * w_try_sq;
                if f_try <= f - 0.5 * step * gsq {
                    f = f_try;
                    break;
                }
                step *= 0.5;
                if step < 1e-20 {
                    // No decrease representable in floating point: converged
                    // as far as the data allow.
                    return Ok(BinaryLogReg {
                        weights: w,
                        bias: b,
                        lambda,
                        iterations,
                        grad_norm,
                        objective_trace: trace,
                    });
                }
            }
            for (a, g) in w.iter_mut().zip(&gw) {
                *a -= step * g;
            }
            b -= step * gb;
            std::mem::swap(&mut z, &mut z_try);
            trace.push(f);
        }
        if !(b.is_finite() && w.iter().all(|v| v.is_finite())) {
            return Err(Error::Numerical("logistic regression diverged".into()));
        }
        Ok(BinaryLogReg {
            weights: w,
            bias: b,
            lambda,
            iterations,
            grad_norm,
            objective_trace: trace,
        })
    }

    /// Linear score `w·x + b`; monotone in the predicted probability.
    pub fn decision(&self, row: &[f64]) -> f64 {
        self.bias + row.iter().zip(&self.weights).map(|(a, c)| a * c).sum::<f64>()
    }

    pub fn probability(&self, row: &[f64]) -> f64 {
        sigmoid(self.decision(row))
    }
}

/// One binary model per class present in the training labels.
#[derive(Clone, Debug)]
pub struct LogReg {
    dim: usize,
    /// `None` for classes absent from the training data; they are never
    /// predicted.
    models: Vec<Option<BinaryLogReg>>,
}

impl LogReg {
    /// Fits `k` one-vs-rest problems. Rows are `dim`-wide in `x`.
    pub fn fit(x: &[f64], dim: usize, labels: &[usize], k: usize, cfg: &LogRegConfig) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&c| c >= k) {
            return Err(Error::InvalidArgument(format!("class id {bad} out of range for {k} classes")));
        }
        let mut present = vec![false; k];
        labels.iter().for_each(|&c| present[c] = true);
        if present.iter().filter(|&&p| p).count() < 2 {
            return Err(Error::Data("training labels contain fewer than two classes".into()));
        }
        let models = (0..k)
            .map(|c| {
                if !present[c] {
                    return Ok(None);
                }
                let y: Vec<bool> = labels.iter().map(|&l| l == c).collect();
                BinaryLogReg::fit(x, dim, &y, cfg).map(Some)
            })
            .collect::<Result<_>>()?;
        Ok(LogReg { dim, models })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn class_count(&self) -> usize {
        self.models.len()
    }

    pub fn binary(&self, class: usize) -> Option<&BinaryLogReg> {
        self.models.get(class).and_then(Option::as_ref)
    }

    /// Class with the largest one-vs-rest score; ties go to the lower id.
    pub fn predict_row(&self, row: &[f64]) -> usize {
        let mut best = (f64::NEG_INFINITY, 0);
        for (c, m) in self.models.iter().enumerate() {
            if let Some(m) = m {
                let s = m.decision(row);
                if s > best.0 {
                    best = (s, c);
                }
            }
        }
        best.1
    }

    pub fn predict(&self, x: &[f64]) -> Vec<usize> {
        x.chunks_exact(self.dim).map(|r| self.predict_row(r)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::stream_rng;
    use rand::Rng;

    /// Box-Muller standard normal.
    fn normal<R: Rng>(rng: &mut R) -> f64 {
        let u: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
        let v: f64 = rng.random();
        (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
    }

    fn blobs(m: usize, sep: f64, seed: u64) -> (Vec<f64>, Vec<usize>) {
        let mut rng = stream_rng(seed, 0);
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..m {
            let c = i % 2;
            let centre = if c == 0 { -sep } else { sep };
            x.push(centre + normal(&mut rng));
            x.push(centre + normal(&mut rng));
            y.push(c);
        }
        (x, y)
    }

    #[test]
    fn separable_blobs() {
        let (x, y) = blobs(400, 4.0, 1);
        let model = LogReg::fit(&x, 2, &y, 2, &LogRegConfig::default()).unwrap();
        let acc = crate::eval::micro_f1(&model.predict(&x), &y).unwrap();
        assert!(acc >= 0.99, "accuracy {acc}");
    }

    #[test]
    fn gradient_below_tol_at_optimum() {
        let (x, y) = blobs(200, 0.5, 2);
        let yb: Vec<bool> = y.iter().map(|&c| c == 1).collect();
        let cfg = LogRegConfig { max_iters: 5000, ..Default::default() };
        let m = BinaryLogReg::fit(&x, 2, &yb, &cfg).unwrap();
        assert!(m.grad_norm < cfg.tol, "grad norm {}", m.grad_norm);
        assert!(m.iterations < cfg.max_iters);
    }

    #[test]
    fn objective_never_increases() {
        let (x, y) = blobs(300, 1.0, 3);
        let yb: Vec<bool> = y.iter().map(|&c| c == 0).collect();
        let m = BinaryLogReg::fit(&x, 2, &yb, &LogRegConfig::default()).unwrap();
        assert!(m.objective_trace.windows(2).all(|w| w[1] <= w[0]));
        assert!(m.objective_trace.len() > 2);
    }

    #[test]
    fn strong_regularization_predicts_majority() {
        // 3 rows of class 1 against 1 of class 0, features favouring class 0.
        let x = [1.0, 1.0, -1.0, -1.0, -1.0, -1.0, -1.0, -1.0];
        let y = [0, 1, 1, 1];
        let cfg = LogRegConfig { c: 1e-9, ..Default::default() };
        let model = LogReg::fit(&x, 2, &y, 2, &cfg).unwrap();
        assert!(model.binary(1).unwrap().weights.iter().all(|w| w.abs() < 1e-6));
        assert_eq!(model.predict(&x), vec![1, 1, 1, 1]);
    }

    #[test]
    fn degenerate_inputs() {
        let cfg = LogRegConfig::default();
        assert!(matches!(LogReg::fit(&[1.0, 2.0], 1, &[0, 0], 2, &cfg), Err(Error::Data(_))));
        assert!(LogReg::fit(&[1.0, 2.0], 1, &[0, 5], 2, &cfg).is_err());
        assert!(LogReg::fit(&[1.0, 2.0, 3.0], 2, &[0, 1], 2, &cfg).is_err());
        assert!(LogReg::fit(&[1.0, 2.0], 1, &[0, 1], 2, &LogRegConfig { c: 0.0, ..cfg }).is_err());
    }

    #[test]
    fn absent_class_never_predicted() {
        let (x, y) = blobs(100, 3.0, 4);
        let model = LogReg::fit(&x, 2, &y, 3, &LogRegConfig::default()).unwrap();
        assert!(model.binary(2).is_none());
        assert!(model.predict(&x).iter().all(|&c| c < 2));
    }

    #[test]
    fn softplus_is_stable() {
        assert_eq!(softplus(1000.0), 1000.0);
        assert!(softplus(-1000.0) >= 0.0 && softplus(-1000.0) < 1e-300);
        assert!((softplus(0.0) - 2f64.ln()).abs() < 1e-15);
    }
}
