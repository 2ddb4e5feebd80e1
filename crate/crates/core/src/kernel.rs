//! Gaussian and Schoenberg kernels on embedding vectors.
//!
//! Both kernels are functions of the squared distance `r = ‖x − y‖²` only:
//!
//! * Gaussian:   `κ(r) = exp(−r / σ²)`
//! * Schoenberg: `κ(r) = (1 + r)^(−α)`
//!
//! so `∇ₓ κ = 2 κ'(r) (x − y)`. The trainer works with the scalar
//! [`KernelSpec::eval_r`] which returns `κ` together with `2 κ'(r)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KernelFamily {
    Gauss,
    Sch,
}

impl KernelFamily {
    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::Gauss => "gauss",
            KernelFamily::Sch => "sch",
        }
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gauss" | "gaussian" => Ok(KernelFamily::Gauss),
            "sch" | "schoenberg" => Ok(KernelFamily::Sch),
            other => Err(Error::InvalidArgument(format!("unknown kernel {other:?}"))),
        }
    }
}

/// A kernel family with its parameter: `σ²` for Gauss, `α` for Sch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelSpec {
    family: KernelFamily,
    param: f64,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, param: f64) -> Result<Self> {
        if !(param.is_finite() && param > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "{family} kernel parameter must be positive and finite, got {param}"
            )));
        }
        Ok(KernelSpec { family, param })
    }

    pub fn gauss(sigma2: f64) -> Result<Self> {
        Self::new(KernelFamily::Gauss, sigma2)
    }

    /// Gaussian kernel from the bandwidth `σ` rather than `σ²`.
    pub fn gauss_sigma(sigma: f64) -> Result<Self> {
        Self::new(KernelFamily::Gauss, sigma * sigma)
    }

    pub fn sch(alpha: f64) -> Result<Self> {
        Self::new(KernelFamily::Sch, alpha)
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn param(&self) -> f64 {
        self.param
    }

    /// `(κ(r), 2κ'(r))` for squared distance `r`.
    #[inline]
    pub fn eval_r(&self, r: f64) -> (f64, f64) {
        match self.family {
            KernelFamily::Gauss => {
                let k = (-r / self.param).exp();
                (k, -2.0 * k / self.param)
            }
            KernelFamily::Sch => {
                let base = 1.0 + r;
                let k = base.powf(-self.param);
                (k, -2.0 * self.param * k / base)
            }
        }
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        Ok(self.eval_r(squared_distance(x, y)?).0)
    }

    /// Gradient of `κ(x, y)` with respect to `x`.
    pub fn grad_x(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        let (_, c) = self.eval_r(squared_distance(x, y)?);
        Ok(x.iter().zip(y).map(|(a, b)| c * (a - b)).collect())
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            KernelFamily::Gauss => write!(f, "gauss(sigma2={})", self.param),
            KernelFamily::Sch => write!(f, "sch(alpha={})", self.param),
        }
    }
}

pub fn squared_distance(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::InvalidArgument("zero-dimensional vectors".into()));
    }
    Ok(x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const E_INV: f64 = 0.367_879_441_171_442_33;

    #[test]
    fn rejects_bad_params() {
        assert!(KernelSpec::gauss(0.0).is_err());
        assert!(KernelSpec::sch(-1.0).is_err());
        assert!(KernelSpec::gauss(f64::INFINITY).is_err());
        assert!("rbf".parse::<KernelFamily>().is_err());
        assert_eq!("Gauss".parse::<KernelFamily>().unwrap(), KernelFamily::Gauss);
    }

    #[test]
    fn identity_is_one() {
        let x = [0.3, -1.2, 4.0];
        for spec in [KernelSpec::gauss(0.7).unwrap(), KernelSpec::sch(2.5).unwrap()] {
            assert_eq!(spec.eval(&x, &x).unwrap(), 1.0);
            assert!(spec.grad_x(&x, &x).unwrap().iter().all(|&g| g == 0.0));
        }
    }

    #[test]
    fn closed_forms() {
        let sch = KernelSpec::sch(2.0).unwrap();
        assert!((sch.eval(&[1.0, 0.0], &[0.0, 0.0]).unwrap() - 0.25).abs() < 1e-15);
        let g = KernelSpec::gauss(2.0).unwrap();
        assert!((g.eval(&[1.0, 1.0], &[0.0, 0.0]).unwrap() - E_INV).abs() < 1e-15);
        let g1 = KernelSpec::gauss(1.0).unwrap();
        let grad = g1.grad_x(&[1.0], &[0.0]).unwrap();
        assert!((grad[0] + 2.0 * E_INV).abs() < 1e-15);
    }

    #[test]
    fn sigma_flag_squares() {
        assert!((KernelSpec::gauss_sigma(0.3).unwrap().param() - 0.09).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let g = KernelSpec::gauss(1.0).unwrap();
        assert!(matches!(
            g.eval(&[1.0], &[1.0, 2.0]),
            Err(Error::DimensionMismatch { left: 1, right: 2 })
        ));
        assert!(g.grad_x(&[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn wide_gaussian_tends_to_one() {
        let g = KernelSpec::gauss(1e8).unwrap();
        let k = g.eval(&[0.6, 0.8], &[0.0, 0.0]).unwrap();
        assert!((k - 1.0).abs() < 1e-6);
    }

    fn spec_strategy() -> impl Strategy<Value = KernelSpec> {
        prop_oneof![
            (0.2f64..10.0).prop_map(|s| KernelSpec::gauss(s).unwrap()),
            (0.1f64..5.0).prop_map(|a| KernelSpec::sch(a).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn symmetric_and_in_range(
            spec in spec_strategy(),
            xy in (1usize..16).prop_flat_map(|d| (
                prop::collection::vec(-1.0f64..1.0, d),
                prop::collection::vec(-1.0f64..1.0, d),
            )),
        ) {
            let (x, y) = xy;
            let a = spec.eval(&x, &y).unwrap();
            let b = spec.eval(&y, &x).unwrap();
            prop_assert_eq!(a, b);
            prop_assert!(a > 0.0 && a <= 1.0);
            let gx = spec.grad_x(&x, &y).unwrap();
            let gy = spec.grad_x(&y, &x).unwrap();
            for (p, q) in gx.iter().zip(&gy) {
                prop_assert_eq!(*p, -*q);
            }
        }

        #[test]
        fn decreasing_in_distance(spec in spec_strategy(), r in 0.0f64..5.0, dr in 1e-3f64..5.0) {
            prop_assert!(spec.eval_r(r + dr).0 < spec.eval_r(r).0);
        }
    }
}
