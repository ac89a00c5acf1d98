//! The universal sampler interface: a log-density on a box-constrained
//! continuous state space, with an evaluation counter for cost accounting.

use crate::error::{Error, Result};
use std::sync::atomic::{AtomicU64, Ordering};

type LogDensityFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A log-density evaluator over a box support. Evaluations are counted;
/// samplers consult `in_support` first so out-of-support proposals cost
/// nothing.
pub struct TargetDensity {
    dim: usize,
    support: Vec<(f64, f64)>,
    f: Box<LogDensityFn>,
    evals: AtomicU64,
}

impl TargetDensity {
    /// `reference` must have finite log-density; this pins down that the
    /// target is not identically zero.
    pub fn new<F>(support: Vec<(f64, f64)>, reference: &[f64], f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        let dim = support.len();
        if dim == 0 {
            return Err(Error::InvalidParameter("zero-dimensional target".into()));
        }
        for &(lo, hi) in &support {
            if !(lo < hi) {
                return Err(Error::InvalidParameter(format!("empty support interval [{lo}, {hi}]")));
            }
        }
        if reference.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: reference.len() });
        }
        let t = TargetDensity { dim, support, f: Box::new(f), evals: AtomicU64::new(0) };
        if !t.log_density(reference).is_finite() {
            return Err(Error::BadInit);
        }
        Ok(t)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support(&self) -> &[(f64, f64)] {
        &self.support
    }

    #[inline]
    pub fn in_support(&self, x: &[f64]) -> bool {
        x.len() == self.dim
            && x.iter().zip(&self.support).all(|(&v, &(lo, hi))| v >= lo && v <= hi && v.is_finite())
    }

    /// Log density; -inf outside the support. Every call increments the
    /// evaluation counter.
    #[inline]
    pub fn log_density(&self, x: &[f64]) -> f64 {
        self.evals.fetch_add(1, Ordering::Relaxed);
        if !self.in_support(x) {
            return f64::NEG_INFINITY;
        }
        (self.f)(x)
    }

    /// Monotone count of density evaluations since construction.
    pub fn eval_count(&self) -> u64 {
        self.evals.load(Ordering::Relaxed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn std_normal(dim: usize) -> TargetDensity {
        TargetDensity::new(
            vec![(f64::NEG_INFINITY, f64::INFINITY); dim],
            &vec![0.0; dim],
            |x: &[f64]| -0.5 * x.iter().map(|v| v * v).sum::<f64>(),
        )
        .unwrap()
    }

    #[test]
    fn counts_evaluations() {
        let t = std_normal(2);
        let before = t.eval_count();
        t.log_density(&[0.1, 0.2]);
        t.log_density(&[0.3, 0.0]);
        assert_eq!(t.eval_count(), before + 2);
    }

    #[test]
    fn outside_support_is_neg_inf() {
        let t = TargetDensity::new(vec![(0.0, 1.0)], &[0.5], |_| 0.0).unwrap();
        assert_eq!(t.log_density(&[-0.1]), f64::NEG_INFINITY);
        assert_eq!(t.log_density(&[2.0]), f64::NEG_INFINITY);
        assert!(t.log_density(&[0.25]).is_finite());
    }

    #[test]
    fn rejects_bad_reference() {
        let r = TargetDensity::new(vec![(0.0, 1.0)], &[2.0], |_| 0.0);
        assert!(r.is_err());
    }
}
