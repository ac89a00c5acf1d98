//! Adaptive Metropolis: random-walk Metropolis whose proposal covariance is
//! a scaled running sample covariance of the chain history, regularized by a
//! small ridge. The covariance is maintained by recursion, not recomputed.

use super::generic_labels;
use crate::chain::{Chain, MoveStats};
use crate::error::{Error, Result};
use crate::numkit::{cholesky, CholFactor, DenseMatrix};
use crate::rng::RngStream;
use crate::target::TargetDensity;
use std::time::Instant;

#[derive(Clone, Debug)]
pub struct AmConfig {
    pub initial_cov: DenseMatrix,
    /// Iteration at which adaptation switches on; `usize::MAX` disables it.
    pub adaptation_start: usize,
    /// Covariance scale, default 2.38^2 / dim.
    pub scale: f64,
    /// Ridge added to the adapted covariance.
    pub regularization: f64,
}

impl AmConfig {
    pub fn new(initial_cov: DenseMatrix) -> Result<Self> {
        let dim = initial_cov.rows();
        cholesky(&initial_cov)?;
        let trace: f64 = (0..dim).map(|i| initial_cov[(i, i)]).sum();
        Ok(AmConfig {
            initial_cov,
            adaptation_start: 10 * dim,
            scale: 2.38 * 2.38 / dim as f64,
            regularization: 1e-10 * trace / dim as f64,
        })
    }

    pub fn isotropic(dim: usize, sd: f64) -> Result<Self> {
        Self::new(DenseMatrix::diag(&vec![sd * sd; dim]))
    }
}

/// Run `n` adaptive-Metropolis iterations from `init`.
pub fn am_run(
    target: &TargetDensity,
    init: &[f64],
    n: usize,
    cfg: &AmConfig,
    rng: &mut RngStream,
) -> Result<Chain> {
    let dim = target.dim();
    if cfg.initial_cov.rows() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: cfg.initial_cov.rows() });
    }
    if cfg.adaptation_start != usize::MAX && cfg.adaptation_start < 2 * dim {
        return Err(Error::InvalidParameter(format!(
            "adaptation_start {} < 2*dim",
            cfg.adaptation_start
        )));
    }
    let mut x = init.to_vec();
    let mut lp = target.log_density(&x);
    if !lp.is_finite() {
        return Err(Error::BadInit);
    }
    let evals0 = target.eval_count();
    let init_factor = cholesky(&cfg.initial_cov)?;

    // Welford recursion over the history, including the initial state.
    let mut mean = x.clone();
    let mut cov_acc = DenseMatrix::zeros(dim, dim);
    let mut count = 1u64;
    let mut delta = vec![0.0; dim];

    let mut chain = Chain::with_capacity(generic_labels(dim), n, rng.seed());
    let mut accepted = 0u64;
    let mut z = vec![0.0; dim];
    let mut y = vec![0.0; dim];
    let mut adapted_factor: Option<CholFactor> = None;

    let t0 = Instant::now();
    for iter in 0..n {
        let factor = match &adapted_factor {
            Some(f) if iter >= cfg.adaptation_start => f,
            _ => &init_factor,
        };
        for v in z.iter_mut() {
            *v = rng.normal();
        }
        let step = factor.lower_times(&z);
        for j in 0..dim {
            y[j] = x[j] + step[j];
        }
        if target.in_support(&y) {
            let lp_y = target.log_density(&y);
            if lp_y - lp > rng.uniform_pos().ln() {
                x.copy_from_slice(&y);
                lp = lp_y;
                accepted += 1;
            }
        }
        chain.push(&[&x[..], &[lp]].concat());

        if cfg.adaptation_start != usize::MAX {
            count += 1;
            let cf = count as f64;
            for j in 0..dim {
                delta[j] = x[j] - mean[j];
                mean[j] += delta[j] / cf;
            }
            for i in 0..dim {
                let post_i = x[i] - mean[i];
                for j in 0..dim {
                    cov_acc[(i, j)] += delta[j] * post_i;
                }
            }
            // Refresh the proposal factor once the adaptation window opens.
            if iter + 1 >= cfg.adaptation_start {
                let denom = (count - 1) as f64;
                let mut prop = DenseMatrix::zeros(dim, dim);
                for i in 0..dim {
                    for j in 0..dim {
                        // symmetrize: the rank-1 updates accumulate tiny asymmetry
                        prop[(i, j)] =
                            cfg.scale * 0.5 * (cov_acc[(i, j)] + cov_acc[(j, i)]) / denom;
                    }
                    prop[(i, i)] += cfg.regularization;
                }
                match cholesky(&prop) {
                    Ok(f) => adapted_factor = Some(f),
                    Err(_) => adapted_factor = None, // degenerate history: keep initial_cov
                }
            }
        }
    }
    chain.wall_seconds = t0.elapsed().as_secs_f64();
    chain.eval_count = target.eval_count() - evals0;
    chain.accepted = vec![MoveStats { name: "am".into(), proposed: n as u64, accepted }];
    Ok(chain)
}
