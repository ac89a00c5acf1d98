//! Random-walk Metropolis with independent per-coordinate normal steps.

use super::generic_labels;
use crate::chain::{Chain, MoveStats};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::target::TargetDensity;
use std::time::Instant;

#[derive(Clone, Debug)]
pub struct RwmConfig {
    /// Proposal standard deviation per coordinate.
    pub step_sd: Vec<f64>,
    /// Sub-kernel repeat count when used as a Metropolis-within-Gibbs block.
    pub iterations_per_block: usize,
}

impl RwmConfig {
    pub fn new(step_sd: Vec<f64>) -> Result<Self> {
        if step_sd.is_empty() || step_sd.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            return Err(Error::InvalidParameter(format!("step_sd must be positive: {step_sd:?}")));
        }
        Ok(RwmConfig { step_sd, iterations_per_block: 1 })
    }

    pub fn isotropic(dim: usize, sd: f64) -> Result<Self> {
        Self::new(vec![sd; dim])
    }
}

/// Run `n` RWM iterations from `init`. Out-of-support proposals are rejected
/// without evaluating the target.
pub fn rwm_run(
    target: &TargetDensity,
    init: &[f64],
    n: usize,
    cfg: &RwmConfig,
    rng: &mut RngStream,
) -> Result<Chain> {
    if cfg.step_sd.len() != target.dim() {
        return Err(Error::DimensionMismatch { expected: target.dim(), got: cfg.step_sd.len() });
    }
    let mut x = init.to_vec();
    let mut lp = target.log_density(&x);
    if !lp.is_finite() {
        return Err(Error::BadInit);
    }
    let evals0 = target.eval_count();
    let mut chain = Chain::with_capacity(generic_labels(target.dim()), n, rng.seed());
    let mut accepted = 0u64;
    let mut y = vec![0.0; target.dim()];

    let t0 = Instant::now();
    for _ in 0..n {
        for (j, yj) in y.iter_mut().enumerate() {
            *yj = x[j] + cfg.step_sd[j] * rng.normal();
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
    }
    chain.wall_seconds = t0.elapsed().as_secs_f64();
    chain.eval_count = target.eval_count() - evals0;
    chain.accepted = vec![MoveStats { name: "rwm".into(), proposed: n as u64, accepted }];
    Ok(chain)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn std_normal_1d() -> TargetDensity {
        TargetDensity::new(
            vec![(f64::NEG_INFINITY, f64::INFINITY)],
            &[0.0],
            |x: &[f64]| -0.5 * x[0] * x[0],
        )
        .unwrap()
    }

    #[test]
    fn acceptance_band_classic_step() {
        let target = std_normal_1d();
        let mut rng = RngStream::new(1);
        let cfg = RwmConfig::isotropic(1, 2.4).unwrap();
        let chain = rwm_run(&target, &[0.0], 100_000, &cfg, &mut rng).unwrap();
        let rate = chain.move_stats("rwm").unwrap().rate();
        assert!((0.35..=0.55).contains(&rate), "acceptance {rate}");
        let mean = chain.column_mean(0);
        assert!(mean.abs() < 0.05, "mean {mean}");
    }

    #[test]
    fn tiny_step_accepts_everything() {
        let target = std_normal_1d();
        let mut rng = RngStream::new(2);
        let cfg = RwmConfig::isotropic(1, 1e-9).unwrap();
        let chain = rwm_run(&target, &[0.3], 5_000, &cfg, &mut rng).unwrap();
        let rate = chain.move_stats("rwm").unwrap().rate();
        assert!(rate > 0.999, "acceptance {rate}");
        let col = chain.column(0);
        let spread = col.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
            - col.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        assert!(spread < 1e-5, "chain should barely move, spread {spread}");
    }

    #[test]
    fn respects_support() {
        let target =
            TargetDensity::new(vec![(0.0, 1.0)], &[0.5], |_| 0.0).unwrap();
        let mut rng = RngStream::new(3);
        let cfg = RwmConfig::isotropic(1, 0.5).unwrap();
        let chain = rwm_run(&target, &[0.5], 20_000, &cfg, &mut rng).unwrap();
        assert!(chain.column(0).iter().all(|&v| (0.0..=1.0).contains(&v)));
        // uniform target: mean near 1/2
        assert!((chain.column_mean(0) - 0.5).abs() < 0.02);
    }

    #[test]
    fn bad_init_detected() {
        let target = TargetDensity::new(vec![(0.0, 10.0)], &[1.0], |x: &[f64]| {
            if x[0] > 0.5 {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        })
        .unwrap();
        let mut rng = RngStream::new(4);
        let cfg = RwmConfig::isotropic(1, 0.1).unwrap();
        assert!(matches!(
            rwm_run(&target, &[0.25], 10, &cfg, &mut rng),
            Err(Error::BadInit)
        ));
    }

    #[test]
    fn never_emits_zero_density_state() {
        let target = TargetDensity::new(vec![(f64::NEG_INFINITY, f64::INFINITY)], &[0.0], |x: &[f64]| {
            if x[0].abs() < 2.0 {
                -0.5 * x[0] * x[0]
            } else {
                f64::NEG_INFINITY
            }
        })
        .unwrap();
        let mut rng = RngStream::new(5);
        let cfg = RwmConfig::isotropic(1, 3.0).unwrap();
        let chain = rwm_run(&target, &[0.0], 20_000, &cfg, &mut rng).unwrap();
        // last column is the log target of the recorded state
        assert!(chain.column(1).iter().all(|lp| lp.is_finite()));
    }
}
