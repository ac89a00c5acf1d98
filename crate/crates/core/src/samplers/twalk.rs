//! The t-walk: a self-tuning Metropolis-Hastings sampler that maintains a
//! pair of states and moves one of them per iteration with one of four
//! kernels (walk, traverse, blow, hop) acting on a random coordinate subset.
//! Non-adaptive on the product space, so ordinary detailed balance applies.

use super::generic_labels;
use crate::chain::{Chain, MoveStats};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::target::TargetDensity;
use std::time::Instant;

#[derive(Clone, Debug)]
pub struct TwalkConfig {
    pub p_walk: f64,
    pub p_traverse: f64,
    pub p_blow: f64,
    pub p_hop: f64,
    /// Walk kernel range parameter.
    pub a_w: f64,
    /// Traverse kernel tail parameter.
    pub a_t: f64,
    /// Expected number of coordinates moved per proposal; `None` = min(dim, 4).
    pub n1: Option<usize>,
}

impl Default for TwalkConfig {
    fn default() -> Self {
        TwalkConfig {
            p_walk: 0.4918,
            p_traverse: 0.4918,
            p_blow: 0.0082,
            p_hop: 0.0082,
            a_w: 1.5,
            a_t: 6.0,
            n1: None,
        }
    }
}

impl TwalkConfig {
    fn validate(&self) -> Result<()> {
        let probs = [self.p_walk, self.p_traverse, self.p_blow, self.p_hop];
        if probs.iter().any(|&p| p < 0.0) {
            return Err(Error::InvalidParameter("t-walk kernel probabilities must be >= 0".into()));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("kernel probabilities sum to {sum}, not 1")));
        }
        if !(self.a_w > 0.0) || !(self.a_t > 1.0) {
            return Err(Error::InvalidParameter("need a_w > 0 and a_t > 1".into()));
        }
        Ok(())
    }
}

/// Traverse scale: beta^(a_t) on (0,1) with probability (a_t-1)/(2 a_t),
/// beta^(-a_t) on [1, inf) otherwise.
fn sim_beta(at: f64, rng: &mut RngStream) -> f64 {
    if rng.uniform() < (at - 1.0) / (2.0 * at) {
        rng.uniform_pos().powf(1.0 / (at + 1.0))
    } else {
        rng.uniform_pos().powf(1.0 / (1.0 - at))
    }
}

struct Proposal {
    y: Vec<f64>,
    nphi: usize,
    /// log Hastings correction: log g(reverse) - log g(forward).
    extra: f64,
    ok: bool,
}

fn draw_phi(dim: usize, pphi: f64, rng: &mut RngStream, phi: &mut [bool]) -> usize {
    let mut nphi = 0;
    for p in phi.iter_mut().take(dim) {
        *p = rng.uniform() < pphi;
        if *p {
            nphi += 1;
        }
    }
    nphi
}

fn max_abs_diff_on(phi: &[bool], a: &[f64], b: &[f64]) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.len() {
        if phi[j] {
            m = m.max((a[j] - b[j]).abs());
        }
    }
    m
}

fn propose(
    kernel: usize,
    cur: &[f64],
    piv: &[f64],
    cfg: &TwalkConfig,
    pphi: f64,
    rng: &mut RngStream,
    phi: &mut [bool],
) -> Proposal {
    let dim = cur.len();
    let nphi = draw_phi(dim, pphi, rng, phi);
    let mut y = cur.to_vec();
    if nphi == 0 {
        return Proposal { y, nphi, extra: 0.0, ok: true };
    }
    match kernel {
        // walk: y_j = x_j + (x_j - x'_j) alpha_j, alpha from the 1/sqrt(1+a) law
        0 => {
            let aw = cfg.a_w;
            for j in 0..dim {
                if phi[j] {
                    let u = rng.uniform();
                    let alpha = (aw / (1.0 + aw)) * (aw * u * u + 2.0 * u - 1.0);
                    y[j] = cur[j] + (cur[j] - piv[j]) * alpha;
                }
            }
            Proposal { y, nphi, extra: 0.0, ok: true }
        }
        // traverse: reflect through the pivot with a common scale beta
        1 => {
            let beta = sim_beta(cfg.a_t, rng);
            for j in 0..dim {
                if phi[j] {
                    y[j] = piv[j] + beta * (piv[j] - cur[j]);
                }
            }
            Proposal { y, nphi, extra: (nphi as f64 - 2.0) * beta.ln(), ok: true }
        }
        // blow: normal around the pivot, scale = the largest pair separation
        2 => {
            let sigma = max_abs_diff_on(phi, piv, cur);
            if sigma <= 0.0 {
                return Proposal { y, nphi, extra: 0.0, ok: false };
            }
            for j in 0..dim {
                if phi[j] {
                    y[j] = piv[j] + sigma * rng.normal();
                }
            }
            let sigma_rev = max_abs_diff_on(phi, piv, &y);
            if sigma_rev <= 0.0 {
                return Proposal { y, nphi, extra: 0.0, ok: false };
            }
            let mut fwd = nphi as f64 * sigma.ln();
            let mut rev = nphi as f64 * sigma_rev.ln();
            for j in 0..dim {
                if phi[j] {
                    fwd += (y[j] - piv[j]).powi(2) / (2.0 * sigma * sigma);
                    rev += (cur[j] - piv[j]).powi(2) / (2.0 * sigma_rev * sigma_rev);
                }
            }
            Proposal { y, nphi, extra: fwd - rev, ok: true }
        }
        // hop: normal around the current point, scale = separation / 3
        _ => {
            let sigma = max_abs_diff_on(phi, piv, cur) / 3.0;
            if sigma <= 0.0 {
                return Proposal { y, nphi, extra: 0.0, ok: false };
            }
            for j in 0..dim {
                if phi[j] {
                    y[j] = cur[j] + sigma * rng.normal();
                }
            }
            let sigma_rev = max_abs_diff_on(phi, piv, &y) / 3.0;
            if sigma_rev <= 0.0 {
                return Proposal { y, nphi, extra: 0.0, ok: false };
            }
            let mut fwd = nphi as f64 * sigma.ln();
            let mut rev = nphi as f64 * sigma_rev.ln();
            for j in 0..dim {
                if phi[j] {
                    let d2 = (y[j] - cur[j]).powi(2);
                    fwd += d2 / (2.0 * sigma * sigma);
                    rev += d2 / (2.0 * sigma_rev * sigma_rev);
                }
            }
            Proposal { y, nphi, extra: fwd - rev, ok: true }
        }
    }
}

/// Run `n` t-walk iterations; the chain records the first state of the pair.
pub fn twalk_run(
    target: &TargetDensity,
    init: &[f64],
    init_pair: &[f64],
    n: usize,
    cfg: &TwalkConfig,
    rng: &mut RngStream,
) -> Result<Chain> {
    cfg.validate()?;
    let dim = target.dim();
    if init.len() != dim || init_pair.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: init.len().min(init_pair.len()) });
    }
    if init.iter().zip(init_pair).any(|(a, b)| a == b) {
        return Err(Error::IdenticalPair);
    }
    let mut x = init.to_vec();
    let mut xp = init_pair.to_vec();
    let mut lp_x = target.log_density(&x);
    let mut lp_xp = target.log_density(&xp);
    if !lp_x.is_finite() || !lp_xp.is_finite() {
        return Err(Error::BadInit);
    }
    let evals0 = target.eval_count();
    let n1 = cfg.n1.unwrap_or_else(|| dim.min(4)).clamp(1, dim);
    let pphi = n1 as f64 / dim as f64;
    let cum = [
        cfg.p_walk,
        cfg.p_walk + cfg.p_traverse,
        cfg.p_walk + cfg.p_traverse + cfg.p_blow,
    ];

    let mut chain = Chain::with_capacity(generic_labels(dim), n, rng.seed());
    let mut stats: Vec<MoveStats> = ["walk", "traverse", "blow", "hop"]
        .iter()
        .map(|k| MoveStats { name: k.to_string(), proposed: 0, accepted: 0 })
        .collect();
    let mut phi = vec![false; dim];
    let mut row = vec![0.0; dim + 1];

    let t0 = Instant::now();
    for _ in 0..n {
        let u = rng.uniform();
        let kernel = if u < cum[0] {
            0
        } else if u < cum[1] {
            1
        } else if u < cum[2] {
            2
        } else {
            3
        };
        let move_x = rng.uniform() < 0.5;
        stats[kernel].proposed += 1;
        let (cur, piv, cur_lp) =
            if move_x { (&x, &xp, lp_x) } else { (&xp, &x, lp_xp) };
        let prop = propose(kernel, cur, piv, cfg, pphi, rng, &mut phi);
        if prop.nphi == 0 {
            // empty coordinate set: proposal equals the current point
            stats[kernel].accepted += 1;
        } else if prop.ok && target.in_support(&prop.y) {
            let lp_y = target.log_density(&prop.y);
            if lp_y.is_finite() && lp_y - cur_lp + prop.extra > rng.uniform_pos().ln() {
                if move_x {
                    x = prop.y;
                    lp_x = lp_y;
                } else {
                    xp = prop.y;
                    lp_xp = lp_y;
                }
                stats[kernel].accepted += 1;
            }
        }
        row[..dim].copy_from_slice(&x);
        row[dim] = lp_x;
        chain.push(&row);
    }
    chain.wall_seconds = t0.elapsed().as_secs_f64();
    chain.eval_count = target.eval_count() - evals0;
    chain.accepted = stats;
    Ok(chain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::iact;

    fn std_normal(dim: usize) -> TargetDensity {
        TargetDensity::new(
            vec![(f64::NEG_INFINITY, f64::INFINITY); dim],
            &vec![0.0; dim],
            |x: &[f64]| -0.5 * x.iter().map(|v| v * v).sum::<f64>(),
        )
        .unwrap()
    }

    #[test]
    fn identical_pair_rejected() {
        let target = std_normal(2);
        let mut rng = RngStream::new(1);
        let r = twalk_run(&target, &[0.5, 1.0], &[0.5, 2.0], 10, &TwalkConfig::default(), &mut rng);
        assert!(matches!(r, Err(Error::IdenticalPair)));
    }

    #[test]
    fn iact_near_12d_on_standard_normal() {
        let target = std_normal(4);
        let mut rng = RngStream::new(2);
        let chain = twalk_run(
            &target,
            &[0.3, -0.1, 0.2, 0.5],
            &[1.3, 0.9, -0.8, -0.4],
            1_000_000,
            &TwalkConfig::default(),
            &mut rng,
        )
        .unwrap();
        let col = chain.slice(50_000, 1).column(0);
        let (tau, _) = iact(&col).unwrap();
        // paper-calibrated ~12d = 48, factor-2 band
        assert!((24.0..=96.0).contains(&tau), "tau {tau}");
        let mean = col.iter().sum::<f64>() / col.len() as f64;
        assert!(mean.abs() < 0.05, "mean {mean}");
    }

    #[test]
    fn coordinate_symmetry() {
        // permutation-invariant target: coordinate IACTs agree within noise
        let target = std_normal(3);
        let mut rng = RngStream::new(3);
        let chain = twalk_run(
            &target,
            &[0.2, -0.4, 0.7],
            &[-0.9, 1.1, -0.3],
            400_000,
            &TwalkConfig::default(),
            &mut rng,
        )
        .unwrap();
        let post = chain.slice(20_000, 1);
        let taus: Vec<f64> = (0..3).map(|j| iact(&post.column(j)).unwrap().0).collect();
        let (lo, hi) = (taus.iter().cloned().fold(f64::INFINITY, f64::min),
                        taus.iter().cloned().fold(0.0f64, f64::max));
        assert!(hi / lo < 1.6, "taus {taus:?}");
    }

    #[test]
    fn empirical_reversibility_on_bins() {
        // pi-weighted transition counts of the recorded state are symmetric
        let target = std_normal(1);
        let mut rng = RngStream::new(4);
        let chain =
            twalk_run(&target, &[0.1], &[1.7], 400_000, &TwalkConfig::default(), &mut rng).unwrap();
        let xs = chain.slice(20_000, 1).column(0);
        let edges = [-0.8416212335729143, -0.2533471031357997, 0.2533471031357997, 0.8416212335729143];
        let bin = |v: f64| edges.iter().filter(|&&e| v > e).count();
        let mut counts = [[0f64; 5]; 5];
        for w in xs.windows(2) {
            counts[bin(w[0])][bin(w[1])] += 1.0;
        }
        for a in 0..5 {
            for b in 0..a {
                let (nab, nba) = (counts[a][b], counts[b][a]);
                let z = (nab - nba).abs() / (nab + nba).max(1.0).sqrt();
                assert!(z < 4.0, "bins ({a},{b}): {nab} vs {nba}, z = {z}");
            }
        }
    }

    #[test]
    fn respects_support() {
        let target = TargetDensity::new(vec![(0.0, 1.0)], &[0.5], |_| 0.0).unwrap();
        let mut rng = RngStream::new(5);
        let chain =
            twalk_run(&target, &[0.4], &[0.7], 50_000, &TwalkConfig::default(), &mut rng).unwrap();
        assert!(chain.column(0).iter().all(|&v| (0.0..=1.0).contains(&v)));
    }
}
