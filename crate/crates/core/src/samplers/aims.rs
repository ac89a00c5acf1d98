//! Adaptive independence Metropolis sampler for univariate targets.
//!
//! The proposal is a piecewise-exponential envelope: piecewise-linear
//! interpolation of the log-density over a grid of support points, with the
//! outermost chord slopes extended to the support bounds. Each rejected
//! proposal is added to the grid (up to a cap), so the proposal tends to the
//! target and the acceptance rate climbs toward one. Every step is a valid
//! Metropolis-Hastings step with respect to the current envelope.

use super::generic_labels;
use crate::chain::{Chain, MoveStats};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::target::TargetDensity;
use std::time::Instant;

#[derive(Clone, Debug)]
pub struct AimsConfig {
    /// Finite interval the initial grid spans (clamped to the support).
    pub bracket: (f64, f64),
    /// Number of initial grid points.
    pub grid_init: usize,
    /// Grid refinement stops at this many points.
    pub grid_cap: usize,
}

impl AimsConfig {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidParameter(format!("bracket [{lo}, {hi}] must be finite and ordered")));
        }
        Ok(AimsConfig { bracket: (lo, hi), grid_init: 7, grid_cap: 200 })
    }
}

/// ln(1 - exp(-t)) for t > 0.
fn ln_1m_exp_neg(t: f64) -> f64 {
    if t > std::f64::consts::LN_2 {
        (-(-t).exp()).ln_1p()
    } else {
        (-(-t).exp_m1()).ln()
    }
}

/// log of the integral of exp(linear) over [a, b] with values ga, gb.
fn segment_log_mass(a: f64, b: f64, ga: f64, gb: f64) -> f64 {
    let width = b - a;
    if !(width > 0.0) || (ga == f64::NEG_INFINITY && gb == f64::NEG_INFINITY) {
        return f64::NEG_INFINITY;
    }
    let s = (gb - ga) / width;
    let sw = s * width;
    if sw.abs() < 1e-12 {
        0.5 * (ga + gb) + width.ln()
    } else if s > 0.0 {
        gb + ln_1m_exp_neg(sw) - s.ln()
    } else {
        ga + ln_1m_exp_neg(-sw) - (-s).ln()
    }
}

struct Envelope {
    /// Sorted support points with their target log-densities.
    pts: Vec<(f64, f64)>,
    /// Support bounds of the target (envelope covers all of it).
    lo: f64,
    hi: f64,
    /// Per-segment log masses: [left tail, interior x (m-1), right tail].
    log_mass: Vec<f64>,
    total_log_mass: f64,
    cum: Vec<f64>,
}

impl Envelope {
    fn new(mut pts: Vec<(f64, f64)>, lo: f64, hi: f64) -> Result<Envelope> {
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        pts.dedup_by(|a, b| a.0 == b.0);
        if pts.len() < 2 {
            return Err(Error::UnboundedTarget);
        }
        let mut env = Envelope { pts, lo, hi, log_mass: Vec::new(), total_log_mass: 0.0, cum: Vec::new() };
        env.rebuild()?;
        Ok(env)
    }

    fn left_slope(&self) -> f64 {
        let (t0, l0) = self.pts[0];
        let (t1, l1) = self.pts[1];
        (l1 - l0) / (t1 - t0)
    }

    fn right_slope(&self) -> f64 {
        let m = self.pts.len();
        let (ta, la) = self.pts[m - 2];
        let (tb, lb) = self.pts[m - 1];
        (lb - la) / (tb - ta)
    }

    fn rebuild(&mut self) -> Result<()> {
        let m = self.pts.len();
        self.log_mass.clear();
        // left tail
        let (t0, l0) = self.pts[0];
        let s0 = self.left_slope();
        let left = if self.lo == f64::NEG_INFINITY {
            if s0 > 0.0 {
                l0 - s0.ln()
            } else {
                return Err(Error::UnboundedTarget);
            }
        } else if self.lo < t0 {
            segment_log_mass(self.lo, t0, l0 + s0 * (self.lo - t0), l0)
        } else {
            f64::NEG_INFINITY
        };
        self.log_mass.push(left);
        for k in 0..m - 1 {
            let (a, ga) = self.pts[k];
            let (b, gb) = self.pts[k + 1];
            self.log_mass.push(segment_log_mass(a, b, ga, gb));
        }
        // right tail
        let (tl, ll) = self.pts[m - 1];
        let s1 = self.right_slope();
        let right = if self.hi == f64::INFINITY {
            if s1 < 0.0 {
                ll - (-s1).ln()
            } else {
                return Err(Error::UnboundedTarget);
            }
        } else if self.hi > tl {
            segment_log_mass(tl, self.hi, ll, ll + s1 * (self.hi - tl))
        } else {
            f64::NEG_INFINITY
        };
        self.log_mass.push(right);

        let max = self.log_mass.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(Error::UnboundedTarget);
        }
        let sum_exp: f64 = self.log_mass.iter().map(|lm| (lm - max).exp()).sum();
        self.total_log_mass = max + sum_exp.ln();
        if !self.total_log_mass.is_finite() {
            return Err(Error::UnboundedTarget);
        }
        self.cum.clear();
        let mut acc = 0.0;
        for lm in &self.log_mass {
            acc += (lm - self.total_log_mass).exp();
            self.cum.push(acc);
        }
        if let Some(last) = self.cum.last_mut() {
            *last = 1.0;
        }
        Ok(())
    }

    /// Envelope log-density (unnormalized, same scale as the grid values).
    fn log_at(&self, x: f64) -> f64 {
        let m = self.pts.len();
        if x <= self.pts[0].0 {
            let (t0, l0) = self.pts[0];
            return l0 + self.left_slope() * (x - t0);
        }
        if x >= self.pts[m - 1].0 {
            let (tl, ll) = self.pts[m - 1];
            return ll + self.right_slope() * (x - tl);
        }
        let idx = self.pts.partition_point(|&(t, _)| t <= x);
        let (a, ga) = self.pts[idx - 1];
        let (b, gb) = self.pts[idx];
        ga + (gb - ga) * (x - a) / (b - a)
    }

    /// Exact inversion sampling from the piecewise-exponential envelope.
    fn sample(&self, rng: &mut RngStream) -> f64 {
        let u = rng.uniform();
        let seg = self.cum.partition_point(|&c| c <= u).min(self.cum.len() - 1);
        let m = self.pts.len();
        let v = rng.uniform_pos();
        let x = if seg == 0 {
            // left tail
            let (t0, l0) = self.pts[0];
            let s = self.left_slope();
            if self.lo == f64::NEG_INFINITY {
                t0 + v.ln() / s
            } else {
                invert_segment(self.lo, t0, l0 + s * (self.lo - t0), l0, v)
            }
        } else if seg == m {
            // right tail
            let (tl, ll) = self.pts[m - 1];
            let s = self.right_slope();
            if self.hi == f64::INFINITY {
                tl + (1.0 - v).max(f64::MIN_POSITIVE).ln() / s
            } else {
                invert_segment(tl, self.hi, ll, ll + s * (self.hi - tl), v)
            }
        } else {
            let (a, ga) = self.pts[seg - 1];
            let (b, gb) = self.pts[seg];
            invert_segment(a, b, ga, gb, v)
        };
        x.clamp(self.lo, self.hi)
    }

    fn insert(&mut self, x: f64, lx: f64) -> Result<()> {
        let idx = self.pts.partition_point(|&(t, _)| t < x);
        if idx < self.pts.len() && self.pts[idx].0 == x {
            return Ok(());
        }
        self.pts.insert(idx, (x, lx));
        self.rebuild()
    }
}

/// Invert the within-segment CDF of exp(linear) on [a, b] at u in (0, 1).
fn invert_segment(a: f64, b: f64, ga: f64, gb: f64, u: f64) -> f64 {
    let width = b - a;
    let s = (gb - ga) / width;
    let sw = s * width;
    if sw.abs() < 1e-9 {
        a + u * width
    } else if sw > 0.0 {
        // work from the high end so exp(-sw) cannot overflow
        b + ((1.0 - u) * (-sw).exp() + u).ln() / s
    } else {
        a + (1.0 - u * (1.0 - sw.exp())).ln() / s
    }
}

/// Run the adaptive independence sampler on a univariate target for `n`
/// iterations.
pub fn aims_run(
    target: &TargetDensity,
    n: usize,
    cfg: &AimsConfig,
    rng: &mut RngStream,
) -> Result<Chain> {
    if target.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: target.dim() });
    }
    let (slo, shi) = target.support()[0];
    let blo = cfg.bracket.0.max(slo);
    let bhi = cfg.bracket.1.min(shi);
    if !(blo < bhi) {
        return Err(Error::InvalidParameter(format!(
            "bracket [{}, {}] does not intersect the support",
            cfg.bracket.0, cfg.bracket.1
        )));
    }
    let m0 = cfg.grid_init.max(3);
    let mut pts = Vec::with_capacity(m0);
    for i in 0..m0 {
        let t = blo + (bhi - blo) * i as f64 / (m0 - 1) as f64;
        let l = target.log_density(&[t]);
        if l.is_finite() {
            pts.push((t, l));
        }
    }
    let mut env = Envelope::new(pts, slo, shi)?;
    let evals0 = target.eval_count();

    // start at the best grid point seen so far
    let (mut x, mut lx) =
        env.pts.iter().cloned().max_by(|a, b| a.1.partial_cmp(&b.1).unwrap()).unwrap();

    let mut chain = Chain::with_capacity(generic_labels(1), n, rng.seed());
    let mut accepted = 0u64;
    let t0 = Instant::now();
    for _ in 0..n {
        let y = env.sample(rng);
        let ly = target.log_density(&[y]);
        let log_ratio = (ly - lx) - (env.log_at(y) - env.log_at(x));
        if ly.is_finite() && log_ratio > rng.uniform_pos().ln() {
            x = y;
            lx = ly;
            accepted += 1;
        } else if env.pts.len() < cfg.grid_cap && ly.is_finite() {
            env.insert(y, ly)?;
        }
        chain.push(&[x, lx]);
    }
    chain.wall_seconds = t0.elapsed().as_secs_f64();
    chain.eval_count = target.eval_count() - evals0;
    chain.accepted = vec![MoveStats { name: "aims".into(), proposed: n as u64, accepted }];
    Ok(chain)
}
