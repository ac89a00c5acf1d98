//! Pump failures: counts p_i over run times t_i with per-pump rates
//! lambda_i ~ Ga(alpha, beta) and hyperprior beta ~ Ga(gamma, delta), rate
//! convention throughout. The lambda conditional is conjugate, so the
//! marginal posterior of beta is available in closed form:
//!
//! ```text
//! f(beta | p) prop. beta^(n alpha + gamma - 1) exp(-delta beta)
//!             prod_i (beta + t_i)^-(alpha + p_i)
//! ```
//!
//! There is no fixed-dimension sufficient statistic here; evaluation is
//! intentionally O(n) over the pumps.

use super::ModelBundle;
use crate::dist::{ln_gamma, sample_gamma_unchecked};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::target::TargetDensity;

#[derive(Clone, Debug)]
pub struct PumpData {
    t: Vec<f64>,
    p: Vec<u32>,
}

impl PumpData {
    pub fn new(t: Vec<f64>, p: Vec<u32>) -> Result<Self> {
        if t.len() != p.len() {
            return Err(Error::DimensionMismatch { expected: t.len(), got: p.len() });
        }
        if t.iter().any(|&ti| !(ti > 0.0) || !ti.is_finite()) {
            return Err(Error::InvalidParameter("run times must be positive and finite".into()));
        }
        Ok(PumpData { t, p })
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.t
    }

    pub fn failures(&self) -> &[u32] {
        &self.p
    }

    /// Parse a `t,p` CSV.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut t = Vec::new();
        let mut p = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (i == 0 && line.starts_with(char::is_alphabetic)) {
                continue;
            }
            let mut parts = line.split(',');
            let bad = |reason: String| Error::MalformedRecord { line: i + 1, reason };
            let ti = parts
                .next()
                .ok_or_else(|| bad("missing t".into()))?
                .trim()
                .parse::<f64>()
                .map_err(|e| bad(format!("bad t: {e}")))?;
            let pi = parts
                .next()
                .ok_or_else(|| bad("missing p".into()))?
                .trim()
                .parse::<u32>()
                .map_err(|e| bad(format!("bad p: {e}")))?;
            t.push(ti);
            p.push(pi);
        }
        PumpData::new(t, p)
    }
}

/// The ten-pump dataset used throughout the literature.
pub fn table1() -> PumpData {
    PumpData::from_csv(include_str!("../../data/pump.csv")).expect("bundled pump fixture")
}

#[derive(Clone, Copy, Debug)]
pub struct PumpHyper {
    pub alpha: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl Default for PumpHyper {
    fn default() -> Self {
        PumpHyper { alpha: 1.8, gamma: 0.01, delta: 1.0 }
    }
}

impl PumpHyper {
    pub fn new(alpha: f64, gamma: f64, delta: f64) -> Result<Self> {
        if !(alpha > 0.0 && gamma > 0.0 && delta > 0.0) {
            return Err(Error::InvalidParameter("pump hyperparameters must be positive".into()));
        }
        Ok(PumpHyper { alpha, gamma, delta })
    }
}

/// Unnormalized log marginal posterior of beta.
pub fn log_marginal(beta: f64, data: &PumpData, h: &PumpHyper) -> f64 {
    if beta <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let n = data.len() as f64;
    let mut lp = (n * h.alpha + h.gamma - 1.0) * beta.ln() - h.delta * beta;
    for (&t, &p) in data.t.iter().zip(&data.p) {
        lp -= (h.alpha + p as f64) * (beta + t).ln();
    }
    lp
}

/// One Gibbs sweep over the joint state [lambda_1..lambda_n, beta]:
/// lambda_i ~ Ga(p_i + alpha, t_i + beta), then
/// beta ~ Ga(n alpha + gamma, delta + sum lambda).
pub fn gibbs_sweep(state: &mut [f64], data: &PumpData, h: &PumpHyper, rng: &mut RngStream) {
    let n = data.len();
    debug_assert_eq!(state.len(), n + 1);
    let beta = state[n];
    let mut sum = 0.0;
    for i in 0..n {
        state[i] = sample_gamma_unchecked(data.p[i] as f64 + h.alpha, data.t[i] + beta, rng);
        sum += state[i];
    }
    state[n] = sample_gamma_unchecked(n as f64 * h.alpha + h.gamma, h.delta + sum, rng);
}

/// Latent conditional draw: lambda_i ~ Ga(p_i + alpha, t_i + beta).
pub fn sample_latent(beta: f64, data: &PumpData, h: &PumpHyper, rng: &mut RngStream) -> Vec<f64> {
    data.t
        .iter()
        .zip(&data.p)
        .map(|(&t, &p)| sample_gamma_unchecked(p as f64 + h.alpha, t + beta, rng))
        .collect()
}

pub struct PumpModel {
    data: PumpData,
    hyper: PumpHyper,
}

impl PumpModel {
    pub fn new(data: PumpData, hyper: PumpHyper) -> Self {
        PumpModel { data, hyper }
    }

    pub fn fixture() -> Self {
        PumpModel::new(table1(), PumpHyper::default())
    }

    pub fn data(&self) -> &PumpData {
        &self.data
    }

    pub fn hyper(&self) -> &PumpHyper {
        &self.hyper
    }
}

impl ModelBundle for PumpModel {
    fn id(&self) -> &'static str {
        "pump"
    }

    fn marginal_labels(&self) -> Vec<String> {
        vec!["beta".into()]
    }

    fn monitored_labels(&self) -> Vec<String> {
        vec!["beta".into()]
    }

    fn latent_labels(&self) -> Vec<String> {
        (1..=self.data.len()).map(|i| format!("lambda{i}")).collect()
    }

    fn marginal_target(&self) -> Result<TargetDensity> {
        let data = self.data.clone();
        let h = self.hyper;
        TargetDensity::new(vec![(0.0, f64::INFINITY)], &self.marginal_init(), move |x: &[f64]| {
            log_marginal(x[0], &data, &h)
        })
    }

    fn marginal_init(&self) -> Vec<f64> {
        vec![1.0]
    }

    fn marginal_init_pair(&self) -> Vec<f64> {
        vec![2.5]
    }

    fn monitor_marginal(&self, point: &[f64]) -> Vec<f64> {
        vec![point[0]]
    }

    fn gibbs_init(&self, _rng: &mut RngStream) -> Vec<f64> {
        let beta0 = 1.0;
        let mut state: Vec<f64> = self
            .data
            .t
            .iter()
            .zip(&self.data.p)
            .map(|(&t, &p)| (p as f64 + self.hyper.alpha) / (t + beta0))
            .collect();
        state.push(beta0);
        state
    }

    fn gibbs_sweep(&self, state: &mut [f64], rng: &mut RngStream) {
        gibbs_sweep(state, &self.data, &self.hyper, rng);
    }

    fn monitor_gibbs(&self, state: &[f64]) -> Vec<f64> {
        vec![state[self.data.len()]]
    }

    fn sample_latent(&self, point: &[f64], rng: &mut RngStream) -> Vec<f64> {
        sample_latent(point[0], &self.data, &self.hyper, rng)
    }

    fn log_lik_given_latent(&self, _point: &[f64], x: &[f64]) -> f64 {
        let mut lp = 0.0;
        for ((&t, &p), &lam) in self.data.t.iter().zip(&self.data.p).zip(x) {
            if lam <= 0.0 {
                return f64::NEG_INFINITY;
            }
            let mean = t * lam;
            lp += p as f64 * mean.ln() - mean - ln_gamma(p as f64 + 1.0);
        }
        lp
    }

    fn log_latent_prior(&self, point: &[f64], x: &[f64]) -> f64 {
        let beta = point[0];
        let alpha = self.hyper.alpha;
        let mut lp = 0.0;
        for &lam in x {
            if lam <= 0.0 {
                return f64::NEG_INFINITY;
            }
            lp += alpha * beta.ln() - ln_gamma(alpha) + (alpha - 1.0) * lam.ln() - beta * lam;
        }
        lp
    }

    fn log_latent_posterior(&self, point: &[f64], x: &[f64]) -> f64 {
        let beta = point[0];
        let alpha = self.hyper.alpha;
        let mut lp = 0.0;
        for ((&t, &p), &lam) in self.data.t.iter().zip(&self.data.p).zip(x) {
            if lam <= 0.0 {
                return f64::NEG_INFINITY;
            }
            let shape = p as f64 + alpha;
            let rate = t + beta;
            lp += shape * rate.ln() - ln_gamma(shape) + (shape - 1.0) * lam.ln() - rate * lam;
        }
        lp
    }

    fn aims_bracket(&self) -> Option<(f64, f64)> {
        // coarse mode hunt on a log grid, then a generous bracket around it
        let scan: Vec<f64> = (0..64).map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / 63.0)).collect();
        let mode = scan
            .iter()
            .cloned()
            .max_by(|&a, &b| {
                log_marginal(a, &self.data, &self.hyper)
                    .partial_cmp(&log_marginal(b, &self.data, &self.hyper))
                    .unwrap()
            })
            .unwrap_or(1.0);
        Some((mode / 20.0, mode * 20.0))
    }
}
