//! The four case studies, each packaged as a [`ModelBundle`]: sufficient
//! statistics precomputed from the data, the hyperparameter marginal
//! log-density, a joint Gibbs sweep over (latents, hyperparameters), the
//! latent full conditional for marginal-then-conditional sampling, and the
//! pieces of the one-block identity used as a correctness cross-check.

pub mod censored;
pub mod dyes;
pub mod pump;
pub mod ratpup;

use crate::chain::{Chain, MoveStats};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::samplers::MwgPlan;
use crate::target::TargetDensity;
use std::time::Instant;

/// A case study under one handle.
///
/// The "marginal point" in the methods below is a state vector of the
/// marginal sampler's coordinate system (`marginal_labels`), which for some
/// models is a transformed parameterization; `monitor_marginal` maps it to
/// the reported statistics.
pub trait ModelBundle: Send + Sync {
    fn id(&self) -> &'static str;

    /// Coordinates of the marginal sampler state.
    fn marginal_labels(&self) -> Vec<String>;
    /// Reported statistics (shared by marginal and Gibbs paths).
    fn monitored_labels(&self) -> Vec<String>;
    /// Latent coordinates, for marginal-then-conditional output.
    fn latent_labels(&self) -> Vec<String>;

    fn marginal_target(&self) -> Result<TargetDensity>;
    fn marginal_init(&self) -> Vec<f64>;
    /// Second starting point for pair samplers; differs from
    /// `marginal_init` in every coordinate.
    fn marginal_init_pair(&self) -> Vec<f64>;
    fn monitor_marginal(&self, point: &[f64]) -> Vec<f64>;

    fn gibbs_init(&self, rng: &mut RngStream) -> Vec<f64>;
    fn gibbs_sweep(&self, state: &mut [f64], rng: &mut RngStream);
    fn monitor_gibbs(&self, state: &[f64]) -> Vec<f64>;

    /// Draw latents from their full conditional given a marginal point.
    fn sample_latent(&self, point: &[f64], rng: &mut RngStream) -> Vec<f64>;

    /// log f(y | x, theta), fully normalized in y.
    fn log_lik_given_latent(&self, point: &[f64], x: &[f64]) -> f64;
    /// log f(x | theta), fully normalized in x.
    fn log_latent_prior(&self, point: &[f64], x: &[f64]) -> f64;
    /// log f(x | y, theta), fully normalized in x.
    fn log_latent_posterior(&self, point: &[f64], x: &[f64]) -> f64;

    /// Tailor-made Metropolis-within-Gibbs plan over the marginal state, with
    /// proposal steps tuned by a training run; `None` when the model has no
    /// tailored plan. `burn_hint` sizes the training run where the recipe
    /// ties it to the production burn-in.
    fn mwg_plan(&self, burn_hint: usize, rng: &mut RngStream) -> Result<Option<MwgPlan>> {
        let _ = (burn_hint, rng);
        Ok(None)
    }

    /// Initial bracket for the univariate adaptive independence sampler.
    fn aims_bracket(&self) -> Option<(f64, f64)> {
        None
    }
}

/// One-block evaluation of the marginal likelihood at a latent point x*:
/// log f(y|x*, theta) + log f(x*|theta) - log f(x*|y, theta).
///
/// The result is independent of x* whenever the three pieces are
/// normalized consistently, which is exactly what this cross-check probes.
pub fn one_block_check(model: &dyn ModelBundle, point: &[f64], x_star: &[f64]) -> Result<f64> {
    let post = model.log_latent_posterior(point, x_star);
    if !post.is_finite() {
        return Err(Error::ZeroDensityPoint);
    }
    Ok(model.log_lik_given_latent(point, x_star) + model.log_latent_prior(point, x_star) - post)
}

/// Run `n` sweeps of the model's joint Gibbs sampler, recording the
/// monitored statistics each sweep.
pub fn gibbs_run(model: &dyn ModelBundle, n: usize, rng: &mut RngStream) -> Chain {
    let mut state = model.gibbs_init(rng);
    let mut chain = Chain::with_capacity(model.monitored_labels(), n, rng.seed());
    let t0 = Instant::now();
    for _ in 0..n {
        model.gibbs_sweep(&mut state, rng);
        chain.push(&model.monitor_gibbs(&state));
    }
    chain.wall_seconds = t0.elapsed().as_secs_f64();
    chain.accepted =
        vec![MoveStats { name: "gibbs".into(), proposed: n as u64, accepted: n as u64 }];
    chain
}

pub const MODEL_IDS: [&str; 4] = ["pump", "censored", "dyes", "ratpup"];
