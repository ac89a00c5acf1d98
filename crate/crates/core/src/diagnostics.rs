//! Chain quality metrics: autocorrelation, integrated autocorrelation time
//! (IACT) in the statistics convention tau = 1 + 2 sum rho_k, effective
//! sample size N/tau, and cost per effective sample T/ESS.
//!
//! The IACT window is chosen by the Sokal self-consistency rule: the
//! smallest W with W >= c * tau(W), scanning W upward, with c = 6.

use crate::chain::Chain;
use crate::error::{Error, Result};
use std::fmt::Write as _;

const WINDOW_FACTOR: f64 = 6.0;

fn centered(series: &[f64]) -> Result<(Vec<f64>, f64)> {
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    let z: Vec<f64> = series.iter().map(|v| v - mean).collect();
    let c0 = z.iter().map(|v| v * v).sum::<f64>() / n;
    if c0 == 0.0 || !c0.is_finite() {
        return Err(Error::ConstantSeries);
    }
    Ok((z, c0))
}

#[inline]
fn lag_corr(z: &[f64], c0: f64, k: usize) -> f64 {
    let n = z.len();
    let mut s = 0.0;
    for t in 0..n - k {
        s += z[t] * z[t + k];
    }
    s / (n as f64 * c0)
}

/// Autocorrelation coefficients rho_0..rho_max_lag with the biased
/// (divide-by-N) estimator.
pub fn autocorr(series: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    if series.len() < 4 * max_lag.max(1) {
        return Err(Error::InvalidParameter(format!(
            "series length {} is too short for max_lag {max_lag}",
            series.len()
        )));
    }
    let (z, c0) = centered(series)?;
    let mut rho = Vec::with_capacity(max_lag + 1);
    rho.push(1.0);
    for k in 1..=max_lag {
        rho.push(lag_corr(&z, c0, k));
    }
    Ok(rho)
}

/// IACT with the automatic window, returned as (tau, standard error).
///
/// tau = 1 + 2 sum_{k<=W} rho_k; err = tau * sqrt(2(2W+1)/N).
pub fn iact(series: &[f64]) -> Result<(f64, f64)> {
    if series.len() < 1000 {
        return Err(Error::InvalidParameter(format!(
            "series length {} < 1000; IACT estimate would be unreliable",
            series.len()
        )));
    }
    let (z, c0) = centered(series)?;
    let n = z.len();
    let mut tau = 1.0;
    let w_max = n / 2;
    for w in 1..=w_max {
        tau += 2.0 * lag_corr(&z, c0, w);
        if (w as f64) >= WINDOW_FACTOR * tau {
            let tau = tau.max(f64::MIN_POSITIVE);
            let err = tau * (2.0 * (2.0 * w as f64 + 1.0) / n as f64).sqrt();
            return Ok((tau, err));
        }
    }
    Err(Error::WindowFailure)
}

/// Cost per effective sample: wall_seconds * tau / n.
pub fn cces(wall_seconds: f64, n: usize, tau: f64) -> Result<f64> {
    if !(wall_seconds > 0.0) || n == 0 || !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "cces needs positive inputs: T={wall_seconds}, N={n}, tau={tau}"
        )));
    }
    Ok(wall_seconds * tau / n as f64)
}

/// Diagnostics for one monitored statistic.
#[derive(Clone, Debug)]
pub struct DiagRow {
    pub model: String,
    pub sampler: String,
    pub statistic: String,
    pub n: usize,
    pub burn: usize,
    pub tau: f64,
    pub tau_err: f64,
    pub ess: f64,
    pub wall_seconds: f64,
    pub cces: f64,
    pub mean: f64,
}

/// Per-statistic chain diagnostics, one row per monitored statistic.
#[derive(Clone, Debug, Default)]
pub struct DiagReport {
    pub rows: Vec<DiagRow>,
}

impl DiagReport {
    /// Diagnose every column of a (post-burn) chain of monitored statistics.
    pub fn from_chain(model: &str, sampler: &str, burn: usize, chain: &Chain) -> Result<DiagReport> {
        let mut rows = Vec::with_capacity(chain.dim());
        for j in 0..chain.dim() {
            let col = chain.column(j);
            let (tau, tau_err) = iact(&col)?;
            let n = col.len();
            let ess = n as f64 / tau;
            let c = if chain.wall_seconds > 0.0 { chain.wall_seconds * tau / n as f64 } else { 0.0 };
            rows.push(DiagRow {
                model: model.to_string(),
                sampler: sampler.to_string(),
                statistic: chain.labels[j].clone(),
                n,
                burn,
                tau,
                tau_err,
                ess,
                wall_seconds: chain.wall_seconds,
                cces: c,
                mean: col.iter().sum::<f64>() / n as f64,
            });
        }
        Ok(DiagReport { rows })
    }

    pub fn row(&self, statistic: &str) -> Option<&DiagRow> {
        self.rows.iter().find(|r| r.statistic == statistic)
    }

    pub fn to_csv_string(&self) -> String {
        let mut s = String::from(
            "model,sampler,statistic,n,burn,tau,tau_err,ess,wall_seconds,cces,mean\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.model, r.sampler, r.statistic, r.n, r.burn, r.tau, r.tau_err, r.ess,
                r.wall_seconds, r.cces, r.mean
            );
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn ar1(rho: f64, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = RngStream::new(seed);
        let sd = (1.0 - rho * rho).sqrt();
        let mut x = 0.0;
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            x = rho * x + sd * rng.normal();
            out.push(x);
        }
        out
    }

    #[test]
    fn autocorr_iid_flips() {
        let mut rng = RngStream::new(1);
        let series: Vec<f64> =
            (0..100_000).map(|_| if rng.uniform() < 0.5 { -1.0 } else { 1.0 }).collect();
        let rho = autocorr(&series, 10).unwrap();
        assert_eq!(rho[0], 1.0);
        for k in 1..=10 {
            assert!(rho[k].abs() < 0.02, "rho[{k}] = {}", rho[k]);
        }
    }

    #[test]
    fn autocorr_ar1_closed_form() {
        let series = ar1(0.9, 1_000_000, 2);
        let rho = autocorr(&series, 20).unwrap();
        for k in 1..=20 {
            let expect = 0.9f64.powi(k as i32);
            assert!((rho[k as usize] - expect).abs() < 0.01, "rho[{k}] = {}", rho[k as usize]);
        }
    }

    #[test]
    fn autocorr_alternating() {
        let series: Vec<f64> = (0..10_000).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let rho = autocorr(&series, 2).unwrap();
        assert!((rho[1] + 1.0).abs() < 1e-3, "rho1 = {}", rho[1]);
    }

    #[test]
    fn autocorr_rejects_constant() {
        let series = vec![2.0; 5000];
        assert!(matches!(autocorr(&series, 5), Err(Error::ConstantSeries)));
    }

    #[test]
    fn iact_iid() {
        let mut rng = RngStream::new(3);
        let series: Vec<f64> = (0..100_000).map(|_| rng.normal()).collect();
        let (tau, err) = iact(&series).unwrap();
        assert!((tau - 1.0).abs() < 0.1, "tau {tau}");
        assert!(err > 0.0);
    }

    #[test]
    fn iact_ar1_geometric_sum() {
        // tau = (1+rho)/(1-rho) = 19 for rho = 0.9
        let series = ar1(0.9, 1_000_000, 4);
        let (tau, _) = iact(&series).unwrap();
        assert!((tau - 19.0).abs() < 1.9, "tau {tau}");
    }

    #[test]
    fn iact_affine_invariant() {
        let series = ar1(0.7, 50_000, 5);
        let mapped: Vec<f64> = series.iter().map(|v| -3.25 * v + 11.0).collect();
        let (t1, e1) = iact(&series).unwrap();
        let (t2, e2) = iact(&mapped).unwrap();
        assert!((t1 - t2).abs() <= 1e-12 * t1.abs(), "{t1} vs {t2}");
        assert!((e1 - e2).abs() <= 1e-12 * e1.abs());
    }

    #[test]
    fn iact_thinned_consistency() {
        // thinned AR(1): tau_thinned <= max(1 + 2eps, tau/k) within noise
        let series = ar1(0.9, 1_000_000, 6);
        let (tau, _) = iact(&series).unwrap();
        for k in [2usize, 5, 10] {
            let thinned: Vec<f64> = series.iter().step_by(k).copied().collect();
            let (tk, ek) = iact(&thinned).unwrap();
            let bound = (1.0 + 0.1).max(tau / k as f64);
            assert!(tk <= bound + 5.0 * ek, "k={k}: tau_thin {tk} bound {bound}");
        }
    }

    #[test]
    fn iact_short_series_rejected() {
        assert!(iact(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn ess_times_tau_is_n() {
        let series = ar1(0.5, 20_000, 7);
        let (tau, _) = iact(&series).unwrap();
        let n = series.len() as f64;
        let ess = n / tau;
        assert!((ess * tau - n).abs() <= 1e-12 * n);
    }

    #[test]
    fn cces_arithmetic() {
        assert_eq!(cces(1.0, 1000, 1.0).unwrap(), 0.001);
        // doubling N at fixed tau and fixed T/N keeps cces per sample: check scaling identity
        let c1 = cces(1.0, 1000, 2.0).unwrap();
        let c2 = cces(2.0, 2000, 2.0).unwrap();
        assert!((c1 - c2).abs() < 1e-15);
        assert!(cces(0.0, 10, 1.0).is_err());
        assert!(cces(1.0, 0, 1.0).is_err());
        assert!(cces(1.0, 10, -1.0).is_err());
    }
}
