//! General-purpose MCMC kernels over a [`TargetDensity`].
//!
//! All kernels share the same contracts: proposals falling outside the box
//! support are rejected without evaluating the target, every recorded state
//! has finite log-density, and each run stores per-move-class acceptance
//! counts plus the wall time of the sweep loop alone.

mod aims;
mod am;
mod mwg;
mod rwm;
mod twalk;

pub use aims::{aims_run, AimsConfig};
pub use am::{am_run, AmConfig};
pub use mwg::{mwg_run, BlockKind, MwgBlock, MwgPlan};
pub use rwm::{rwm_run, RwmConfig};
pub use twalk::{twalk_run, TwalkConfig};

use crate::chain::Chain;
use crate::error::{Error, Result};

/// Proposal step from a training run: twice the sample standard deviation of
/// the selected column.
pub fn tune_rwm_sd(training_chain: &Chain, column: usize) -> Result<f64> {
    if training_chain.len() < 100 {
        return Err(Error::InvalidParameter(format!(
            "training chain too short: {} < 100",
            training_chain.len()
        )));
    }
    if column >= training_chain.dim() {
        return Err(Error::DimensionMismatch { expected: training_chain.dim(), got: column });
    }
    let col = training_chain.column(column);
    let n = col.len() as f64;
    let mean = col.iter().sum::<f64>() / n;
    let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    if var <= 0.0 || !var.is_finite() {
        return Err(Error::DegenerateChain(column));
    }
    Ok(2.0 * var.sqrt())
}

pub(crate) fn state_labels(dim: usize) -> Vec<String> {
    (0..dim).map(|i| format!("x{i}")).collect()
}

pub(crate) fn generic_labels(dim: usize) -> Vec<String> {
    let mut labels = state_labels(dim);
    labels.push("log_target".to_string());
    labels
}
