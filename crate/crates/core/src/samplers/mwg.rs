//! Metropolis-within-Gibbs composer: an ordered plan of block updaters, each
//! either an exact conditional draw or a random-walk Metropolis sub-kernel
//! repeated a configured number of times. One iteration is one sweep over
//! all blocks in order.

use super::state_labels;
use crate::chain::{Chain, MoveStats};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::target::TargetDensity;
use std::time::Instant;

pub type ExactDraw = Box<dyn Fn(&mut [f64], &mut RngStream) -> Result<()> + Send + Sync>;

pub enum BlockKind {
    /// Draws the block's coordinates from their exact full conditional;
    /// always accepted.
    Exact(ExactDraw),
    /// RWM on the block's coordinates against the full target, repeated.
    Rwm { step_sd: Vec<f64>, repeats: usize },
}

pub struct MwgBlock {
    pub name: String,
    pub coords: Vec<usize>,
    pub kind: BlockKind,
}

pub struct MwgPlan {
    pub blocks: Vec<MwgBlock>,
}

impl MwgPlan {
    /// Blocks must partition the coordinate index set.
    pub fn validate(&self, dim: usize) -> Result<()> {
        let mut seen = vec![false; dim];
        for b in &self.blocks {
            for &c in &b.coords {
                if c >= dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: c });
                }
                if seen[c] {
                    return Err(Error::InvalidParameter(format!(
                        "coordinate {c} appears in more than one block"
                    )));
                }
                seen[c] = true;
            }
            if let BlockKind::Rwm { step_sd, repeats } = &b.kind {
                if step_sd.len() != b.coords.len() {
                    return Err(Error::DimensionMismatch {
                        expected: b.coords.len(),
                        got: step_sd.len(),
                    });
                }
                if step_sd.iter().any(|&s| !(s > 0.0)) || *repeats == 0 {
                    return Err(Error::InvalidParameter(format!(
                        "block {:?} needs positive step_sd and repeats >= 1",
                        b.name
                    )));
                }
            }
        }
        if let Some(c) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidParameter(format!("coordinate {c} not covered by any block")));
        }
        Ok(())
    }
}

/// Run `n` sweeps of the plan over the target.
pub fn mwg_run(
    plan: &MwgPlan,
    target: &TargetDensity,
    init: &[f64],
    n: usize,
    rng: &mut RngStream,
) -> Result<Chain> {
    let dim = target.dim();
    plan.validate(dim)?;
    let mut x = init.to_vec();
    if !target.log_density(&x).is_finite() {
        return Err(Error::BadInit);
    }
    let evals0 = target.eval_count();

    let mut stats: Vec<MoveStats> = plan
        .blocks
        .iter()
        .map(|b| MoveStats { name: b.name.clone(), proposed: 0, accepted: 0 })
        .collect();
    let mut chain = Chain::with_capacity(state_labels(dim), n, rng.seed());
    let mut y = vec![0.0; dim];
    let mut lp = f64::NAN; // invalid until the first RWM block evaluates

    let t0 = Instant::now();
    for _ in 0..n {
        let mut lp_valid = false;
        for (bi, block) in plan.blocks.iter().enumerate() {
            match &block.kind {
                BlockKind::Exact(draw) => {
                    draw(&mut x, rng)?;
                    lp_valid = false;
                    stats[bi].proposed += 1;
                    stats[bi].accepted += 1;
                }
                BlockKind::Rwm { step_sd, repeats } => {
                    if !lp_valid {
                        lp = target.log_density(&x);
                        lp_valid = true;
                    }
                    for _ in 0..*repeats {
                        y.copy_from_slice(&x);
                        for (k, &c) in block.coords.iter().enumerate() {
                            y[c] = x[c] + step_sd[k] * rng.normal();
                        }
                        stats[bi].proposed += 1;
                        if target.in_support(&y) {
                            let lp_y = target.log_density(&y);
                            if lp_y - lp > rng.uniform_pos().ln() {
                                x.copy_from_slice(&y);
                                lp = lp_y;
                                stats[bi].accepted += 1;
                            }
                        }
                    }
                }
            }
        }
        chain.push(&x);
    }
    chain.wall_seconds = t0.elapsed().as_secs_f64();
    chain.eval_count = target.eval_count() - evals0;
    chain.accepted = stats;
    Ok(chain)
}
