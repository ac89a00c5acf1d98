//! Stored MCMC output: the sample matrix, per-move-class acceptance counts,
//! wall-clock timing of the sweep loop, and the seed that produced it.
//!
//! Chains persist as a CSV of samples (header = statistic labels) plus a
//! JSON sidecar for the metadata, so a rerun with the same seed can be
//! byte-compared against the sample file alone.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

/// Proposal/acceptance tally for one move class.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MoveStats {
    pub name: String,
    pub proposed: u64,
    pub accepted: u64,
}

impl MoveStats {
    pub fn rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }
}

#[derive(Clone, Debug)]
pub struct Chain {
    pub labels: Vec<String>,
    dim: usize,
    samples: Vec<f64>,
    pub accepted: Vec<MoveStats>,
    pub wall_seconds: f64,
    pub seed: u64,
    pub eval_count: u64,
}

#[derive(Serialize, Deserialize)]
struct ChainMeta {
    seed: u64,
    iterations: usize,
    dim: usize,
    labels: Vec<String>,
    wall_seconds: f64,
    eval_count: u64,
    acceptance: Vec<MoveStats>,
}

impl Chain {
    pub fn with_capacity(labels: Vec<String>, capacity: usize, seed: u64) -> Self {
        let dim = labels.len();
        Chain {
            labels,
            dim,
            samples: Vec::with_capacity(capacity * dim),
            accepted: Vec::new(),
            wall_seconds: 0.0,
            seed,
            eval_count: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.samples.len() / self.dim
        }
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn push(&mut self, point: &[f64]) {
        debug_assert_eq!(point.len(), self.dim);
        self.samples.extend_from_slice(point);
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.samples[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        assert!(j < self.dim);
        self.samples.iter().skip(j).step_by(self.dim).copied().collect()
    }

    pub fn column_mean(&self, j: usize) -> f64 {
        let col = self.column(j);
        col.iter().sum::<f64>() / col.len() as f64
    }

    /// Drop the first `burn` rows and keep every `thin`-th row after that.
    pub fn slice(&self, burn: usize, thin: usize) -> Chain {
        let thin = thin.max(1);
        let mut out = Chain::with_capacity(self.labels.clone(), (self.len().saturating_sub(burn)) / thin + 1, self.seed);
        let mut i = burn;
        while i < self.len() {
            out.push(self.row(i));
            i += thin;
        }
        out.accepted = self.accepted.clone();
        out.wall_seconds = self.wall_seconds;
        out.eval_count = self.eval_count;
        out
    }

    /// Apply a row-wise map (e.g. raw sampler coordinates to monitored
    /// statistics), relabeling the columns.
    pub fn map_rows<F: Fn(&[f64]) -> Vec<f64>>(&self, labels: Vec<String>, f: F) -> Chain {
        let mut out = Chain::with_capacity(labels, self.len(), self.seed);
        for i in 0..self.len() {
            out.push(&f(self.row(i)));
        }
        out.accepted = self.accepted.clone();
        out.wall_seconds = self.wall_seconds;
        out.eval_count = self.eval_count;
        out
    }

    pub fn move_stats(&self, name: &str) -> Option<&MoveStats> {
        self.accepted.iter().find(|m| m.name == name)
    }

    /// Acceptance rate across all move classes.
    pub fn total_acceptance(&self) -> f64 {
        let p: u64 = self.accepted.iter().map(|m| m.proposed).sum();
        let a: u64 = self.accepted.iter().map(|m| m.accepted).sum();
        if p == 0 {
            1.0
        } else {
            a as f64 / p as f64
        }
    }

    pub fn to_csv_string(&self) -> String {
        let mut s = String::with_capacity(self.samples.len() * 20);
        s.push_str(&self.labels.join(","));
        s.push('\n');
        for i in 0..self.len() {
            let row = self.row(i);
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    s.push(',');
                }
                // shortest round-trip formatting keeps files byte-stable
                let _ = write!(s, "{v}");
            }
            s.push('\n');
        }
        s
    }

    /// Write `<path>.csv` and `<path>.meta.json` atomically (temp + rename).
    pub fn save(&self, path_stem: &Path) -> Result<()> {
        let csv_path = path_stem.with_extension("csv");
        let meta_path = path_stem.with_extension("meta.json");
        write_atomic(&csv_path, self.to_csv_string().as_bytes())?;
        let meta = ChainMeta {
            seed: self.seed,
            iterations: self.len(),
            dim: self.dim,
            labels: self.labels.clone(),
            wall_seconds: self.wall_seconds,
            eval_count: self.eval_count,
            acceptance: self.accepted.clone(),
        };
        write_atomic(&meta_path, serde_json::to_string_pretty(&meta)?.as_bytes())?;
        Ok(())
    }

    /// Read a chain back from its CSV (metadata sidecar optional).
    pub fn load_csv(path: &Path) -> Result<Chain> {
        let text = std::fs::read_to_string(path)?;
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::MalformedRecord {
            line: 1,
            reason: "empty chain file".into(),
        })?;
        let labels: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
        let mut chain = Chain::with_capacity(labels, 1024, 0);
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row: Vec<f64> = line
                .split(',')
                .map(|tok| {
                    tok.trim().parse::<f64>().map_err(|e| Error::MalformedRecord {
                        line: lineno + 2,
                        reason: format!("bad number {tok:?}: {e}"),
                    })
                })
                .collect::<Result<_>>()?;
            if row.len() != chain.dim {
                return Err(Error::MalformedRecord {
                    line: lineno + 2,
                    reason: format!("expected {} columns, got {}", chain.dim, row.len()),
                });
            }
            chain.push(&row);
        }
        Ok(chain)
    }
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}
