//! Minimal dense linear algebra and quadrature.
//!
//! Everything here is sized for this problem family: matrices of at most a
//! few thousand rows and a few dozen columns, factored or integrated inside
//! samplers and test oracles. Plain row-major storage, basic Cholesky, and a
//! composite Gauss-Legendre rule that doubles its subdivision until the
//! estimate stabilizes.

use crate::error::{Error, Result};
use std::sync::OnceLock;

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch { expected: c, got: row.len() });
            }
            for &v in row {
                if !v.is_finite() {
                    return Err(Error::InvalidParameter(format!("non-finite matrix entry {v}")));
                }
                data.push(v);
            }
        }
        Ok(DenseMatrix { rows: r, cols: c, data })
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![0.0; self.rows];
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            out[i] = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        out
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// x' A y for vectors of matching dimension.
    pub fn quadratic_form(&self, x: &[f64], y: &[f64]) -> f64 {
        self.mul_vec(y).iter().zip(x).map(|(a, b)| a * b).sum()
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Lower-triangular Cholesky factor, L L' = A.
#[derive(Clone, Debug)]
pub struct CholFactor {
    l: DenseMatrix,
}

impl CholFactor {
    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    pub fn lower(&self) -> &DenseMatrix {
        &self.l
    }

    /// L v (used to draw correlated normals).
    pub fn lower_times(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(v.len(), n);
        let mut out = vec![0.0; n];
        for i in 0..n {
            out[i] = (0..=i).map(|j| self.l[(i, j)] * v[j]).sum();
        }
        out
    }
}

/// Cholesky factorization of a symmetric positive-definite matrix.
pub fn cholesky(a: &DenseMatrix) -> Result<CholFactor> {
    let n = a.rows();
    if n == 0 || a.cols() != n {
        return Err(Error::DimensionMismatch { expected: n.max(1), got: a.cols() });
    }
    let scale = a.max_abs();
    for i in 0..n {
        for j in (i + 1)..n {
            if (a[(i, j)] - a[(j, i)]).abs() > 1e-12 * scale.max(1e-300) {
                return Err(Error::InvalidParameter(format!(
                    "matrix not symmetric at ({i},{j}): {} vs {}",
                    a[(i, j)],
                    a[(j, i)]
                )));
            }
        }
    }
    let mut l = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return Err(Error::NotPositiveDefinite { index: i, pivot: s });
                }
                l[(i, i)] = s.sqrt();
            } else {
                l[(i, j)] = s / l[(j, j)];
            }
        }
    }
    Ok(CholFactor { l })
}

/// Solve A x = b given the Cholesky factor of A.
pub fn chol_solve(f: &CholFactor, b: &[f64]) -> Result<Vec<f64>> {
    let n = f.dim();
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.len() });
    }
    let l = &f.l;
    let mut x = b.to_vec();
    for i in 0..n {
        for j in 0..i {
            x[i] -= l[(i, j)] * x[j];
        }
        x[i] /= l[(i, i)];
    }
    for i in (0..n).rev() {
        for j in (i + 1)..n {
            x[i] -= l[(j, i)] * x[j];
        }
        x[i] /= l[(i, i)];
    }
    Ok(x)
}

/// log det A = 2 sum log L_ii.
pub fn logdet_from_chol(f: &CholFactor) -> f64 {
    (0..f.dim()).map(|i| f.l[(i, i)].ln()).sum::<f64>() * 2.0
}

/// Numerical rank of a symmetric positive semi-definite matrix by greedy
/// pivoted elimination; pivots below `rel_tol` times the largest initial
/// diagonal count as zero. Intended for small matrices.
pub fn psd_rank(a: &DenseMatrix, rel_tol: f64) -> usize {
    let n = a.rows();
    assert_eq!(a.cols(), n);
    let mut m = a.clone();
    let mut active: Vec<usize> = (0..n).collect();
    let thresh = rel_tol * (0..n).map(|i| a[(i, i)]).fold(0.0, f64::max);
    let mut rank = 0;
    while !active.is_empty() {
        let (pos, &piv_idx) = match active
            .iter()
            .enumerate()
            .max_by(|x, y| m[(*x.1, *x.1)].partial_cmp(&m[(*y.1, *y.1)]).unwrap())
        {
            Some(p) => p,
            None => break,
        };
        let piv = m[(piv_idx, piv_idx)];
        if piv <= thresh {
            break;
        }
        rank += 1;
        active.swap_remove(pos);
        for &i in &active {
            for &j in &active {
                let upd = m[(i, piv_idx)] * m[(piv_idx, j)] / piv;
                m[(i, j)] -= upd;
            }
        }
    }
    rank
}

fn gauss_legendre_20() -> &'static [(f64, f64)] {
    static NODES: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    NODES.get_or_init(|| {
        let n = 20usize;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let mut p0 = 1.0;
                let mut p1 = x;
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            out.push((x, w));
        }
        out
    })
}

/// Integrate f over [lo, hi] with composite 20-point Gauss-Legendre panels,
/// doubling the panel count from `n` until the estimate moves by less than
/// 1e-10 relative.
pub fn quad_1d<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, n: usize) -> Result<f64> {
    if !(lo.is_finite() && hi.is_finite()) || hi < lo {
        return Err(Error::InvalidParameter(format!("bad interval [{lo}, {hi}]")));
    }
    let nodes = gauss_legendre_20();
    let eval = |panels: usize| -> Result<f64> {
        let h = (hi - lo) / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let a = lo + p as f64 * h;
            let mid = a + 0.5 * h;
            let half = 0.5 * h;
            let mut acc = 0.0;
            for &(x, w) in nodes {
                let t = mid + half * x;
                let v = f(t);
                if !v.is_finite() {
                    return Err(Error::NonFinite { at: t });
                }
                acc += w * v;
            }
            total += acc * half;
        }
        Ok(total)
    };
    let mut panels = n.max(16);
    let mut prev = eval(panels)?;
    for _ in 0..8 {
        panels *= 2;
        let cur = eval(panels)?;
        let diff = (cur - prev).abs();
        if diff <= 1e-10 * cur.abs().max(1e-300) {
            return Ok(cur);
        }
        prev = cur;
    }
    Ok(prev)
}
