//! Dense real matrices: LU factorization, inverse, rank and a power-iteration
//! spectral radius estimate for nonnegative matrices.

use std::ops::{Index, IndexMut};

use crate::error::{shape_mismatch, Error, Result};

/// Default relative pivot threshold for [`lu_factor`].
pub const PIVOT_TOL: f64 = 1e-12;

/// Dense row-major real matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RealMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from row-major data.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(shape_mismatch(
                "RealMatrix::from_vec",
                rows * cols,
                data.len(),
            ));
        }
        Ok(RealMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(shape_mismatch("RealMatrix::from_rows", cols, r.len()));
            }
            data.extend_from_slice(r);
        }
        Ok(RealMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Self {
        RealMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Entry-wise absolute value.
    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(shape_mismatch("RealMatrix::mul_vec", self.cols, x.len()));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn matmul(&self, b: &RealMatrix) -> Result<RealMatrix> {
        if self.cols != b.rows {
            return Err(shape_mismatch(
                "RealMatrix::matmul",
                format!("{} rows", self.cols),
                format!("{} rows", b.rows),
            ));
        }
        let mut c = Self::zeros(self.rows, b.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..b.cols {
                    c[(i, j)] += a * b[(k, j)];
                }
            }
        }
        Ok(c)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

/// Infinity norm of a vector.
pub fn vec_norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `PA = LU` with unit lower `L`, stored compactly.
#[derive(Clone, Debug)]
pub struct LuFactors {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

/// LU factorization with partial pivoting.
///
/// A pivot is treated as zero when its magnitude is below `tol` times the
/// largest absolute entry of its original row.
pub fn lu_factor_with_tol(a: &RealMatrix, tol: f64) -> Result<LuFactors> {
    if !a.is_square() {
        return Err(shape_mismatch(
            "lu_factor",
            "square matrix",
            format!("{}x{}", a.rows, a.cols),
        ));
    }
    let n = a.rows;
    let mut lu = a.data.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let scale: Vec<f64> = (0..n).map(|i| vec_norm_inf(a.row(i))).collect();

    for k in 0..n {
        let mut p = k;
        let mut best = lu[k * n + k].abs();
        for i in k + 1..n {
            let v = lu[i * n + k].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 || best < tol * scale[perm[p]] {
            return Err(Error::SingularMatrix);
        }
        if p != k {
            for j in 0..n {
                lu.swap(k * n + j, p * n + j);
            }
            perm.swap(k, p);
        }
        let piv = lu[k * n + k];
        for i in k + 1..n {
            let f = lu[i * n + k] / piv;
            lu[i * n + k] = f;
            if f == 0.0 {
                continue;
            }
            for j in k + 1..n {
                lu[i * n + j] -= f * lu[k * n + j];
            }
        }
    }
    Ok(LuFactors { n, lu, perm })
}

pub fn lu_factor(a: &RealMatrix) -> Result<LuFactors> {
    lu_factor_with_tol(a, PIVOT_TOL)
}

impl LuFactors {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        if b.len() != n {
            return Err(shape_mismatch("LuFactors::solve", n, b.len()));
        }
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s: f64 = row.iter().zip(&x[..i]).map(|(l, v)| l * v).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n + i + 1..(i + 1) * n];
            let s: f64 = row.iter().zip(&x[i + 1..]).map(|(u, v)| u * v).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        Ok(x)
    }

    pub fn inverse(&self) -> RealMatrix {
        let n = self.n;
        let mut inv = RealMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            let col = self.solve(&e).expect("dimension checked");
            e[j] = 0.0;
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }
}

pub fn lu_solve(a: &RealMatrix, b: &[f64]) -> Result<Vec<f64>> {
    lu_factor(a)?.solve(b)
}

pub fn inverse(a: &RealMatrix) -> Result<RealMatrix> {
    Ok(lu_factor(a)?.inverse())
}

/// Rank by Gaussian elimination with partial pivoting; columns whose best
/// remaining pivot is below `tol * max|a_ij|` are skipped.
pub fn numerical_rank(a: &RealMatrix, tol: f64) -> usize {
    let (m, n) = (a.rows, a.cols);
    let threshold = tol * a.max_abs();
    if a.max_abs() == 0.0 {
        return 0;
    }
    let mut w = a.data.clone();
    let mut rank = 0;
    for k in 0..n {
        if rank == m {
            break;
        }
        let mut p = rank;
        let mut best = w[rank * n + k].abs();
        for i in rank + 1..m {
            let v = w[i * n + k].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best <= threshold {
            continue;
        }
        if p != rank {
            for j in 0..n {
                w.swap(rank * n + j, p * n + j);
            }
        }
        let piv = w[rank * n + k];
        for i in rank + 1..m {
            let f = w[i * n + k] / piv;
            if f == 0.0 {
                continue;
            }
            for j in k..n {
                w[i * n + j] -= f * w[rank * n + j];
            }
        }
        rank += 1;
    }
    rank
}

/// Result of [`spectral_radius`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralEstimate {
    pub rho: f64,
    pub converged: bool,
    pub iterations: usize,
}

pub const SPECTRAL_TOL: f64 = 1e-12;
pub const SPECTRAL_MAX_ITER: usize = 10_000;

/// Spectral radius of a nonnegative square matrix by power iteration from the
/// all-ones vector.
///
/// The estimate is the ratio `‖M x‖∞ / ‖x‖∞`; iteration stops once two
/// successive ratios differ by less than `tol` (relative to the ratio when it
/// exceeds one). Without convergence the largest ratio seen is returned,
/// which is never below the first ratio `‖M‖∞ ≥ ρ(M)`.
pub fn spectral_radius(m: &RealMatrix, tol: f64, max_iter: usize) -> Result<SpectralEstimate> {
    if !m.is_square() {
        return Err(shape_mismatch(
            "spectral_radius",
            "square matrix",
            format!("{}x{}", m.rows, m.cols),
        ));
    }
    let n = m.rows;
    if n == 0 {
        return Ok(SpectralEstimate {
            rho: 0.0,
            converged: true,
            iterations: 0,
        });
    }
    let mut x = vec![1.0; n];
    let mut prev: Option<f64> = None;
    let mut running_max = 0.0f64;
    for it in 1..=max_iter {
        let y = m.mul_vec(&x)?;
        let ny = vec_norm_inf(&y);
        if !ny.is_finite() {
            return Err(Error::Overflow);
        }
        if ny == 0.0 {
            return Ok(SpectralEstimate {
                rho: 0.0,
                converged: true,
                iterations: it,
            });
        }
        let ratio = ny / vec_norm_inf(&x);
        running_max = running_max.max(ratio);
        if let Some(p) = prev {
            if (ratio - p).abs() < tol * ratio.max(1.0) {
                return Ok(SpectralEstimate {
                    rho: ratio,
                    converged: true,
                    iterations: it,
                });
            }
        }
        prev = Some(ratio);
        x = y.into_iter().map(|v| v / ny).collect();
    }
    Ok(SpectralEstimate {
        rho: running_max,
        converged: false,
        iterations: max_iter,
    })
}
