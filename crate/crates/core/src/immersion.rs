//! The standard immersion of `KR^n` into `R^2n` and closed-form solutions of
//! systems with point matrices.
//!
//! `sti(x) = (-lo_1, ..., -lo_n, hi_1, ..., hi_n)`. Under this map inclusion
//! becomes the component-wise order and multiplication by a real matrix `Q`
//! becomes multiplication by the nonnegative block matrix `Q~`.

use crate::error::{shape_mismatch, Error, Result};
use crate::interval::{real_parts, KInterval};
use crate::linalg::IntervalVector;
use crate::real::{lu_factor, RealMatrix};

/// Maps an interval vector to `R^2n`.
pub fn sti(x: &IntervalVector) -> Vec<f64> {
    let n = x.len();
    let mut y = vec![0.0; 2 * n];
    for (i, a) in x.iter().enumerate() {
        y[i] = -a.lo();
        y[i + n] = a.hi();
    }
    y
}

/// Inverse of [`sti`]. Fails on odd length or non-finite entries.
pub fn sti_inv(y: &[f64]) -> Result<IntervalVector> {
    if !y.len().is_multiple_of(2) {
        return Err(Error::OddLength(y.len()));
    }
    let n = y.len() / 2;
    (0..n)
        .map(|i| KInterval::try_new(-y[i], y[i + n]))
        .collect::<Result<Vec<_>>>()
        .map(IntervalVector)
}

/// The `2n x 2n` matrix `(Q⁺ Q⁻; Q⁻ Q⁺)` representing `x ↦ Q x` in immersed
/// coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedMultiplier {
    n: usize,
    matrix: RealMatrix,
}

impl ExtendedMultiplier {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> RealMatrix {
        self.matrix
    }
}

pub fn extended_multiplier(q: &RealMatrix) -> Result<ExtendedMultiplier> {
    if !q.is_square() {
        return Err(shape_mismatch(
            "extended_multiplier",
            "square matrix",
            format!("{}x{}", q.rows(), q.cols()),
        ));
    }
    let n = q.rows();
    let mut m = RealMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let p = real_parts(q[(i, j)]);
            m[(i, j)] = p.pos;
            m[(i + n, j + n)] = p.pos;
            m[(i, j + n)] = p.neg;
            m[(i + n, j)] = p.neg;
        }
    }
    Ok(ExtendedMultiplier { n, matrix: m })
}

/// Outcome of the absolute regularity test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AbsRegularity {
    pub matrix_nonsingular: bool,
    pub abs_nonsingular: bool,
}

impl AbsRegularity {
    pub fn is_regular(&self) -> bool {
        self.matrix_nonsingular && self.abs_nonsingular
    }

    pub fn diagnostic(&self) -> &'static str {
        match (self.matrix_nonsingular, self.abs_nonsingular) {
            (true, true) => "absolutely regular",
            (false, true) => "the matrix is singular",
            (true, false) => "the matrix of absolute values is singular",
            (false, false) => "both the matrix and its absolute value are singular",
        }
    }
}

/// Tests whether `Q` and `|Q|` are both nonsingular, which is equivalent to
/// nonsingularity of `Q~`.
pub fn absolute_regularity(q: &RealMatrix, tol: f64) -> Result<AbsRegularity> {
    use crate::real::lu_factor_with_tol;
    if !q.is_square() {
        return Err(shape_mismatch(
            "absolute_regularity",
            "square matrix",
            format!("{}x{}", q.rows(), q.cols()),
        ));
    }
    Ok(AbsRegularity {
        matrix_nonsingular: lu_factor_with_tol(q, tol).is_ok(),
        abs_nonsingular: lu_factor_with_tol(&q.abs(), tol).is_ok(),
    })
}

pub fn is_absolutely_regular(q: &RealMatrix, tol: f64) -> bool {
    absolute_regularity(q, tol).is_ok_and(|r| r.is_regular())
}

/// Formal solution of `A x = b` for a point matrix `A`:
/// `x = sti_inv((A~)⁻¹ sti(b))`.
pub fn solve_point_system(a: &RealMatrix, b: &IntervalVector) -> Result<IntervalVector> {
    if a.rows() != b.len() {
        return Err(shape_mismatch("solve_point_system", a.rows(), b.len()));
    }
    let reg = absolute_regularity(a, crate::real::PIVOT_TOL)?;
    if !reg.is_regular() {
        return Err(Error::NotAbsolutelyRegular(reg.diagnostic().into()));
    }
    let ext = extended_multiplier(a)?;
    let y = lu_factor(ext.matrix())?.solve(&sti(b))?;
    sti_inv(&y)
}

/// Formal solution for a point matrix via midpoints and radii:
/// `A mid(x) = mid(b)` and `|A| rad(x) = rad(b)`.
pub fn markov_solve(a: &RealMatrix, b: &IntervalVector) -> Result<IntervalVector> {
    if a.rows() != b.len() {
        return Err(shape_mismatch("markov_solve", a.rows(), b.len()));
    }
    let mid = lu_factor(a)?.solve(&b.mid())?;
    let rad = lu_factor(&a.abs())?.solve(&b.rad())?;
    mid.iter()
        .zip(&rad)
        .map(|(&m, &r)| KInterval::try_new(m - r, m + r))
        .collect::<Result<Vec<_>>>()
        .map(IntervalVector)
}

/// Multimetric on `R^2n`: components `i` and `i+n` both hold
/// `max(|x_i − y_i|, |x_{i+n} − y_{i+n}|)`.
pub fn zeta(x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    if x.len() != y.len() {
        return Err(shape_mismatch("zeta", x.len(), y.len()));
    }
    if !x.len().is_multiple_of(2) {
        return Err(Error::OddLength(x.len()));
    }
    let n = x.len() / 2;
    let mut z = vec![0.0; 2 * n];
    for i in 0..n {
        let d = (x[i] - y[i]).abs().max((x[i + n] - y[i + n]).abs());
        z[i] = d;
        z[i + n] = d;
    }
    Ok(z)
}
