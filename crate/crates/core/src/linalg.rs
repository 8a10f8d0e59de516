//! Interval vectors and matrices over Kaucher arithmetic.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{shape_mismatch, Result};
use crate::interval::KInterval;
use crate::real::RealMatrix;

/// A vector of Kaucher intervals.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct IntervalVector(pub Vec<KInterval>);

impl IntervalVector {
    pub fn new(items: Vec<KInterval>) -> Self {
        IntervalVector(items)
    }

    pub fn zeros(n: usize) -> Self {
        IntervalVector(vec![KInterval::ZERO; n])
    }

    pub fn from_real(x: &[f64]) -> Self {
        IntervalVector(x.iter().map(|&v| KInterval::point(v)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, KInterval> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[KInterval] {
        &self.0
    }

    fn check_len(&self, other: &IntervalVector, op: &'static str) -> Result<()> {
        if self.len() != other.len() {
            return Err(shape_mismatch(op, self.len(), other.len()));
        }
        Ok(())
    }

    fn zip_with(
        &self,
        other: &IntervalVector,
        op: &'static str,
        f: impl Fn(KInterval, KInterval) -> KInterval,
    ) -> Result<IntervalVector> {
        self.check_len(other, op)?;
        Ok(IntervalVector(
            self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect(),
        ))
    }

    pub fn add(&self, other: &IntervalVector) -> Result<IntervalVector> {
        self.zip_with(other, "IntervalVector::add", |a, b| a + b)
    }

    /// Component-wise internal subtraction.
    pub fn ominus(&self, other: &IntervalVector) -> Result<IntervalVector> {
        self.zip_with(other, "IntervalVector::ominus", KInterval::ominus)
    }

    pub fn dual(&self) -> IntervalVector {
        IntervalVector(self.0.iter().map(|a| a.dual()).collect())
    }

    pub fn opp(&self) -> IntervalVector {
        IntervalVector(self.0.iter().map(|a| a.opp()).collect())
    }

    pub fn mid(&self) -> Vec<f64> {
        self.0.iter().map(|a| a.mid()).collect()
    }

    pub fn rad(&self) -> Vec<f64> {
        self.0.iter().map(|a| a.rad()).collect()
    }

    pub fn is_point(&self) -> bool {
        self.0.iter().all(|a| a.is_point())
    }

    /// `max_i |a_i|`, zero for an empty vector.
    pub fn mag_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, a| m.max(a.mag()))
    }

    /// `max_i Dist(x_i, y_i)`.
    pub fn dist(&self, other: &IntervalVector) -> Result<f64> {
        self.check_len(other, "IntervalVector::dist")?;
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .fold(0.0, |m, (a, b)| m.max(a.dist(*b))))
    }

    pub fn is_subset_of(&self, other: &IntervalVector) -> Result<bool> {
        self.check_len(other, "IntervalVector::is_subset_of")?;
        Ok(self.0.iter().zip(&other.0).all(|(a, b)| a.is_subset_of(*b)))
    }
}

impl Index<usize> for IntervalVector {
    type Output = KInterval;

    fn index(&self, i: usize) -> &KInterval {
        &self.0[i]
    }
}

impl IndexMut<usize> for IntervalVector {
    fn index_mut(&mut self, i: usize) -> &mut KInterval {
        &mut self.0[i]
    }
}

impl From<Vec<KInterval>> for IntervalVector {
    fn from(v: Vec<KInterval>) -> Self {
        IntervalVector(v)
    }
}

impl FromIterator<KInterval> for IntervalVector {
    fn from_iter<I: IntoIterator<Item = KInterval>>(iter: I) -> Self {
        IntervalVector(iter.into_iter().collect())
    }
}

impl fmt::Display for IntervalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// Dense row-major matrix of Kaucher intervals.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<KInterval>,
}

impl IntervalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntervalMatrix {
            rows,
            cols,
            data: vec![KInterval::ZERO; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<KInterval>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(shape_mismatch(
                "IntervalMatrix::from_vec",
                rows * cols,
                data.len(),
            ));
        }
        Ok(IntervalMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<KInterval>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(shape_mismatch("IntervalMatrix::from_rows", cols, r.len()));
            }
            data.extend_from_slice(r);
        }
        Ok(IntervalMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Degenerate interval matrix with the given point entries.
    pub fn from_real(m: &RealMatrix) -> Self {
        IntervalMatrix {
            rows: m.rows(),
            cols: m.cols(),
            data: m.as_slice().iter().map(|&v| KInterval::point(v)).collect(),
        }
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

    pub fn row(&self, i: usize) -> &[KInterval] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_point(&self) -> bool {
        self.data.iter().all(|a| a.is_point())
    }

    fn map_real(&self, f: impl Fn(KInterval) -> f64) -> RealMatrix {
        RealMatrix::from_vec(self.rows, self.cols, self.data.iter().map(|&a| f(a)).collect())
            .expect("shape preserved")
    }

    pub fn map(&self, f: impl Fn(KInterval) -> KInterval) -> IntervalMatrix {
        IntervalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| f(a)).collect(),
        }
    }

    pub fn dual(&self) -> IntervalMatrix {
        self.map(KInterval::dual)
    }

    /// Entry-wise magnitude matrix `|A|`.
    pub fn mag(&self) -> RealMatrix {
        self.map_real(KInterval::mag)
    }

    pub fn mig(&self) -> RealMatrix {
        self.map_real(KInterval::mig)
    }

    pub fn mid(&self) -> RealMatrix {
        self.map_real(KInterval::mid)
    }

    pub fn rad(&self) -> RealMatrix {
        self.map_real(KInterval::rad)
    }

    /// Entry-wise internal subtraction.
    pub fn ominus(&self, other: &IntervalMatrix) -> Result<IntervalMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(shape_mismatch(
                "IntervalMatrix::ominus",
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", other.rows, other.cols),
            ));
        }
        Ok(IntervalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a.ominus(b))
                .collect(),
        })
    }

    /// `A x` with Kaucher products, each row summed left to right.
    pub fn mul_vec(&self, x: &IntervalVector) -> Result<IntervalVector> {
        if x.len() != self.cols {
            return Err(shape_mismatch("IntervalMatrix::mul_vec", self.cols, x.len()));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x.iter())
                    .fold(KInterval::ZERO, |s, (&a, &b)| s + a * b)
            })
            .collect())
    }

    /// Formal residual `A x ⊖ b`.
    pub fn residual(&self, x: &IntervalVector, b: &IntervalVector) -> Result<IntervalVector> {
        self.mul_vec(x)?.ominus(b)
    }

    /// `max_i Dist((A x)_i, b_i)`, the distance from satisfying `A x = b`.
    pub fn residual_norm(&self, x: &IntervalVector, b: &IntervalVector) -> Result<f64> {
        self.mul_vec(x)?.dist(b)
    }

    /// Same matrix with rows reordered so that row `i` is row `perm[i]`.
    pub fn permute_rows(&self, perm: &[usize]) -> IntervalMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for &p in perm {
            data.extend_from_slice(self.row(p));
        }
        IntervalMatrix {
            rows: perm.len(),
            cols: self.cols,
            data,
        }
    }
}

impl Index<(usize, usize)> for IntervalMatrix {
    type Output = KInterval;

    fn index(&self, (i, j): (usize, usize)) -> &KInterval {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntervalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut KInterval {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv(lo: f64, hi: f64) -> KInterval {
        KInterval::new(lo, hi)
    }

    fn barth_nuding() -> IntervalMatrix {
        IntervalMatrix::from_rows(&[
            vec![iv(2.0, 4.0), iv(-2.0, 1.0)],
            vec![iv(-1.0, 2.0), iv(2.0, 4.0)],
        ])
        .unwrap()
    }

    #[test]
    fn product_and_residual() {
        let a = barth_nuding();
        let x = IntervalVector::new(vec![iv(-1.0, 1.0), iv(-1.0, 1.0)]);
        let b = IntervalVector::new(vec![iv(-2.0, 2.0), iv(-2.0, 2.0)]);
        // [2,4]*[-1,1] + [-2,1]*[-1,1] = [-4,4] + [-2,2]
        assert_eq!(a.mul_vec(&x).unwrap(), IntervalVector::new(vec![iv(-6.0, 6.0); 2]));
        let r = a.residual(&x, &b).unwrap();
        assert_eq!(r, IntervalVector::new(vec![iv(-4.0, 4.0); 2]));
        assert_eq!(a.residual_norm(&x, &b).unwrap(), 4.0);
    }

    #[test]
    fn shape_errors() {
        let a = barth_nuding();
        assert!(a.mul_vec(&IntervalVector::zeros(3)).is_err());
        assert!(IntervalVector::zeros(2).dist(&IntervalVector::zeros(1)).is_err());
        assert!(IntervalMatrix::from_rows(&[vec![iv(0.0, 0.0)], vec![]]).is_err());
    }

    #[test]
    fn descriptor_matrices() {
        let a = barth_nuding();
        assert_eq!(a.mag().as_slice(), &[4.0, 2.0, 2.0, 4.0]);
        assert_eq!(a.mid().as_slice(), &[3.0, -0.5, 0.5, 3.0]);
        assert_eq!(a.rad().as_slice(), &[1.0, 1.5, 1.5, 1.0]);
        assert_eq!(a.mig().as_slice(), &[2.0, 0.0, 0.0, 2.0]);
        assert!(!a.is_point());
        assert!(IntervalMatrix::from_real(&RealMatrix::identity(2)).is_point());
    }

    #[test]
    fn permuting_rows() {
        let a = barth_nuding();
        let p = a.permute_rows(&[1, 0]);
        assert_eq!(p[(0, 0)], iv(-1.0, 2.0));
        assert_eq!(p[(1, 1)], iv(-2.0, 1.0));
    }

    fn int_interval() -> impl Strategy<Value = KInterval> {
        (-9i32..=9, -9i32..=9).prop_map(|(l, h)| KInterval::new(l.into(), h.into()))
    }

    proptest! {
        #[test]
        fn point_matrix_product_is_linear(
            entries in proptest::collection::vec(-9i32..=9, 9),
            x in proptest::collection::vec(int_interval(), 3),
            y in proptest::collection::vec(int_interval(), 3),
        ) {
            let m = RealMatrix::from_vec(3, 3, entries.into_iter().map(f64::from).collect()).unwrap();
            let a = IntervalMatrix::from_real(&m);
            let (x, y) = (IntervalVector::new(x), IntervalVector::new(y));
            let lhs = a.mul_vec(&x.add(&y).unwrap()).unwrap();
            let rhs = a.mul_vec(&x).unwrap().add(&a.mul_vec(&y).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn dual_commutes_with_product(
            entries in proptest::collection::vec(int_interval(), 9),
            x in proptest::collection::vec(int_interval(), 3),
        ) {
            let a = IntervalMatrix::from_vec(3, 3, entries).unwrap();
            let x = IntervalVector::new(x);
            prop_assert_eq!(a.mul_vec(&x).unwrap().dual(), a.dual().mul_vec(&x.dual()).unwrap());
        }

        #[test]
        fn residual_vanishes_on_constructed_rhs(
            entries in proptest::collection::vec(int_interval(), 9),
            x in proptest::collection::vec(int_interval(), 3),
        ) {
            let a = IntervalMatrix::from_vec(3, 3, entries).unwrap();
            let x = IntervalVector::new(x);
            let b = a.mul_vec(&x).unwrap();
            prop_assert_eq!(a.residual_norm(&x, &b).unwrap(), 0.0);
            prop_assert_eq!(a.residual(&x, &b).unwrap().mag_norm(), 0.0);
        }
    }
}
