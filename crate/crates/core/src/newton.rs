//! Subdifferential Newton method for `A x = b`.
//!
//! The system is solved as the piecewise-linear equation `Φ(y) = 0` in
//! `R^2n`, where `Φ(y) = sti(A · sti_inv(y) ⊖ b)`. Each step uses the
//! Jacobian of the affine piece active at the current point.

use crate::error::{shape_mismatch, Error, Result};
use crate::immersion::{extended_multiplier, sti, sti_inv};
use crate::interval::{KInterval, SignClass};
use crate::linalg::{IntervalMatrix, IntervalVector};
use crate::real::{lu_factor, vec_norm_inf, RealMatrix};
use crate::split::{SolveReport, SolveStatus};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonOptions {
    /// Damping factor in `(0, 1]`.
    pub tau: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub record_history: bool,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            tau: 1.0,
            tol: 1e-12,
            max_iter: 100,
            record_history: false,
        }
    }
}

impl NewtonOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "damping factor must lie in (0, 1], got {}",
                self.tau
            )));
        }
        if self.tol.is_nan() || self.tol < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be nonnegative, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

fn check_system(a: &IntervalMatrix, len: usize, expected: usize, op: &'static str) -> Result<()> {
    if !a.is_square() {
        return Err(shape_mismatch(
            op,
            "square matrix",
            format!("{}x{}", a.rows(), a.cols()),
        ));
    }
    if len != expected {
        return Err(shape_mismatch(op, expected, len));
    }
    Ok(())
}

/// `Φ(y) = sti(A · sti_inv(y) ⊖ b)`.
pub fn induced_phi(a: &IntervalMatrix, b: &IntervalVector, y: &[f64]) -> Result<Vec<f64>> {
    check_system(a, b.len(), a.rows(), "induced_phi")?;
    check_system(a, y.len(), 2 * a.rows(), "induced_phi")?;
    let x = sti_inv(y)?;
    Ok(sti(&a.mul_vec(&x)?.ominus(b)?))
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum End {
    Lo,
    Hi,
}

/// One endpoint of a product `a · x`: either the constant zero or
/// `coef · x_end` with `coef` an endpoint of `a`.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Term {
    Zero,
    Prod(f64, End),
}

impl Term {
    fn eval(self, x: KInterval) -> f64 {
        match self {
            Term::Zero => 0.0,
            Term::Prod(c, End::Lo) => c * x.lo(),
            Term::Prod(c, End::Hi) => c * x.hi(),
        }
    }

    /// `(∂/∂lo_x, ∂/∂hi_x)`.
    fn grad(self) -> (f64, f64) {
        match self {
            Term::Zero => (0.0, 0.0),
            Term::Prod(c, End::Lo) => (c, 0.0),
            Term::Prod(c, End::Hi) => (0.0, c),
        }
    }
}

/// Picks the smaller term; ties go to the first.
fn min_term(p: Term, q: Term, x: KInterval) -> Term {
    if q.eval(x) < p.eval(x) {
        q
    } else {
        p
    }
}

/// Picks the larger term; ties go to the first.
fn max_term(p: Term, q: Term, x: KInterval) -> Term {
    if q.eval(x) > p.eval(x) {
        q
    } else {
        p
    }
}

/// The active multiplication-table entry for `a · x`, as `[lo, hi]` terms.
fn product_terms(a: KInterval, x: KInterval) -> [Term; 2] {
    use End::{Hi, Lo};
    use SignClass::*;
    use Term::Prod;
    let (al, ah) = (a.lo(), a.hi());
    match (a.classify(), x.classify()) {
        (P, P) => [Prod(al, Lo), Prod(ah, Hi)],
        (P, Z) => [Prod(ah, Lo), Prod(ah, Hi)],
        (P, NegP) => [Prod(ah, Lo), Prod(al, Hi)],
        (P, DualZ) => [Prod(al, Lo), Prod(al, Hi)],

        (Z, P) => [Prod(al, Hi), Prod(ah, Hi)],
        (Z, Z) => [
            min_term(Prod(al, Hi), Prod(ah, Lo), x),
            max_term(Prod(al, Lo), Prod(ah, Hi), x),
        ],
        (Z, NegP) => [Prod(ah, Lo), Prod(al, Lo)],
        (Z, DualZ) => [Term::Zero, Term::Zero],

        (NegP, P) => [Prod(al, Hi), Prod(ah, Lo)],
        (NegP, Z) => [Prod(al, Hi), Prod(al, Lo)],
        (NegP, NegP) => [Prod(ah, Hi), Prod(al, Lo)],
        (NegP, DualZ) => [Prod(ah, Hi), Prod(ah, Lo)],

        (DualZ, P) => [Prod(al, Lo), Prod(ah, Lo)],
        (DualZ, Z) => [Term::Zero, Term::Zero],
        (DualZ, NegP) => [Prod(ah, Hi), Prod(al, Hi)],
        (DualZ, DualZ) => [
            max_term(Prod(al, Lo), Prod(ah, Hi), x),
            min_term(Prod(al, Hi), Prod(ah, Lo), x),
        ],
    }
}

/// Jacobian of the affine piece of `Φ` active at `y` (a subgradient of `Φ`).
///
/// Each product `a_ij · x_j` contributes the partial derivatives of the
/// multiplication-table entry selected by the sign classes of `a_ij` and
/// `x_j`. Min/max ties select the first listed product. Wherever `Φ` is
/// differentiable this is its Jacobian, and for a point matrix it is `A~`.
pub fn subgradient(a: &IntervalMatrix, y: &[f64]) -> Result<RealMatrix> {
    let n = a.rows();
    check_system(a, y.len(), 2 * n, "subgradient")?;
    let x = sti_inv(y)?;
    let mut d = RealMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let [lo, hi] = product_terms(a[(i, j)], x[j]);
            let (dlo_l, dlo_h) = lo.grad();
            let (dhi_l, dhi_h) = hi.grad();
            d[(i, j)] += dlo_l;
            d[(i, j + n)] -= dlo_h;
            d[(i + n, j)] -= dhi_l;
            d[(i + n, j + n)] += dhi_h;
        }
    }
    Ok(d)
}

/// Starting point: solution of `(mid A)~ y = sti(b)`.
pub fn newton_start(a: &IntervalMatrix, b: &IntervalVector) -> Result<Vec<f64>> {
    check_system(a, b.len(), a.rows(), "newton_start")?;
    let ext = extended_multiplier(&a.mid())?;
    let lu = lu_factor(ext.matrix()).map_err(|_| Error::StartFailure)?;
    lu.solve(&sti(b))
}

/// One damped step `y − τ D⁻¹ Φ(y)`; `None` when `D` is singular.
pub fn newton_step(
    a: &IntervalMatrix,
    b: &IntervalVector,
    y: &[f64],
    tau: f64,
) -> Result<Option<Vec<f64>>> {
    let phi = induced_phi(a, b, y)?;
    let d = subgradient(a, y)?;
    let Ok(lu) = lu_factor(&d) else {
        return Ok(None);
    };
    let delta = lu.solve(&phi)?;
    Ok(Some(
        y.iter().zip(&delta).map(|(v, s)| v - tau * s).collect(),
    ))
}

/// Subdifferential Newton iteration from the midpoint starting vector.
///
/// `iterations` counts Newton steps taken; a start that already satisfies
/// `‖Φ‖∞ ≤ tol` reports zero.
pub fn newton_solve(
    a: &IntervalMatrix,
    b: &IntervalVector,
    opts: &NewtonOptions,
) -> Result<(IntervalVector, SolveReport)> {
    opts.validate()?;
    let mut y = newton_start(a, b)?;
    let mut x = sti_inv(&y).map_err(|_| Error::StartFailure)?;
    let mut history = opts.record_history.then(Vec::new);
    let mut iterations = 0;
    let status = loop {
        let norm = vec_norm_inf(&sti(&a.mul_vec(&x)?.ominus(b)?));
        if let Some(h) = history.as_mut() {
            h.push(norm);
        }
        if norm <= opts.tol {
            break SolveStatus::Converged;
        }
        if !norm.is_finite() {
            break SolveStatus::Diverged;
        }
        if iterations == opts.max_iter {
            break SolveStatus::MaxIterations;
        }
        let Some(next) = newton_step(a, b, &y, opts.tau)? else {
            break SolveStatus::SingularStep;
        };
        iterations += 1;
        match sti_inv(&next) {
            Ok(nx) => {
                y = next;
                x = nx;
            }
            Err(_) => break SolveStatus::Diverged,
        }
    };
    let residual = a.residual_norm(&x, b)?;
    Ok((
        x,
        SolveReport {
            status,
            iterations,
            residual,
            rho_estimate: None,
            history,
        },
    ))
}
