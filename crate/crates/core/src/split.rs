//! Stationary single-step iterations `x ← T(x)` built from a splitting
//! `A x = G x + H(x)`.
//!
//! ARMSplit separates a point matrix `G` and iterates in immersed
//! coordinates. TrnSplit separates an upper triangle `G` and a strict lower
//! triangle `H` and performs one forward and one backward sweep per step.

use crate::error::{shape_mismatch, Error, Result};
use crate::immersion::{absolute_regularity, extended_multiplier, sti, sti_inv};
use crate::interval::KInterval;
use crate::linalg::{IntervalMatrix, IntervalVector};
use crate::real::{
    lu_factor, spectral_radius, LuFactors, RealMatrix, PIVOT_TOL, SPECTRAL_MAX_ITER, SPECTRAL_TOL,
};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 500;

/// Iterates whose max-magnitude exceeds this are treated as divergent.
pub const DIVERGENCE_NORM: f64 = 1e12;
/// Number of consecutive iterations with residual above
/// `DIVERGENCE_GROWTH` times its running minimum that signals divergence.
pub const DIVERGENCE_WINDOW: usize = 50;
pub const DIVERGENCE_GROWTH: f64 = 10.0;

const RETRY_STEP: f64 = 1e-3;
const RETRY_ATTEMPTS: u32 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    Diverged,
    SingularStep,
    /// Iteration budget exhausted and the sufficient convergence criterion
    /// does not hold.
    CriterionNotMet,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxIterations => "max-iterations",
            SolveStatus::Diverged => "diverged",
            SolveStatus::SingularStep => "singular-step",
            SolveStatus::CriterionNotMet => "criterion-not-met",
        }
    }
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub iterations: usize,
    /// `max_i Dist((A x)_i, b_i)` at the returned iterate.
    pub residual: f64,
    pub rho_estimate: Option<f64>,
    /// Residual after each iteration, when requested.
    pub history: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub record_history: bool,
}

impl Default for IterOptions {
    fn default() -> Self {
        IterOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            record_history: false,
        }
    }
}

/// Watches iterates and residuals for blow-up or sustained growth.
#[derive(Clone, Debug)]
pub(crate) struct DivergenceMonitor {
    min_residual: f64,
    above: usize,
}

impl DivergenceMonitor {
    pub(crate) fn new() -> Self {
        DivergenceMonitor {
            min_residual: f64::INFINITY,
            above: 0,
        }
    }

    /// Returns true when the run should be declared divergent.
    pub(crate) fn observe(&mut self, x: &IntervalVector, residual: f64) -> bool {
        let norm = x.mag_norm();
        if norm.is_nan() || norm > DIVERGENCE_NORM || !residual.is_finite() {
            return true;
        }
        self.min_residual = self.min_residual.min(residual);
        if residual > DIVERGENCE_GROWTH * self.min_residual {
            self.above += 1;
        } else {
            self.above = 0;
        }
        self.above >= DIVERGENCE_WINDOW
    }
}

fn check_system(a: &IntervalMatrix, b: &IntervalVector, op: &'static str) -> Result<()> {
    if !a.is_square() {
        return Err(shape_mismatch(
            op,
            "square matrix",
            format!("{}x{}", a.rows(), a.cols()),
        ));
    }
    if b.len() != a.rows() {
        return Err(shape_mismatch(op, a.rows(), b.len()));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitVariant {
    /// `G = ⌊A⌋`, `H = A − G` acting on `x`.
    Simple,
    /// `G = ⌈A⌉`, `H = A − G` acting on `dual x` wherever `g_ij ≠ 0`.
    Markov,
}

/// Point splitting `A x = G x + H(x)` with `G~` absolutely regular.
#[derive(Clone, Debug)]
pub struct PointSplitting {
    variant: SplitVariant,
    g: RealMatrix,
    h: IntervalMatrix,
    dual_mask: Vec<bool>,
    gext_inv: RealMatrix,
    gext_lu: LuFactors,
    attempts: u32,
}

impl PointSplitting {
    pub fn variant(&self) -> SplitVariant {
        self.variant
    }

    pub fn g(&self) -> &RealMatrix {
        &self.g
    }

    pub fn h(&self) -> &IntervalMatrix {
        &self.h
    }

    /// True where `H` multiplies `dual x_j` in row `i`.
    pub fn is_dual(&self, i: usize, j: usize) -> bool {
        self.dual_mask[i * self.g.cols() + j]
    }

    /// `(G~)⁻¹`.
    pub fn gext_inv(&self) -> &RealMatrix {
        &self.gext_inv
    }

    /// Number of magnitude adjustments applied to `G` to make it absolutely
    /// regular (0 when the plain floor/ceiling already was).
    pub fn adjustments(&self) -> u32 {
        self.attempts
    }

    pub fn dim(&self) -> usize {
        self.g.rows()
    }
}

fn build_point_splitting(a: &IntervalMatrix, variant: SplitVariant) -> Result<PointSplitting> {
    if !a.is_square() {
        return Err(shape_mismatch(
            "point splitting",
            "square matrix",
            format!("{}x{}", a.rows(), a.cols()),
        ));
    }
    let n = a.rows();
    let base = RealMatrix::from_vec(
        n,
        n,
        (0..n * n)
            .map(|k| {
                let e = a[(k / n, k % n)];
                match variant {
                    SplitVariant::Simple => e.floor_point(),
                    SplitVariant::Markov => e.ceil_point(),
                }
            })
            .collect(),
    )?;

    let mut g = base.clone();
    let mut attempts = 0;
    while !absolute_regularity(&g, PIVOT_TOL)?.is_regular() {
        if attempts == RETRY_ATTEMPTS {
            let reg = absolute_regularity(&g, PIVOT_TOL)?;
            return Err(Error::SplittingFailure(format!(
                "{} after {RETRY_ATTEMPTS} adjustments",
                reg.diagnostic()
            )));
        }
        attempts += 1;
        let delta = RETRY_STEP * f64::from(1u32 << (attempts - 1));
        let factor = match variant {
            SplitVariant::Simple => 1.0 - delta,
            SplitVariant::Markov => 1.0 + delta,
        };
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    g[(i, j)] = base[(i, j)] * factor;
                }
            }
        }
    }

    let h = IntervalMatrix::from_vec(
        n,
        n,
        (0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                let e = a[(i, j)];
                let gij = g[(i, j)];
                KInterval::new(e.lo() - gij, e.hi() - gij)
            })
            .collect(),
    )?;
    let dual_mask = (0..n * n)
        .map(|k| variant == SplitVariant::Markov && g[(k / n, k % n)] != 0.0)
        .collect();
    let ext = extended_multiplier(&g)?;
    let gext_lu = lu_factor(ext.matrix()).map_err(|_| {
        Error::SplittingFailure("extended point part is numerically singular".into())
    })?;
    let gext_inv = gext_lu.inverse();
    Ok(PointSplitting {
        variant,
        g,
        h,
        dual_mask,
        gext_inv,
        gext_lu,
        attempts,
    })
}

/// Splitting with `G = ⌊A⌋` (entry-wise floor point).
pub fn arm_split_simple(a: &IntervalMatrix) -> Result<PointSplitting> {
    build_point_splitting(a, SplitVariant::Simple)
}

/// Splitting with `G = ⌈A⌉` (entry-wise ceiling point), `H` acting on the
/// dual of `x` wherever `g_ij ≠ 0`.
pub fn arm_split_markov(a: &IntervalMatrix) -> Result<PointSplitting> {
    build_point_splitting(a, SplitVariant::Markov)
}

pub fn arm_split(a: &IntervalMatrix, variant: SplitVariant) -> Result<PointSplitting> {
    build_point_splitting(a, variant)
}

/// `H(x)`: row sums of `h_ij · x_j`, with `x_j` dualized per the mask.
pub fn apply_h(split: &PointSplitting, x: &IntervalVector) -> Result<IntervalVector> {
    let n = split.dim();
    if x.len() != n {
        return Err(shape_mismatch("apply_h", n, x.len()));
    }
    Ok((0..n)
        .map(|i| {
            split
                .h
                .row(i)
                .iter()
                .enumerate()
                .fold(KInterval::ZERO, |s, (j, &h)| {
                    let xj = if split.is_dual(i, j) { x[j].dual() } else { x[j] };
                    s + h * xj
                })
        })
        .collect())
}

/// One ARMSplit step `sti_inv((G~)⁻¹ sti(b ⊖ H(x)))`.
pub fn arm_step(
    split: &PointSplitting,
    b: &IntervalVector,
    x: &IntervalVector,
) -> Result<IntervalVector> {
    let r = b.ominus(&apply_h(split, x)?)?;
    sti_inv(&split.gext_lu.solve(&sti(&r))?)
}

/// Starting vector `sti_inv((G~)⁻¹ sti(b))`.
pub fn arm_start(split: &PointSplitting, b: &IntervalVector) -> Result<IntervalVector> {
    if b.len() != split.dim() {
        return Err(shape_mismatch("arm_start", split.dim(), b.len()));
    }
    sti_inv(&split.gext_lu.solve(&sti(b))?)
}

/// Runs the ARMSplit iteration.
///
/// Stops with `Converged` once the step `max Dist(x⁺, x)` and the residual
/// are both at most `tol`.
pub fn arm_iterate(
    a: &IntervalMatrix,
    b: &IntervalVector,
    split: &PointSplitting,
    x0: Option<&IntervalVector>,
    opts: &IterOptions,
) -> Result<(IntervalVector, SolveReport)> {
    check_system(a, b, "arm_iterate")?;
    if split.dim() != a.rows() {
        return Err(shape_mismatch("arm_iterate", a.rows(), split.dim()));
    }
    let mut x = match x0 {
        Some(x0) => {
            if x0.len() != a.rows() {
                return Err(shape_mismatch("arm_iterate", a.rows(), x0.len()));
            }
            x0.clone()
        }
        None => arm_start(split, b)?,
    };
    run_loop(a, b, &mut x, opts, |x| arm_step(split, b, x))
        .map(|report| (x, report))
}

/// Shared driver: applies `step` until convergence, divergence or budget.
fn run_loop(
    a: &IntervalMatrix,
    b: &IntervalVector,
    x: &mut IntervalVector,
    opts: &IterOptions,
    mut step: impl FnMut(&IntervalVector) -> Result<IntervalVector>,
) -> Result<SolveReport> {
    let mut monitor = DivergenceMonitor::new();
    let mut history = opts.record_history.then(Vec::new);
    let mut residual = a.residual_norm(x, b)?;
    let mut status = SolveStatus::MaxIterations;
    let mut iterations = 0;
    for k in 1..=opts.max_iter {
        let next = match step(x) {
            Ok(next) => next,
            Err(Error::NonFinite { .. }) | Err(Error::Overflow) => {
                status = SolveStatus::Diverged;
                break;
            }
            Err(e) => return Err(e),
        };
        let q = next.dist(x)?;
        *x = next;
        iterations = k;
        residual = a.residual_norm(x, b)?;
        if let Some(h) = history.as_mut() {
            h.push(residual);
        }
        if q <= opts.tol && residual <= opts.tol {
            status = SolveStatus::Converged;
            break;
        }
        if monitor.observe(x, residual) {
            status = SolveStatus::Diverged;
            break;
        }
    }
    Ok(SolveReport {
        status,
        iterations,
        residual,
        rho_estimate: None,
        history,
    })
}

/// Sufficient convergence condition `ρ(|V| |H|~) < 1`, `V = (G~)⁻¹`.
#[derive(Clone, Debug, PartialEq)]
pub struct ArmCriterion {
    pub rho: f64,
    /// Whether the power iteration converged.
    pub estimate_converged: bool,
    pub satisfied: bool,
}

/// `|V| · |H|~`, where `|H|~ = diag(|H|, |H|)`.
pub fn arm_lipschitz_matrix(split: &PointSplitting) -> RealMatrix {
    let n = split.dim();
    let habs = split.h.mag();
    let mut hext = RealMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            hext[(i, j)] = habs[(i, j)];
            hext[(i + n, j + n)] = habs[(i, j)];
        }
    }
    split
        .gext_inv
        .abs()
        .matmul(&hext)
        .expect("dimensions agree by construction")
}

pub fn arm_convergence_criterion(split: &PointSplitting) -> Result<ArmCriterion> {
    let m = arm_lipschitz_matrix(split);
    let est = spectral_radius(&m, SPECTRAL_TOL, SPECTRAL_MAX_ITER)?;
    Ok(ArmCriterion {
        rho: est.rho,
        estimate_converged: est.converged,
        satisfied: est.converged && est.rho < 1.0,
    })
}

/// Splits `A`, checks the criterion and runs [`arm_iterate`] from the
/// default start. `rho_estimate` carries the criterion value; an exhausted
/// budget without the criterion is reported as `CriterionNotMet`.
pub fn arm_solve(
    a: &IntervalMatrix,
    b: &IntervalVector,
    variant: SplitVariant,
    opts: &IterOptions,
) -> Result<(IntervalVector, SolveReport)> {
    check_system(a, b, "arm_solve")?;
    let split = arm_split(a, variant)?;
    let crit = arm_convergence_criterion(&split)?;
    let (x, mut report) = arm_iterate(a, b, &split, None, opts)?;
    report.rho_estimate = Some(crit.rho);
    if report.status == SolveStatus::MaxIterations && !crit.satisfied {
        report.status = SolveStatus::CriterionNotMet;
    }
    Ok((x, report))
}

/// Row-permuted triangular splitting: `G` is the upper triangle including
/// the diagonal of the permuted matrix, `H` the strict lower triangle.
#[derive(Clone, Debug)]
pub struct TriangularSplitting {
    perm: Vec<usize>,
    permuted: IntervalMatrix,
    g: IntervalMatrix,
    h: IntervalMatrix,
}

impl TriangularSplitting {
    /// Row `i` of the permuted system is row `perm()[i]` of the original.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn permuted_matrix(&self) -> &IntervalMatrix {
        &self.permuted
    }

    pub fn g(&self) -> &IntervalMatrix {
        &self.g
    }

    pub fn h(&self) -> &IntervalMatrix {
        &self.h
    }

    pub fn dim(&self) -> usize {
        self.g.rows()
    }

    pub fn permute_rhs(&self, b: &IntervalVector) -> IntervalVector {
        self.perm.iter().map(|&p| b[p]).collect()
    }
}

/// Greedy row ordering: for each column in turn, the unused row with the
/// largest mignitude (lowest index on ties) becomes the diagonal row.
pub fn trn_split(a: &IntervalMatrix) -> Result<TriangularSplitting> {
    if !a.is_square() {
        return Err(shape_mismatch(
            "trn_split",
            "square matrix",
            format!("{}x{}", a.rows(), a.cols()),
        ));
    }
    let n = a.rows();
    let mut used = vec![false; n];
    let mut perm = Vec::with_capacity(n);
    for col in 0..n {
        let mut best: Option<(usize, f64)> = None;
        for row in (0..n).filter(|&r| !used[r]) {
            let m = a[(row, col)].mig();
            if best.is_none_or(|(_, bm)| m > bm) {
                best = Some((row, m));
            }
        }
        match best {
            Some((row, m)) if m > 0.0 => {
                used[row] = true;
                perm.push(row);
            }
            _ => return Err(Error::NoValidDiagonal { column: col }),
        }
    }
    let permuted = a.permute_rows(&perm);
    let mut g = IntervalMatrix::zeros(n, n);
    let mut h = IntervalMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if j >= i {
                g[(i, j)] = permuted[(i, j)];
            } else {
                h[(i, j)] = permuted[(i, j)];
            }
        }
    }
    Ok(TriangularSplitting {
        perm,
        permuted,
        g,
        h,
    })
}

/// One TrnSplit sweep on the permuted system `(G + H) x = pb`.
pub fn trn_step(
    split: &TriangularSplitting,
    pb: &IntervalVector,
    x: &IntervalVector,
) -> Result<IntervalVector> {
    let n = split.dim();
    let mut p = Vec::with_capacity(n);
    for i in 0..n {
        let s = (0..i).fold(KInterval::ZERO, |s, j| s + split.h[(i, j)] * x[j]);
        p.push(pb[i].checked_ominus(s)?);
    }
    let mut xt = vec![KInterval::ZERO; n];
    for i in (0..n).rev() {
        let s = (i + 1..n).fold(KInterval::ZERO, |s, j| s + split.g[(i, j)] * xt[j]);
        xt[i] = p[i].checked_ominus(s)?.oslash(split.g[(i, i)])?;
    }
    Ok(IntervalVector(xt))
}

/// Starting vector `x_i = b_i ⊘ g_ii` for the permuted right-hand side.
pub fn trn_start(split: &TriangularSplitting, pb: &IntervalVector) -> Result<IntervalVector> {
    (0..split.dim())
        .map(|i| pb[i].oslash(split.g[(i, i)]))
        .collect::<Result<Vec<_>>>()
        .map(IntervalVector)
}

/// Runs the TrnSplit iteration on `A x = b` (original row order).
pub fn trn_iterate(
    a: &IntervalMatrix,
    b: &IntervalVector,
    split: &TriangularSplitting,
    x0: Option<&IntervalVector>,
    opts: &IterOptions,
) -> Result<(IntervalVector, SolveReport)> {
    check_system(a, b, "trn_iterate")?;
    if split.dim() != a.rows() {
        return Err(shape_mismatch("trn_iterate", a.rows(), split.dim()));
    }
    let pb = split.permute_rhs(b);
    let mut x = match x0 {
        Some(x0) => {
            if x0.len() != a.rows() {
                return Err(shape_mismatch("trn_iterate", a.rows(), x0.len()));
            }
            x0.clone()
        }
        None => trn_start(split, &pb)?,
    };
    run_loop(a, b, &mut x, opts, |x| trn_step(split, &pb, x)).map(|report| (x, report))
}

/// Sufficient convergence data for TrnSplit on an already permuted matrix.
///
/// With `D = diag(1 / mig(a_ii))` and `L`, `R` the strict lower and upper
/// parts of `|A|`, one sweep contracts `Dist` to the solution by
/// `Q = (I − DR)⁻¹ DL`: the backward pass over the upper triangle uses
/// freshly computed components, the strict lower triangle uses the previous
/// iterate. The numbers `s_i` follow the matching recurrence, computed from
/// `i = n` down to `1`:
/// `s_i = (Σ_{j>i} |a_ij| s_j + Σ_{j<i} |a_ij|) / mig(a_ii)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrnCriterion {
    /// `Q = (I − DR)⁻¹ DL`.
    pub q: RealMatrix,
    pub rho_q: f64,
    pub estimate_converged: bool,
    /// The recurrently defined numbers `s_i`.
    pub s: Vec<f64>,
    pub diag_dominant: bool,
    pub satisfied: bool,
}

pub fn trn_convergence_criterion(a: &IntervalMatrix) -> Result<TrnCriterion> {
    if !a.is_square() {
        return Err(shape_mismatch(
            "trn_convergence_criterion",
            "square matrix",
            format!("{}x{}", a.rows(), a.cols()),
        ));
    }
    let n = a.rows();
    let mut d = vec![0.0; n];
    for (i, di) in d.iter_mut().enumerate() {
        let m = a[(i, i)].mig();
        if m == 0.0 {
            return Err(Error::ZeroInProjection(a[(i, i)]));
        }
        *di = 1.0 / m;
    }
    let mag = a.mag();

    // The sweep reuses fresh values above the diagonal and stale ones below
    // it, so errors propagate as e⁺ ≤ DL e + DR e⁺. I - DR is unit upper
    // triangular and back substitution yields Q column by column.
    let mut q = RealMatrix::zeros(n, n);
    for c in 0..n {
        for i in (0..n).rev() {
            let mut v = if c < i { d[i] * mag[(i, c)] } else { 0.0 };
            for j in i + 1..n {
                v += d[i] * mag[(i, j)] * q[(j, c)];
            }
            q[(i, c)] = v;
        }
    }
    let est = spectral_radius(&q, SPECTRAL_TOL, SPECTRAL_MAX_ITER)?;

    let mut s = vec![0.0; n];
    for i in (0..n).rev() {
        let upper: f64 = (i + 1..n).map(|j| mag[(i, j)] * s[j]).sum();
        let lower: f64 = (0..i).map(|j| mag[(i, j)]).sum();
        s[i] = d[i] * (upper + lower);
    }
    let diag_dominant = (0..n).all(|i| {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| mag[(i, j)]).sum();
        a[(i, i)].mig() > off
    });
    Ok(TrnCriterion {
        q,
        rho_q: est.rho,
        estimate_converged: est.converged,
        s,
        diag_dominant,
        satisfied: est.converged && est.rho < 1.0,
    })
}

/// A priori bound on `Dist(x*, x^(k))` from `d01 = Dist(x^(0), x^(1))`:
/// `((I − Q)⁻¹ − Σ_{j<k} Q^j) d01`, evaluated as `Q^k (I − Q)⁻¹ d01`.
pub fn trn_error_bound(q: &RealMatrix, d01: &[f64], k: usize) -> Result<Vec<f64>> {
    if !q.is_square() || d01.len() != q.rows() {
        return Err(shape_mismatch(
            "trn_error_bound",
            format!("{0}x{0} matrix with length-{0} vector", q.rows()),
            format!("{}x{} and {}", q.rows(), q.cols(), d01.len()),
        ));
    }
    let est = spectral_radius(q, SPECTRAL_TOL, SPECTRAL_MAX_ITER)?;
    if !(est.converged && est.rho < 1.0) {
        return Err(Error::BoundUnavailable(est.rho));
    }
    let n = q.rows();
    let mut i_minus_q = RealMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            i_minus_q[(i, j)] -= q[(i, j)];
        }
    }
    let mut w = lu_factor(&i_minus_q)?.solve(d01)?;
    for _ in 0..k {
        w = q.mul_vec(&w)?;
    }
    Ok(w)
}

/// Splits, checks the criterion and runs [`trn_iterate`] from the default
/// start. Semantics of `rho_estimate` and `CriterionNotMet` match
/// [`arm_solve`].
pub fn trn_solve(
    a: &IntervalMatrix,
    b: &IntervalVector,
    opts: &IterOptions,
) -> Result<(IntervalVector, SolveReport)> {
    check_system(a, b, "trn_solve")?;
    let split = trn_split(a)?;
    let crit = trn_convergence_criterion(split.permuted_matrix())?;
    let (x, mut report) = trn_iterate(a, b, &split, None, opts)?;
    report.rho_estimate = Some(crit.rho_q);
    if report.status == SolveStatus::MaxIterations && !crit.satisfied {
        report.status = SolveStatus::CriterionNotMet;
    }
    Ok((x, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::immersion::{solve_point_system, zeta};
    use proptest::prelude::*;

    fn iv(lo: f64, hi: f64) -> KInterval {
        KInterval::new(lo, hi)
    }

    fn barth_nuding() -> (IntervalMatrix, IntervalVector) {
        let a = IntervalMatrix::from_rows(&[
            vec![iv(2.0, 4.0), iv(-2.0, 1.0)],
            vec![iv(-1.0, 2.0), iv(2.0, 4.0)],
        ])
        .unwrap();
        (a, IntervalVector::new(vec![iv(-2.0, 2.0); 2]))
    }

    fn third() -> IntervalVector {
        IntervalVector::new(vec![iv(-1.0 / 3.0, 1.0 / 3.0); 2])
    }

    #[test]
    fn simple_split_of_barth_nuding() {
        let (a, _) = barth_nuding();
        let s = arm_split_simple(&a).unwrap();
        assert_eq!(s.g().as_slice(), &[2.0, 0.0, 0.0, 2.0]);
        assert_eq!(s.h()[(0, 0)], iv(0.0, 2.0));
        assert_eq!(s.h()[(0, 1)], iv(-2.0, 1.0));
        assert_eq!(s.h()[(1, 0)], iv(-1.0, 2.0));
        assert_eq!(s.h()[(1, 1)], iv(0.0, 2.0));
        assert!((0..2).all(|i| (0..2).all(|j| !s.is_dual(i, j))));
        assert_eq!(s.adjustments(), 0);
    }

    #[test]
    fn markov_split_of_barth_nuding() {
        let (a, _) = barth_nuding();
        let s = arm_split_markov(&a).unwrap();
        assert_eq!(s.g().as_slice(), &[4.0, 0.0, 0.0, 4.0]);
        assert_eq!(s.h()[(0, 0)], iv(-2.0, 0.0));
        assert_eq!(s.h()[(0, 1)], iv(-2.0, 1.0));
        assert_eq!(s.h()[(1, 0)], iv(-1.0, 2.0));
        assert_eq!(s.h()[(1, 1)], iv(-2.0, 0.0));
        assert!(s.is_dual(0, 0) && s.is_dual(1, 1));
        assert!(!s.is_dual(0, 1) && !s.is_dual(1, 0));
    }

    #[test]
    fn point_matrix_splits_trivially() {
        let a = IntervalMatrix::from_real(
            &RealMatrix::from_rows(&[vec![1.0, 2.0], vec![-3.0, 4.0]]).unwrap(),
        );
        for s in [arm_split_simple(&a).unwrap(), arm_split_markov(&a).unwrap()] {
            assert_eq!(s.g().as_slice(), &[1.0, 2.0, -3.0, 4.0]);
            assert!(s.h().mag().as_slice().iter().all(|&v| v == 0.0));
            let c = arm_convergence_criterion(&s).unwrap();
            assert_eq!(c.rho, 0.0);
            assert!(c.satisfied);
        }
    }

    #[test]
    fn zero_containing_matrix_cannot_split() {
        let a = IntervalMatrix::from_rows(&[
            vec![iv(-1.0, 1.0), iv(-2.0, 3.0)],
            vec![iv(0.0, 0.0), iv(-1.0, 4.0)],
        ])
        .unwrap();
        assert!(matches!(arm_split_simple(&a), Err(Error::SplittingFailure(_))));
    }

    #[test]
    fn retry_makes_floor_absolutely_regular() {
        // floor point is ((1,1),(-1,1)), regular but not absolutely regular
        let a = IntervalMatrix::from_rows(&[
            vec![iv(1.0, 2.0), iv(1.0, 2.0)],
            vec![iv(-2.0, -1.0), iv(1.0, 2.0)],
        ])
        .unwrap();
        let s = arm_split_simple(&a).unwrap();
        assert!(s.adjustments() >= 1);
        assert!(s.g()[(0, 1)] < 1.0 && s.g()[(0, 1)] > 0.99);
        assert_eq!(s.g()[(0, 0)], 1.0);
        let x = IntervalVector::new(vec![iv(1.0, 3.0), iv(-2.0, 5.0)]);
        let gx = IntervalMatrix::from_real(s.g()).mul_vec(&x).unwrap();
        let lhs = gx.add(&apply_h(&s, &x).unwrap()).unwrap();
        assert!(lhs.dist(&a.mul_vec(&x).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn markov_law_in_one_dimension() {
        let a = IntervalMatrix::from_rows(&[vec![iv(2.0, 4.0)]]).unwrap();
        let s = arm_split_markov(&a).unwrap();
        for x in [iv(1.0, 3.0), iv(-2.0, 5.0), iv(3.0, -1.0), iv(-4.0, -2.0)] {
            let lhs = x.scale(4.0) + iv(-2.0, 0.0) * x.dual();
            assert_eq!(lhs, iv(2.0, 4.0) * x);
            let v = IntervalVector::new(vec![x]);
            assert_eq!(apply_h(&s, &v).unwrap()[0], iv(-2.0, 0.0) * x.dual());
        }
    }

    #[test]
    fn arm_criterion_on_barth_nuding_is_borderline() {
        let (a, _) = barth_nuding();
        let s = arm_split_markov(&a).unwrap();
        // |V| = I/4 and |H| = [[2,2],[2,2]] give a doubly stochastic block
        let m = arm_lipschitz_matrix(&s);
        let expected = [0.5, 0.5, 0.0, 0.0];
        assert_eq!(&m.as_slice()[..4], &expected);
        let c = arm_convergence_criterion(&s).unwrap();
        assert!(c.estimate_converged);
        assert_eq!(c.rho, 1.0);
        assert!(!c.satisfied);
    }

    #[test]
    fn arm_markov_solves_barth_nuding() {
        let (a, b) = barth_nuding();
        let s = arm_split_markov(&a).unwrap();
        let (x, r) = arm_iterate(&a, &b, &s, None, &IterOptions::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert!(x.dist(&third()).unwrap() < 1e-9);
        assert!(r.residual <= 1e-10);
    }

    #[test]
    fn arm_on_point_matrix_converges_immediately() {
        let m = RealMatrix::from_rows(&[vec![1.0, 2.0], vec![-3.0, 4.0]]).unwrap();
        let a = IntervalMatrix::from_real(&m);
        let b = IntervalVector::new(vec![iv(0.0, 10.0), iv(10.0, 20.0)]);
        let s = arm_split_markov(&a).unwrap();
        let (x, r) = arm_iterate(&a, &b, &s, None, &IterOptions::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert_eq!(r.iterations, 1);
        assert!(x.dist(&solve_point_system(&m, &b).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn history_is_recorded() {
        let (a, b) = barth_nuding();
        let opts = IterOptions {
            record_history: true,
            max_iter: 5,
            ..IterOptions::default()
        };
        let (_, r) = arm_solve(&a, &b, SplitVariant::Markov, &opts).unwrap();
        assert_eq!(r.history.as_ref().map(Vec::len), Some(5));
        assert_eq!(r.status, SolveStatus::CriterionNotMet);
        assert_eq!(r.rho_estimate, Some(1.0));
    }

    #[test]
    fn trn_split_keeps_dominant_order() {
        let (a, _) = barth_nuding();
        let s = trn_split(&a).unwrap();
        assert_eq!(s.perm(), &[0, 1]);
        assert_eq!(s.g()[(1, 0)], KInterval::ZERO);
        assert_eq!(s.h()[(1, 0)], iv(-1.0, 2.0));
        assert_eq!(s.g()[(0, 1)], iv(-2.0, 1.0));
    }

    #[test]
    fn trn_split_swaps_rows() {
        let a = IntervalMatrix::from_rows(&[
            vec![iv(-1.0, 1.0), iv(2.0, 3.0)],
            vec![iv(4.0, 5.0), iv(-1.0, 1.0)],
        ])
        .unwrap();
        let s = trn_split(&a).unwrap();
        assert_eq!(s.perm(), &[1, 0]);
        assert_eq!(s.g()[(0, 0)], iv(4.0, 5.0));
        assert_eq!(s.g()[(1, 1)], iv(2.0, 3.0));
    }

    #[test]
    fn trn_split_rejects_zero_column() {
        let a = IntervalMatrix::from_rows(&[
            vec![iv(-1.0, 1.0), iv(2.0, 3.0)],
            vec![iv(0.0, 5.0), iv(1.0, 1.0)],
        ])
        .unwrap();
        assert_eq!(
            trn_split(&a).unwrap_err(),
            Error::NoValidDiagonal { column: 0 }
        );
    }

    #[test]
    fn trn_on_diagonal_matrix_is_one_sweep() {
        let a = IntervalMatrix::from_rows(&[
            vec![iv(2.0, 4.0), KInterval::ZERO],
            vec![KInterval::ZERO, iv(-2.0, -1.0)],
        ])
        .unwrap();
        let b = IntervalVector::new(vec![iv(1.0, 3.0), iv(2.0, 4.0)]);
        let s = trn_split(&a).unwrap();
        let (x, r) = trn_iterate(&a, &b, &s, None, &IterOptions::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert_eq!(r.iterations, 1);
        assert_eq!(x[0], iv(1.0, 3.0).oslash(iv(2.0, 4.0)).unwrap());
        assert_eq!(x[1], iv(2.0, 4.0).oslash(iv(-2.0, -1.0)).unwrap());
        let c = trn_convergence_criterion(s.permuted_matrix()).unwrap();
        assert_eq!((c.rho_q, c.satisfied), (0.0, true));
        assert_eq!(c.s, vec![0.0, 0.0]);
    }

    #[test]
    fn trn_solves_barth_nuding() {
        let (a, b) = barth_nuding();
        let (x, r) = trn_solve(&a, &b, &IterOptions::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert!(x.dist(&third()).unwrap() < 1e-9);
    }

    #[test]
    fn trn_criterion_on_barth_nuding() {
        let (a, _) = barth_nuding();
        let c = trn_convergence_criterion(&a).unwrap();
        // D = I/2, L = [[0,0],[2,0]], R = [[0,2],[0,0]]
        assert_eq!(c.q.as_slice(), &[1.0, 0.0, 1.0, 0.0]);
        assert_eq!(c.rho_q, 1.0);
        assert!(!c.satisfied);
        assert_eq!(c.s, vec![1.0, 1.0]);
        assert!(!c.diag_dominant);
    }

    #[test]
    fn error_bound_edge_cases() {
        let zero = RealMatrix::zeros(2, 2);
        assert_eq!(trn_error_bound(&zero, &[1.0, 2.0], 1).unwrap(), vec![0.0, 0.0]);
        let q = RealMatrix::from_rows(&[vec![0.5, 0.0], vec![0.0, 0.25]]).unwrap();
        assert_eq!(trn_error_bound(&q, &[1.0, 3.0], 0).unwrap(), vec![2.0, 4.0]);
        let big = RealMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.5]]).unwrap();
        assert!(matches!(
            trn_error_bound(&big, &[1.0, 1.0], 1),
            Err(Error::BoundUnavailable(_))
        ));
    }

    #[test]
    fn divergence_is_detected() {
        let mut m = DivergenceMonitor::new();
        let x = IntervalVector::new(vec![iv(0.0, 1.0)]);
        assert!(!m.observe(&x, 1.0));
        for _ in 0..DIVERGENCE_WINDOW - 1 {
            assert!(!m.observe(&x, 11.0));
        }
        assert!(m.observe(&x, 11.0));
        let huge = IntervalVector::new(vec![iv(0.0, 2e12)]);
        assert!(DivergenceMonitor::new().observe(&huge, 0.0));
    }

    fn interval() -> impl Strategy<Value = KInterval> {
        (-5.0f64..5.0, -5.0f64..5.0).prop_map(|(l, h)| KInterval::new(l, h))
    }

    fn any_matrix(n: usize) -> impl Strategy<Value = IntervalMatrix> {
        proptest::collection::vec(interval(), n * n)
            .prop_map(move |v| IntervalMatrix::from_vec(n, n, v).unwrap())
    }

    fn ivector(n: usize) -> impl Strategy<Value = IntervalVector> {
        proptest::collection::vec(interval(), n).prop_map(IntervalVector)
    }

    /// Interval matrix with a strong definite diagonal, proper or improper.
    fn dominant_matrix(n: usize) -> impl Strategy<Value = IntervalMatrix> {
        (
            proptest::collection::vec(interval(), n * n),
            proptest::collection::vec((8.0f64..12.0, 0.0f64..3.0, any::<bool>(), any::<bool>()), n),
        )
            .prop_map(move |(mut v, diag)| {
                for (i, (c, w, improper, neg)) in diag.into_iter().enumerate() {
                    let mut d = KInterval::new(c - w, c + w);
                    if improper {
                        d = d.dual();
                    }
                    if neg {
                        d = d.opp();
                    }
                    v[i * n + i] = d;
                }
                // shrink off-diagonal entries so rows are dominant
                for i in 0..n {
                    for j in 0..n {
                        if i != j {
                            v[i * n + j] = v[i * n + j].scale(0.3);
                        }
                    }
                }
                IntervalMatrix::from_vec(n, n, v).unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn splitting_identity(a in any_matrix(3), x in ivector(3), markov in any::<bool>()) {
            let split = if markov { arm_split_markov(&a) } else { arm_split_simple(&a) };
            prop_assume!(split.is_ok());
            let s = split.unwrap();
            let gx = IntervalMatrix::from_real(s.g()).mul_vec(&x).unwrap();
            let lhs = gx.add(&apply_h(&s, &x).unwrap()).unwrap();
            let rhs = a.mul_vec(&x).unwrap();
            prop_assert!(lhs.dist(&rhs).unwrap() <= 1e-12 * (1.0 + rhs.mag_norm()));
        }

        #[test]
        fn simple_split_sign_structure(a in any_matrix(3)) {
            let s = arm_split_simple(&a);
            prop_assume!(s.is_ok());
            let s = s.unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let g = s.g()[(i, j)];
                    let h = s.h()[(i, j)].classify();
                    if g > 0.0 {
                        prop_assert_eq!(h, crate::interval::SignClass::P);
                    } else if g < 0.0 {
                        prop_assert_eq!(h, crate::interval::SignClass::NegP);
                    }
                }
            }
        }

        #[test]
        fn contraction_inequality(
            a in dominant_matrix(3), b in ivector(3), x in ivector(3), y in ivector(3)
        ) {
            let s = arm_split_markov(&a).unwrap();
            let m = arm_lipschitz_matrix(&s);
            let tx = arm_step(&s, &b, &x).unwrap();
            let ty = arm_step(&s, &b, &y).unwrap();
            let lhs = zeta(&sti(&tx), &sti(&ty)).unwrap();
            let rhs = m.mul_vec(&zeta(&sti(&x), &sti(&y)).unwrap()).unwrap();
            for (l, r) in lhs.iter().zip(&rhs) {
                prop_assert!(*l <= r + 1e-12 * (1.0 + r));
            }
        }

        #[test]
        fn converged_runs_have_small_residual(a in dominant_matrix(4), b in ivector(4)) {
            let opts = IterOptions::default();
            let (_, r) = arm_solve(&a, &b, SplitVariant::Markov, &opts).unwrap();
            if r.status == SolveStatus::Converged {
                prop_assert!(r.residual <= 10.0 * opts.tol);
            }
            let (_, r) = trn_solve(&a, &b, &opts).unwrap();
            if r.status == SolveStatus::Converged {
                prop_assert!(r.residual <= 10.0 * opts.tol);
            }
        }

        #[test]
        fn dominance_implies_trn_criterion(a in dominant_matrix(4)) {
            let c = trn_convergence_criterion(&a).unwrap();
            if c.diag_dominant {
                prop_assert!(c.s.iter().all(|&s| s < 1.0));
                prop_assert!(c.rho_q < 1.0 && c.satisfied);
            }
            if c.s.iter().all(|&s| s < 1.0) {
                prop_assert!(c.rho_q < 1.0);
            }
        }

        #[test]
        fn error_bound_dominates_true_error(a in dominant_matrix(4), b in ivector(4)) {
            let split = trn_split(&a).unwrap();
            let crit = trn_convergence_criterion(split.permuted_matrix()).unwrap();
            prop_assume!(crit.satisfied);
            let opts = IterOptions { tol: 1e-13, max_iter: 2000, record_history: false };
            let (xs, r) = trn_iterate(&a, &b, &split, None, &opts).unwrap();
            prop_assume!(r.status == SolveStatus::Converged);
            let pb = split.permute_rhs(&b);
            let x0 = trn_start(&split, &pb).unwrap();
            let x1 = trn_step(&split, &pb, &x0).unwrap();
            let d01: Vec<f64> = (0..4).map(|i| x0[i].dist(x1[i])).collect();
            let mut x = x0;
            let mut prev: Option<Vec<f64>> = None;
            for k in 0..8 {
                let bound = trn_error_bound(&crit.q, &d01, k).unwrap();
                for i in 0..4 {
                    prop_assert!(xs[i].dist(x[i]) <= bound[i] + 1e-9);
                    if let Some(p) = &prev {
                        prop_assert!(bound[i] <= p[i] * (1.0 + 1e-12) + 1e-300);
                    }
                }
                prev = Some(bound);
                x = trn_step(&split, &pb, &x).unwrap();
            }
        }
    }
}
