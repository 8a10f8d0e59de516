//! Scalar Kaucher complete interval arithmetic.
//!
//! A [`KInterval`] is an ordered pair of finite endpoints `[lo, hi]` with no
//! ordering constraint: `lo > hi` encodes an improper interval. Addition is
//! endpoint-wise and forms a group; multiplication follows the Kaucher table
//! and forms a group on intervals whose proper projection avoids zero.
//!
//! The `std::ops` impls (`+`, `-`, `*`) are unchecked and intended for solver
//! loops. The `checked_*` methods validate that the result is finite.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use crate::error::{Error, Result};

/// An element of Kaucher complete interval arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct KInterval {
    lo: f64,
    hi: f64,
}

/// The four sign classes covering KR.
///
/// Boundary intervals are resolved with the precedence `P`, `NegP`, `Z`,
/// `DualZ`, so `[0, 2]` is `P` and `[0, 0]` is `P`. The multiplication
/// table agrees on every overlap, so the choice does not affect products.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SignClass {
    /// Both endpoints nonnegative.
    P,
    /// `lo <= 0 <= hi`.
    Z,
    /// Both endpoints nonpositive.
    NegP,
    /// `lo >= 0 >= hi`: improper intervals contained in zero.
    DualZ,
}

/// Sign of an interval with a definite sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

/// Positive and negative parts of a real number: `q = pos - neg`,
/// `|q| = pos + neg`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealParts {
    pub pos: f64,
    pub neg: f64,
}

impl RealParts {
    pub fn of(q: f64) -> Self {
        RealParts {
            pos: q.max(0.0),
            neg: (-q).max(0.0),
        }
    }
}

/// Positive and negative parts of `q`.
pub fn real_parts(q: f64) -> RealParts {
    RealParts::of(q)
}

/// Magnitude, mignitude, midpoint and (signed) radius of an interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Descriptors {
    pub mag: f64,
    pub mig: f64,
    pub mid: f64,
    pub rad: f64,
}

#[inline]
fn pos(t: f64) -> f64 {
    t.max(0.0)
}

#[inline]
fn neg(t: f64) -> f64 {
    (-t).max(0.0)
}

/// Maps `-0.0` to `+0.0` and leaves every other value untouched.
#[inline]
fn canon(t: f64) -> f64 {
    t + 0.0
}

fn finite_or_overflow(lo: f64, hi: f64) -> Result<KInterval> {
    if lo.is_finite() && hi.is_finite() {
        Ok(KInterval { lo, hi })
    } else {
        Err(Error::Overflow)
    }
}

impl KInterval {
    pub const ZERO: KInterval = KInterval { lo: 0.0, hi: 0.0 };
    pub const ONE: KInterval = KInterval { lo: 1.0, hi: 1.0 };

    /// Creates `[lo, hi]`.
    ///
    /// # Panics
    ///
    /// Panics if either endpoint is infinite or NaN. Use [`KInterval::try_new`]
    /// for untrusted input.
    pub fn new(lo: f64, hi: f64) -> Self {
        match Self::try_new(lo, hi) {
            Ok(a) => a,
            Err(e) => panic!("{e}"),
        }
    }

    pub fn try_new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_finite() && hi.is_finite() {
            Ok(KInterval { lo, hi })
        } else {
            Err(Error::NonFinite { lo, hi })
        }
    }

    /// The degenerate interval `[x, x]`.
    pub fn point(x: f64) -> Self {
        Self::new(x, x)
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn is_finite(self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn is_proper(self) -> bool {
        self.lo <= self.hi
    }

    pub fn is_improper(self) -> bool {
        self.lo > self.hi
    }

    pub fn is_point(self) -> bool {
        self.lo == self.hi
    }

    /// True when zero lies in the proper projection, i.e. `lo * hi <= 0`.
    pub fn zero_in_pro(self) -> bool {
        !((self.lo > 0.0 && self.hi > 0.0) || (self.lo < 0.0 && self.hi < 0.0))
    }

    /// Endpoint swap.
    pub fn dual(self) -> Self {
        KInterval {
            lo: self.hi,
            hi: self.lo,
        }
    }

    /// Proper projection.
    pub fn pro(self) -> Self {
        if self.is_proper() {
            self
        } else {
            self.dual()
        }
    }

    /// Additive inverse: `a + a.opp() == 0` exactly.
    pub fn opp(self) -> Self {
        KInterval {
            lo: -self.lo,
            hi: -self.hi,
        }
    }

    /// Internal (algebraic) subtraction, the inverse of addition.
    pub fn ominus(self, b: KInterval) -> Self {
        KInterval {
            lo: self.lo - b.lo,
            hi: self.hi - b.hi,
        }
    }

    pub fn checked_ominus(self, b: KInterval) -> Result<Self> {
        finite_or_overflow(self.lo - b.lo, self.hi - b.hi)
    }

    pub fn checked_add(self, b: KInterval) -> Result<Self> {
        finite_or_overflow(self.lo + b.lo, self.hi + b.hi)
    }

    pub fn checked_sub(self, b: KInterval) -> Result<Self> {
        finite_or_overflow(self.lo - b.hi, self.hi - b.lo)
    }

    pub fn checked_mul(self, b: KInterval) -> Result<Self> {
        let c = self.mul_table(b);
        finite_or_overflow(c.lo, c.hi)
    }

    /// Multiplication by a real number.
    pub fn scale(self, mu: f64) -> Self {
        if mu >= 0.0 {
            KInterval {
                lo: mu * self.lo,
                hi: mu * self.hi,
            }
        } else {
            KInterval {
                lo: mu * self.hi,
                hi: mu * self.lo,
            }
        }
    }

    pub fn checked_scale(self, mu: f64) -> Result<Self> {
        let c = self.scale(mu);
        finite_or_overflow(c.lo, c.hi)
    }

    /// Sign class under the `P`, `NegP`, `Z`, `DualZ` precedence.
    pub fn classify(self) -> SignClass {
        let (lo, hi) = (self.lo, self.hi);
        if lo >= 0.0 && hi >= 0.0 {
            SignClass::P
        } else if lo <= 0.0 && hi <= 0.0 {
            SignClass::NegP
        } else if lo <= 0.0 && hi >= 0.0 {
            SignClass::Z
        } else {
            SignClass::DualZ
        }
    }

    /// `Some(sign)` for nonnegative / nonpositive intervals, `None` when zero
    /// is interior to the proper projection. The zero interval reports
    /// `Positive`.
    pub fn sgn(self) -> Option<Sign> {
        match self.classify() {
            SignClass::P => Some(Sign::Positive),
            SignClass::NegP => Some(Sign::Negative),
            SignClass::Z | SignClass::DualZ => None,
        }
    }

    /// Product via the Kaucher multiplication table.
    pub fn mul_table(self, b: KInterval) -> KInterval {
        use SignClass::*;
        let (al, ah, bl, bh) = (self.lo, self.hi, b.lo, b.hi);
        let (lo, hi) = match (self.classify(), b.classify()) {
            (P, P) => (al * bl, ah * bh),
            (P, Z) => (ah * bl, ah * bh),
            (P, NegP) => (ah * bl, al * bh),
            (P, DualZ) => (al * bl, al * bh),

            (Z, P) => (al * bh, ah * bh),
            (Z, Z) => ((al * bh).min(ah * bl), (al * bl).max(ah * bh)),
            (Z, NegP) => (ah * bl, al * bl),
            (Z, DualZ) => (0.0, 0.0),

            (NegP, P) => (al * bh, ah * bl),
            (NegP, Z) => (al * bh, al * bl),
            (NegP, NegP) => (ah * bh, al * bl),
            (NegP, DualZ) => (ah * bh, ah * bl),

            (DualZ, P) => (al * bl, ah * bl),
            (DualZ, Z) => (0.0, 0.0),
            (DualZ, NegP) => (ah * bh, al * bh),
            (DualZ, DualZ) => ((al * bl).max(ah * bh), (al * bh).min(ah * bl)),
        };
        KInterval {
            lo: canon(lo),
            hi: canon(hi),
        }
    }

    /// Product via Lakeyev's global formulas in positive and negative parts.
    pub fn mul_lakeyev(self, b: KInterval) -> KInterval {
        let (al, ah, bl, bh) = (self.lo, self.hi, b.lo, b.hi);
        let lo = (pos(al) * pos(bl)).max(neg(ah) * neg(bh))
            - (pos(ah) * neg(bl)).max(neg(al) * pos(bh));
        let hi = (pos(ah) * pos(bh)).max(neg(al) * neg(bl))
            - (pos(al) * neg(bh)).max(neg(ah) * pos(bl));
        KInterval {
            lo: canon(lo),
            hi: canon(hi),
        }
    }

    /// Multiplicative inverse `[1/lo, 1/hi]`; requires `0 ∉ pro(a)`.
    pub fn inv(self) -> Result<Self> {
        if self.zero_in_pro() {
            return Err(Error::ZeroInProjection(self));
        }
        finite_or_overflow(1.0 / self.lo, 1.0 / self.hi)
    }

    /// Internal (algebraic) division `a · inv(b)`.
    pub fn oslash(self, b: KInterval) -> Result<Self> {
        let r = b.inv()?;
        self.checked_mul(r)
    }

    /// Classical division `a · [1/hi_b, 1/lo_b]`; requires `0 ∉ pro(b)`.
    #[allow(clippy::should_implement_trait)]
    pub fn div(self, b: KInterval) -> Result<Self> {
        if b.zero_in_pro() {
            return Err(Error::DivisionByZeroContaining(b));
        }
        let r = finite_or_overflow(1.0 / b.hi, 1.0 / b.lo)?;
        self.checked_mul(r)
    }

    /// Lower bound with respect to inclusion.
    pub fn meet(self, b: KInterval) -> Self {
        KInterval {
            lo: self.lo.max(b.lo),
            hi: self.hi.min(b.hi),
        }
    }

    /// Upper bound with respect to inclusion.
    pub fn join(self, b: KInterval) -> Self {
        KInterval {
            lo: self.lo.min(b.lo),
            hi: self.hi.max(b.hi),
        }
    }

    /// `self ⊆ b`.
    pub fn is_subset_of(self, b: KInterval) -> bool {
        self.lo >= b.lo && self.hi <= b.hi
    }

    /// `self ⊇ b`.
    pub fn includes(self, b: KInterval) -> bool {
        b.is_subset_of(self)
    }

    /// Endpoint-wise order `≤`.
    pub fn leq(self, b: KInterval) -> bool {
        self.lo <= b.lo && self.hi <= b.hi
    }

    pub fn mag(self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value over the proper projection.
    pub fn mig(self) -> f64 {
        if self.zero_in_pro() {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn mid(self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// Signed radius, negative for improper intervals.
    pub fn rad(self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    pub fn descriptors(self) -> Descriptors {
        Descriptors {
            mag: self.mag(),
            mig: self.mig(),
            mid: self.mid(),
            rad: self.rad(),
        }
    }

    /// Point of the proper projection closest to zero, carrying the sign of
    /// the interval; zero when `0 ∈ pro(a)`.
    pub fn floor_point(self) -> f64 {
        if self.zero_in_pro() {
            0.0
        } else if self.lo > 0.0 {
            self.lo.min(self.hi)
        } else {
            self.lo.max(self.hi)
        }
    }

    /// Point of the proper projection largest in absolute value, carrying
    /// the sign of the interval; zero for intervals without a definite sign.
    ///
    /// Intervals with a zero endpoint and a definite sign (e.g. `[0, 2]`)
    /// map to their far endpoint.
    pub fn ceil_point(self) -> f64 {
        match self.classify() {
            SignClass::P => self.lo.max(self.hi),
            SignClass::NegP => self.lo.min(self.hi),
            SignClass::Z | SignClass::DualZ => 0.0,
        }
    }

    /// Distance `max(|lo_a − lo_b|, |hi_a − hi_b|)`.
    pub fn dist(self, b: KInterval) -> f64 {
        (self.lo - b.lo).abs().max((self.hi - b.hi).abs())
    }
}

impl Add for KInterval {
    type Output = KInterval;

    fn add(self, b: KInterval) -> KInterval {
        KInterval {
            lo: self.lo + b.lo,
            hi: self.hi + b.hi,
        }
    }
}

/// Classical subtraction `a + (−1)·b`.
impl Sub for KInterval {
    type Output = KInterval;

    fn sub(self, b: KInterval) -> KInterval {
        KInterval {
            lo: self.lo - b.hi,
            hi: self.hi - b.lo,
        }
    }
}

impl Mul for KInterval {
    type Output = KInterval;

    fn mul(self, b: KInterval) -> KInterval {
        self.mul_table(b)
    }
}

impl Mul<KInterval> for f64 {
    type Output = KInterval;

    fn mul(self, a: KInterval) -> KInterval {
        a.scale(self)
    }
}

impl From<f64> for KInterval {
    fn from(x: f64) -> Self {
        KInterval::point(x)
    }
}

/// Renders `[lo,hi]` using the shortest representation that round-trips.
impl fmt::Display for KInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?},{:?}]", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid interval `{text}`: {reason}")]
pub struct ParseIntervalError {
    pub text: String,
    pub reason: &'static str,
}

impl FromStr for KInterval {
    type Err = ParseIntervalError;

    /// Parses `[lo,hi]`. Whitespace is allowed after the comma only.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let fail = |reason| ParseIntervalError {
            text: s.to_string(),
            reason,
        };
        let inner = s
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| fail("expected `[lo,hi]`"))?;
        let (left, right) = inner
            .split_once(',')
            .ok_or_else(|| fail("missing comma between endpoints"))?;
        let right = right.trim_start();
        let endpoint = |t: &str| -> std::result::Result<f64, ParseIntervalError> {
            if t.is_empty() || t.chars().any(char::is_whitespace) {
                return Err(fail("malformed endpoint"));
            }
            let v: f64 = t.parse().map_err(|_| fail("malformed endpoint"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(fail("endpoints must be finite"))
            }
        };
        let lo = endpoint(left)?;
        let hi = endpoint(right)?;
        Ok(KInterval { lo, hi })
    }
}
