//! Number systems used by every computation in the crate.
//!
//! [`Num`] is the ring-like interface the generic algorithms are written
//! against: jets, bivariate jets and the multivariate series of the curvature
//! engine all implement it, so the same code runs over exact numbers, certified
//! intervals, or truncated power series of either.
//!
//! [`Scalar`] adds what only genuine numbers can answer: a certified sign,
//! fractional powers, `exp`/`ln`, and text forms for reports. Three backends
//! implement it:
//!
//! * [`Rational`] (GMP rationals), closed and decidable;
//! * [`RootExt`], the field `Q(c^(1/d))` for one positive rational radicand,
//!   also exact;
//! * [`Interval`], MPFR intervals with outward rounding, whose sign query
//!   answers [`Sign::Undetermined`] when zero cannot be excluded.

mod interval;
mod rational;
mod root;

use std::fmt;

use serde::{Serialize, Serializer};

pub use interval::Interval;
pub(crate) use rational::rational_powi;
pub use rational::{format_rational, parse_rational, rational_root, Rational};
pub use root::{RootExt, RootField};

use crate::error::Result;

/// Default working precision of the big-float backend, in bits.
pub const DEFAULT_PRECISION_BITS: u32 = 256;

/// Upper limit for automatic precision doubling.
pub const PRECISION_CAP_BITS: u32 = 4096;

/// Certified sign of a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
    Zero,
    /// The value lies inside the error bound around zero.
    Undetermined,
}

impl Sign {
    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Positive => "positive",
            Sign::Negative => "negative",
            Sign::Zero => "zero",
            Sign::Undetermined => "undetermined",
        }
    }

    pub fn is_determined(self) -> bool {
        self != Sign::Undetermined
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// Which number system produced a value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Backend {
    ExactRational,
    /// `Q(radicand^(1/degree))`, radicand printed as `p/q`.
    ExactRoot {
        radicand: String,
        degree: u32,
    },
    BigFloat {
        bits: u32,
    },
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::ExactRational => "exact-rational",
            Backend::ExactRoot { .. } => "exact-root",
            Backend::BigFloat { .. } => "big-float",
        }
    }

    pub fn precision_bits(&self) -> Option<u32> {
        match self {
            Backend::BigFloat { bits } => Some(*bits),
            _ => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Backend::BigFloat { .. })
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::ExactRoot { radicand, degree } => {
                write!(f, "exact-root[({radicand})^(1/{degree})]")
            }
            Backend::BigFloat { bits } => write!(f, "big-float[{bits}]"),
            Backend::ExactRational => f.write_str("exact-rational"),
        }
    }
}

/// Commutative ring operations plus division by certified units.
///
/// Values carry a context (`Ctx`) from which constants are built: nothing for
/// rationals, the field for root extensions, the precision for intervals, the
/// base point and order for jets.
pub trait Num: Clone + fmt::Debug + Send + Sync + Sized {
    type Ctx: Clone + fmt::Debug + Send + Sync;

    fn ctx(&self) -> Self::Ctx;
    fn from_rational(ctx: &Self::Ctx, q: &Rational) -> Self;

    fn add_ref(&self, rhs: &Self) -> Self;
    fn sub_ref(&self, rhs: &Self) -> Self;
    fn mul_ref(&self, rhs: &Self) -> Self;
    fn neg_ref(&self) -> Self;

    /// Multiplicative inverse; fails unless the value is certified nonzero.
    fn recip(&self) -> Result<Self>;

    /// True only when the value is known to be exactly zero.
    fn is_zero(&self) -> bool;

    fn from_i64(ctx: &Self::Ctx, v: i64) -> Self {
        Self::from_rational(ctx, &Rational::from(v))
    }

    fn zero(ctx: &Self::Ctx) -> Self {
        Self::from_i64(ctx, 0)
    }

    fn one(ctx: &Self::Ctx) -> Self {
        Self::from_i64(ctx, 1)
    }

    fn zero_like(&self) -> Self {
        Self::zero(&self.ctx())
    }

    fn one_like(&self) -> Self {
        Self::one(&self.ctx())
    }

    fn constant_like(&self, q: &Rational) -> Self {
        Self::from_rational(&self.ctx(), q)
    }

    fn scale(&self, q: &Rational) -> Self {
        self.mul_ref(&self.constant_like(q))
    }

    fn scale_i64(&self, k: i64) -> Self {
        self.scale(&Rational::from(k))
    }

    fn add_assign_ref(&mut self, rhs: &Self) {
        *self = self.add_ref(rhs);
    }

    fn sub_assign_ref(&mut self, rhs: &Self) {
        *self = self.sub_ref(rhs);
    }

    /// `self += a * b`, skipping the work when either factor is exactly zero.
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        *self = self.add_ref(&a.mul_ref(b));
    }

    fn div_ref(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul_ref(&rhs.recip()?))
    }

    fn square(&self) -> Self {
        self.mul_ref(self)
    }

    fn powi(&self, k: u32) -> Self {
        let mut result = self.one_like();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        result
    }
}

/// A number with certified sign queries and report formatting.
pub trait Scalar: Num {
    fn sign(&self) -> Sign;

    /// `self^r` for the real positive branch; requires a certified positive base
    /// unless `r` is an integer.
    fn pow_rational(&self, r: &Rational) -> Result<Self>;

    fn exp(&self) -> Result<Self>;

    /// Natural logarithm of a certified positive value.
    fn ln(&self) -> Result<Self>;

    fn backend(&self) -> Backend;

    /// Nearest `f64`; for intervals the midpoint.
    fn to_f64(&self) -> f64;

    /// Upper bound on `|self|`, rounded outward.
    fn abs_upper(&self) -> f64;

    /// Lower bound on `|self|`, rounded inward.
    fn abs_lower(&self) -> f64;

    /// Canonical text form: `p/q` for rationals, a decimal with a `@bits`
    /// annotation for big floats.
    fn to_text(&self) -> String;

    fn sqrt(&self) -> Result<Self> {
        self.pow_rational(&Rational::from((1, 2)))
    }

    fn precision_bits(&self) -> Option<u32> {
        self.backend().precision_bits()
    }

    fn is_exact(&self) -> bool {
        self.backend().is_exact()
    }

    /// Decimal text regardless of backend, for CSV output.
    fn to_decimal(&self, digits: usize) -> String {
        let v = self.to_f64();
        if digits == 0 {
            format!("{v:e}")
        } else {
            format!("{v:.digits$e}")
        }
    }

    /// Whether two values may denote the same number: exact equality for exact
    /// backends, overlapping enclosures for intervals.
    fn compatible_with(&self, other: &Self) -> bool {
        matches!(self.sub_ref(other).sign(), Sign::Zero | Sign::Undetermined)
    }

    /// `|self - other| <= tol * |other|`, certified.
    fn within_relative(&self, other: &Self, tol: f64) -> bool {
        let diff = self.sub_ref(other).abs_upper();
        diff <= tol * other.abs_lower()
    }

    /// `|self| <= tol`, certified.
    fn within_absolute(&self, tol: f64) -> bool {
        self.abs_upper() <= tol
    }
}

/// Evaluates `f` at increasing working precision until `decided` accepts the
/// result, doubling from `start_bits` up to `cap_bits`.
///
/// Errors that a higher precision might cure (undetermined signs) trigger a
/// retry; other errors are returned at once. The last result is returned even
/// when `decided` never accepts it, so callers can report it as inconclusive.
pub fn with_escalation<T>(
    start_bits: u32,
    cap_bits: u32,
    mut f: impl FnMut(u32) -> Result<T>,
    decided: impl Fn(&T) -> bool,
) -> Result<T> {
    let mut bits = start_bits.max(16);
    loop {
        let out = f(bits);
        let last = bits >= cap_bits;
        match out {
            Ok(v) if decided(&v) || last => return Ok(v),
            Err(e) if !e.is_precision_related() || last => return Err(e),
            _ => bits = (bits * 2).min(cap_bits),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powi_matches_repeated_multiplication() {
        let q = Rational::from((3, 2));
        let mut expected = Rational::from(1);
        for k in 0..9u32 {
            assert_eq!(q.powi(k), expected);
            expected *= &q;
        }
    }

    #[test]
    fn escalation_retries_until_decided() {
        let mut seen = Vec::new();
        let out = with_escalation(
            64,
            1024,
            |bits| {
                seen.push(bits);
                Ok(bits)
            },
            |b| *b >= 256,
        )
        .unwrap();
        assert_eq!(out, 256);
        assert_eq!(seen, vec![64, 128, 256]);
    }

    #[test]
    fn escalation_stops_at_cap() {
        let out = with_escalation(64, 200, Ok, |_| false).unwrap();
        assert_eq!(out, 200);
    }
}
