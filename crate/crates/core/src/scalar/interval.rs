use std::cmp::Ordering;
use std::fmt;

use rug::float::Round;
use rug::ops::{AssignRound, Pow};
use rug::Float;

use super::{Backend, Num, Rational, Scalar, Sign};
use crate::error::{Error, Result};

/// A closed interval `[lo, hi]` of MPFR floats.
///
/// Every operation rounds the lower endpoint down and the upper endpoint up,
/// so the exact real result of a computation is always enclosed.
#[derive(Clone, PartialEq)]
pub struct Interval {
    lo: Float,
    hi: Float,
}

fn down<T>(prec: u32, v: T) -> Float
where
    Float: AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(prec, v, Round::Down).0
}

fn up<T>(prec: u32, v: T) -> Float
where
    Float: AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(prec, v, Round::Up).0
}

fn min_f(a: Float, b: Float) -> Float {
    if a <= b {
        a
    } else {
        b
    }
}

fn max_f(a: Float, b: Float) -> Float {
    if a >= b {
        a
    } else {
        b
    }
}

impl Interval {
    /// Enclosure of a rational at `prec` bits.
    pub fn from_rational_prec(prec: u32, q: &Rational) -> Self {
        Interval {
            lo: down(prec, q),
            hi: up(prec, q),
        }
    }

    /// Builds an interval from two endpoints; fails if `lo > hi`.
    pub fn from_bounds(lo: Float, hi: Float) -> Result<Self> {
        if lo > hi || lo.is_nan() || hi.is_nan() {
            return Err(Error::InvalidParameter(
                "interval endpoints are out of order".into(),
            ));
        }
        Ok(Interval { lo, hi })
    }

    pub fn lo(&self) -> &Float {
        &self.lo
    }

    pub fn hi(&self) -> &Float {
        &self.hi
    }

    pub fn prec(&self) -> u32 {
        self.lo.prec().max(self.hi.prec())
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.cmp0() != Some(Ordering::Greater) && self.hi.cmp0() != Some(Ordering::Less)
    }

    /// Width `hi - lo`, rounded up.
    pub fn width(&self) -> Float {
        up(self.prec(), &self.hi - &self.lo)
    }

    pub fn midpoint(&self) -> Float {
        let prec = self.prec() + 1;
        let sum = Float::with_val(prec, &self.lo + &self.hi);
        sum / 2u32
    }

    /// Whether `q` lies in the interval.
    pub fn contains_rational(&self, q: &Rational) -> bool {
        self.lo <= *q && self.hi >= *q
    }

    /// Smallest interval containing both.
    pub fn hull(&self, other: &Self) -> Self {
        Interval {
            lo: min_f(self.lo.clone(), other.lo.clone()),
            hi: max_f(self.hi.clone(), other.hi.clone()),
        }
    }

    fn both_nonneg(&self) -> bool {
        self.lo.cmp0() != Some(Ordering::Less)
    }

    fn both_nonpos(&self) -> bool {
        self.hi.cmp0() != Some(Ordering::Greater)
    }

    /// `self^p` for an integer `p` on a certified positive interval.
    fn pow_positive_base(&self, p: i32) -> Self {
        let prec = self.prec();
        match p.cmp(&0) {
            Ordering::Equal => Interval::from_rational_prec(prec, &Rational::from(1)),
            Ordering::Greater => Interval {
                lo: down(prec, (&self.lo).pow(p)),
                hi: up(prec, (&self.hi).pow(p)),
            },
            Ordering::Less => Interval {
                lo: down(prec, (&self.hi).pow(p)),
                hi: up(prec, (&self.lo).pow(p)),
            },
        }
    }

    fn require_positive(&self, what: &str) -> Result<()> {
        match self.sign() {
            Sign::Positive => Ok(()),
            Sign::Undetermined => Err(Error::undetermined(what)),
            s => Err(Error::NotPositive {
                what: what.into(),
                found: s.as_str(),
            }),
        }
    }

    /// Number of decimal digits on which `lo` and `hi` agree, at least 1.
    fn certified_digits(&self) -> usize {
        let cap = ((self.prec() as f64) * std::f64::consts::LOG10_2)
            .floor()
            .max(1.0) as usize;
        let width = self.width();
        if width.is_zero() {
            return cap;
        }
        let mid = self.midpoint().abs();
        if mid.is_zero() {
            return 1;
        }
        let rel = Float::with_val(64, &width / &mid).to_f64();
        if !rel.is_finite() || rel <= 0.0 {
            return cap;
        }
        let digits = (-rel.log10()).floor();
        if digits < 1.0 {
            1
        } else {
            (digits as usize).min(cap)
        }
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]@{}",
            self.lo.to_string_radix(10, Some(20)),
            self.hi.to_string_radix(10, Some(20)),
            self.prec()
        )
    }
}

impl Num for Interval {
    type Ctx = u32;

    fn ctx(&self) -> u32 {
        self.prec()
    }

    fn from_rational(prec: &u32, q: &Rational) -> Self {
        Interval::from_rational_prec(*prec, q)
    }

    fn add_ref(&self, rhs: &Self) -> Self {
        let prec = self.prec().max(rhs.prec());
        Interval {
            lo: down(prec, &self.lo + &rhs.lo),
            hi: up(prec, &self.hi + &rhs.hi),
        }
    }

    fn sub_ref(&self, rhs: &Self) -> Self {
        let prec = self.prec().max(rhs.prec());
        Interval {
            lo: down(prec, &self.lo - &rhs.hi),
            hi: up(prec, &self.hi - &rhs.lo),
        }
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        let prec = self.prec().max(rhs.prec());
        if self.is_zero() || rhs.is_zero() {
            return Interval::from_rational_prec(prec, &Rational::new());
        }
        let (a, b) = (self, rhs);
        if a.both_nonneg() && b.both_nonneg() {
            return Interval {
                lo: down(prec, &a.lo * &b.lo),
                hi: up(prec, &a.hi * &b.hi),
            };
        }
        if a.both_nonpos() && b.both_nonpos() {
            return Interval {
                lo: down(prec, &a.hi * &b.hi),
                hi: up(prec, &a.lo * &b.lo),
            };
        }
        if a.both_nonneg() && b.both_nonpos() {
            return Interval {
                lo: down(prec, &a.hi * &b.lo),
                hi: up(prec, &a.lo * &b.hi),
            };
        }
        if a.both_nonpos() && b.both_nonneg() {
            return Interval {
                lo: down(prec, &a.lo * &b.hi),
                hi: up(prec, &a.hi * &b.lo),
            };
        }
        let pairs = [
            (&a.lo, &b.lo),
            (&a.lo, &b.hi),
            (&a.hi, &b.lo),
            (&a.hi, &b.hi),
        ];
        let mut lo: Option<Float> = None;
        let mut hi: Option<Float> = None;
        for (x, y) in pairs {
            let l = down(prec, x * y);
            let h = up(prec, x * y);
            lo = Some(match lo {
                Some(c) => min_f(c, l),
                None => l,
            });
            hi = Some(match hi {
                Some(c) => max_f(c, h),
                None => h,
            });
        }
        Interval {
            lo: lo.expect("four products"),
            hi: hi.expect("four products"),
        }
    }

    fn neg_ref(&self) -> Self {
        Interval {
            lo: Float::with_val(self.hi.prec(), -&self.hi),
            hi: Float::with_val(self.lo.prec(), -&self.lo),
        }
    }

    fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero {
                what: "interval [0, 0]".into(),
            });
        }
        if self.contains_zero() {
            return Err(Error::undetermined("divisor interval"));
        }
        let prec = self.prec();
        Ok(Interval {
            lo: down(prec, 1u32 / &self.hi),
            hi: up(prec, 1u32 / &self.lo),
        })
    }

    fn is_zero(&self) -> bool {
        self.lo.is_zero() && self.hi.is_zero()
    }

    fn square(&self) -> Self {
        let prec = self.prec();
        if self.contains_zero() {
            let a = up(prec, self.lo.square_ref());
            let b = up(prec, self.hi.square_ref());
            return Interval {
                lo: Float::new(prec),
                hi: max_f(a, b),
            };
        }
        if self.both_nonneg() {
            Interval {
                lo: down(prec, self.lo.square_ref()),
                hi: up(prec, self.hi.square_ref()),
            }
        } else {
            Interval {
                lo: down(prec, self.hi.square_ref()),
                hi: up(prec, self.lo.square_ref()),
            }
        }
    }
}

impl Scalar for Interval {
    fn sign(&self) -> Sign {
        if self.is_zero() {
            Sign::Zero
        } else if self.lo.cmp0() == Some(Ordering::Greater) {
            Sign::Positive
        } else if self.hi.cmp0() == Some(Ordering::Less) {
            Sign::Negative
        } else {
            Sign::Undetermined
        }
    }

    fn pow_rational(&self, r: &Rational) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("exponent {r} out of range"));
        let p = r.numer().to_i32().ok_or_else(bad)?;
        let m = r.denom().to_u32().ok_or_else(bad)?;
        if m == 1 {
            if self.sign() == Sign::Positive {
                return Ok(self.pow_positive_base(p));
            }
            let pos = self.powi(p.unsigned_abs());
            return if p >= 0 { Ok(pos) } else { pos.recip() };
        }
        self.require_positive("base of a fractional power")?;
        let prec = self.prec();
        let mut lo = self.lo.clone();
        lo.root_round(m, Round::Down);
        let mut hi = self.hi.clone();
        hi.root_round(m, Round::Up);
        let root = Interval {
            lo: Float::with_val(prec, lo),
            hi: Float::with_val(prec, hi),
        };
        Ok(root.pow_positive_base(p))
    }

    fn exp(&self) -> Result<Self> {
        let mut lo = self.lo.clone();
        lo.exp_round(Round::Down);
        let mut hi = self.hi.clone();
        hi.exp_round(Round::Up);
        Ok(Interval { lo, hi })
    }

    fn ln(&self) -> Result<Self> {
        self.require_positive("argument of ln")?;
        let mut lo = self.lo.clone();
        lo.ln_round(Round::Down);
        let mut hi = self.hi.clone();
        hi.ln_round(Round::Up);
        Ok(Interval { lo, hi })
    }

    fn backend(&self) -> Backend {
        Backend::BigFloat { bits: self.prec() }
    }

    fn to_f64(&self) -> f64 {
        self.midpoint().to_f64()
    }

    fn abs_upper(&self) -> f64 {
        let a = self.lo.clone().abs();
        let b = self.hi.clone().abs();
        max_f(a, b).to_f64_round(Round::Up)
    }

    fn abs_lower(&self) -> f64 {
        if self.contains_zero() {
            return 0.0;
        }
        let a = self.lo.clone().abs();
        let b = self.hi.clone().abs();
        min_f(a, b).to_f64_round(Round::Down)
    }

    fn to_text(&self) -> String {
        let bits = self.prec();
        if self.is_zero() {
            return format!("0@{bits}");
        }
        if self.contains_zero() {
            return format!("0 +/- {:.3e}@{bits}", self.abs_upper());
        }
        let digits = self.certified_digits();
        format!(
            "{}@{bits}",
            self.midpoint().to_string_radix(10, Some(digits))
        )
    }

    fn compatible_with(&self, other: &Self) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn iv(n: i64, d: i64) -> Interval {
        Interval::from_rational_prec(128, &q(n, d))
    }

    #[test]
    fn rational_enclosure_is_tight_and_contains() {
        let third = iv(1, 3);
        assert!(third.contains_rational(&q(1, 3)));
        assert!(third.width() < Float::with_val(64, 1e-37));
        assert_eq!(iv(1, 2).sign(), Sign::Positive);
        assert!(iv(1, 2).width().is_zero());
    }

    #[test]
    fn arithmetic_encloses_exact_results() {
        let a = iv(1, 3);
        let b = iv(-2, 7);
        assert!(a.add_ref(&b).contains_rational(&q(1, 21)));
        assert!(a.sub_ref(&b).contains_rational(&q(13, 21)));
        assert!(a.mul_ref(&b).contains_rational(&q(-2, 21)));
        assert!(a.div_ref(&b).unwrap().contains_rational(&q(-7, 6)));
        assert!(b.square().contains_rational(&q(4, 49)));
    }

    #[test]
    fn straddling_products() {
        let a = Interval::from_bounds(Float::with_val(64, -1), Float::with_val(64, 2)).unwrap();
        let b = Interval::from_bounds(Float::with_val(64, -3), Float::with_val(64, 1)).unwrap();
        let p = a.mul_ref(&b);
        assert_eq!(p.lo().to_f64(), -6.0);
        assert_eq!(p.hi().to_f64(), 3.0);
        assert_eq!(p.sign(), Sign::Undetermined);
        assert!(a.recip().is_err());
        let sq = a.square();
        assert_eq!(sq.lo().to_f64(), 0.0);
        assert_eq!(sq.hi().to_f64(), 4.0);
    }

    #[test]
    fn fractional_powers() {
        let two = iv(2, 1);
        let r = two.pow_rational(&q(1, 3)).unwrap();
        let cubed = r.powi(3);
        assert!(cubed.contains_rational(&q(2, 1)));
        assert!(cubed.width() < Float::with_val(64, 1e-35));
        let r = iv(25, 16).pow_rational(&q(-3, 2)).unwrap();
        assert!(r.contains_rational(&q(64, 125)));
        assert!(iv(-1, 1).sqrt().is_err());
        assert!(iv(-2, 1)
            .pow_rational(&q(-3, 1))
            .unwrap()
            .contains_rational(&q(-1, 8)));
    }

    #[test]
    fn exp_ln_round_trip() {
        let x = iv(3, 7);
        let back = x.exp().unwrap().ln().unwrap();
        assert!(back.contains_rational(&q(3, 7)));
        assert!(iv(0, 1).ln().is_err());
    }

    #[test]
    fn text_form_reports_certified_digits() {
        let t = iv(1, 3).to_text();
        assert!(t.ends_with("@128"), "{t}");
        assert!(t.starts_with("3.33333333333333333333333333333333"), "{t}");
        assert_eq!(Interval::from_rational_prec(64, &q(0, 1)).to_text(), "0@64");
    }
}
