use std::cmp::Ordering;

use rug::float::Round;
use rug::{Float, Integer};

pub use rug::Rational;

use super::{Backend, Num, Scalar, Sign};
use crate::error::{Error, Result};

/// Formats as `numerator/denominator`, always with an explicit denominator.
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `p/q`, a bare integer, or a finite decimal such as `1.01`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::Parse(format!("`{text}` is not a rational number (expected p/q)"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = t.split_once('/') {
        let num: Integer = num.trim().parse().map_err(|_| bad())?;
        let den: Integer = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(Error::Parse(format!("`{text}` has a zero denominator")));
        }
        return Ok(Rational::from((num, den)));
    }
    if let Some((int_part, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int_part.trim_start().starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        let whole: Integer = if int_digits.is_empty() {
            Integer::new()
        } else {
            int_digits.parse().map_err(|_| bad())?
        };
        let frac_int: Integer = frac.parse().map_err(|_| bad())?;
        let scale = Integer::from(Integer::u_pow_u(10, frac.len() as u32));
        let mut q = Rational::from((whole * &scale + frac_int, scale));
        if negative {
            q = -q;
        }
        return Ok(q);
    }
    let n: Integer = t.parse().map_err(|_| bad())?;
    Ok(Rational::from(n))
}

/// Exact positive `m`-th root of a positive rational, if it exists.
pub fn rational_root(q: &Rational, m: u32) -> Option<Rational> {
    if m == 0 || q.cmp0() == Ordering::Less {
        return None;
    }
    if m == 1 || q.cmp0() == Ordering::Equal {
        return Some(q.clone());
    }
    let root_of = |z: &Integer| -> Option<Integer> {
        let r = Integer::from(z.root_ref(m));
        (Integer::from(rug::ops::Pow::pow(&r, m)) == *z).then_some(r)
    };
    let n = root_of(q.numer())?;
    let d = root_of(q.denom())?;
    Some(Rational::from((n, d)))
}

/// `q^p` for a signed integer exponent; fails on `0^negative`.
pub(crate) fn rational_powi(q: &Rational, p: i64) -> Result<Rational> {
    let mag = u32::try_from(p.unsigned_abs())
        .map_err(|_| Error::InvalidParameter(format!("exponent {p} too large")))?;
    let pos = q.powi(mag);
    if p >= 0 {
        Ok(pos)
    } else {
        Num::recip(&pos)
    }
}

pub(crate) fn rational_to_f64_round(q: &Rational, round: Round) -> f64 {
    Float::with_val_round(64, q, round).0.to_f64_round(round)
}

impl Num for Rational {
    type Ctx = ();

    fn ctx(&self) {}

    fn from_rational(_: &(), q: &Rational) -> Self {
        q.clone()
    }

    fn add_ref(&self, rhs: &Self) -> Self {
        Rational::from(self + rhs)
    }

    fn sub_ref(&self, rhs: &Self) -> Self {
        Rational::from(self - rhs)
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        Rational::from(self * rhs)
    }

    fn neg_ref(&self) -> Self {
        Rational::from(-self)
    }

    fn recip(&self) -> Result<Self> {
        if self.cmp0() == Ordering::Equal {
            return Err(Error::DivisionByZero {
                what: "rational zero".into(),
            });
        }
        Ok(Rational::from(self.recip_ref()))
    }

    fn is_zero(&self) -> bool {
        self.cmp0() == Ordering::Equal
    }

    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        *self += Rational::from(a * b);
    }

    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }

    fn sub_assign_ref(&mut self, rhs: &Self) {
        *self -= rhs;
    }
}

impl Scalar for Rational {
    fn sign(&self) -> Sign {
        match self.cmp0() {
            Ordering::Less => Sign::Negative,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Positive,
        }
    }

    fn pow_rational(&self, r: &Rational) -> Result<Self> {
        let not_rep = || Error::NotRepresentable {
            op: format!("({})^({})", format_rational(self), format_rational(r)),
            backend: "exact-rational".into(),
        };
        let p = r.numer().to_i64().ok_or_else(not_rep)?;
        let m = r.denom().to_u32().ok_or_else(not_rep)?;
        if m == 1 {
            return rational_powi(self, p);
        }
        if self.cmp0() != Ordering::Greater {
            return Err(Error::NotPositive {
                what: "base of a fractional power".into(),
                found: self.sign().as_str(),
            });
        }
        let root = rational_root(self, m).ok_or_else(not_rep)?;
        rational_powi(&root, p)
    }

    fn exp(&self) -> Result<Self> {
        if self.is_zero() {
            Ok(Rational::from(1))
        } else {
            Err(Error::NotRepresentable {
                op: format!("exp({})", format_rational(self)),
                backend: "exact-rational".into(),
            })
        }
    }

    fn ln(&self) -> Result<Self> {
        match self.cmp0() {
            Ordering::Greater if *self == 1 => Ok(Rational::new()),
            Ordering::Greater => Err(Error::NotRepresentable {
                op: format!("ln({})", format_rational(self)),
                backend: "exact-rational".into(),
            }),
            _ => Err(Error::NotPositive {
                what: "argument of ln".into(),
                found: self.sign().as_str(),
            }),
        }
    }

    fn backend(&self) -> Backend {
        Backend::ExactRational
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64_round(self, Round::Nearest)
    }

    fn abs_upper(&self) -> f64 {
        rational_to_f64_round(&Rational::from(self.abs_ref()), Round::Up)
    }

    fn abs_lower(&self) -> f64 {
        rational_to_f64_round(&Rational::from(self.abs_ref()), Round::Down)
    }

    fn to_text(&self) -> String {
        format_rational(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_form_round_trips() {
        for text in ["-12294367331/2373046875", "0/1", "5/1", "7/3"] {
            let q = parse_rational(text).unwrap();
            assert_eq!(format_rational(&q), text);
        }
    }

    #[test]
    fn parses_integers_and_decimals() {
        assert_eq!(parse_rational("4").unwrap(), 4);
        assert_eq!(parse_rational("1.01").unwrap(), Rational::from((101, 100)));
        assert_eq!(parse_rational("-0.5").unwrap(), Rational::from((-1, 2)));
        assert_eq!(parse_rational(" 6/4 ").unwrap(), Rational::from((3, 2)));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn exact_roots() {
        let q = Rational::from((25, 16));
        assert_eq!(rational_root(&q, 2), Some(Rational::from((5, 4))));
        assert_eq!(rational_root(&Rational::from(2), 2), None);
        assert_eq!(
            rational_root(&Rational::from((8, 27)), 3),
            Some(Rational::from((2, 3)))
        );
    }

    #[test]
    fn fractional_powers_when_representable() {
        let q = Rational::from((25, 16));
        assert_eq!(
            q.pow_rational(&Rational::from((-3, 2))).unwrap(),
            Rational::from((64, 125))
        );
        assert!(matches!(
            Rational::from(2).pow_rational(&Rational::from((1, 2))),
            Err(Error::NotRepresentable { .. })
        ));
        assert!(Rational::from(-4)
            .pow_rational(&Rational::from((1, 2)))
            .is_err());
        assert_eq!(
            Rational::from(-2).pow_rational(&Rational::from(3)).unwrap(),
            -8
        );
    }

    #[test]
    fn exp_and_ln_only_at_trivial_points() {
        assert_eq!(Rational::new().exp().unwrap(), 1);
        assert_eq!(Rational::from(1).ln().unwrap(), 0);
        assert!(Rational::from(2).ln().is_err());
        assert!(Rational::from(-1).ln().is_err());
    }
}
