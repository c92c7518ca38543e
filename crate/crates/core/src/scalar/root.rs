use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use super::{format_rational, rational_root, Backend, Interval, Num, Rational, Scalar, Sign};
use crate::error::{Error, Result};

/// Bits at which sign evaluation gives up; an element of a real number field is
/// either zero (caught exactly) or separated from zero, so this is only reached
/// for absurdly large coefficients.
const SIGN_CAP_BITS: u32 = 1 << 16;

/// The real field `Q(theta)` with `theta = c^(1/d)`, `c > 0`, `theta > 0`.
///
/// The pair is normalised so that `x^d - c` is irreducible, which makes the
/// power basis `1, theta, ..., theta^(d-1)` a basis and equality a
/// coefficientwise test.
#[derive(Clone, PartialEq, Eq)]
pub struct RootField {
    radicand: Rational,
    degree: u32,
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl RootField {
    /// `Q(c^(1/d))`, reduced to the smallest degree presenting the same number.
    pub fn new(c: &Rational, d: u32) -> Result<Arc<Self>> {
        if c.cmp0() != Ordering::Greater {
            return Err(Error::InvalidParameter(format!(
                "radicand {} must be positive",
                format_rational(c)
            )));
        }
        if d == 0 {
            return Err(Error::InvalidParameter(
                "root degree must be positive".into(),
            ));
        }
        let mut c = c.clone();
        let mut d = d;
        'outer: loop {
            if c == 1 {
                d = 1;
            }
            for p in prime_factors(d) {
                if let Some(r) = rational_root(&c, p) {
                    c = r;
                    d /= p;
                    continue 'outer;
                }
            }
            break;
        }
        if d == 1 {
            return Ok(Self::rationals());
        }
        Ok(Arc::new(RootField {
            radicand: c,
            degree: d,
        }))
    }

    /// The trivial extension, `Q` itself.
    pub fn rationals() -> Arc<Self> {
        Arc::new(RootField {
            radicand: Rational::from(1),
            degree: 1,
        })
    }

    pub fn radicand(&self) -> &Rational {
        &self.radicand
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_rationals(&self) -> bool {
        self.degree == 1
    }

    /// The generator `theta` as a field element.
    pub fn theta(self: &Arc<Self>) -> RootExt {
        let d = self.degree as usize;
        let mut coeffs = vec![Rational::new(); d];
        if d == 1 {
            coeffs[0] = self.radicand.clone();
        } else {
            coeffs[1] = Rational::from(1);
        }
        RootExt {
            field: self.clone(),
            coeffs,
        }
    }

    fn theta_interval(&self, bits: u32) -> Interval {
        let c = Interval::from_rational_prec(bits, &self.radicand);
        c.pow_rational(&Rational::from((1, self.degree)))
            .expect("radicand is positive")
    }
}

impl fmt::Debug for RootField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Q(({})^(1/{}))",
            format_rational(&self.radicand),
            self.degree
        )
    }
}

/// An element `sum a_k theta^k` of a [`RootField`].
#[derive(Clone, PartialEq, Eq)]
pub struct RootExt {
    field: Arc<RootField>,
    coeffs: Vec<Rational>,
}

impl RootExt {
    pub fn from_rational_in(field: &Arc<RootField>, q: &Rational) -> Self {
        let mut coeffs = vec![Rational::new(); field.degree as usize];
        coeffs[0] = q.clone();
        RootExt {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn field(&self) -> &Arc<RootField> {
        &self.field
    }

    /// Coefficients in the power basis.
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.coeffs[1..]
            .iter()
            .all(|c| c.cmp0() == Ordering::Equal)
            .then(|| &self.coeffs[0])
    }

    pub fn is_rational(&self) -> bool {
        self.as_rational().is_some()
    }

    /// Enclosure of the real number at `bits` of precision.
    pub fn to_interval(&self, bits: u32) -> Interval {
        if let Some(q) = self.as_rational() {
            return Interval::from_rational_prec(bits, q);
        }
        let theta = self.field.theta_interval(bits);
        let mut acc = Interval::zero(&bits);
        for c in self.coeffs.iter().rev() {
            acc = acc
                .mul_ref(&theta)
                .add_ref(&Interval::from_rational_prec(bits, c));
        }
        acc
    }

    /// Brings two operands into a common field. A rational element adapts to
    /// the other operand's field; two genuinely different fields cannot be
    /// combined.
    fn unify<'a>(
        a: &'a Self,
        b: &'a Self,
    ) -> (std::borrow::Cow<'a, Self>, std::borrow::Cow<'a, Self>) {
        use std::borrow::Cow;
        if Arc::ptr_eq(&a.field, &b.field) || a.field == b.field {
            return (Cow::Borrowed(a), Cow::Borrowed(b));
        }
        if let Some(q) = a.as_rational() {
            return (
                Cow::Owned(Self::from_rational_in(&b.field, q)),
                Cow::Borrowed(b),
            );
        }
        if let Some(q) = b.as_rational() {
            return (
                Cow::Borrowed(a),
                Cow::Owned(Self::from_rational_in(&a.field, q)),
            );
        }
        panic!("cannot combine elements of {:?} and {:?}", a.field, b.field);
    }

    fn zip(&self, rhs: &Self, op: impl Fn(&Rational, &Rational) -> Rational) -> Self {
        let (a, b) = Self::unify(self, rhs);
        RootExt {
            field: a.field.clone(),
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(x, y)| op(x, y))
                .collect(),
        }
    }

    fn recip_by_elimination(&self) -> Result<Self> {
        let d = self.coeffs.len();
        // Column j holds self * theta^j; solve for y with sum y_j col_j = 1.
        let mut cols = Vec::with_capacity(d);
        let mut cur = self.clone();
        let theta = self.field.theta();
        for _ in 0..d {
            cols.push(cur.coeffs.clone());
            cur = cur.mul_ref(&theta);
        }
        let mut m: Vec<Vec<Rational>> = (0..d)
            .map(|r| {
                let mut row: Vec<Rational> = (0..d).map(|c| cols[c][r].clone()).collect();
                row.push(Rational::from(u32::from(r == 0)));
                row
            })
            .collect();
        for col in 0..d {
            let pivot = (col..d)
                .find(|&r| m[r][col].cmp0() != Ordering::Equal)
                .ok_or_else(|| Error::DivisionByZero {
                    what: "root-extension zero".into(),
                })?;
            m.swap(col, pivot);
            let inv = Rational::from(m[col][col].recip_ref());
            for v in m[col].iter_mut() {
                *v *= &inv;
            }
            for r in 0..d {
                if r != col && m[r][col].cmp0() != Ordering::Equal {
                    let factor = m[r][col].clone();
                    for c in col..=d {
                        let t = Rational::from(&factor * &m[col][c]);
                        m[r][c] -= t;
                    }
                }
            }
        }
        Ok(RootExt {
            field: self.field.clone(),
            coeffs: m.into_iter().map(|row| row[d].clone()).collect(),
        })
    }

    fn not_representable(&self, op: &str) -> Error {
        Error::NotRepresentable {
            op: format!("{op}({})", self.to_text()),
            backend: Backend::ExactRoot {
                radicand: format_rational(&self.field.radicand),
                degree: self.field.degree,
            }
            .to_string(),
        }
    }
}

impl fmt::Debug for RootExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl Num for RootExt {
    type Ctx = Arc<RootField>;

    fn ctx(&self) -> Arc<RootField> {
        self.field.clone()
    }

    fn from_rational(ctx: &Arc<RootField>, q: &Rational) -> Self {
        Self::from_rational_in(ctx, q)
    }

    fn add_ref(&self, rhs: &Self) -> Self {
        self.zip(rhs, |x, y| Rational::from(x + y))
    }

    fn sub_ref(&self, rhs: &Self) -> Self {
        self.zip(rhs, |x, y| Rational::from(x - y))
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        let (a, b) = Self::unify(self, rhs);
        if let Some(q) = a.as_rational() {
            return RootExt {
                field: b.field.clone(),
                coeffs: b.coeffs.iter().map(|c| Rational::from(c * q)).collect(),
            };
        }
        if let Some(q) = b.as_rational() {
            return RootExt {
                field: a.field.clone(),
                coeffs: a.coeffs.iter().map(|c| Rational::from(c * q)).collect(),
            };
        }
        let d = a.coeffs.len();
        let mut full = vec![Rational::new(); 2 * d - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.cmp0() == Ordering::Equal {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if y.cmp0() != Ordering::Equal {
                    full[i + j] += Rational::from(x * y);
                }
            }
        }
        let c = &a.field.radicand;
        for k in (d..2 * d - 1).rev() {
            let top = std::mem::take(&mut full[k]);
            full[k - d] += top * c;
        }
        full.truncate(d);
        RootExt {
            field: a.field.clone(),
            coeffs: full,
        }
    }

    fn neg_ref(&self) -> Self {
        RootExt {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| Rational::from(-c)).collect(),
        }
    }

    fn recip(&self) -> Result<Self> {
        if let Some(q) = self.as_rational() {
            let inv = Num::recip(q)?;
            return Ok(Self::from_rational_in(&self.field, &inv));
        }
        self.recip_by_elimination()
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.cmp0() == Ordering::Equal)
    }
}

impl Scalar for RootExt {
    fn sign(&self) -> Sign {
        if let Some(q) = self.as_rational() {
            return q.sign();
        }
        let mut bits = 128;
        loop {
            let s = self.to_interval(bits).sign();
            if s.is_determined() || bits >= SIGN_CAP_BITS {
                return s;
            }
            bits *= 2;
        }
    }

    fn pow_rational(&self, r: &Rational) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("exponent {r} out of range"));
        let p = r.numer().to_i64().ok_or_else(bad)?;
        let m = r.denom().to_u32().ok_or_else(bad)?;
        if m == 1 {
            let pos = self.powi(u32::try_from(p.unsigned_abs()).map_err(|_| bad())?);
            return if p >= 0 { Ok(pos) } else { Num::recip(&pos) };
        }
        let Some(q) = self.as_rational() else {
            return Err(self.not_representable(&format!("pow[{r}]")));
        };
        if q.cmp0() != Ordering::Greater {
            return Err(Error::NotPositive {
                what: "base of a fractional power".into(),
                found: q.sign().as_str(),
            });
        }
        // Look for a root of the form t * theta^k with t rational.
        let d = self.field.degree;
        let c = &self.field.radicand;
        for k in 0..d {
            if (k * m) % d != 0 {
                continue;
            }
            let e = i64::from(k * m / d);
            let ce = super::rational::rational_powi(c, e)?;
            let target = Rational::from(q / &ce);
            if let Some(t) = rational_root(&target, m) {
                let mut y = self.field.theta().powi(k);
                y = y.mul_ref(&Self::from_rational_in(&self.field, &t));
                return y.pow_rational(&Rational::from(p));
            }
        }
        Err(self.not_representable(&format!("pow[{r}]")))
    }

    fn exp(&self) -> Result<Self> {
        if self.is_zero() {
            Ok(self.one_like())
        } else {
            Err(self.not_representable("exp"))
        }
    }

    fn ln(&self) -> Result<Self> {
        match self.sign() {
            Sign::Positive if self.as_rational().is_some_and(|q| *q == 1) => Ok(self.zero_like()),
            Sign::Positive => Err(self.not_representable("ln")),
            s => Err(Error::NotPositive {
                what: "argument of ln".into(),
                found: s.as_str(),
            }),
        }
    }

    fn backend(&self) -> Backend {
        if self.field.is_rationals() {
            Backend::ExactRational
        } else {
            Backend::ExactRoot {
                radicand: format_rational(&self.field.radicand),
                degree: self.field.degree,
            }
        }
    }

    fn to_f64(&self) -> f64 {
        self.to_interval(128).to_f64()
    }

    fn abs_upper(&self) -> f64 {
        self.to_interval(128).abs_upper()
    }

    fn abs_lower(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let mut bits = 128;
        loop {
            let v = self.to_interval(bits).abs_lower();
            if v > 0.0 || bits >= SIGN_CAP_BITS {
                return v;
            }
            bits *= 2;
        }
    }

    fn to_text(&self) -> String {
        let radicand = format_rational(&self.field.radicand);
        let d = self.field.degree;
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.cmp0() != Ordering::Equal)
            .map(|(k, c)| {
                if k == 0 {
                    format_rational(c)
                } else {
                    format!("{}*({radicand})^({k}/{d})", format_rational(c))
                }
            })
            .collect();
        if terms.is_empty() {
            "0/1".into()
        } else {
            terms.join(" + ")
        }
    }

    fn compatible_with(&self, other: &Self) -> bool {
        self.sub_ref(other).is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn normalisation_strips_perfect_powers() {
        assert!(RootField::new(&q(4, 1), 2).unwrap().is_rationals());
        let f = RootField::new(&q(4, 1), 4).unwrap();
        assert_eq!((f.radicand().clone(), f.degree()), (q(2, 1), 2));
        let f = RootField::new(&q(64, 1), 6).unwrap();
        assert!(f.is_rationals());
        let f = RootField::new(&q(8, 27), 6).unwrap();
        assert_eq!((f.radicand().clone(), f.degree()), (q(2, 3), 2));
        assert!(RootField::new(&q(-2, 1), 2).is_err());
    }

    #[test]
    fn generator_satisfies_its_equation() {
        let f = RootField::new(&q(2, 1), 3).unwrap();
        let t = f.theta();
        assert_eq!(t.powi(3), RootExt::from_rational_in(&f, &q(2, 1)));
        assert_eq!(t.powi(4), t.scale(&q(2, 1)));
    }

    #[test]
    fn reciprocal_by_elimination() {
        let f = RootField::new(&q(2, 1), 3).unwrap();
        let t = f.theta();
        let a = t.add_ref(&t.square()).add_ref(&RootExt::one(&f));
        let inv = a.recip().unwrap();
        assert_eq!(a.mul_ref(&inv), RootExt::one(&f));
        assert!(RootExt::zero(&f).recip().is_err());
    }

    #[test]
    fn sign_of_near_cancellation() {
        // 1 + sqrt2 - 12/5 is about 0.0142, positive; 17/12 - sqrt2 is positive too.
        let f = RootField::new(&q(2, 1), 2).unwrap();
        let r2 = f.theta();
        let a = r2.add_ref(&RootExt::from_rational_in(&f, &q(-7, 5)));
        assert_eq!(a.sign(), Sign::Positive);
        let b = RootExt::from_rational_in(&f, &q(17, 12)).sub_ref(&r2);
        assert_eq!(b.sign(), Sign::Positive);
        assert_eq!(r2.sub_ref(&r2).sign(), Sign::Zero);
    }

    #[test]
    fn fractional_powers_of_rationals() {
        let f = RootField::new(&q(2, 1), 3).unwrap();
        let sixteen = RootExt::from_rational_in(&f, &q(16, 1));
        // 16^(1/3) = 2 * 2^(1/3)
        let r = sixteen.pow_rational(&q(1, 3)).unwrap();
        assert_eq!(r, f.theta().scale(&q(2, 1)));
        let r = RootExt::from_rational_in(&f, &q(1, 4))
            .pow_rational(&q(-1, 3))
            .unwrap();
        assert_eq!(r.powi(3), RootExt::from_rational_in(&f, &q(4, 1)));
        assert!(RootExt::from_rational_in(&f, &q(3, 1))
            .pow_rational(&q(1, 3))
            .is_err());
    }

    #[test]
    fn rationals_lift_into_any_field() {
        let f = RootField::new(&q(3, 1), 2).unwrap();
        let rat = RootExt::from_rational_in(&RootField::rationals(), &q(1, 2));
        let s = f.theta().add_ref(&rat);
        assert_eq!(s.to_text(), "1/2 + 1/1*(3/1)^(1/2)");
        assert_eq!(s.backend().name(), "exact-root");
    }

    #[test]
    fn interval_image_is_consistent() {
        let f = RootField::new(&q(5, 1), 2).unwrap();
        let gold = f.theta().add_ref(&RootExt::one(&f)).scale(&q(1, 2));
        let iv = gold.to_interval(200);
        let sq = iv.square().sub_ref(&iv).sub_ref(&Interval::one(&200));
        assert!(sq.contains_rational(&Rational::new()));
        assert!((gold.to_f64() - 1.618_033_988_749_895).abs() < 1e-15);
    }
}
