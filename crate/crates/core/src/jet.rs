//! Univariate truncated Taylor series.
//!
//! A [`Jet`] of order `H` at `x0` stores `c_0, ..., c_H` for
//! `sum c_k t^k`, `t = x - x0`. Binary operations truncate to the smaller
//! order, so a result never claims more coefficients than its inputs justify.

use std::fmt;
use std::sync::Arc;

use rug::Integer;

use crate::error::{Error, Result};
use crate::scalar::{Num, Rational, Scalar, Sign};

/// A truncated Taylor series at a rational base point.
#[derive(Clone, PartialEq)]
pub struct Jet<S> {
    base: Arc<Rational>,
    coeffs: Vec<S>,
}

/// Construction context of a [`Jet`]: base point, order and the coefficient
/// context.
#[derive(Clone, Debug)]
pub struct JetCtx<C> {
    pub base: Arc<Rational>,
    pub order: usize,
    pub inner: C,
}

pub(crate) fn factorial(k: usize) -> Rational {
    Rational::from(Integer::from(Integer::factorial(k as u32)))
}

impl<S: Num> Jet<S> {
    /// Jet with the given coefficients; order is `coeffs.len() - 1`.
    ///
    /// # Panics
    /// If `coeffs` is empty.
    pub fn new(base: Arc<Rational>, coeffs: Vec<S>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least one coefficient");
        Jet { base, coeffs }
    }

    pub fn constant(ctx: &S::Ctx, base: &Arc<Rational>, order: usize, value: S) -> Self {
        let mut coeffs = vec![S::zero(ctx); order + 1];
        coeffs[0] = value;
        Jet {
            base: base.clone(),
            coeffs,
        }
    }

    /// The identity function `x = x0 + t`.
    pub fn variable(ctx: &S::Ctx, base: &Arc<Rational>, order: usize) -> Self {
        let mut j = Self::constant(ctx, base, order, S::from_rational(ctx, base));
        if order >= 1 {
            j.coeffs[1] = S::one(ctx);
        }
        j
    }

    pub fn base(&self) -> &Arc<Rational> {
        &self.base
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Result<&S> {
        self.coeffs
            .get(k)
            .ok_or_else(|| Error::shortfall("jet coefficient", k, self.order()))
    }

    /// Value at the base point.
    pub fn value(&self) -> &S {
        &self.coeffs[0]
    }

    /// `k`-th derivative at the base point, `k! c_k`.
    pub fn derivative_at(&self, k: usize) -> Result<S> {
        Ok(self.coeff(k)?.scale(&factorial(k)))
    }

    pub fn truncate(&self, order: usize) -> Self {
        let keep = (order + 1).min(self.coeffs.len());
        Jet {
            base: self.base.clone(),
            coeffs: self.coeffs[..keep].to_vec(),
        }
    }

    fn same_base(&self, rhs: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.base, &rhs.base) || self.base == rhs.base {
            Ok(())
        } else {
            Err(Error::BaseMismatch)
        }
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        self.same_base(rhs)?;
        Ok(self.zip(rhs, S::add_ref))
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        self.same_base(rhs)?;
        Ok(self.zip(rhs, S::sub_ref))
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        self.same_base(rhs)?;
        let order = self.order().min(rhs.order());
        let mut out = vec![self.coeffs[0].zero_like(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(order + 1 - i) {
                out[i + j].mul_add_assign(a, b);
            }
        }
        Ok(Jet {
            base: self.base.clone(),
            coeffs: out,
        })
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        self.same_base(rhs)?;
        let order = self.order().min(rhs.order());
        let inv0 = rhs.coeffs[0].recip()?;
        // q_k = (a_k - sum_{j>=1} b_j q_{k-j}) / b_0
        let mut q: Vec<S> = Vec::with_capacity(order + 1);
        for k in 0..=order {
            let mut acc = self.coeffs[k].clone();
            for j in 1..=k {
                if !rhs.coeffs[j].is_zero() {
                    acc.sub_assign_ref(&rhs.coeffs[j].mul_ref(&q[k - j]));
                }
            }
            q.push(acc.mul_ref(&inv0));
        }
        Ok(Jet {
            base: self.base.clone(),
            coeffs: q,
        })
    }

    fn zip(&self, rhs: &Self, op: impl Fn(&S, &S) -> S) -> Self {
        let order = self.order().min(rhs.order());
        Jet {
            base: self.base.clone(),
            coeffs: (0..=order)
                .map(|k| op(&self.coeffs[k], &rhs.coeffs[k]))
                .collect(),
        }
    }

    pub fn map(&self, f: impl Fn(&S) -> S) -> Self {
        Jet {
            base: self.base.clone(),
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    /// Derivative in `x`; the order drops by one.
    pub fn derive(&self) -> Result<Self> {
        if self.order() == 0 {
            return Err(Error::shortfall("derivative of a jet", 1, 0));
        }
        Ok(Jet {
            base: self.base.clone(),
            coeffs: (1..self.coeffs.len())
                .map(|k| self.coeffs[k].scale_i64(k as i64))
                .collect(),
        })
    }

    /// Antiderivative with value `c0` at the base point; the order rises by one.
    pub fn antiderive(&self, c0: S) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(c0);
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c.scale(&Rational::from((1, k as i64 + 1))));
        }
        Jet {
            base: self.base.clone(),
            coeffs,
        }
    }

    /// `self(x0 + delta(t))` where `delta` is a series without constant term
    /// (its constant coefficient is ignored). The result lives at `delta`'s
    /// base point, with order `min(self.order(), delta.order())`.
    pub fn compose_shift(&self, delta: &Jet<S>) -> Jet<S> {
        let order = self.order().min(delta.order());
        let mut d = delta.truncate(order);
        d.coeffs[0] = d.coeffs[0].zero_like();
        let ctx = d.ctx();
        let mut acc = Jet::constant(&ctx.inner, &d.base, order, self.coeffs[order].clone());
        for k in (0..order).rev() {
            acc = acc.mul_ref(&d);
            acc.coeffs[0].add_assign_ref(&self.coeffs[k]);
        }
        acc
    }
}

impl<S: Scalar> Jet<S> {
    fn require_positive_constant(&self, what: &str) -> Result<()> {
        match self.coeffs[0].sign() {
            Sign::Positive => Ok(()),
            Sign::Undetermined => Err(Error::undetermined(what)),
            s => Err(Error::NotPositive {
                what: what.into(),
                found: s.as_str(),
            }),
        }
    }

    /// `exp` by the ODE `b' = a' b`: `k b_k = sum_{j=1}^k j a_j b_{k-j}`.
    pub fn exp(&self) -> Result<Self> {
        let mut b: Vec<S> = Vec::with_capacity(self.coeffs.len());
        b.push(self.coeffs[0].exp()?);
        for k in 1..self.coeffs.len() {
            let mut acc = b[0].zero_like();
            for j in 1..=k {
                if !self.coeffs[j].is_zero() {
                    acc.add_assign_ref(&self.coeffs[j].scale_i64(j as i64).mul_ref(&b[k - j]));
                }
            }
            b.push(acc.scale(&Rational::from((1, k as i64))));
        }
        Ok(Jet {
            base: self.base.clone(),
            coeffs: b,
        })
    }

    /// `ln` by `a b' = a'`.
    pub fn ln(&self) -> Result<Self> {
        self.require_positive_constant("constant term of ln argument")?;
        self.ln_with_constant(self.coeffs[0].ln()?)
    }

    /// `ln(self) - ln(self(x0)) + c0`, which exact backends can evaluate.
    fn ln_with_constant(&self, c0: S) -> Result<Self> {
        let a = &self.coeffs;
        let inv0 = a[0].recip()?;
        let mut b: Vec<S> = Vec::with_capacity(a.len());
        b.push(c0);
        for k in 1..a.len() {
            let mut acc = a[k].scale_i64(k as i64);
            for j in 1..k {
                acc.sub_assign_ref(&b[j].scale_i64(j as i64).mul_ref(&a[k - j]));
            }
            b.push(acc.mul_ref(&inv0).scale(&Rational::from((1, k as i64))));
        }
        Ok(Jet {
            base: self.base.clone(),
            coeffs: b,
        })
    }

    /// `self^r` by the recurrence from `a (a^r)' = r a' a^r`:
    /// `k a_0 b_k = sum_{j=1}^k ((r + 1) j - k) a_j b_{k-j}`.
    ///
    /// Integer exponents accept any invertible constant term; fractional ones
    /// need it certified positive.
    pub fn pow(&self, r: &Rational) -> Result<Self> {
        if *r.denom() != 1 {
            self.require_positive_constant("constant term of a fractional power")?;
        }
        let a = &self.coeffs;
        let b0 = a[0].pow_rational(r)?;
        if a.len() == 1 {
            return Ok(Jet {
                base: self.base.clone(),
                coeffs: vec![b0],
            });
        }
        let inv0 = a[0].recip()?;
        let r1 = Rational::from(r + 1u32);
        let mut b: Vec<S> = Vec::with_capacity(a.len());
        b.push(b0);
        for k in 1..a.len() {
            let mut acc = a[0].zero_like();
            for j in 1..=k {
                if a[j].is_zero() {
                    continue;
                }
                let w = Rational::from(&r1 * j as u32) - k as u32;
                if w == 0 {
                    continue;
                }
                acc.add_assign_ref(&a[j].scale(&w).mul_ref(&b[k - j]));
            }
            b.push(acc.mul_ref(&inv0).scale(&Rational::from((1, k as i64))));
        }
        Ok(Jet {
            base: self.base.clone(),
            coeffs: b,
        })
    }

    /// `self^r` as `exp(r ln self)`, an independent route to [`Jet::pow`].
    ///
    /// The constant term is taken from `pow_rational` so that exact backends,
    /// which cannot evaluate `exp` at nonzero points, still work.
    pub fn pow_via_exp_ln(&self, r: &Rational) -> Result<Self> {
        self.require_positive_constant("constant term of a fractional power")?;
        let log = self
            .ln_with_constant(self.coeffs[0].zero_like())?
            .map(|c| c.scale(r));
        let b0 = self.coeffs[0].pow_rational(r)?;
        Ok(log.exp()?.map(|c| c.mul_ref(&b0)))
    }

    /// Sign of the value at the base point.
    pub fn value_sign(&self) -> Sign {
        self.coeffs[0].sign()
    }
}

impl<S: Num> Num for Jet<S> {
    type Ctx = JetCtx<S::Ctx>;

    fn ctx(&self) -> Self::Ctx {
        JetCtx {
            base: self.base.clone(),
            order: self.order(),
            inner: self.coeffs[0].ctx(),
        }
    }

    fn from_rational(ctx: &Self::Ctx, q: &Rational) -> Self {
        Jet::constant(
            &ctx.inner,
            &ctx.base,
            ctx.order,
            S::from_rational(&ctx.inner, q),
        )
    }

    /// # Panics
    /// On a base-point mismatch; use [`Jet::checked_add`] to get an error.
    fn add_ref(&self, rhs: &Self) -> Self {
        self.checked_add(rhs)
            .expect("jets at different base points")
    }

    fn sub_ref(&self, rhs: &Self) -> Self {
        self.checked_sub(rhs)
            .expect("jets at different base points")
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        self.checked_mul(rhs)
            .expect("jets at different base points")
    }

    fn neg_ref(&self) -> Self {
        self.map(S::neg_ref)
    }

    fn recip(&self) -> Result<Self> {
        let one = Jet::constant(
            &self.coeffs[0].ctx(),
            &self.base,
            self.order(),
            self.coeffs[0].one_like(),
        );
        one.checked_div(self)
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(S::is_zero)
    }

    fn scale(&self, q: &Rational) -> Self {
        self.map(|c| c.scale(q))
    }

    fn add_assign_ref(&mut self, rhs: &Self) {
        self.same_base(rhs).expect("jets at different base points");
        self.coeffs.truncate(rhs.coeffs.len());
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            a.add_assign_ref(b);
        }
    }

    fn sub_assign_ref(&mut self, rhs: &Self) {
        self.same_base(rhs).expect("jets at different base points");
        self.coeffs.truncate(rhs.coeffs.len());
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            a.sub_assign_ref(b);
        }
    }
}

impl<S: Num> fmt::Debug for Jet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet@{}{:?}", self.base, self.coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Interval, RootField};

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn jet(coeffs: &[(i64, i64)]) -> Jet<Rational> {
        Jet::new(
            Arc::new(Rational::new()),
            coeffs.iter().map(|&(n, d)| q(n, d)).collect(),
        )
    }

    #[test]
    fn product_and_quotient() {
        let a = jet(&[(1, 1), (1, 1), (0, 1)]);
        let b = jet(&[(1, 1), (-1, 1), (0, 1)]);
        assert_eq!(a.mul_ref(&b), jet(&[(1, 1), (0, 1), (-1, 1)]));
        let one = jet(&[(1, 1), (0, 1), (0, 1), (0, 1)]);
        let geo = one
            .checked_div(&jet(&[(1, 1), (-1, 1), (0, 1), (0, 1)]))
            .unwrap();
        assert_eq!(geo, jet(&[(1, 1), (1, 1), (1, 1), (1, 1)]));
        let back = a.mul_ref(&b).checked_div(&b).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn truncates_to_common_order() {
        let a = jet(&[(1, 1), (2, 1), (3, 1), (4, 1)]);
        let b = jet(&[(1, 1), (1, 1)]);
        assert_eq!(a.add_ref(&b).order(), 1);
        assert_eq!(a.mul_ref(&b), jet(&[(1, 1), (3, 1)]));
    }

    #[test]
    fn base_mismatch_is_an_error() {
        let a = jet(&[(1, 1)]);
        let b = Jet::new(Arc::new(q(1, 2)), vec![q(1, 1)]);
        assert_eq!(a.checked_add(&b), Err(Error::BaseMismatch));
        assert!(jet(&[(0, 1), (1, 1)]).recip().is_err());
    }

    #[test]
    fn elementary_functions() {
        let t = jet(&[(0, 1), (1, 1), (0, 1), (0, 1)]);
        assert_eq!(t.exp().unwrap(), jet(&[(1, 1), (1, 1), (1, 2), (1, 6)]));
        let one_plus_t = jet(&[(1, 1), (1, 1), (0, 1)]);
        assert_eq!(
            one_plus_t.pow(&q(1, 2)).unwrap(),
            jet(&[(1, 1), (1, 2), (-1, 8)])
        );
        let c = jet(&[(9, 4)]);
        assert_eq!(c.pow(&q(1, 2)).unwrap(), jet(&[(3, 2)]));
        let log = jet(&[(1, 1), (1, 1), (0, 1), (0, 1)]).ln().unwrap();
        assert_eq!(log, jet(&[(0, 1), (1, 1), (-1, 2), (1, 3)]));
        assert!(jet(&[(-1, 1), (1, 1)]).ln().is_err());
        assert!(jet(&[(-1, 1), (1, 1)]).pow(&q(1, 3)).is_err());
        assert_eq!(
            jet(&[(-1, 1), (1, 1)]).pow(&q(-1, 1)).unwrap(),
            jet(&[(-1, 1), (-1, 1)])
        );
    }

    #[test]
    fn pow_routes_agree_in_a_root_field() {
        let field = RootField::new(&q(3, 1), 3).unwrap();
        let a = Jet::new(
            Arc::new(q(1, 1)),
            [(3, 1), (1, 2), (-2, 3), (1, 1), (5, 7)]
                .iter()
                .map(|&(n, d)| crate::scalar::RootExt::from_rational_in(&field, &q(n, d)))
                .collect(),
        );
        for r in [q(1, 3), q(-2, 3), q(5, 1), q(-1, 1)] {
            assert_eq!(a.pow(&r).unwrap(), a.pow_via_exp_ln(&r).unwrap(), "r = {r}");
        }
    }

    #[test]
    fn calculus() {
        let a = jet(&[(1, 1), (2, 1), (3, 1)]);
        assert_eq!(a.derive().unwrap(), jet(&[(2, 1), (6, 1)]));
        assert_eq!(a.derive().unwrap().antiderive(q(1, 1)), a);
        assert_eq!(jet(&[(1, 1)]).antiderive(q(0, 1)), jet(&[(0, 1), (1, 1)]));
        assert!(jet(&[(1, 1)]).derive().is_err());
        assert_eq!(a.derivative_at(2).unwrap(), 6);
    }

    #[test]
    fn composition_with_a_shift() {
        // g(x) = x^2 at x0 = 1, composed with 1 + 2t + t^2, is (1 + t)^4.
        let base = Arc::new(q(1, 1));
        let g = Jet::new(
            base.clone(),
            vec![q(1, 1), q(2, 1), q(1, 1), q(0, 1), q(0, 1)],
        );
        let delta = Jet::new(
            Arc::new(Rational::new()),
            vec![q(0, 1), q(2, 1), q(1, 1), q(0, 1), q(0, 1)],
        );
        let out = g.compose_shift(&delta);
        assert_eq!(out, jet(&[(1, 1), (4, 1), (6, 1), (4, 1), (1, 1)]));
    }

    #[test]
    fn jets_over_intervals() {
        let ctx = 128u32;
        let base = Arc::new(q(1, 1));
        let x = Jet::<Interval>::variable(&ctx, &base, 4);
        let s = x.pow(&q(1, 2)).unwrap();
        let back = s.mul_ref(&s).sub_ref(&x);
        for c in back.coeffs() {
            assert!(c.contains_rational(&Rational::new()));
            assert!(c.abs_upper() < 1e-35);
        }
    }
}
