//! Truncated power series in the local coordinates `u_1..u_n, v_1..v_n`
//! (holomorphic and antiholomorphic offsets from the base point).
//!
//! Monomials are packed four bits per variable into a `u64`, so at most 16
//! variables and exponents up to 15; total degree is capped by `order <= 8`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::jet::factorial;
use crate::scalar::Num;

pub const MAX_VARS: usize = 16;
pub const MAX_ORDER: usize = 8;

#[derive(Clone, Debug)]
pub struct LocalSeries<S: Num> {
    nvars: usize,
    order: usize,
    ctx: S::Ctx,
    /// Sorted by key; no exact zeros stored.
    terms: Vec<(u64, u8, S)>,
}

pub fn pack(exps: &[u8]) -> u64 {
    exps.iter()
        .enumerate()
        .fold(0u64, |acc, (i, &e)| acc | (u64::from(e) << (4 * i)))
}

fn exponent(key: u64, var: usize) -> u64 {
    (key >> (4 * var)) & 0xf
}

impl<S: Num> LocalSeries<S> {
    pub fn zero(ctx: &S::Ctx, nvars: usize, order: usize) -> Self {
        assert!(nvars <= MAX_VARS && order <= MAX_ORDER);
        LocalSeries {
            nvars,
            order,
            ctx: ctx.clone(),
            terms: Vec::new(),
        }
    }

    pub fn constant(ctx: &S::Ctx, nvars: usize, order: usize, value: S) -> Self {
        let mut out = Self::zero(ctx, nvars, order);
        if !value.is_zero() {
            out.terms.push((0, 0, value));
        }
        out
    }

    /// Taylor series from mixed partials: the coefficient of `w^e` is the
    /// partial `d^e` divided by `e!`.
    pub fn from_partials(
        ctx: &S::Ctx,
        nvars: usize,
        order: usize,
        partials: &[(Vec<u8>, S)],
    ) -> Self {
        let mut map = BTreeMap::new();
        for (exps, value) in partials {
            assert_eq!(exps.len(), nvars);
            let deg: usize = exps.iter().map(|&e| e as usize).sum();
            if deg > order || value.is_zero() {
                continue;
            }
            let denom = exps
                .iter()
                .fold(crate::scalar::Rational::from(1), |acc, &e| {
                    acc * factorial(e as usize)
                });
            let coeff =
                value.scale(&crate::scalar::Num::recip(&denom).expect("factorials are nonzero"));
            map.insert(pack(exps), (deg as u8, coeff));
        }
        LocalSeries {
            nvars,
            order,
            ctx: ctx.clone(),
            terms: map.into_iter().map(|(k, (d, v))| (k, d, v)).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Taylor coefficient of the monomial with exponents `exps`.
    pub fn coeff(&self, exps: &[u8]) -> S {
        let key = pack(exps);
        match self.terms.binary_search_by_key(&key, |t| t.0) {
            Ok(i) => self.terms[i].2.clone(),
            Err(_) => S::zero(&self.ctx),
        }
    }

    pub fn constant_term(&self) -> S {
        match self.terms.first() {
            Some((0, _, v)) => v.clone(),
            _ => S::zero(&self.ctx),
        }
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        LocalSeries {
            nvars: self.nvars,
            order,
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .filter(|t| t.1 as usize <= order)
                .cloned()
                .collect(),
        }
    }

    fn merge(&self, rhs: &Self, sub: bool) -> Self {
        assert_eq!(self.nvars, rhs.nvars);
        let order = self.order.min(rhs.order);
        let mut terms = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &rhs.terms);
        let push = |terms: &mut Vec<(u64, u8, S)>, t: (u64, u8, S)| {
            if t.1 as usize <= order && !t.2.is_zero() {
                terms.push(t);
            }
        };
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                push(&mut terms, a[i].clone());
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                let v = if sub {
                    b[j].2.neg_ref()
                } else {
                    b[j].2.clone()
                };
                push(&mut terms, (b[j].0, b[j].1, v));
                j += 1;
            } else {
                let v = if sub {
                    a[i].2.sub_ref(&b[j].2)
                } else {
                    a[i].2.add_ref(&b[j].2)
                };
                push(&mut terms, (a[i].0, a[i].1, v));
                i += 1;
                j += 1;
            }
        }
        LocalSeries {
            nvars: self.nvars,
            order,
            ctx: self.ctx.clone(),
            terms,
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.merge(rhs, false)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.merge(rhs, true)
    }

    pub fn neg(&self) -> Self {
        LocalSeries {
            terms: self
                .terms
                .iter()
                .map(|(k, d, v)| (*k, *d, v.neg_ref()))
                .collect(),
            ..self.clone()
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(&self.ctx, self.nvars, self.order);
        if c.is_zero() {
            return out;
        }
        out.terms = self
            .terms
            .iter()
            .map(|(k, d, v)| (*k, *d, v.mul_ref(c)))
            .filter(|t| !t.2.is_zero())
            .collect();
        out
    }

    pub fn scale_i64(&self, c: i64) -> Self {
        self.scale(&S::from_i64(&self.ctx, c))
    }

    /// Product truncated at the smaller of the two orders.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.nvars, rhs.nvars);
        let order = self.order.min(rhs.order);
        let mut acc: BTreeMap<u64, (u8, S)> = BTreeMap::new();
        for (ka, da, va) in &self.terms {
            if *da as usize > order {
                continue;
            }
            for (kb, db, vb) in &rhs.terms {
                if (*da + *db) as usize > order {
                    continue;
                }
                let prod = va.mul_ref(vb);
                match acc.get_mut(&(ka + kb)) {
                    Some(slot) => slot.1.add_assign_ref(&prod),
                    None => {
                        acc.insert(ka + kb, (da + db, prod));
                    }
                }
            }
        }
        LocalSeries {
            nvars: self.nvars,
            order,
            ctx: self.ctx.clone(),
            terms: acc
                .into_iter()
                .filter(|(_, (_, v))| !v.is_zero())
                .map(|(k, (d, v))| (k, d, v))
                .collect(),
        }
    }

    /// Partial derivative in variable `var`; the order drops by one.
    pub fn derive(&self, var: usize) -> Result<Self> {
        if self.order == 0 {
            return Err(Error::shortfall("local series derivative", 1, 0));
        }
        let step = 1u64 << (4 * var);
        let terms = self
            .terms
            .iter()
            .filter_map(|(k, d, v)| {
                let e = exponent(*k, var);
                (e > 0).then(|| (k - step, d - 1, v.scale_i64(e as i64)))
            })
            .collect();
        Ok(LocalSeries {
            nvars: self.nvars,
            order: self.order - 1,
            ctx: self.ctx.clone(),
            terms,
        })
    }

    /// `d^e` at the origin, that is `e!` times the Taylor coefficient.
    pub fn partial_at_origin(&self, exps: &[u8]) -> S {
        let denom = exps
            .iter()
            .fold(crate::scalar::Rational::from(1), |acc, &e| {
                acc * factorial(e as usize)
            });
        self.coeff(exps).scale(&denom)
    }
}

/// Square matrix of series.
pub type SeriesMatrix<S> = Vec<Vec<LocalSeries<S>>>;

pub fn matrix_mul<S: Num>(a: &SeriesMatrix<S>, b: &SeriesMatrix<S>) -> SeriesMatrix<S> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut acc = a[i][0].mul(&b[0][j]);
                    for k in 1..n {
                        acc = acc.add(&a[i][k].mul(&b[k][j]));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Inverse of a dense matrix of scalars by Gauss-Jordan elimination.
pub fn invert_dense<S: Num>(m: &[Vec<S>]) -> Result<Vec<Vec<S>>> {
    let n = m.len();
    let mut a: Vec<Vec<S>> = m.to_vec();
    let mut inv: Vec<Vec<S>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        m[0][0].one_like()
                    } else {
                        m[0][0].zero_like()
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| a[r][col].recip().is_ok())
            .ok_or_else(|| Error::DivisionByZero {
                what: "metric matrix at the base point".into(),
            })?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].recip()?;
        for j in 0..n {
            a[col][j] = a[col][j].mul_ref(&p);
            inv[col][j] = inv[col][j].mul_ref(&p);
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for j in 0..n {
                let t = a[col][j].mul_ref(&factor);
                a[r][j].sub_assign_ref(&t);
                let t = inv[col][j].mul_ref(&factor);
                inv[r][j].sub_assign_ref(&t);
            }
        }
    }
    Ok(inv)
}

/// Inverse of a series matrix to the given order, by the Neumann expansion
/// around the inverse of its constant part.
pub fn invert_series<S: Num>(g: &SeriesMatrix<S>, order: usize) -> Result<SeriesMatrix<S>> {
    let n = g.len();
    let ctx = g[0][0].ctx.clone();
    let nvars = g[0][0].nvars;
    let g0: Vec<Vec<S>> = g
        .iter()
        .map(|row| row.iter().map(LocalSeries::constant_term).collect())
        .collect();
    let c = invert_dense(&g0)?;
    let cs: SeriesMatrix<S> = c
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| LocalSeries::constant(&ctx, nvars, order, v.clone()))
                .collect()
        })
        .collect();
    // m = -c * (g - g0)
    let nil: SeriesMatrix<S> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    g[i][j].truncate(order).sub(&LocalSeries::constant(
                        &ctx,
                        nvars,
                        order,
                        g0[i][j].clone(),
                    ))
                })
                .collect()
        })
        .collect();
    let m: SeriesMatrix<S> = matrix_mul(&cs, &nil)
        .into_iter()
        .map(|row| row.into_iter().map(|s| s.neg()).collect())
        .collect();
    let mut result = cs.clone();
    let mut term = cs;
    for _ in 0..order {
        term = matrix_mul(&m, &term);
        result = (0..n)
            .map(|i| (0..n).map(|j| result[i][j].add(&term[i][j])).collect())
            .collect();
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn series(order: usize, terms: &[(&[u8], Rational)]) -> LocalSeries<Rational> {
        let partials: Vec<(Vec<u8>, Rational)> = terms
            .iter()
            .map(|(e, c)| {
                let f = e
                    .iter()
                    .fold(q(1, 1), |acc, &k| acc * factorial(k as usize));
                (e.to_vec(), c.clone() * f)
            })
            .collect();
        LocalSeries::from_partials(&(), 2, order, &partials)
    }

    #[test]
    fn geometric_series_product() {
        // (1 - u)(1 + u + u^2 + u^3) = 1 - u^4, truncated at order 3.
        let a = series(3, &[(&[0, 0], q(1, 1)), (&[1, 0], q(-1, 1))]);
        let b = series(
            3,
            &[
                (&[0, 0], q(1, 1)),
                (&[1, 0], q(1, 1)),
                (&[2, 0], q(1, 1)),
                (&[3, 0], q(1, 1)),
            ],
        );
        let p = a.mul(&b);
        assert_eq!(p.len(), 1);
        assert_eq!(p.constant_term(), 1);
    }

    #[test]
    fn derivative_and_partials() {
        // 2 + 3 u v + 5 u^2 v
        let s = series(
            3,
            &[(&[0, 0], q(2, 1)), (&[1, 1], q(3, 1)), (&[2, 1], q(5, 1))],
        );
        let du = s.derive(0).unwrap();
        assert_eq!(du.coeff(&[0, 1]), 3);
        assert_eq!(du.coeff(&[1, 1]), 10);
        assert_eq!(s.partial_at_origin(&[2, 1]), 10);
        assert!(s
            .derive(0)
            .unwrap()
            .derive(0)
            .unwrap()
            .derive(0)
            .unwrap()
            .derive(0)
            .is_err());
    }

    #[test]
    fn neumann_inverse() {
        // [[1+u, v], [0, 2]] with order 3
        let one = series(3, &[(&[0, 0], q(1, 1)), (&[1, 0], q(1, 1))]);
        let v = series(3, &[(&[0, 1], q(1, 1))]);
        let zero = LocalSeries::zero(&(), 2, 3);
        let two = LocalSeries::constant(&(), 2, 3, q(2, 1));
        let g = vec![vec![one, v], vec![zero, two]];
        let inv = invert_series(&g, 3).unwrap();
        let id = matrix_mul(&g, &inv);
        for i in 0..2 {
            for j in 0..2 {
                let expect = LocalSeries::constant(&(), 2, 3, q(i64::from(i == j), 1));
                assert!(id[i][j].sub(&expect).is_empty(), "{i}{j}: {:?}", id[i][j]);
            }
        }
    }
}
