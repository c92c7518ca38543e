//! Mixed partials of `Phi(z) = f(|z|^2)` by symbolic chain rule.
//!
//! A term is `c f^(k) z^a zbar^b`. Differentiation in `z_j` maps it to
//! `c f^(k+1) zbar_j z^a zbar^b + c a_j f^(k) z^(a-e_j) zbar^b`, and similarly
//! for `zbar_j`. At the radial point `(s, 0, ..., 0)` a term survives only if
//! it carries no `z_i`, `zbar_i` with `i >= 2`, and then equals
//! `c f^(k) s^(a_1 + b_1)`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use super::series::pack;
use crate::error::{Error, Result};
use crate::scalar::Num;

/// One term `coeff * f^(k) * z^a * zbar^b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadialDerivativeTerm {
    pub k: u32,
    pub a: Vec<u8>,
    pub b: Vec<u8>,
    pub coeff: i64,
}

/// A finite linear combination of [`RadialDerivativeTerm`]s.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TermSum {
    n: usize,
    terms: BTreeMap<(u32, Vec<u8>, Vec<u8>), i64>,
}

impl TermSum {
    /// `f^(0)` in `n` complex variables.
    pub fn potential(n: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((0, vec![0; n], vec![0; n]), 1);
        TermSum { n, terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = RadialDerivativeTerm> + '_ {
        self.terms
            .iter()
            .map(|((k, a, b), c)| RadialDerivativeTerm {
                k: *k,
                a: a.clone(),
                b: b.clone(),
                coeff: *c,
            })
    }

    fn add_term(&mut self, k: u32, a: Vec<u8>, b: Vec<u8>, c: i64) {
        let slot = self.terms.entry((k, a, b)).or_insert(0);
        *slot += c;
        if *slot == 0 {
            // Keep the map free of cancelled entries.
            self.terms.retain(|_, v| *v != 0);
        }
    }

    /// `d/dz_j` (`conj = false`) or `d/dzbar_j` (`conj = true`).
    pub fn derive(&self, j: usize, conj: bool) -> Self {
        let mut out = TermSum {
            n: self.n,
            terms: BTreeMap::new(),
        };
        for ((k, a, b), c) in &self.terms {
            // Chain rule on f^(k)(x): dx/dz_j = zbar_j, dx/dzbar_j = z_j.
            let (mut a2, mut b2) = (a.clone(), b.clone());
            if conj {
                a2[j] += 1;
            } else {
                b2[j] += 1;
            }
            out.add_term(k + 1, a2, b2, *c);
            // Power rule on the monomial.
            let e = if conj { b[j] } else { a[j] };
            if e > 0 {
                let (mut a3, mut b3) = (a.clone(), b.clone());
                if conj {
                    b3[j] -= 1;
                } else {
                    a3[j] -= 1;
                }
                out.add_term(*k, a3, b3, c * i64::from(e));
            }
        }
        out
    }

    /// Value at `(s, 0, ..., 0)` as `sum c f^(k) s^m`, returned as `(k, m, c)`.
    pub fn radial_form(&self) -> Vec<(u32, u32, i64)> {
        let mut acc: BTreeMap<(u32, u32), i64> = BTreeMap::new();
        for ((k, a, b), c) in &self.terms {
            if a[1..].iter().chain(&b[1..]).any(|&e| e > 0) {
                continue;
            }
            *acc.entry((*k, u32::from(a[0]) + u32::from(b[0])))
                .or_insert(0) += c;
        }
        acc.into_iter()
            .filter(|(_, c)| *c != 0)
            .map(|((k, m), c)| (k, m, c))
            .collect()
    }
}

/// Radial forms of every mixed partial `d^alpha dbar^beta Phi` with
/// `|alpha| + |beta| <= max_order`, keyed by the packed exponent word of
/// [`super::series`]; partials vanishing at the radial point are omitted.
#[derive(Debug)]
pub struct PartialsTable {
    pub n: usize,
    pub max_order: usize,
    pub entries: Vec<(u64, Vec<u8>, Vec<(u32, u32, i64)>)>,
}

fn build_table(n: usize, max_order: usize) -> PartialsTable {
    let nv = 2 * n;
    let mut entries = Vec::new();
    // Layer of the previous total degree: exponent vector -> term sum.
    let mut layer: HashMap<Vec<u8>, TermSum> = HashMap::new();
    layer.insert(vec![0; nv], TermSum::potential(n));
    for deg in 0..=max_order {
        let mut keys: Vec<&Vec<u8>> = layer.keys().collect();
        keys.sort();
        for exps in keys {
            let form = layer[exps].radial_form();
            if !form.is_empty() {
                entries.push((pack(exps), exps.clone(), form));
            }
        }
        if deg == max_order {
            break;
        }
        let mut next: HashMap<Vec<u8>, TermSum> = HashMap::new();
        for (exps, sum) in &layer {
            // Each child is produced from its parent by raising the last
            // nonzero exponent or any later one, so no vector is made twice.
            let last = exps.iter().rposition(|&e| e > 0).unwrap_or(0);
            for v in last..nv {
                let mut child = exps.clone();
                child[v] += 1;
                let d = if v < n {
                    sum.derive(v, false)
                } else {
                    sum.derive(v - n, true)
                };
                next.insert(child, d);
            }
        }
        layer = next;
    }
    entries.sort_by_key(|e| e.0);
    PartialsTable {
        n,
        max_order,
        entries,
    }
}

/// Shared, lazily built table for `(n, max_order)`. The table depends only on
/// its key, so concurrent callers always observe identical contents.
pub fn partials_table(n: usize, max_order: usize) -> Result<Arc<PartialsTable>> {
    if n == 0 || n > 8 {
        return Err(Error::InvalidParameter(format!(
            "dimension {n} outside the supported range 1..=8"
        )));
    }
    if max_order > 8 {
        return Err(Error::InvalidParameter(format!(
            "mixed partials of order {max_order} exceed the supported 8"
        )));
    }
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<PartialsTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache
        .lock()
        .expect("table cache poisoned")
        .get(&(n, max_order))
    {
        return Ok(t.clone());
    }
    let table = Arc::new(build_table(n, max_order));
    let mut guard = cache.lock().expect("table cache poisoned");
    Ok(guard.entry((n, max_order)).or_insert(table).clone())
}

/// Evaluates a radial form given `fderiv[k] = f^(k)(s^2)` and `spow[m] = s^m`.
pub fn eval_radial_form<S: Num>(form: &[(u32, u32, i64)], fderiv: &[S], spow: &[S]) -> Result<S> {
    let mut acc = spow[0].zero_like();
    for &(k, m, c) in form {
        let fk = fderiv.get(k as usize).ok_or_else(|| {
            Error::shortfall(
                "derivatives of f",
                k as usize,
                fderiv.len().saturating_sub(1),
            )
        })?;
        acc.add_assign_ref(&fk.mul_ref(&spow[m as usize]).scale_i64(c));
    }
    Ok(acc)
}

/// Every nonzero mixed partial of `Phi` at the radial point, as
/// `(exponents of z then zbar, value)`.
pub fn potential_mixed_partials<S: Num>(
    n: usize,
    max_order: usize,
    fderiv: &[S],
    s: &S,
) -> Result<Vec<(Vec<u8>, S)>> {
    let table = partials_table(n, max_order)?;
    let spow = powers(s, 2 * max_order);
    table
        .entries
        .iter()
        .map(|(_, exps, form)| Ok((exps.clone(), eval_radial_form(form, fderiv, &spow)?)))
        .collect()
}

pub(crate) fn powers<S: Num>(s: &S, upto: usize) -> Vec<S> {
    let mut out = Vec::with_capacity(upto + 1);
    out.push(s.one_like());
    for m in 1..=upto {
        out.push(out[m - 1].mul_ref(s));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn first_derivatives_follow_the_chain_rule() {
        let phi = TermSum::potential(2);
        let d = phi.derive(0, false);
        // d/dz1 f = f' zbar1
        assert_eq!(
            d.terms().collect::<Vec<_>>(),
            vec![RadialDerivativeTerm {
                k: 1,
                a: vec![0, 0],
                b: vec![1, 0],
                coeff: 1
            }]
        );
        // d/dzbar1 of that: f'' z1 zbar1 + f'
        let dd = d.derive(0, true);
        assert_eq!(dd.radial_form(), vec![(1, 0, 1), (2, 2, 1)]);
        // d^2/dz2 dzbar2 at the radial point: f'
        assert_eq!(
            phi.derive(1, false).derive(1, true).radial_form(),
            vec![(1, 0, 1)]
        );
    }

    #[test]
    fn flat_fourth_mixed_partial_vanishes() {
        // f = x: f' = 1, higher derivatives 0.
        let fd: Vec<Rational> = vec![
            Rational::new(),
            Rational::from(1),
            Rational::new(),
            Rational::new(),
            Rational::new(),
        ];
        let s = Rational::from(3);
        let parts = potential_mixed_partials(2, 4, &fd, &s).unwrap();
        let find = |e: [u8; 4]| {
            parts
                .iter()
                .find(|(x, _)| x.as_slice() == e)
                .map(|(_, v)| v.clone())
                .unwrap_or_default()
        };
        assert_eq!(find([1, 1, 1, 1]), 0);
        assert_eq!(find([1, 0, 1, 0]), 1);
        assert_eq!(find([0, 1, 0, 1]), 1);
    }

    #[test]
    fn table_has_no_duplicates_and_respects_the_torus() {
        let t = partials_table(3, 5).unwrap();
        let mut keys: Vec<u64> = t.entries.iter().map(|e| e.0).collect();
        keys.dedup();
        assert_eq!(keys.len(), t.entries.len());
        for (_, exps, _) in &t.entries {
            for i in 1..3 {
                assert_eq!(exps[i], exps[i + 3], "{exps:?}");
            }
        }
    }
}
