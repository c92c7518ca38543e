//! Finite-order positivity checks on the diastasis along the `z_1`-axis.
//!
//! Around `p = (s, 0, ..., 0)` write `z_1 = s + u`, `zbar_1 = s + v`. The
//! diastasis restricted to the axis is
//! `D(u, v) = F(s^2 + s(u + v) + uv) - F(s^2 + s u) - F(s^2 + s v)` with `F`
//! the potential normalised by `F(s^2) = 0`. For every `h`, the matrix
//! `[u^i v^j] exp(D) g_h(z_1 zbar_1)` with `i, j <= l` must have positive
//! leading minors if the metric is projectively induced; a certified negative
//! minor is an obstruction.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::backend::{evaluate, Computation, Precision};
use crate::error::{Error, Result};
use crate::jet::{factorial, Jet};
use crate::obstruction::gh_jets;
use crate::potential::PotentialFamily;
use crate::scalar::{format_rational, parse_rational, Num, Rational, Scalar, Sign};

/// Bivariate Taylor data `c[i][j]` of `u^i v^j`, truncated to `i, j <= order`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianBiJet<S> {
    coeffs: Vec<Vec<S>>,
}

impl<S: Num> HermitianBiJet<S> {
    pub fn zero(ctx: &S::Ctx, order: usize) -> Self {
        HermitianBiJet {
            coeffs: vec![vec![S::zero(ctx); order + 1]; order + 1],
        }
    }

    pub fn constant(ctx: &S::Ctx, order: usize, c: S) -> Self {
        let mut out = Self::zero(ctx, order);
        out.coeffs[0][0] = c;
        out
    }

    pub fn from_coeffs(coeffs: Vec<Vec<S>>) -> Self {
        let n = coeffs.len();
        assert!(
            coeffs.iter().all(|r| r.len() == n),
            "bijet coefficients must be square"
        );
        HermitianBiJet { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize, j: usize) -> &S {
        &self.coeffs[i][j]
    }

    pub fn coeffs(&self) -> &[Vec<S>] {
        &self.coeffs
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.zip(rhs, S::add_ref)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.zip(rhs, S::sub_ref)
    }

    fn zip(&self, rhs: &Self, op: impl Fn(&S, &S) -> S) -> Self {
        assert_eq!(self.order(), rhs.order());
        HermitianBiJet {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| op(x, y)).collect())
                .collect(),
        }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        HermitianBiJet {
            coeffs: self
                .coeffs
                .iter()
                .map(|r| r.iter().map(|c| c.scale(q)).collect())
                .collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let n = self.order();
        assert_eq!(n, rhs.order());
        let mut out = self.clone();
        for i in 0..=n {
            for j in 0..=n {
                let mut acc = self.coeffs[0][0].zero_like();
                for a in 0..=i {
                    for b in 0..=j {
                        acc.mul_add_assign(&self.coeffs[a][b], &rhs.coeffs[i - a][j - b]);
                    }
                }
                out.coeffs[i][j] = acc;
            }
        }
        out
    }

    /// `exp(self)` for a germ with zero constant term.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0][0].is_zero() {
            return Err(Error::InvalidParameter(
                "bijet exponential needs a zero constant term".into(),
            ));
        }
        let n = self.order();
        let ctx = self.coeffs[0][0].ctx();
        let mut out = Self::constant(&ctx, n, S::one(&ctx));
        let mut power = out.clone();
        // D^m vanishes in the box once m > 2n.
        for m in 1..=2 * n {
            power = power
                .mul(self)
                .scale(&Num::recip(&Rational::from(m as i64))?);
            out = out.add(&power);
        }
        Ok(out)
    }

    /// `sum_k q_k delta^k` for the univariate Taylor coefficients `q` of a
    /// jet, with `delta` of zero constant term.
    pub fn compose(jet_coeffs: &[S], delta: &Self) -> Result<Self> {
        let n = delta.order();
        if !delta.coeffs[0][0].is_zero() {
            return Err(Error::InvalidParameter(
                "inner bijet must vanish at the origin".into(),
            ));
        }
        if jet_coeffs.len() < 2 * n + 1 {
            return Err(Error::shortfall(
                "univariate jet for bijet composition",
                2 * n,
                jet_coeffs.len().saturating_sub(1),
            ));
        }
        let ctx = delta.coeffs[0][0].ctx();
        let mut out = Self::constant(&ctx, n, jet_coeffs[0].clone());
        let mut power = Self::constant(&ctx, n, S::one(&ctx));
        for q in &jet_coeffs[1..=2 * n] {
            power = power.mul(delta);
            for i in 0..=n {
                for j in 0..=n {
                    let t = power.coeffs[i][j].mul_ref(q);
                    out.coeffs[i][j].add_assign_ref(&t);
                }
            }
        }
        Ok(out)
    }
}

/// The radial point, given either by `s` or by `x = s^2`.
#[derive(Clone, Debug, PartialEq)]
pub enum AxisPoint {
    S(Rational),
    X(Rational),
}

impl AxisPoint {
    pub fn x(&self) -> Rational {
        match self {
            AxisPoint::S(s) => s.clone() * s,
            AxisPoint::X(x) => x.clone(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            AxisPoint::S(s) => format_rational(s),
            AxisPoint::X(x) => format!("sqrt({})", format_rational(x)),
        }
    }

    /// `s=p/q` or `x=p/q`; a bare rational is read as `s`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if let Some(x) = t.strip_prefix("x=") {
            Ok(AxisPoint::X(parse_rational(x)?))
        } else {
            Ok(AxisPoint::S(parse_rational(
                t.strip_prefix("s=").unwrap_or(t),
            )?))
        }
    }

    fn value<S: Scalar>(&self, ctx: &S::Ctx) -> Result<S> {
        match self {
            AxisPoint::S(s) => Ok(S::from_rational(ctx, s)),
            AxisPoint::X(x) => S::from_rational(ctx, x).sqrt(),
        }
    }

    fn radicals(&self) -> Vec<(Rational, u32)> {
        match self {
            AxisPoint::S(_) => Vec::new(),
            AxisPoint::X(x) => vec![(x.clone(), 2)],
        }
    }
}

/// The diastasis germ at an axis point.
#[derive(Clone, Debug)]
pub struct DiastasisGerm<S> {
    pub family: String,
    pub point: String,
    pub germ: HermitianBiJet<S>,
}

/// Taylor coefficients of `F(x0 + t)` in `t`, with `F(x0) = 0`, up to `t^order`.
fn potential_taylor<S: Scalar>(
    ctx: &S::Ctx,
    fam: &PotentialFamily,
    x0: &Rational,
    order: usize,
) -> Result<Vec<S>> {
    let fp = fam.fprime_jet::<S>(ctx, &Arc::new(x0.clone()), order.saturating_sub(1))?;
    Ok(fp.antiderive(S::zero(ctx)).coeffs().to_vec())
}

/// `s(u + v) + uv` as a bijet.
fn axis_offset<S: Num>(s: &S, order: usize) -> HermitianBiJet<S> {
    let ctx = s.ctx();
    let mut d = HermitianBiJet::zero(&ctx, order);
    if order >= 1 {
        d.coeffs[1][0] = s.clone();
        d.coeffs[0][1] = s.clone();
        d.coeffs[1][1] = S::one(&ctx);
    }
    d
}

pub fn diastasis_germ<S: Scalar>(
    ctx: &S::Ctx,
    fam: &PotentialFamily,
    point: &AxisPoint,
    order: usize,
) -> Result<DiastasisGerm<S>> {
    let x0 = point.x();
    fam.check_admissible(&x0)?;
    let s = point.value::<S>(ctx)?;
    let taylor = potential_taylor::<S>(ctx, fam, &x0, 2 * order)?;
    let full = HermitianBiJet::compose(&taylor, &axis_offset(&s, order))?;
    // F(s^2 + s u) has Taylor coefficients taylor[k] s^k in u alone.
    let mut germ = full;
    let mut sk = S::one(ctx);
    for k in 1..=order {
        sk = sk.mul_ref(&s);
        let t = taylor[k].mul_ref(&sk);
        germ.coeffs[k][0].sub_assign_ref(&t);
        germ.coeffs[0][k].sub_assign_ref(&t);
    }
    Ok(DiastasisGerm {
        family: fam.descriptor(),
        point: point.label(),
        germ,
    })
}

/// Determinant by cofactor expansion along rows, memoised on column sets.
/// Uses no division, so it is safe for interval entries.
pub fn determinant<S: Num>(m: &[Vec<S>]) -> S {
    fn go<S: Num>(m: &[Vec<S>], row: usize, cols: u32, memo: &mut HashMap<u32, S>) -> S {
        if row == m.len() {
            return m[0][0].one_like();
        }
        if let Some(v) = memo.get(&cols) {
            return v.clone();
        }
        let mut acc = m[0][0].zero_like();
        let mut sign_neg = false;
        for c in 0..m.len() {
            if cols & (1 << c) != 0 {
                continue;
            }
            if !m[row][c].is_zero() {
                let minor = go(m, row + 1, cols | (1 << c), memo);
                let t = m[row][c].mul_ref(&minor);
                if sign_neg {
                    acc.sub_assign_ref(&t);
                } else {
                    acc.add_assign_ref(&t);
                }
            }
            sign_neg = !sign_neg;
        }
        memo.insert(cols, acc.clone());
        acc
    }
    assert!(m.len() < 32, "determinant size");
    if m.is_empty() {
        panic!("determinant of an empty matrix");
    }
    go(m, 0, 0, &mut HashMap::new())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinorIndex {
    pub l: usize,
    pub h: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Verdict {
    /// Every minor up to the given orders is certified positive. This is a
    /// necessary-condition check only.
    AllPositive {
        label: String,
    },
    Obstructed {
        l: usize,
        h: usize,
    },
    Inconclusive {
        l: usize,
        h: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinorValue {
    pub value: String,
    pub sign: Sign,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResolvabilityCertificate {
    pub family: String,
    pub s: String,
    pub lmax: usize,
    pub hmax: usize,
    pub backend: String,
    /// `minors[l][h]`.
    pub minors: Vec<Vec<MinorValue>>,
    pub verdict: Verdict,
    pub first_negative: Option<MinorIndex>,
}

/// `minors[l][h]` in the backend `S`.
pub fn minor_values<S: Scalar>(
    ctx: &S::Ctx,
    fam: &PotentialFamily,
    point: &AxisPoint,
    lmax: usize,
    hmax: usize,
) -> Result<Vec<Vec<S>>> {
    let x0 = point.x();
    let germ = diastasis_germ::<S>(ctx, fam, point, lmax)?;
    let e = germ.germ.exp()?;
    let s = point.value::<S>(ctx)?;
    let fp = fam.fprime_jet::<S>(ctx, &Arc::new(x0), hmax + 2 * lmax)?;
    let gh = gh_jets(&fp, hmax)?;
    let delta = axis_offset(&s, lmax);
    let blocks: Vec<HermitianBiJet<S>> = gh
        .par_iter()
        .map(|g| {
            let coeffs: Vec<S> = g.truncate(2 * lmax).coeffs().to_vec();
            Ok(e.mul(&HermitianBiJet::compose(&coeffs, &delta)?))
        })
        .collect::<Result<_>>()?;
    let out = (0..=lmax)
        .into_par_iter()
        .map(|l| {
            blocks
                .iter()
                .map(|b| {
                    let m: Vec<Vec<S>> = (0..=l).map(|i| b.coeffs[i][..=l].to_vec()).collect();
                    determinant(&m)
                })
                .collect()
        })
        .collect();
    Ok(out)
}

/// Verdict over `minors[l][h]` scanned in `(l, h)` order.
pub fn verdict_of(signs: &[Vec<Sign>], lmax: usize, hmax: usize) -> (Verdict, Option<MinorIndex>) {
    let indexed = || {
        signs
            .iter()
            .enumerate()
            .flat_map(|(l, row)| row.iter().enumerate().map(move |(h, s)| (l, h, *s)))
    };
    if let Some((l, h, _)) = indexed().find(|t| t.2 == Sign::Negative) {
        return (Verdict::Obstructed { l, h }, Some(MinorIndex { l, h }));
    }
    if let Some((l, h, _)) = indexed().find(|t| t.2 != Sign::Positive) {
        return (Verdict::Inconclusive { l, h }, None);
    }
    (
        Verdict::AllPositive {
            label: format!("necessary-condition check up to order ({lmax}, {hmax})"),
        },
        None,
    )
}

struct MinorEval<'a> {
    fam: &'a PotentialFamily,
    point: &'a AxisPoint,
    lmax: usize,
    hmax: usize,
}

impl Computation for MinorEval<'_> {
    type Output = ResolvabilityCertificate;

    fn run<S: Scalar>(&self, ctx: &S::Ctx) -> Result<Self::Output> {
        let values = minor_values::<S>(ctx, self.fam, self.point, self.lmax, self.hmax)?;
        let signs: Vec<Vec<Sign>> = values
            .iter()
            .map(|r| r.iter().map(Scalar::sign).collect())
            .collect();
        let (verdict, first_negative) = verdict_of(&signs, self.lmax, self.hmax);
        Ok(ResolvabilityCertificate {
            family: self.fam.descriptor(),
            s: self.point.label(),
            lmax: self.lmax,
            hmax: self.hmax,
            backend: values[0][0].backend().to_string(),
            minors: values
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|v| MinorValue {
                            value: v.to_text(),
                            sign: v.sign(),
                        })
                        .collect()
                })
                .collect(),
            verdict,
            first_negative,
        })
    }

    fn decided(&self, out: &Self::Output) -> bool {
        // Exact zeros stay inconclusive at any precision.
        out.minors.iter().flatten().all(|m| m.sign.is_determined())
    }
}

/// Minor matrix and verdict in the best available backend.
pub fn minor_matrix(
    fam: &PotentialFamily,
    point: &AxisPoint,
    lmax: usize,
    hmax: usize,
    precision: &Precision,
) -> Result<ResolvabilityCertificate> {
    let x0 = point.x();
    fam.check_admissible(&x0)?;
    if lmax > 12 {
        return Err(Error::InvalidParameter(format!(
            "lmax {lmax} exceeds the supported 12"
        )));
    }
    let mut radicals = fam.radicals(&x0);
    radicals.extend(point.radicals());
    let ev = MinorEval {
        fam,
        point,
        lmax,
        hmax,
    };
    match evaluate(&ev, &radicals, precision) {
        Err(e) if e.is_precision_related() => {
            // Out of precision: report what the cap gives, marked inconclusive.
            let cap = Precision::fixed(precision.cap_bits.max(precision.bits));
            crate::backend::evaluate_float(&ev, &cap)
        }
        other => other,
    }
}

/// Exact check that `[a^j b^k] (a + b) e^(a + b) = (j + k) / (j! k!)` for
/// `1 <= j + k <= max_degree`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmbeddingCheck {
    pub max_degree: usize,
    pub checked: usize,
    pub mismatches: Vec<(usize, usize)>,
    pub passed: bool,
}

pub fn simanca_embedding_check(max_degree: usize) -> Result<EmbeddingCheck> {
    if max_degree == 0 {
        return Err(Error::InvalidParameter(
            "max degree must be at least 1".into(),
        ));
    }
    // Box truncation at max_degree contains every monomial of total degree
    // up to max_degree.
    let mut lin = HermitianBiJet::<Rational>::zero(&(), max_degree);
    lin.coeffs[1][0] = Rational::from(1);
    lin.coeffs[0][1] = Rational::from(1);
    let series = lin.mul(&lin.exp()?);
    let mut checked = 0;
    let mut mismatches = Vec::new();
    for j in 0..=max_degree {
        for k in 0..=(max_degree - j) {
            if j + k == 0 {
                continue;
            }
            checked += 1;
            let expected = Rational::from((j + k) as i64) / (factorial(j) * factorial(k));
            if series.coeffs[j][k] != expected {
                mismatches.push((j, k));
            }
        }
    }
    Ok(EmbeddingCheck {
        max_degree,
        checked,
        passed: mismatches.is_empty(),
        mismatches,
    })
}

/// The jet of `g_h` at `x0`, exposed for first-row checks.
pub fn gh_jet<S: Scalar>(
    ctx: &S::Ctx,
    fam: &PotentialFamily,
    x0: &Rational,
    h: usize,
    order: usize,
) -> Result<Jet<S>> {
    let fp = fam.fprime_jet::<S>(ctx, &Arc::new(x0.clone()), h + order)?;
    Ok(gh_jets(&fp, h)?.swap_remove(h).truncate(order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::obstruction::gh_sequence;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn flat_germ_is_uv() {
        let fam = PotentialFamily::flat(q(1, 1), 2).unwrap();
        let g = diastasis_germ::<Rational>(&(), &fam, &AxisPoint::S(q(1, 1)), 3).unwrap();
        for i in 0..=3 {
            for j in 0..=3 {
                let expect = i64::from(i == 1 && j == 1);
                assert_eq!(*g.germ.coeff(i, j), expect, "{i}{j}");
            }
        }
    }

    #[test]
    fn simanca_germ_matches_direct_expansion() {
        // f = x + log x at s = 1: D = uv + log(1 + u + v + uv) - log(1 + u) - log(1 + v)
        //   = uv + log((1 + u)(1 + v)) - log(1 + u) - log(1 + v) = uv.
        let g =
            diastasis_germ::<Rational>(&(), &PotentialFamily::Simanca, &AxisPoint::S(q(1, 1)), 2)
                .unwrap();
        assert_eq!(*g.germ.coeff(1, 1), 1);
        assert_eq!(*g.germ.coeff(2, 1), 0);
        assert_eq!(*g.germ.coeff(2, 2), 0);
        assert_eq!(*g.germ.coeff(0, 0), 0);
    }

    #[test]
    fn first_row_is_gh() {
        for (fam, x) in [
            (PotentialFamily::Simanca, q(2, 3)),
            (PotentialFamily::epsilon(1, q(1, 1), 2).unwrap(), q(3, 4)),
        ] {
            let s_point = AxisPoint::X(x.clone());
            let mv = minor_values::<crate::scalar::Interval>(&256, &fam, &s_point, 1, 5).unwrap();
            let gh = gh_sequence::<crate::scalar::Interval>(&fam, &256, &x, 5).unwrap();
            for h in 0..=5 {
                assert!(mv[0][h].compatible_with(&gh[h]));
            }
        }
    }

    #[test]
    fn determinant_of_known_matrix() {
        let m = vec![
            vec![q(2, 1), q(1, 1), q(0, 1)],
            vec![q(1, 1), q(3, 1), q(1, 1)],
            vec![q(0, 1), q(1, 1), q(4, 1)],
        ];
        assert_eq!(determinant(&m), 18);
    }

    #[test]
    fn flat_certificate_is_positive() {
        let fam = PotentialFamily::flat(q(1, 1), 2).unwrap();
        let c = minor_matrix(&fam, &AxisPoint::S(q(1, 1)), 3, 3, &Precision::default()).unwrap();
        assert!(matches!(c.verdict, Verdict::AllPositive { .. }));
        assert_eq!(c.minors[0][0].value, "1/1");
    }

    #[test]
    fn eps_minus_one_is_obstructed_near_one() {
        let fam = PotentialFamily::epsilon(-1, q(1, 1), 2).unwrap();
        let c = minor_matrix(
            &fam,
            &AxisPoint::X(q(101, 100)),
            0,
            3,
            &Precision::default(),
        )
        .unwrap();
        assert_eq!(c.verdict, Verdict::Obstructed { l: 0, h: 3 });
    }

    #[test]
    fn embedding_identity() {
        let r = simanca_embedding_check(10).unwrap();
        assert!(r.passed);
        assert_eq!(r.checked, 65);
    }
}
