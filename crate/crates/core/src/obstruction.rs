//! The obstruction functions `g_h = (d^h e^f / dx^h) e^(-f)`.
//!
//! A certified negative value of any `g_h` at any point shows that the radial
//! metric is not projectively induced.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::backend::{evaluate, routes_agree, Computation, Precision};
use crate::error::{Error, Result};
use crate::jet::{factorial, Jet};
use crate::potential::PotentialFamily;
use crate::scalar::{format_rational, parse_rational, Num, Rational, Scalar, Sign};

/// Bits of slack allowed between the two routes on the big-float backend.
const ROUTE_SLACK_BITS: u32 = 32;

/// `g_0, ..., g_hmax` at the base point by `g_{h+1} = g_h' + g_1 g_h`,
/// `g_1 = f'`. Needs `fprime` of order at least `hmax - 1`.
pub fn gh_recursion<S: Scalar>(fprime: &Jet<S>, hmax: usize) -> Result<Vec<S>> {
    let one = fprime.value().one_like();
    if hmax == 0 {
        return Ok(vec![one]);
    }
    if fprime.order() + 1 < hmax {
        return Err(Error::shortfall("f' jet for g_h", hmax - 1, fprime.order()));
    }
    let g1 = fprime.truncate(hmax - 1);
    let mut out = vec![one, g1.value().clone()];
    let mut g = g1.clone();
    for _ in 2..=hmax {
        // g_h has order hmax - h; the derivative costs one order.
        g = g.derive()?.add_ref(&g1.mul_ref(&g));
        out.push(g.value().clone());
    }
    Ok(out)
}

/// Jets of `g_0, ..., g_hmax` around the base point; `g_h` has order
/// `fprime.order() + 1 - h` (and `g_0` the order of `fprime`).
pub fn gh_jets<S: Scalar>(fprime: &Jet<S>, hmax: usize) -> Result<Vec<Jet<S>>> {
    if fprime.order() + 1 < hmax {
        return Err(Error::shortfall("f' jet for g_h", hmax - 1, fprime.order()));
    }
    let mut out = vec![fprime.one_like()];
    if hmax == 0 {
        return Ok(out);
    }
    out.push(fprime.clone());
    for h in 2..=hmax {
        let g = &out[h - 1];
        let next = g.derive()?.add_ref(&fprime.mul_ref(g));
        out.push(next);
    }
    Ok(out)
}

/// `g_h = h! [exp(F)]_h / [exp(F)]_0` with `F` the antiderivative of `f'`
/// taking the value `c` at the base point. The result does not depend on `c`.
pub fn gh_direct<S: Scalar>(fprime: &Jet<S>, hmax: usize, c: &S) -> Result<Vec<S>> {
    let one = fprime.value().one_like();
    if hmax == 0 {
        return Ok(vec![one]);
    }
    if fprime.order() + 1 < hmax {
        return Err(Error::shortfall("f' jet for g_h", hmax - 1, fprime.order()));
    }
    let f = fprime.truncate(hmax - 1).antiderive(c.clone());
    let e = f.exp()?;
    let inv0 = e.value().recip()?;
    (0..=hmax)
        .map(|h| Ok(e.coeffs()[h].scale(&factorial(h)).mul_ref(&inv0)))
        .collect()
}

/// `g_0, ..., g_hmax` at `x0`, computed by the recursion and by direct
/// differentiation of `e^f`; fails if the two disagree.
pub fn gh_sequence<S: Scalar>(
    fam: &PotentialFamily,
    ctx: &S::Ctx,
    x0: &Rational,
    hmax: usize,
) -> Result<Vec<S>> {
    let base = Arc::new(x0.clone());
    let fprime = fam.fprime_jet::<S>(ctx, &base, hmax.saturating_sub(1))?;
    let rec = gh_recursion(&fprime, hmax)?;
    let direct = gh_direct(&fprime, hmax, &S::zero(ctx))?;
    for (h, (a, b)) in rec.iter().zip(&direct).enumerate() {
        if !routes_agree(a, b, ROUTE_SLACK_BITS) {
            return Err(Error::RouteMismatch {
                what: format!("g_{h} at x = {}", format_rational(x0)),
            });
        }
    }
    Ok(rec)
}

/// Radicals needed by [`g3_closed_eps_minus1`].
pub fn g3_radicals(n: u32, x: &Rational) -> Vec<(Rational, u32)> {
    let y = x.powi(n) - 1u32;
    vec![(y, n)]
}

/// Closed form of `g_3` for `eps = -1`:
/// `lambda y^((1-2n)/n) x^-3 (lambda^2 y^((2+2n)/n) + 3 lambda y^((1+n)/n) - (x^n (n+1) - 2))`
/// with `y = x^n - 1`.
pub fn g3_closed_eps_minus1<S: Scalar>(
    ctx: &S::Ctx,
    lambda: &Rational,
    n: u32,
    x: &Rational,
) -> Result<S> {
    if *x <= 1 {
        return Err(Error::Inadmissible {
            family: format!("epsilon:-1:{}:{n}", format_rational(lambda)),
            point: format_rational(x),
            reason: "requires x > 1".into(),
        });
    }
    let ni = i64::from(n);
    let xn = x.powi(n);
    let y = S::from_rational(ctx, &Rational::from(&xn - 1u32));
    let l = S::from_rational(ctx, lambda);
    let yp = |num: i64| y.pow_rational(&Rational::from((num, ni)));
    let inner = l
        .square()
        .mul_ref(&yp(2 + 2 * ni)?)
        .add_ref(&l.scale_i64(3).mul_ref(&yp(1 + ni)?))
        .sub_ref(&S::from_rational(ctx, &(xn * (n + 1) - 2u32)));
    let xm3 = S::from_rational(ctx, &x.powi(3)).recip()?;
    Ok(l.mul_ref(&yp(1 - 2 * ni)?).mul_ref(&xm3).mul_ref(&inner))
}

/// Radicals needed by [`g4_at_1_closed`].
pub fn g4_radicals(n: u32) -> Vec<(Rational, u32)> {
    vec![(Rational::from(2), n)]
}

/// Closed form of `g_4(1)` for `eps = 1`, `lambda = 1`:
/// `2^((1-3n)/n) (8 2^(3/n) - 24 2^(2/n) + 30 2^(1/n) - 15 + 8n 2^(1/n) - 9n)`.
pub fn g4_at_1_closed<S: Scalar>(ctx: &S::Ctx, n: u32) -> Result<S> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let ni = i64::from(n);
    let two = S::from_i64(ctx, 2);
    let t = two.pow_rational(&Rational::from((1, ni)))?;
    let inner = t
        .powi(3)
        .scale_i64(8)
        .sub_ref(&t.square().scale_i64(24))
        .add_ref(&t.scale_i64(30 + 8 * ni))
        .sub_ref(&S::from_i64(ctx, 15 + 9 * ni));
    Ok(two
        .pow_rational(&Rational::from((1 - 3 * ni, ni)))?
        .mul_ref(&inner))
}

/// One evaluated `g_h(x)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObstructionReport {
    pub family: String,
    pub x: String,
    pub h: usize,
    pub value: String,
    pub sign: Sign,
    pub backend: String,
    pub precision_bits: Option<u32>,
}

impl ObstructionReport {
    pub fn from_value<S: Scalar>(fam: &PotentialFamily, x: &Rational, h: usize, v: &S) -> Self {
        let backend = v.backend();
        ObstructionReport {
            family: fam.descriptor(),
            x: format_rational(x),
            h,
            value: v.to_text(),
            sign: v.sign(),
            backend: backend.to_string(),
            precision_bits: backend.precision_bits(),
        }
    }

    /// A certified negative value, which obstructs projective inducedness.
    pub fn is_obstruction(&self) -> bool {
        self.sign == Sign::Negative
    }
}

struct GhEval<'a> {
    fam: &'a PotentialFamily,
    x0: &'a Rational,
    hmax: usize,
}

impl Computation for GhEval<'_> {
    type Output = Vec<ObstructionReport>;

    fn run<S: Scalar>(&self, ctx: &S::Ctx) -> Result<Self::Output> {
        let values = gh_sequence::<S>(self.fam, ctx, self.x0, self.hmax)?;
        Ok(values
            .iter()
            .enumerate()
            .map(|(h, v)| ObstructionReport::from_value(self.fam, self.x0, h, v))
            .collect())
    }

    fn decided(&self, out: &Self::Output) -> bool {
        out.iter().all(|r| r.sign.is_determined())
    }
}

/// Reports for `g_0, ..., g_hmax` at `x0`, in the best available backend.
pub fn gh_eval(
    fam: &PotentialFamily,
    x0: &Rational,
    hmax: usize,
    precision: &Precision,
) -> Result<Vec<ObstructionReport>> {
    fam.check_admissible(x0)?;
    evaluate(&GhEval { fam, x0, hmax }, &fam.radicals(x0), precision)
}

/// Smallest obstructing `h` at one grid point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FirstHit {
    pub x: String,
    pub h: usize,
}

/// Outcome of scanning a grid of points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanReport {
    pub family: String,
    pub hmax: usize,
    pub points: usize,
    /// Certified negative values, ordered by `x` then `h`.
    pub hits: Vec<ObstructionReport>,
    pub first_hits: Vec<FirstHit>,
    /// Values whose sign stayed undetermined at the precision cap.
    pub undetermined: Vec<ObstructionReport>,
}

/// Evaluates `g_0..g_hmax` on every grid point, in parallel, and collects the
/// certified negative values in ascending `(x, h)` order.
pub fn obstruction_scan(
    fam: &PotentialFamily,
    grid: &[Rational],
    hmax: usize,
    precision: &Precision,
) -> Result<ScanReport> {
    for x in grid {
        fam.check_admissible(x)?;
    }
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&a, &b| grid[a].cmp(&grid[b]));
    let rows: Vec<Vec<ObstructionReport>> = order
        .par_iter()
        .map(|&i| gh_eval(fam, &grid[i], hmax, precision))
        .collect::<Result<_>>()?;
    let mut hits = Vec::new();
    let mut first_hits = Vec::new();
    let mut undetermined = Vec::new();
    for row in rows {
        if let Some(first) = row.iter().find(|r| r.is_obstruction()) {
            first_hits.push(FirstHit {
                x: first.x.clone(),
                h: first.h,
            });
        }
        for r in row {
            match r.sign {
                Sign::Negative => hits.push(r),
                Sign::Undetermined => undetermined.push(r),
                _ => {}
            }
        }
    }
    Ok(ScanReport {
        family: fam.descriptor(),
        hmax,
        points: grid.len(),
        hits,
        first_hits,
        undetermined,
    })
}

/// Parses `a:b:steps` into the `steps + 1` equally spaced rationals from `a` to
/// `b`. A single rational is a one-point grid.
pub fn parse_grid(text: &str) -> Result<Vec<Rational>> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [single] => Ok(vec![parse_rational(single)?]),
        [a, b, steps] => {
            let a = parse_rational(a)?;
            let b = parse_rational(b)?;
            let steps: u32 = steps
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("grid steps `{steps}` is not an integer")))?;
            if steps == 0 {
                return Err(Error::Parse("grid needs at least one step".into()));
            }
            let h = Rational::from(&b - &a) / steps;
            Ok((0..=steps).map(|i| Rational::from(&h * i) + &a).collect())
        }
        _ => Err(Error::Parse(format!(
            "grid `{text}` is not of the form a:b:steps"
        ))),
    }
}

/// `v_{k+1} <= factor * v_k` for consecutive negative values, certified.
pub fn certified_growth<S: Scalar>(values: &[S], factor: i64) -> bool {
    values.windows(2).all(|w| {
        matches!(
            w[1].sub_ref(&w[0].scale_i64(factor)).sign(),
            Sign::Negative | Sign::Zero
        )
    })
}

/// One sample of a small-`x` divergence check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivergencePoint {
    pub k: u32,
    pub x: String,
    pub value: String,
    pub sign: Sign,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivergenceReport {
    pub lambda: String,
    pub n: u32,
    pub h: usize,
    pub points: Vec<DivergencePoint>,
    pub all_negative: bool,
    /// Each value at least ten times more negative than the previous one.
    pub growth_certified: bool,
    pub backend: String,
}

impl DivergenceReport {
    pub fn passed(&self) -> bool {
        self.all_negative && self.growth_certified
    }
}

struct SmallX<'a> {
    fam: PotentialFamily,
    lambda: &'a Rational,
    n: u32,
    h: usize,
    ks: &'a [u32],
}

fn ten_to_minus(k: u32) -> Rational {
    Rational::from((1, 1)) / Rational::from(rug::ops::Pow::pow(rug::Integer::from(10u32), k))
}

impl Computation for SmallX<'_> {
    type Output = DivergenceReport;

    fn run<S: Scalar>(&self, ctx: &S::Ctx) -> Result<DivergenceReport> {
        let mut values = Vec::with_capacity(self.ks.len());
        let mut points = Vec::with_capacity(self.ks.len());
        for &k in self.ks {
            let x = ten_to_minus(k);
            let g = gh_sequence::<S>(&self.fam, ctx, &x, self.h)?.swap_remove(self.h);
            points.push(DivergencePoint {
                k,
                x: format_rational(&x),
                value: g.to_text(),
                sign: g.sign(),
            });
            values.push(g);
        }
        let backend = values
            .first()
            .map(|v| v.backend().to_string())
            .unwrap_or_default();
        Ok(DivergenceReport {
            lambda: format_rational(self.lambda),
            n: self.n,
            h: self.h,
            all_negative: points.iter().all(|p| p.sign == Sign::Negative),
            growth_certified: certified_growth(&values, 10),
            points,
            backend,
        })
    }

    fn decided(&self, out: &DivergenceReport) -> bool {
        out.passed()
    }
}

/// For non-integer `lambda`, evaluates `g_{floor(lambda)+2}` of the `eps = 1`
/// family at `x = 10^-k` and checks that the values are negative and blow up
/// at least tenfold per step.
pub fn small_x_divergence_check(
    lambda: &Rational,
    n: u32,
    ks: &[u32],
    precision: &Precision,
) -> Result<DivergenceReport> {
    if *lambda.denom() == 1 {
        return Err(Error::InvalidParameter(format!(
            "lambda = {} is an integer; the blow-up statement covers non-integer lambda only",
            format_rational(lambda)
        )));
    }
    let fam = PotentialFamily::epsilon(1, lambda.clone(), n)?;
    let h = lambda
        .clone()
        .floor()
        .numer()
        .to_usize()
        .ok_or_else(|| Error::InvalidParameter("lambda too large".into()))?
        + 2;
    let radicals: Vec<_> = ks
        .iter()
        .flat_map(|&k| fam.radicals(&ten_to_minus(k)))
        .collect();
    evaluate(
        &SmallX {
            fam: fam.clone(),
            lambda,
            n,
            h,
            ks,
        },
        &radicals,
        precision,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Interval, RootExt, RootField};

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn eps(e: i32, n: u32) -> PotentialFamily {
        PotentialFamily::epsilon(e, q(1, 1), n).unwrap()
    }

    #[test]
    fn exact_table_entry() {
        let g = gh_sequence::<Rational>(&eps(1, 2), &(), &q(3, 4), 7).unwrap();
        assert_eq!(g[7], q(-12294367331, 2373046875));
        assert_eq!(g[0], 1);
        assert_eq!(g[1], q(5, 3));
        assert_eq!(g[2], q(61, 45));
    }

    #[test]
    fn flat_values_are_powers_of_lambda() {
        let fam = PotentialFamily::flat(q(3, 2), 4).unwrap();
        let g = gh_sequence::<Rational>(&fam, &(), &q(7, 5), 6).unwrap();
        for (h, v) in g.iter().enumerate() {
            assert_eq!(*v, q(3, 2).powi(h as u32));
        }
    }

    #[test]
    fn additive_constant_does_not_matter() {
        let fam = PotentialFamily::Simanca;
        let base = Arc::new(q(2, 1));
        let fp = fam.fprime_jet::<Interval>(&256, &base, 7).unwrap();
        let a = gh_direct(&fp, 8, &Interval::zero(&256)).unwrap();
        let b = gh_direct(&fp, 8, &Interval::from_rational_prec(256, &q(-17, 3))).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!(routes_agree(x, y, 32), "{x:?} vs {y:?}");
        }
    }

    #[test]
    fn g3_closed_form_matches_exactly() {
        for (n, x) in [(2u32, q(2, 1)), (3, q(3, 2)), (2, q(11, 10))] {
            let radicals = g3_radicals(n, &x);
            let field = RootField::new(&radicals[0].0, n).unwrap();
            let closed = g3_closed_eps_minus1::<RootExt>(&field, &q(1, 1), n, &x).unwrap();
            let g = gh_sequence::<RootExt>(&eps(-1, n), &field, &x, 3).unwrap();
            assert_eq!(closed, g[3], "n = {n}, x = {x}");
        }
        assert!(g3_closed_eps_minus1::<Rational>(&(), &q(1, 1), 2, &q(1, 1)).is_err());
    }

    #[test]
    fn g4_closed_form_matches_exactly() {
        for n in 1..=8u32 {
            let field = RootField::new(&q(2, 1), n).unwrap();
            let closed = g4_at_1_closed::<RootExt>(&field, n).unwrap();
            let g = gh_sequence::<RootExt>(&eps(1, n), &field, &q(1, 1), 4).unwrap();
            assert_eq!(closed, g[4], "n = {n}");
        }
    }

    #[test]
    fn scan_finds_the_table_hits() {
        let p = Precision::default();
        let r = obstruction_scan(&eps(1, 5), &[q(6, 5)], 4, &p).unwrap();
        assert_eq!(
            r.first_hits,
            vec![FirstHit {
                x: "6/5".into(),
                h: 4
            }]
        );
        let r = obstruction_scan(
            &PotentialFamily::flat(q(1, 1), 3).unwrap(),
            &parse_grid("1/2:3:5").unwrap(),
            6,
            &p,
        )
        .unwrap();
        assert!(r.hits.is_empty() && r.undetermined.is_empty());
        assert_eq!(r.points, 6);
    }

    #[test]
    fn grid_syntax() {
        assert_eq!(
            parse_grid("0:1:4").unwrap(),
            vec![q(0, 1), q(1, 4), q(1, 2), q(3, 4), q(1, 1)]
        );
        assert_eq!(parse_grid("3/4").unwrap(), vec![q(3, 4)]);
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("0:1").is_err());
    }

    #[test]
    fn small_x_rejects_integer_lambda() {
        assert!(small_x_divergence_check(&q(2, 1), 2, &[2, 3], &Precision::default()).is_err());
        let r = small_x_divergence_check(&q(1, 2), 2, &[2, 3, 4], &Precision::default()).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.h, 2);
    }
}
