//! Metric, curvature and covariant derivatives at a radial point
//! `(s, 0, ..., 0)`.
//!
//! Every tensor is read off local Taylor series of the potential in the
//! offsets `u = z - p`, `v = zbar - pbar`. Index conventions:
//!
//! * `g[i][j] = g_{i jbar}`; `ginv` is the matrix inverse of `g`, so the
//!   inverse-metric entry `g^{a bbar}` is `ginv[b][a]`;
//! * `gamma[p][k][i] = Gamma^p_{ki} = g^{p qbar} d_k g_{i qbar}`;
//! * `r[i][j][k][l] = R_{i jbar k lbar} = d_k dbar_j g_{i lbar}
//!   - g^{p qbar} d_k g_{i pbar} dbar_j g_{q lbar}`;
//! * `ric[i][j] = Ric_{i jbar} = -d_i dbar_j log det g`;
//! * `rho = 2 tr(g^-1 Ric)`. Away from the base point the series matrices
//!   are Hermitian rather than symmetric, so the trace pairs `ginv[j][i]`
//!   with `ric[i][j]`.

use std::sync::Arc;

use super::series::{invert_series, LocalSeries, SeriesMatrix};
use super::terms::potential_mixed_partials;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::potential::PotentialFamily;
use crate::scalar::{Num, Rational, Scalar, Sign};

/// How much of the frame to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Depth {
    /// Metric, Christoffels, curvature, Ricci and scalar curvature.
    Curvature,
    /// Additionally first and second covariant derivatives.
    Full,
}

impl Depth {
    /// Highest mixed partial of the potential that the depth consumes.
    pub fn potential_order(self) -> usize {
        match self {
            Depth::Curvature => 4,
            Depth::Full => 6,
        }
    }
}

pub type Tensor2<S> = Vec<Vec<S>>;
pub type Tensor3<S> = Vec<Vec<Vec<S>>>;
pub type Tensor4<S> = Vec<Vec<Vec<Vec<S>>>>;
pub type Tensor5<S> = Vec<Vec<Vec<Vec<Vec<S>>>>>;

/// Derivative data of a [`Depth::Full`] frame.
#[derive(Clone, Debug)]
pub struct FrameDerivatives<S> {
    /// `gamma_bar[p][l][j] = Gamma^pbar_{lbar jbar}`.
    pub gamma_bar: Tensor3<S>,
    /// `dbar_gamma[l][p][k][i] = dbar_l Gamma^p_{ki}`.
    pub dbar_gamma: Tensor4<S>,
    /// `d_ric[k][i][j] = d_k Ric_{i jbar}`.
    pub d_ric: Tensor3<S>,
    /// `dbar_ric[l][i][j] = dbar_l Ric_{i jbar}`.
    pub dbar_ric: Tensor3<S>,
    /// `ric_k[i][j][k] = Ric_{i jbar, k}`.
    pub ric_k: Tensor3<S>,
    /// `ric_kl[i][j][k][l] = Ric_{i jbar, k lbar}`.
    pub ric_kl: Tensor4<S>,
    /// `r_p[i][j][k][l][p] = R_{i jbar k lbar, p}`.
    pub r_p: Tensor5<S>,
    pub d_rho: Vec<S>,
    pub dbar_rho: Vec<S>,
    /// `ddbar_rho[a][b] = d_a dbar_b rho`.
    pub ddbar_rho: Tensor2<S>,
}

#[derive(Clone, Debug)]
pub struct RadialTensorFrame<S> {
    pub n: usize,
    pub depth: Depth,
    pub s: S,
    pub g: Tensor2<S>,
    pub ginv: Tensor2<S>,
    pub gamma: Tensor3<S>,
    pub r: Tensor4<S>,
    pub ric: Tensor2<S>,
    pub rho: S,
    pub derivatives: Option<FrameDerivatives<S>>,
}

impl<S> RadialTensorFrame<S> {
    /// `g^{a bbar}`.
    pub fn gu(&self, a: usize, b: usize) -> &S {
        &self.ginv[b][a]
    }

    pub fn full(&self) -> Result<&FrameDerivatives<S>> {
        self.derivatives.as_ref().ok_or_else(|| {
            Error::InvalidParameter("covariant derivatives need a full-depth frame".into())
        })
    }
}

fn sum<S: Num>(zero: &S, items: impl Iterator<Item = S>) -> S {
    items.fold(zero.clone(), |acc, v| acc.add_ref(&v))
}

fn series_sum<S: Num>(
    first: LocalSeries<S>,
    rest: impl Iterator<Item = LocalSeries<S>>,
) -> LocalSeries<S> {
    rest.fold(first, |acc, v| acc.add(&v))
}

fn grid2<T>(n: usize, mut f: impl FnMut(usize, usize) -> Result<T>) -> Result<Vec<Vec<T>>> {
    (0..n).map(|a| (0..n).map(|b| f(a, b)).collect()).collect()
}

fn grid3<T>(
    n: usize,
    mut f: impl FnMut(usize, usize, usize) -> Result<T>,
) -> Result<Vec<Vec<Vec<T>>>> {
    (0..n)
        .map(|a| {
            (0..n)
                .map(|b| (0..n).map(|c| f(a, b, c)).collect())
                .collect()
        })
        .collect()
}

fn grid4<T>(
    n: usize,
    mut f: impl FnMut(usize, usize, usize, usize) -> Result<T>,
) -> Result<Tensor4<T>> {
    (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    (0..n)
                        .map(|c| (0..n).map(|d| f(a, b, c, d)).collect())
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Builds a frame from the point parameter `s` and `fderiv[k] = f^(k)(s^2)`
/// for `k <= depth.potential_order()`. Works over any [`Num`], in particular
/// over jets in `x`.
pub fn frame_from_derivatives<S: Num>(
    n: usize,
    s: &S,
    fderiv: &[S],
    depth: Depth,
) -> Result<RadialTensorFrame<S>> {
    let order = depth.potential_order();
    if fderiv.len() <= order {
        return Err(Error::shortfall(
            "derivatives of f",
            order,
            fderiv.len().saturating_sub(1),
        ));
    }
    let full = depth == Depth::Full;
    let ctx = s.ctx();
    let nv = 2 * n;
    let zero = s.zero_like();
    let partials = potential_mixed_partials(n, order, fderiv, s)?;
    let phi = LocalSeries::from_partials(&ctx, nv, order, &partials);

    // Series orders: g to order-2, its inverse and first derivatives to
    // order-3, curvature to order-4 (truncated further where unused).
    let g_s: SeriesMatrix<S> = grid2(n, |i, j| phi.derive(i)?.derive(n + j))?;
    let inv = invert_series(&g_s, order - 3)?;
    let dgu: Tensor3<LocalSeries<S>> = grid3(n, |k, i, q| g_s[i][q].derive(k))?;
    let dgv: Tensor3<LocalSeries<S>> = grid3(n, |j, q, l| g_s[q][l].derive(n + j))?;

    // dbar_j log det g, then Ricci.
    let trace: Vec<LocalSeries<S>> = (0..n)
        .map(|j| {
            series_sum(
                LocalSeries::zero(&ctx, nv, order - 3),
                (0..n)
                    .flat_map(|a| (0..n).map(move |b| (a, b)))
                    .map(|(a, b)| inv[b][a].mul(&dgv[j][a][b])),
            )
        })
        .collect();
    let ric_s: SeriesMatrix<S> = grid2(n, |i, j| Ok(trace[j].derive(i)?.neg()))?;
    let rho_s = series_sum(
        LocalSeries::zero(&ctx, nv, order - 4),
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| inv[j][i].mul(&ric_s[i][j])),
    )
    .scale_i64(2);

    let low = usize::from(full);
    let gamma_s: Tensor3<LocalSeries<S>> = grid3(n, |p, k, i| {
        Ok(series_sum(
            LocalSeries::zero(&ctx, nv, low),
            (0..n).map(|q| inv[q][p].truncate(low).mul(&dgu[k][i][q])),
        ))
    })?;
    let h: Tensor3<LocalSeries<S>> = grid3(n, |p, j, l| {
        Ok(series_sum(
            LocalSeries::zero(&ctx, nv, low),
            (0..n).map(|q| inv[q][p].truncate(low).mul(&dgv[j][q][l])),
        ))
    })?;
    let r_s: Tensor4<LocalSeries<S>> = grid4(n, |i, j, k, l| {
        let mut acc = dgu[k][i][l].derive(n + j)?.truncate(low);
        for p in 0..n {
            acc = acc.sub(&dgu[k][i][p].truncate(low).mul(&h[p][j][l]));
        }
        Ok(acc)
    })?;

    let c = |x: &LocalSeries<S>| x.constant_term();
    let g: Tensor2<S> = grid2(n, |i, j| Ok(c(&g_s[i][j])))?;
    let ginv: Tensor2<S> = grid2(n, |i, j| Ok(c(&inv[i][j])))?;
    let gamma: Tensor3<S> = grid3(n, |p, k, i| Ok(c(&gamma_s[p][k][i])))?;
    let r: Tensor4<S> = grid4(n, |i, j, k, l| Ok(c(&r_s[i][j][k][l])))?;
    let ric: Tensor2<S> = grid2(n, |i, j| Ok(c(&ric_s[i][j])))?;
    let rho = c(&rho_s);

    let derivatives = if full {
        let gamma_bar: Tensor3<S> = grid3(n, |p, l, j| {
            Ok(sum(
                &zero,
                (0..n).map(|q| ginv[p][q].mul_ref(&c(&dgv[l][q][j]))),
            ))
        })?;
        let dbar_gamma: Tensor4<S> =
            grid4(n, |l, p, k, i| Ok(c(&gamma_s[p][k][i].derive(n + l)?)))?;
        let d_ric: Tensor3<S> = grid3(n, |k, i, j| Ok(c(&ric_s[i][j].derive(k)?)))?;
        let dbar_ric: Tensor3<S> = grid3(n, |l, i, j| Ok(c(&ric_s[i][j].derive(n + l)?)))?;
        let ric_k: Tensor3<S> = grid3(n, |i, j, k| {
            let corr = sum(&zero, (0..n).map(|p| ric[p][j].mul_ref(&gamma[p][k][i])));
            Ok(d_ric[k][i][j].sub_ref(&corr))
        })?;
        let ric_kl: Tensor4<S> = grid4(n, |i, j, k, l| {
            let mut acc = c(&ric_s[i][j].derive(k)?.derive(n + l)?);
            for p in 0..n {
                for q in 0..n {
                    acc.add_assign_ref(
                        &gamma[q][k][i]
                            .mul_ref(&gamma_bar[p][l][j])
                            .mul_ref(&ric[q][p]),
                    );
                }
                acc.sub_assign_ref(&gamma[p][k][i].mul_ref(&dbar_ric[l][p][j]));
                acc.sub_assign_ref(&dbar_gamma[l][p][k][i].mul_ref(&ric[p][j]));
                acc.sub_assign_ref(&gamma_bar[p][l][j].mul_ref(&d_ric[k][i][p]));
            }
            Ok(acc)
        })?;
        let r_p: Tensor5<S> = grid4(n, |i, j, k, l| {
            (0..n)
                .map(|p| {
                    let mut acc = c(&r_s[i][j][k][l].derive(p)?);
                    for q in 0..n {
                        acc.sub_assign_ref(&gamma[q][p][i].mul_ref(&r[q][j][k][l]));
                        acc.sub_assign_ref(&gamma[q][p][k].mul_ref(&r[i][j][q][l]));
                    }
                    Ok(acc)
                })
                .collect()
        })?;
        let d_rho = (0..n)
            .map(|i| Ok(c(&rho_s.derive(i)?)))
            .collect::<Result<Vec<S>>>()?;
        let dbar_rho = (0..n)
            .map(|j| Ok(c(&rho_s.derive(n + j)?)))
            .collect::<Result<Vec<S>>>()?;
        let ddbar_rho = grid2(n, |a, b| Ok(c(&rho_s.derive(a)?.derive(n + b)?)))?;
        Some(FrameDerivatives {
            gamma_bar,
            dbar_gamma,
            d_ric,
            dbar_ric,
            ric_k,
            ric_kl,
            r_p,
            d_rho,
            dbar_rho,
            ddbar_rho,
        })
    } else {
        None
    };

    Ok(RadialTensorFrame {
        n,
        depth,
        s: s.clone(),
        g,
        ginv,
        gamma,
        r,
        ric,
        rho,
        derivatives,
    })
}

fn require_positive<S: Scalar>(v: &S, what: &str) -> Result<()> {
    match v.sign() {
        Sign::Positive => Ok(()),
        Sign::Undetermined => Err(Error::undetermined(what)),
        Sign::Zero => Err(Error::NotPositive {
            what: what.into(),
            found: "zero",
        }),
        Sign::Negative => Err(Error::NotPositive {
            what: what.into(),
            found: "negative",
        }),
    }
}

/// Certifies that the metric at `x0` is positive definite: `f' > 0` and
/// `f' + x f'' > 0`.
pub fn check_metric<S: Scalar>(ctx: &S::Ctx, fam: &PotentialFamily, x0: &Rational) -> Result<()> {
    let base = Arc::new(x0.clone());
    let fp = fam.fprime_jet::<S>(ctx, &base, 1)?;
    let a = fp.derivative_at(0)?;
    let b = fp.derivative_at(1)?.scale(x0).add_ref(&a);
    require_positive(&a, "f' at the radial point")?;
    require_positive(&b, "f' + x f'' at the radial point")
}

/// `[0, f'(x0), f''(x0), ...]` up to `f^(order)`.
fn fderivs_at<S: Scalar>(
    ctx: &S::Ctx,
    fam: &PotentialFamily,
    x0: &Rational,
    order: usize,
) -> Result<Vec<S>> {
    let fp = fam.fprime_jet::<S>(ctx, &Arc::new(x0.clone()), order - 1)?;
    let mut out = vec![S::zero(ctx)];
    for k in 0..order {
        out.push(fp.derivative_at(k)?);
    }
    Ok(out)
}

/// Frame of `fam` in dimension `n` at `(s, 0, ..., 0)` with `s = sqrt(x0)`.
pub fn build_frame<S: Scalar>(
    ctx: &S::Ctx,
    fam: &PotentialFamily,
    n: usize,
    x0: &Rational,
    depth: Depth,
) -> Result<RadialTensorFrame<S>> {
    let s = S::from_rational(ctx, x0).sqrt()?;
    build_frame_with_s(ctx, fam, n, x0, &s, depth)
}

/// As [`build_frame`] with a caller-chosen square root `s` of `x0`.
pub fn build_frame_with_s<S: Scalar>(
    ctx: &S::Ctx,
    fam: &PotentialFamily,
    n: usize,
    x0: &Rational,
    s: &S,
    depth: Depth,
) -> Result<RadialTensorFrame<S>> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "dimension must be at least 1".into(),
        ));
    }
    let residual = s.square().sub_ref(&S::from_rational(ctx, x0));
    if !(residual.is_zero() || residual.sign() == Sign::Undetermined) {
        return Err(Error::InvalidParameter("s^2 differs from x".into()));
    }
    check_metric::<S>(ctx, fam, x0)?;
    let fderiv = fderivs_at::<S>(ctx, fam, x0, depth.potential_order())?;
    frame_from_derivatives(n, s, &fderiv, depth)
}

/// Frame over jets in `x` of order `jet_order` around `x0`: every entry is
/// the Taylor expansion of the corresponding radial function of `x = s^2`.
pub fn build_frame_jet<S: Scalar>(
    ctx: &S::Ctx,
    fam: &PotentialFamily,
    n: usize,
    x0: &Rational,
    jet_order: usize,
    depth: Depth,
) -> Result<RadialTensorFrame<Jet<S>>> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "dimension must be at least 1".into(),
        ));
    }
    check_metric::<S>(ctx, fam, x0)?;
    let base = Arc::new(x0.clone());
    let k = depth.potential_order();
    let fp = fam.fprime_jet::<S>(ctx, &base, jet_order + k - 1)?;
    let mut fderiv = vec![Jet::constant(ctx, &base, jet_order, S::zero(ctx))];
    let mut d = fp;
    for _ in 0..k {
        fderiv.push(d.truncate(jet_order));
        if d.order() > 0 {
            d = d.derive()?;
        }
    }
    let s = Jet::<S>::variable(ctx, &base, jet_order).pow(&Rational::from((1, 2)))?;
    frame_from_derivatives(n, &s, &fderiv, depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Interval;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    /// Frame from exact derivatives with a rational `s`.
    fn exact_frame(
        fam: &PotentialFamily,
        n: usize,
        s: Rational,
        depth: Depth,
    ) -> RadialTensorFrame<Rational> {
        let x0 = s.clone() * &s;
        build_frame_with_s::<Rational>(&(), fam, n, &x0, &s, depth).unwrap()
    }

    #[test]
    fn metric_is_diagonal_at_radial_points() {
        let s = q(3, 2);
        let fr = exact_frame(&PotentialFamily::Simanca, 3, s, Depth::Curvature);
        let x = q(9, 4);
        // f' = 1 + 1/x, f' + x f'' = 1
        assert_eq!(fr.g[0][0], 1);
        assert_eq!(fr.g[1][1], q(1, 1) + Num::recip(&x).unwrap());
        assert_eq!(fr.g[2][2], fr.g[1][1]);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(fr.g[i][j], 0);
                }
            }
        }
    }

    #[test]
    fn simanca_components() {
        let s = q(3, 2);
        let x = q(9, 4);
        let fr = exact_frame(&PotentialFamily::Simanca, 2, s.clone(), Depth::Full);
        let xp1: Rational = x.clone() + 1;
        assert_eq!(fr.r[0][0][0][0], 0);
        assert_eq!(fr.r[0][0][1][1], Num::recip(&(x.clone() * &xp1)).unwrap());
        assert_eq!(fr.r[1][1][1][1], -Rational::from(2) / (x.clone() * &x));
        assert_eq!(fr.ric[0][0], -Num::recip(&xp1.clone().square()).unwrap());
        assert_eq!(fr.ric[1][1], Num::recip(&(x.clone() * &xp1)).unwrap());
        assert_eq!(fr.rho, 0);
        let d = fr.full().unwrap();
        assert_eq!(
            d.ric_k[0][0][0],
            Rational::from(2) * &s / xp1.clone().powi(3)
        );
    }

    #[test]
    fn curvature_symmetries_and_ricci_trace() {
        let fam = PotentialFamily::epsilon(1, q(3, 2), 3).unwrap();
        let fr = build_frame::<Interval>(&256, &fam, 3, &q(5, 7), Depth::Curvature).unwrap();
        let n = 3;
        for i in 0..n {
            for j in 0..n {
                let mut trace = fr.ric[i][j].zero_like();
                for k in 0..n {
                    for l in 0..n {
                        let v = &fr.r[i][j][k][l];
                        assert!(v.compatible_with(&fr.r[k][j][i][l]));
                        assert!(v.compatible_with(&fr.r[i][l][k][j]));
                        trace.add_assign_ref(&fr.ginv[l][k].mul_ref(v));
                    }
                }
                assert!(fr.ric[i][j].compatible_with(&trace.neg_ref()), "{i}{j}");
            }
        }
    }

    #[test]
    fn jet_frame_matches_pointwise_frame() {
        let fam = PotentialFamily::Simanca;
        let x0 = q(1, 1);
        let jf = build_frame_jet::<Interval>(&256, &fam, 2, &x0, 3, Depth::Curvature).unwrap();
        let pf = build_frame::<Interval>(&256, &fam, 2, &x0, Depth::Curvature).unwrap();
        for i in 0..2 {
            assert!(jf.ric[i][i].value().compatible_with(&pf.ric[i][i]));
        }
        // Ric_11(x) = -1/(x+1)^2 has x-derivative 2/(x+1)^3 = 1/4 at x = 1.
        let d1 = jf.ric[0][0].derivative_at(1).unwrap();
        assert!(d1.compatible_with(&Interval::from_rational_prec(256, &q(1, 4))));
    }
}
