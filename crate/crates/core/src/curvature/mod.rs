//! Curvature of radial Kahler metrics and the TYZ coefficients `a_1, a_2, a_3`.
//!
//! The engine expands the potential `Phi(z) = f(|z|^2)` around a radial point
//! `(s, 0, ..., 0)`, reads off the metric and its derivatives, and contracts.
//! Running the same engine over [`Jet`] scalars yields every invariant as a
//! function of `x = s^2`, from which radial Laplacians follow.

pub mod closed;
pub mod frame;
pub mod invariants;
pub mod laplacian;
pub mod series;
pub mod terms;

use serde::Serialize;

pub use closed::{closed_forms_eps, closed_forms_radicals, ClosedForms};
pub use frame::{build_frame, build_frame_jet, build_frame_with_s, Depth, RadialTensorFrame};
pub use invariants::{
    derivative_invariants, point_invariants, DerivativeInvariants, PointInvariants,
};
pub use laplacian::{radial_laplacian, radial_laplacian_jet};
pub use terms::{potential_mixed_partials, RadialDerivativeTerm};

use std::sync::Arc;

use crate::backend::{evaluate, routes_agree, Computation, Precision};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::potential::PotentialFamily;
use crate::scalar::{format_rational, Num, Rational, Scalar, Sign};

/// Jet order in `x` used for the Laplacian terms: `Delta Delta rho` needs
/// four `x`-derivatives of `rho`.
pub const LAPLACIAN_JET_ORDER: usize = 4;
const ROUTE_SLACK_BITS: u32 = 32;

/// Every quantity entering `a_1, a_2, a_3`.
#[derive(Clone, Debug)]
pub struct LuValues<S> {
    pub a1: S,
    pub a2: S,
    pub a3: S,
    pub rho: S,
    pub r2: S,
    pub ric2: S,
    pub drho2: S,
    pub dric2: S,
    pub dr2: S,
    pub sigma3: S,
    pub r_ric_ric: S,
    pub ric_r_r: S,
    pub divdiv_r_ric: S,
    pub divdiv_rho_ric: S,
    pub lap_rho: S,
    pub laplap_rho: S,
    /// `Delta (|R|^2 - 4 |Ric|^2 + 8 rho^2)`.
    pub lap_combination: S,
    /// `Delta |R|^2`.
    pub lap_r2: S,
}

fn agree<S: Scalar>(a: &S, b: &S, what: &str) -> Result<()> {
    if routes_agree(a, b, ROUTE_SLACK_BITS) {
        Ok(())
    } else {
        Err(Error::RouteMismatch {
            what: format!("{what}: {} vs {}", a.to_text(), b.to_text()),
        })
    }
}

/// Lu's coefficients of `fam` in dimension `n` at `x0 = s^2`, in the number
/// system `S`.
pub fn lu_values<S: Scalar>(
    ctx: &S::Ctx,
    fam: &PotentialFamily,
    n: usize,
    x0: &Rational,
) -> Result<LuValues<S>> {
    fam.check_admissible(x0)?;
    let m = LAPLACIAN_JET_ORDER;
    let base = Arc::new(x0.clone());

    // Invariants as jets in x.
    let jf = build_frame_jet::<S>(ctx, fam, n, x0, m, Depth::Curvature)?;
    let pj = point_invariants(&jf);
    let fp = fam.fprime_jet::<S>(ctx, &base, m)?;
    let lap_rho_jet = radial_laplacian_jet(&pj.rho, &fp, n)?;
    let laplap_rho = radial_laplacian_jet(&lap_rho_jet, &fp, n)?.value().clone();
    let combination = pj
        .r2
        .sub_ref(&pj.ric2.scale_i64(4))
        .add_ref(&pj.rho.square().scale_i64(8));
    let lap_combination = radial_laplacian_jet(&combination, &fp, n)?.value().clone();
    let lap_r2 = radial_laplacian_jet(&pj.r2, &fp, n)?.value().clone();
    let lap_rho = lap_rho_jet.value().clone();

    // Covariant-derivative terms at the point.
    let fr = build_frame::<S>(ctx, fam, n, x0, Depth::Full)?;
    let p = point_invariants(&fr);
    let d = derivative_invariants(&fr)?;
    agree(&p.rho, pj.rho.value(), "scalar curvature")?;
    agree(&p.r2, pj.r2.value(), "|R|^2")?;
    agree(&p.ric2, pj.ric2.value(), "|Ric|^2")?;
    agree(&d.lap_rho, &lap_rho, "Laplacian of rho")?;

    let rho = p.rho.clone();
    let q = |a: i64, b: i64| Rational::from((a, b));
    let a1 = rho.scale(&q(1, 2));
    let a2 = lap_rho.scale(&q(1, 3)).add_ref(
        &p.r2
            .sub_ref(&p.ric2.scale_i64(4))
            .add_ref(&rho.square().scale_i64(3))
            .scale(&q(1, 24)),
    );
    let cubic = rho
        .mul_ref(&rho.square().sub_ref(&p.ric2.scale_i64(4)).add_ref(&p.r2))
        .scale(&q(1, 48));
    let a3 = laplap_rho
        .scale(&q(1, 8))
        .add_ref(&d.divdiv_r_ric.scale(&q(1, 24)))
        .sub_ref(&d.divdiv_rho_ric.scale(&q(1, 6)))
        .add_ref(&lap_combination.scale(&q(1, 48)))
        .add_ref(&cubic)
        .add_ref(
            &d.sigma3
                .sub_ref(&d.ric_r_r)
                .sub_ref(&d.r_ric_ric)
                .scale(&q(1, 24)),
        );

    Ok(LuValues {
        a1,
        a2,
        a3,
        rho,
        r2: p.r2,
        ric2: p.ric2,
        drho2: d.drho2,
        dric2: d.dric2,
        dr2: d.dr2,
        sigma3: d.sigma3,
        r_ric_ric: d.r_ric_ric,
        ric_r_r: d.ric_r_r,
        divdiv_r_ric: d.divdiv_r_ric,
        divdiv_rho_ric: d.divdiv_rho_ric,
        lap_rho,
        laplap_rho,
        lap_combination,
        lap_r2,
    })
}

/// How a reported value compares with zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValueStatus {
    Zero,
    /// Not certified zero, but `|v| < 2^-(bits/2)`.
    ZeroWithinTolerance,
    Positive,
    Negative,
    Undetermined,
}

impl ValueStatus {
    pub fn is_zero(self) -> bool {
        matches!(self, ValueStatus::Zero | ValueStatus::ZeroWithinTolerance)
    }
}

/// A scalar rendered for reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportValue {
    pub value: String,
    pub status: ValueStatus,
}

impl ReportValue {
    pub fn from_scalar<S: Scalar>(v: &S) -> Self {
        let status = match v.sign() {
            Sign::Zero => ValueStatus::Zero,
            Sign::Positive => ValueStatus::Positive,
            Sign::Negative => ValueStatus::Negative,
            Sign::Undetermined => {
                let bits = v
                    .precision_bits()
                    .unwrap_or(crate::scalar::DEFAULT_PRECISION_BITS);
                if v.abs_upper() < 2f64.powi(-((bits / 2).min(1000) as i32)) {
                    ValueStatus::ZeroWithinTolerance
                } else {
                    ValueStatus::Undetermined
                }
            }
        };
        ReportValue {
            value: v.to_text(),
            status,
        }
    }
}

/// JSON form of [`LuValues`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LuReport {
    pub family: String,
    pub dim: usize,
    pub x: String,
    pub backend: String,
    pub precision_bits: Option<u32>,
    pub a1: ReportValue,
    pub a2: ReportValue,
    pub a3: ReportValue,
    pub rho: ReportValue,
    #[serde(rename = "R2")]
    pub r2: ReportValue,
    #[serde(rename = "Ric2")]
    pub ric2: ReportValue,
    #[serde(rename = "DRho2")]
    pub drho2: ReportValue,
    #[serde(rename = "DRic2")]
    pub dric2: ReportValue,
    #[serde(rename = "DR2")]
    pub dr2: ReportValue,
    #[serde(rename = "sigma3Ric")]
    pub sigma3: ReportValue,
    #[serde(rename = "RRicRic")]
    pub r_ric_ric: ReportValue,
    #[serde(rename = "RicRR")]
    pub ric_r_r: ReportValue,
    #[serde(rename = "divdivRRic")]
    pub divdiv_r_ric: ReportValue,
    #[serde(rename = "divdivRhoRic")]
    pub divdiv_rho_ric: ReportValue,
    #[serde(rename = "lapRho")]
    pub lap_rho: ReportValue,
    #[serde(rename = "laplapRho")]
    pub laplap_rho: ReportValue,
    #[serde(rename = "lapCombination")]
    pub lap_combination: ReportValue,
    #[serde(rename = "lapR2")]
    pub lap_r2: ReportValue,
}

impl LuReport {
    pub fn from_values<S: Scalar>(
        fam: &PotentialFamily,
        n: usize,
        x0: &Rational,
        v: &LuValues<S>,
    ) -> Self {
        let r = ReportValue::from_scalar;
        let backend = v.a1.backend();
        LuReport {
            family: fam.descriptor(),
            dim: n,
            x: format_rational(x0),
            backend: backend.to_string(),
            precision_bits: backend.precision_bits(),
            a1: r(&v.a1),
            a2: r(&v.a2),
            a3: r(&v.a3),
            rho: r(&v.rho),
            r2: r(&v.r2),
            ric2: r(&v.ric2),
            drho2: r(&v.drho2),
            dric2: r(&v.dric2),
            dr2: r(&v.dr2),
            sigma3: r(&v.sigma3),
            r_ric_ric: r(&v.r_ric_ric),
            ric_r_r: r(&v.ric_r_r),
            divdiv_r_ric: r(&v.divdiv_r_ric),
            divdiv_rho_ric: r(&v.divdiv_rho_ric),
            lap_rho: r(&v.lap_rho),
            laplap_rho: r(&v.laplap_rho),
            lap_combination: r(&v.lap_combination),
            lap_r2: r(&v.lap_r2),
        }
    }
}

/// Radicals needed to run the engine exactly at `x0`.
pub fn engine_radicals(fam: &PotentialFamily, x0: &Rational) -> Vec<(Rational, u32)> {
    let mut r = fam.radicals(x0);
    r.push((x0.clone(), 2));
    r
}

struct LuEval<'a> {
    fam: &'a PotentialFamily,
    n: usize,
    x0: &'a Rational,
}

impl Computation for LuEval<'_> {
    type Output = LuReport;

    fn run<S: Scalar>(&self, ctx: &S::Ctx) -> Result<LuReport> {
        let v = lu_values::<S>(ctx, self.fam, self.n, self.x0)?;
        Ok(LuReport::from_values(self.fam, self.n, self.x0, &v))
    }
}

/// [`lu_values`] in the best available backend.
pub fn lu_coefficients(
    fam: &PotentialFamily,
    n: usize,
    x0: &Rational,
    precision: &Precision,
) -> Result<LuReport> {
    fam.check_admissible(x0)?;
    evaluate(&LuEval { fam, n, x0 }, &engine_radicals(fam, x0), precision)
}

/// Entry-wise Ricci tensor of `fam` at `x0`, in the best backend.
pub fn ricci_tensor_report(
    fam: &PotentialFamily,
    n: usize,
    x0: &Rational,
    precision: &Precision,
) -> Result<Vec<Vec<ReportValue>>> {
    struct RicEval<'a> {
        fam: &'a PotentialFamily,
        n: usize,
        x0: &'a Rational,
    }
    impl Computation for RicEval<'_> {
        type Output = Vec<Vec<ReportValue>>;
        fn run<S: Scalar>(&self, ctx: &S::Ctx) -> Result<Self::Output> {
            let fr = build_frame::<S>(ctx, self.fam, self.n, self.x0, Depth::Curvature)?;
            Ok(fr
                .ric
                .iter()
                .map(|row| row.iter().map(ReportValue::from_scalar).collect())
                .collect())
        }
    }
    fam.check_admissible(x0)?;
    evaluate(
        &RicEval { fam, n, x0 },
        &engine_radicals(fam, x0),
        precision,
    )
}

/// Ricci-flatness test at one point: the residual `d/dx log det g` and the
/// Ricci tensor of the engine.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RicciFlatPoint {
    pub x: String,
    pub backend: String,
    pub residual: ReportValue,
    pub ricci: Vec<Vec<ReportValue>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RicciFlatReport {
    pub family: String,
    pub dim: usize,
    pub points: Vec<RicciFlatPoint>,
    /// Every residual and Ricci entry is zero or zero within tolerance.
    pub ricci_flat: bool,
    /// Some value kept an undetermined sign at the precision cap.
    pub undetermined: bool,
}

struct RicciFlatEval<'a> {
    fam: &'a PotentialFamily,
    n: usize,
    x0: &'a Rational,
}

impl Computation for RicciFlatEval<'_> {
    type Output = RicciFlatPoint;

    fn run<S: Scalar>(&self, ctx: &S::Ctx) -> Result<RicciFlatPoint> {
        let res = self
            .fam
            .ricci_flat_residual::<S>(ctx, std::slice::from_ref(self.x0))?;
        let fr = build_frame::<S>(ctx, self.fam, self.n, self.x0, Depth::Curvature)?;
        Ok(RicciFlatPoint {
            x: format_rational(self.x0),
            backend: res[0].backend().to_string(),
            residual: ReportValue::from_scalar(&res[0]),
            ricci: fr
                .ric
                .iter()
                .map(|row| row.iter().map(ReportValue::from_scalar).collect())
                .collect(),
        })
    }

    fn decided(&self, out: &RicciFlatPoint) -> bool {
        let ok = |v: &ReportValue| v.status != ValueStatus::Undetermined;
        ok(&out.residual) && out.ricci.iter().flatten().all(ok)
    }
}

/// Residual and Ricci tensor of `fam` in dimension `n` at each sample.
pub fn ricci_flat_check(
    fam: &PotentialFamily,
    n: usize,
    samples: &[Rational],
    precision: &Precision,
) -> Result<RicciFlatReport> {
    for x in samples {
        fam.check_admissible(x)?;
    }
    let points: Vec<RicciFlatPoint> = samples
        .iter()
        .map(|x0| {
            evaluate(
                &RicciFlatEval { fam, n, x0 },
                &engine_radicals(fam, x0),
                precision,
            )
        })
        .collect::<Result<_>>()?;
    let values = || {
        points
            .iter()
            .flat_map(|p| std::iter::once(&p.residual).chain(p.ricci.iter().flatten()))
    };
    Ok(RicciFlatReport {
        family: fam.descriptor(),
        dim: n,
        ricci_flat: values().all(|v| v.status.is_zero()),
        undetermined: values().any(|v| v.status == ValueStatus::Undetermined),
        points,
    })
}

/// Jet of `|R|^2` in `x` around `x0`, for oracles and plots.
pub fn r2_jet<S: Scalar>(
    ctx: &S::Ctx,
    fam: &PotentialFamily,
    n: usize,
    x0: &Rational,
    order: usize,
) -> Result<Jet<S>> {
    let jf = build_frame_jet::<S>(ctx, fam, n, x0, order, Depth::Curvature)?;
    Ok(point_invariants(&jf).r2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Interval, RootExt};

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn simanca_coefficients_vanish_exactly_at_x_one() {
        let v = lu_values::<Rational>(&(), &PotentialFamily::Simanca, 2, &q(1, 1)).unwrap();
        assert_eq!(v.rho, 0);
        assert_eq!(v.a2, 0);
        assert_eq!(v.a3, 0);
        assert_eq!(v.r2, v.ric2.clone() * 4);
        // R2 = 8/(x+1)^4, Ric2 = 2/(x+1)^4
        assert_eq!(v.r2, q(1, 2));
    }

    #[test]
    fn flat_coefficients_vanish() {
        let fam = PotentialFamily::flat(q(1, 1), 3).unwrap();
        let v = lu_values::<Rational>(&(), &fam, 3, &q(4, 1)).unwrap();
        for x in [&v.a1, &v.a2, &v.a3, &v.r2, &v.dr2, &v.lap_r2] {
            assert_eq!(*x, 0);
        }
    }

    #[test]
    fn epsilon_a3_is_a_fixed_multiple_of_the_closed_form() {
        // At x = 1 the engine runs in Q(sqrt 2) and the ratio is exact.
        let fam = PotentialFamily::epsilon(1, q(1, 1), 2).unwrap();
        let x0 = q(1, 1);
        let field = crate::backend::common_field(&engine_radicals(&fam, &x0)).unwrap();
        let v = lu_values::<RootExt>(&field, &fam, 2, &x0).unwrap();
        let c = closed_forms_eps::<RootExt>(&field, 2, 1, &x0).unwrap();
        assert!(v.ric2.is_zero());
        assert!(v.r2.sub_ref(&c.r2).is_zero());
        assert!(v.lap_r2.sub_ref(&c.a3_proportional).is_zero());
        let ratio = v.a3.div_ref(&c.a3_proportional).unwrap();
        assert_eq!(ratio.as_rational(), Some(&q(1, 48)));
    }

    #[test]
    fn interval_backend_matches_closed_form() {
        let fam = PotentialFamily::epsilon(1, q(1, 1), 3).unwrap();
        let x0 = q(3, 5);
        let v = lu_values::<Interval>(&256, &fam, 3, &x0).unwrap();
        let c = closed_forms_eps::<Interval>(&256, 3, 1, &x0).unwrap();
        assert!(v.r2.within_relative(&c.r2, 1e-60));
        assert!(v
            .a3
            .within_relative(&c.a3_proportional.scale(&q(1, 48)), 1e-50));
    }

    #[test]
    fn report_uses_published_names() {
        let r = lu_coefficients(
            &PotentialFamily::Simanca,
            2,
            &q(1, 1),
            &Precision::default(),
        )
        .unwrap();
        let json = serde_json::to_value(&r).unwrap();
        for key in [
            "a1",
            "a2",
            "a3",
            "rho",
            "R2",
            "Ric2",
            "DRho2",
            "DRic2",
            "DR2",
            "sigma3Ric",
            "RRicRic",
            "RicRR",
            "divdivRRic",
            "divdivRhoRic",
            "lapRho",
            "laplapRho",
        ] {
            assert!(json.get(key).is_some(), "{key}");
        }
        assert_eq!(r.a3.status, ValueStatus::Zero);
    }

    #[test]
    fn ricci_flat_check_separates_families() {
        let flat = ricci_flat_check(
            &PotentialFamily::epsilon(1, q(1, 1), 3).unwrap(),
            3,
            &[q(1, 2), q(2, 1)],
            &Precision::default(),
        )
        .unwrap();
        assert!(flat.ricci_flat && !flat.undetermined);
        let sim = ricci_flat_check(
            &PotentialFamily::Simanca,
            2,
            &[q(1, 1)],
            &Precision::default(),
        )
        .unwrap();
        assert!(!sim.ricci_flat);
        assert_eq!(sim.points[0].residual.value, "-1/2");
    }
}
