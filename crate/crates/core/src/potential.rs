//! Radial potential families and the jets of their profiles.
//!
//! A radial potential is `Phi(z) = f(|z|^2)`. Everything downstream consumes
//! `f` only through the jet of `f'` at a base point `x0`; `f` itself is the
//! antiderivative normalised to vanish at `x0`.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::scalar::{format_rational, parse_rational, rational_powi, Num, Rational, Scalar, Sign};

/// A radial Kähler potential `f(x)`, `x = |z|^2`.
#[derive(Clone, Debug, PartialEq)]
pub enum PotentialFamily {
    /// `f' = lambda (eps x^(-n) + 1)^(1/n)` on `C^n`; Ricci-flat.
    Epsilon { eps: i32, lambda: Rational, n: u32 },
    /// `f = x + log x` on `C^2 \ {0}`.
    Simanca,
    /// `f = sqrt(x^2 + 1) + log x - log(1 + sqrt(x^2 + 1))`, written in its
    /// own closed form rather than as a member of the epsilon family.
    EguchiHanson,
    /// Taylor coefficients of `f'` at a single base point.
    Custom(CustomPotential),
}

/// A potential given by finitely many Taylor coefficients of `f'` at `x0`.
#[derive(Clone, Debug, PartialEq)]
pub struct CustomPotential {
    pub x0: Rational,
    pub coefficients: Vec<Rational>,
    pub dim: u32,
    /// Where the coefficients were read from, for report labels.
    pub source: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct CustomFile {
    x0: String,
    coefficients: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<u32>,
}

impl CustomPotential {
    pub fn new(x0: Rational, coefficients: Vec<Rational>, dim: u32) -> Result<Self> {
        let first = coefficients.first().ok_or_else(|| {
            Error::InvalidParameter("custom potential has no coefficients".into())
        })?;
        if first.cmp0() != std::cmp::Ordering::Greater {
            return Err(Error::InvalidParameter(format!(
                "f'(x0) = {} must be positive",
                format_rational(first)
            )));
        }
        if x0.cmp0() != std::cmp::Ordering::Greater {
            return Err(Error::InvalidParameter("custom x0 must be positive".into()));
        }
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "dimension must be at least 1".into(),
            ));
        }
        Ok(CustomPotential {
            x0,
            coefficients,
            dim,
            source: None,
        })
    }

    /// Parses `{"x0": "p/q", "coefficients": ["p/q", ...], "dim": n}`; `dim`
    /// defaults to 2.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: CustomFile = serde_json::from_str(text)?;
        let x0 = parse_rational(&raw.x0)?;
        let coefficients = raw
            .coefficients
            .iter()
            .map(|c| parse_rational(c))
            .collect::<Result<Vec<_>>>()?;
        CustomPotential::new(x0, coefficients, raw.dim.unwrap_or(2))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut custom = Self::from_json_str(&text)?;
        custom.source = Some(path.display().to_string());
        Ok(custom)
    }

    pub fn to_json(&self) -> String {
        let raw = CustomFile {
            x0: format_rational(&self.x0),
            coefficients: self.coefficients.iter().map(format_rational).collect(),
            dim: Some(self.dim),
        };
        serde_json::to_string(&raw).expect("plain strings serialize")
    }
}

impl PotentialFamily {
    pub fn epsilon(eps: i32, lambda: Rational, n: u32) -> Result<Self> {
        if !(-1..=1).contains(&eps) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be -1, 0 or 1, got {eps}"
            )));
        }
        if lambda.cmp0() != std::cmp::Ordering::Greater {
            return Err(Error::InvalidParameter(format!(
                "lambda = {} must be positive",
                format_rational(&lambda)
            )));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        Ok(PotentialFamily::Epsilon { eps, lambda, n })
    }

    /// The flat metric `f = lambda x` on `C^n`.
    pub fn flat(lambda: Rational, n: u32) -> Result<Self> {
        Self::epsilon(0, lambda, n)
    }

    /// Parses `epsilon:<eps>:<lambda>:<n>`, `flat[:<lambda>[:<n>]]`,
    /// `simanca`, `eguchi-hanson` or `custom:<path.json>`.
    pub fn from_descriptor(text: &str) -> Result<Self> {
        let t = text.trim();
        let bad = |why: &str| Error::Parse(format!("family `{t}`: {why}"));
        if let Some(path) = t.strip_prefix("custom:") {
            return Ok(PotentialFamily::Custom(CustomPotential::from_path(
                Path::new(path),
            )?));
        }
        let parts: Vec<&str> = t.split(':').collect();
        match parts.as_slice() {
            ["simanca"] => Ok(PotentialFamily::Simanca),
            ["eguchi-hanson"] => Ok(PotentialFamily::EguchiHanson),
            ["epsilon", eps, lambda, n] => {
                let eps: i32 = eps.parse().map_err(|_| bad("epsilon must be -1, 0 or 1"))?;
                let n: u32 = n.parse().map_err(|_| bad("n must be a positive integer"))?;
                Self::epsilon(eps, parse_rational(lambda)?, n)
            }
            ["flat"] => Self::flat(Rational::from(1), 2),
            ["flat", lambda] => Self::flat(parse_rational(lambda)?, 2),
            ["flat", lambda, n] => {
                let n: u32 = n.parse().map_err(|_| bad("n must be a positive integer"))?;
                Self::flat(parse_rational(lambda)?, n)
            }
            _ => Err(bad(
                "expected epsilon:<eps>:<lambda>:<n>, flat, simanca, eguchi-hanson or custom:<path>",
            )),
        }
    }

    /// Canonical descriptor, accepted back by [`Self::from_descriptor`] except
    /// for custom potentials, which print their data inline.
    pub fn descriptor(&self) -> String {
        match self {
            PotentialFamily::Epsilon { eps, lambda, n } => {
                format!("epsilon:{eps}:{}:{n}", format_rational(lambda))
            }
            PotentialFamily::Simanca => "simanca".into(),
            PotentialFamily::EguchiHanson => "eguchi-hanson".into(),
            PotentialFamily::Custom(c) => match &c.source {
                Some(path) => format!("custom:{path}"),
                None => format!("custom{}", c.to_json()),
            },
        }
    }

    /// Complex dimension the family is defined on.
    pub fn natural_dim(&self) -> u32 {
        match self {
            PotentialFamily::Epsilon { n, .. } => *n,
            PotentialFamily::Simanca | PotentialFamily::EguchiHanson => 2,
            PotentialFamily::Custom(c) => c.dim,
        }
    }

    pub fn is_flat(&self) -> bool {
        matches!(self, PotentialFamily::Epsilon { eps: 0, .. })
    }

    /// Rejects base points outside the open domain of the family.
    pub fn check_admissible(&self, x0: &Rational) -> Result<()> {
        let reject = |reason: &str| {
            Err(Error::Inadmissible {
                family: self.descriptor(),
                point: format_rational(x0),
                reason: reason.into(),
            })
        };
        match self {
            PotentialFamily::Epsilon { eps: -1, .. } if *x0 <= 1 => reject("requires x > 1"),
            PotentialFamily::Custom(c) if c.x0 != *x0 => {
                reject("a custom potential is only known at its own x0")
            }
            _ if x0.cmp0() != std::cmp::Ordering::Greater => reject("requires x > 0"),
            _ => Ok(()),
        }
    }

    /// Radicals `(c, d)` meaning `c^(1/d)` that appear in the jet of `f'` at
    /// `x0`; an exact backend must contain all of them.
    pub fn radicals(&self, x0: &Rational) -> Vec<(Rational, u32)> {
        match self {
            PotentialFamily::Epsilon { eps, n, .. } if *eps != 0 && x0.cmp0().is_gt() => {
                let xn = rational_powi(x0, -i64::from(*n)).expect("x0 is nonzero");
                vec![(xn * *eps + 1u32, *n)]
            }
            PotentialFamily::EguchiHanson => {
                vec![(Rational::from(x0 * x0) + 1u32, 2)]
            }
            _ => Vec::new(),
        }
    }

    /// Jet of `f'` at `x0` to the given order.
    pub fn fprime_jet<S: Scalar>(
        &self,
        ctx: &S::Ctx,
        x0: &Arc<Rational>,
        order: usize,
    ) -> Result<Jet<S>> {
        self.check_admissible(x0)?;
        let x = || Jet::<S>::variable(ctx, x0, order);
        let one = |j: &Jet<S>| j.one_like();
        match self {
            PotentialFamily::Epsilon { eps: 0, lambda, .. } => {
                Ok(Jet::constant(ctx, x0, order, S::from_rational(ctx, lambda)))
            }
            PotentialFamily::Epsilon { eps, lambda, n } => {
                let xi = x().pow(&Rational::from(-(*n as i64)))?;
                let u = xi.scale_i64(i64::from(*eps)).add_ref(&one(&xi));
                Ok(u.pow(&Rational::from((1, *n)))?.scale(lambda))
            }
            PotentialFamily::Simanca => {
                let x = x();
                Ok(x.recip()?.add_ref(&one(&x)))
            }
            PotentialFamily::EguchiHanson => {
                let x = x();
                let root = x.square().add_ref(&one(&x)).pow(&Rational::from((1, 2)))?;
                root.checked_div(&x)
            }
            PotentialFamily::Custom(c) => {
                if order >= c.coefficients.len() {
                    return Err(Error::shortfall(
                        "custom f' coefficients",
                        order + 1,
                        c.coefficients.len(),
                    ));
                }
                Ok(Jet::new(
                    x0.clone(),
                    c.coefficients[..=order]
                        .iter()
                        .map(|q| S::from_rational(ctx, q))
                        .collect(),
                ))
            }
        }
    }

    /// Jet of `f` normalised by `f(x0) = 0`.
    pub fn f_jet<S: Scalar>(
        &self,
        ctx: &S::Ctx,
        x0: &Arc<Rational>,
        order: usize,
    ) -> Result<Jet<S>> {
        if order == 0 {
            self.check_admissible(x0)?;
            return Ok(Jet::constant(ctx, x0, 0, S::zero(ctx)));
        }
        Ok(self
            .fprime_jet::<S>(ctx, x0, order - 1)?
            .antiderive(S::zero(ctx)))
    }

    /// Jet of `det g = (f')^(n-1) (f' + x f'')` on the radial axis, with `n`
    /// the family's dimension.
    pub fn metric_det_jet<S: Scalar>(
        &self,
        ctx: &S::Ctx,
        x0: &Arc<Rational>,
        order: usize,
    ) -> Result<Jet<S>> {
        let fp = self.fprime_jet::<S>(ctx, x0, order + 1)?;
        let fpp = fp.derive()?;
        let fp = fp.truncate(order);
        let x = Jet::<S>::variable(ctx, x0, order);
        let radial = fp.add_ref(&x.mul_ref(&fpp));
        Ok(fp.powi(self.natural_dim() - 1).mul_ref(&radial))
    }

    /// `d/dx log det g` at each sample; zero everywhere exactly when the
    /// radial metric is Ricci-flat there.
    pub fn ricci_flat_residual<S: Scalar>(
        &self,
        ctx: &S::Ctx,
        samples: &[Rational],
    ) -> Result<Vec<S>> {
        samples
            .iter()
            .map(|x0| {
                let det = self.metric_det_jet::<S>(ctx, &Arc::new(x0.clone()), 1)?;
                if det.value_sign() != Sign::Positive {
                    return Err(Error::NotPositive {
                        what: "metric determinant".into(),
                        found: det.value_sign().as_str(),
                    });
                }
                det.coeffs()[1].div_ref(det.value())
            })
            .collect()
    }
}

impl fmt::Display for PotentialFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Interval, RootExt, RootField};

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn at(x: Rational) -> Arc<Rational> {
        Arc::new(x)
    }

    fn eps(e: i32, n: u32) -> PotentialFamily {
        PotentialFamily::epsilon(e, q(1, 1), n).unwrap()
    }

    #[test]
    fn fprime_values() {
        let j = eps(1, 2)
            .fprime_jet::<Rational>(&(), &at(q(3, 4)), 0)
            .unwrap();
        assert_eq!(*j.value(), q(5, 3));
        let j = PotentialFamily::Simanca
            .fprime_jet::<Rational>(&(), &at(q(1, 1)), 1)
            .unwrap();
        assert_eq!(j.coeffs(), &[q(2, 1), q(-1, 1)]);
        let flat = PotentialFamily::flat(q(7, 3), 3).unwrap();
        let j = flat.fprime_jet::<Rational>(&(), &at(q(2, 1)), 3).unwrap();
        assert_eq!(j.coeffs(), &[q(7, 3), q(0, 1), q(0, 1), q(0, 1)]);
    }

    #[test]
    fn eguchi_hanson_is_the_n2_member() {
        for x in [q(3, 4), q(12, 5), q(8, 15)] {
            let a = eps(1, 2)
                .fprime_jet::<Rational>(&(), &at(x.clone()), 6)
                .unwrap();
            let b = PotentialFamily::EguchiHanson
                .fprime_jet::<Rational>(&(), &at(x), 6)
                .unwrap();
            assert_eq!(a, b);
        }
        let field = RootField::new(&q(2, 1), 2).unwrap();
        let a = eps(1, 2)
            .fprime_jet::<RootExt>(&field, &at(q(1, 1)), 5)
            .unwrap();
        let b = PotentialFamily::EguchiHanson
            .fprime_jet::<RootExt>(&field, &at(q(1, 1)), 5)
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn admissibility() {
        assert!(eps(-1, 2).check_admissible(&q(1, 1)).is_err());
        assert!(eps(-1, 2).check_admissible(&q(101, 100)).is_ok());
        assert!(PotentialFamily::Simanca.check_admissible(&q(0, 1)).is_err());
        assert!(PotentialFamily::epsilon(2, q(1, 1), 2).is_err());
        assert!(PotentialFamily::epsilon(1, q(0, 1), 2).is_err());
    }

    #[test]
    fn determinant_is_constant_for_the_epsilon_family() {
        let fam = PotentialFamily::epsilon(1, q(3, 2), 2).unwrap();
        let det = fam
            .metric_det_jet::<Rational>(&(), &at(q(3, 4)), 4)
            .unwrap();
        assert_eq!(det.coeffs(), &[q(9, 4), q(0, 1), q(0, 1), q(0, 1), q(0, 1)]);
        let det = PotentialFamily::Simanca
            .metric_det_jet::<Rational>(&(), &at(q(1, 1)), 0)
            .unwrap();
        assert_eq!(*det.value(), q(2, 1));
    }

    #[test]
    fn residuals() {
        let field = RootField::new(&q(9, 1), 3).unwrap();
        let r = eps(1, 3)
            .ricci_flat_residual::<RootExt>(&field, &[q(1, 2)])
            .unwrap();
        assert!(r[0].is_zero());
        // det = 1 + 1/x, so d/dx log det = -1/(x(x+1)).
        let r = PotentialFamily::Simanca
            .ricci_flat_residual::<Rational>(&(), &[q(1, 1), q(2, 1)])
            .unwrap();
        assert_eq!(r, vec![q(-1, 2), q(-1, 6)]);
        let r = eps(-1, 4)
            .ricci_flat_residual::<Interval>(&256, &[q(3, 2)])
            .unwrap();
        assert!(r[0].abs_upper() < 1e-60);
    }

    #[test]
    fn descriptors_round_trip() {
        for d in [
            "epsilon:1:1/1:2",
            "epsilon:-1:3/2:4",
            "simanca",
            "eguchi-hanson",
        ] {
            assert_eq!(PotentialFamily::from_descriptor(d).unwrap().descriptor(), d);
        }
        assert_eq!(
            PotentialFamily::from_descriptor("flat").unwrap(),
            PotentialFamily::flat(q(1, 1), 2).unwrap()
        );
        assert!(PotentialFamily::from_descriptor("epsilon:1:1").is_err());
    }

    #[test]
    fn custom_round_trip() {
        let x0 = at(q(3, 4));
        let jet = eps(1, 2).fprime_jet::<Rational>(&(), &x0, 6).unwrap();
        let custom = CustomPotential::new(q(3, 4), jet.coeffs().to_vec(), 2).unwrap();
        let parsed = CustomPotential::from_json_str(&custom.to_json()).unwrap();
        assert_eq!(parsed, custom);
        let fam = PotentialFamily::Custom(parsed);
        assert_eq!(fam.fprime_jet::<Rational>(&(), &x0, 6).unwrap(), jet);
        assert!(fam.fprime_jet::<Rational>(&(), &x0, 7).is_err());
        assert!(fam.check_admissible(&q(1, 1)).is_err());
        assert!(CustomPotential::from_json_str(r#"{"x0":"1/1","coefficients":["-1/1"]}"#).is_err());
    }
}
