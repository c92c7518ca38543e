//! Closed forms along the family `f' = (eps x^-n + 1)^(1/n)` in its natural
//! dimension `n`, used as independent oracles for the curvature engine.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{rational_powi, Rational, Scalar};

/// `|R|^2` and `Delta |R|^2` for `lambda = 1`.
#[derive(Clone, Debug)]
pub struct ClosedForms<S> {
    pub r2: S,
    pub a3_proportional: S,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosedFormsText {
    pub r2: String,
    pub a3_proportional: String,
}

/// Radicals needed to evaluate [`closed_forms_eps`] exactly.
pub fn closed_forms_radicals(n: u32, eps: i32, x: &Rational) -> Vec<(Rational, u32)> {
    if eps == 0 {
        return Vec::new();
    }
    let xn = rational_powi(x, i64::from(n)).expect("x is nonzero");
    vec![(xn + eps, n)]
}

/// `|R|^2 = n(n-1)(n+1)(n+2) eps^2 (x^n + eps)^(-2(n+1)/n)` and
/// `Delta |R|^2 = 2n(n-1)(n+2)(n+1)^2 eps^2 (x^n + eps)^(-3(n+1)/n) (x^n (n+3) - n eps)`.
pub fn closed_forms_eps<S: Scalar>(
    ctx: &S::Ctx,
    n: u32,
    eps: i32,
    x: &Rational,
) -> Result<ClosedForms<S>> {
    if n == 0 || !(-1..=1).contains(&eps) {
        return Err(Error::InvalidParameter(format!(
            "closed forms need n >= 1 and eps in {{-1, 0, 1}}, got n={n}, eps={eps}"
        )));
    }
    if x.cmp0().is_le() {
        return Err(Error::Inadmissible {
            family: format!("epsilon:{eps}:1:{n}"),
            point: crate::scalar::format_rational(x),
            reason: "x must be positive".into(),
        });
    }
    if eps == 0 {
        return Ok(ClosedForms {
            r2: S::zero(ctx),
            a3_proportional: S::zero(ctx),
        });
    }
    let xn = rational_powi(x, i64::from(n))?;
    let c = xn.clone() + eps;
    if c.cmp0().is_le() {
        return Err(Error::Inadmissible {
            family: format!("epsilon:{eps}:1:{n}"),
            point: crate::scalar::format_rational(x),
            reason: "x^n + eps must be positive".into(),
        });
    }
    let cs = S::from_rational(ctx, &c);
    let ni = i64::from(n);
    let r2 = cs
        .pow_rational(&Rational::from((-2 * (ni + 1), ni)))?
        .scale_i64(ni * (ni - 1) * (ni + 1) * (ni + 2));
    let factor = xn * (ni + 3) - Rational::from(ni * i64::from(eps));
    let a3 = cs
        .pow_rational(&Rational::from((-3 * (ni + 1), ni)))?
        .scale(&factor)
        .scale_i64(2 * ni * (ni - 1) * (ni + 2) * (ni + 1) * (ni + 1));
    Ok(ClosedForms {
        r2,
        a3_proportional: a3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Interval, Sign};

    #[test]
    fn values() {
        let c = closed_forms_eps::<Interval>(&256, 2, 1, &Rational::from(1)).unwrap();
        assert!(c
            .r2
            .compatible_with(&Interval::from_rational_prec(256, &Rational::from(3))));
        let z = closed_forms_eps::<Rational>(&(), 3, 0, &Rational::from(2)).unwrap();
        assert_eq!(z.r2, 0);
        assert_eq!(z.a3_proportional, 0);
        let m = closed_forms_eps::<Interval>(&256, 3, -1, &Rational::from(2)).unwrap();
        assert_eq!(m.a3_proportional.sign(), Sign::Positive);
    }
}
