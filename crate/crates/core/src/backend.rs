//! Choosing a number system for a computation and running it there.
//!
//! Generic routines are written once over [`Scalar`]. A [`Computation`] wraps
//! such a routine; [`evaluate`] picks an exact field that contains every
//! radical the computation needs, or falls back to certified intervals with
//! precision doubling.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{
    format_rational, with_escalation, Interval, Rational, RootExt, RootField, Scalar,
    DEFAULT_PRECISION_BITS, PRECISION_CAP_BITS,
};

/// Whether exact arithmetic is preferred, required or skipped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ExactMode {
    /// Exact when all radicals fit one field, big floats otherwise.
    #[default]
    Auto,
    /// Exact or an error.
    Force,
    /// Always big floats.
    Never,
}

/// Precision policy of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Precision {
    pub bits: u32,
    pub cap_bits: u32,
    pub exact: ExactMode,
}

impl Default for Precision {
    fn default() -> Self {
        Precision {
            bits: DEFAULT_PRECISION_BITS,
            cap_bits: PRECISION_CAP_BITS,
            exact: ExactMode::Auto,
        }
    }
}

impl Precision {
    pub fn float(bits: u32) -> Self {
        Precision {
            bits,
            cap_bits: bits.max(PRECISION_CAP_BITS),
            exact: ExactMode::Never,
        }
    }

    pub fn exact() -> Self {
        Precision {
            exact: ExactMode::Force,
            ..Precision::default()
        }
    }

    /// Big floats at exactly `bits`, with no escalation.
    pub fn fixed(bits: u32) -> Self {
        Precision {
            bits,
            cap_bits: bits,
            exact: ExactMode::Never,
        }
    }
}

/// A number system chosen for a computation.
#[derive(Clone, Debug, PartialEq)]
pub enum Plan {
    Exact(Arc<RootField>),
    Float,
}

fn representable(field: &Arc<RootField>, c: &Rational, d: u32) -> bool {
    RootExt::from_rational_in(field, c)
        .pow_rational(&Rational::from((1, d)))
        .is_ok()
}

/// A single field `Q(c^(1/d))` containing every `c_i^(1/d_i)`, if one of the
/// candidate generators works.
pub fn common_field(radicals: &[(Rational, u32)]) -> Option<Arc<RootField>> {
    let mut candidates: Vec<Arc<RootField>> = radicals
        .iter()
        .filter_map(|(c, d)| RootField::new(c, *d).ok())
        .filter(|f| !f.is_rationals())
        .collect();
    if candidates.is_empty() {
        return radicals
            .iter()
            .all(|(c, _)| c.cmp0().is_gt())
            .then(RootField::rationals);
    }
    candidates.sort_by_key(|f| std::cmp::Reverse(f.degree()));
    candidates
        .into_iter()
        .find(|f| radicals.iter().all(|(c, d)| representable(f, c, *d)))
}

pub fn plan(radicals: &[(Rational, u32)], precision: &Precision) -> Result<Plan> {
    if precision.exact == ExactMode::Never {
        return Ok(Plan::Float);
    }
    match common_field(radicals) {
        Some(field) => Ok(Plan::Exact(field)),
        None if precision.exact == ExactMode::Force => Err(Error::NotRepresentable {
            op: format!(
                "the set of radicals {}",
                radicals
                    .iter()
                    .map(|(c, d)| format!("({})^(1/{d})", format_rational(c)))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
            backend: "exact".into(),
        }),
        None => Ok(Plan::Float),
    }
}

/// A routine that can run over any scalar backend.
pub trait Computation {
    type Output;

    fn run<S: Scalar>(&self, ctx: &S::Ctx) -> Result<Self::Output>;

    /// Whether a big-float result is final; undecided results trigger a rerun
    /// at doubled precision.
    fn decided(&self, _out: &Self::Output) -> bool {
        true
    }
}

/// Runs `c` in the backend selected by `radicals` and `precision`.
///
/// An exact run that hits an unrepresentable operation falls back to big
/// floats unless exactness is forced.
pub fn evaluate<C: Computation>(
    c: &C,
    radicals: &[(Rational, u32)],
    precision: &Precision,
) -> Result<C::Output> {
    if let Plan::Exact(field) = plan(radicals, precision)? {
        let out = if field.is_rationals() {
            c.run::<Rational>(&())
        } else {
            c.run::<RootExt>(&field)
        };
        match out {
            Err(Error::NotRepresentable { .. }) if precision.exact == ExactMode::Auto => {}
            other => return other,
        }
    }
    evaluate_float(c, precision)
}

/// Runs `c` over intervals, doubling the precision while it is undecided.
pub fn evaluate_float<C: Computation>(c: &C, precision: &Precision) -> Result<C::Output> {
    with_escalation(
        precision.bits,
        precision.cap_bits.max(precision.bits),
        |bits| c.run::<Interval>(&bits),
        |out| c.decided(out),
    )
}

/// Whether two computations of one quantity agree: exactly for exact
/// backends, otherwise as overlapping enclosures or within a relative
/// `2^-(bits - slack_bits)`.
pub fn routes_agree<S: Scalar>(a: &S, b: &S, slack_bits: u32) -> bool {
    if a.is_exact() {
        return a.sub_ref(b).is_zero();
    }
    if a.compatible_with(b) {
        return true;
    }
    let bits = a.precision_bits().unwrap_or(DEFAULT_PRECISION_BITS);
    let tol = 2f64.powi(-(bits.saturating_sub(slack_bits).min(1000) as i32));
    a.within_relative(b, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn field_selection() {
        assert!(common_field(&[]).unwrap().is_rationals());
        assert!(common_field(&[(q(25, 16), 2)]).unwrap().is_rationals());
        let f = common_field(&[(q(2, 1), 3), (q(16, 1), 3)]).unwrap();
        assert_eq!(f.degree(), 3);
        // sqrt(21/121) and sqrt(21/100) generate the same field.
        let f = common_field(&[(q(21, 121), 2), (q(21, 100), 2)]).unwrap();
        assert_eq!(f.degree(), 2);
        assert!(common_field(&[(q(2, 1), 2), (q(3, 1), 2)]).is_none());
        // sqrt 2 lies in Q(2^(1/4)).
        assert_eq!(
            common_field(&[(q(2, 1), 2), (q(2, 1), 4)])
                .unwrap()
                .degree(),
            4
        );
    }

    #[test]
    fn forced_exactness_fails_loudly() {
        let radicals = [(q(2, 1), 2), (q(3, 1), 2)];
        assert!(plan(&radicals, &Precision::exact()).is_err());
        assert_eq!(plan(&radicals, &Precision::default()).unwrap(), Plan::Float);
    }
}
