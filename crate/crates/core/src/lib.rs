//! Exact and certified computations for radial Kahler metrics.
//!
//! A radial metric on a domain of `C^n` has a potential `f(x)` with
//! `x = |z|^2`. The crate provides
//!
//! * number backends ([`scalar`]) and truncated Taylor series ([`jet`]),
//!   with [`backend::evaluate`] picking an exact field when one suffices;
//! * the potential families ([`potential`]);
//! * the functions `g_h` whose negativity obstructs a Kahler immersion into
//!   projective space ([`obstruction`]);
//! * curvature tensors, their invariants and the TYZ coefficients
//!   `a_1, a_2, a_3` ([`curvature`]);
//! * positivity of the diastasis coefficient minors ([`resolvability`]);
//! * a suite that regenerates every checkable number ([`reproduce`]).
//!
//! ```
//! use radial_kahler::backend::Precision;
//! use radial_kahler::obstruction::gh_eval;
//! use radial_kahler::potential::PotentialFamily;
//! use radial_kahler::scalar::{Rational, Sign};
//!
//! let fam = PotentialFamily::from_descriptor("epsilon:1:1:6").unwrap();
//! let g = gh_eval(&fam, &Rational::from(1), 4, &Precision::default()).unwrap();
//! assert_eq!(g[4].sign, Sign::Negative);
//! ```

pub mod backend;
pub mod curvature;
pub mod error;
pub mod jet;
pub mod obstruction;
pub mod potential;
pub mod reproduce;
pub mod resolvability;
pub mod scalar;

// The guide under book/ is compiled here so that its snippets run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/numbers.md")]
    mod numbers {}
    #[doc = include_str!("../../../book/src/obstructions.md")]
    mod obstructions {}
    #[doc = include_str!("../../../book/src/curvature.md")]
    mod curvature {}
    #[doc = include_str!("../../../book/src/resolvability.md")]
    mod resolvability {}
    #[doc = include_str!("../../../book/src/reproduction.md")]
    mod reproduction {}
}
