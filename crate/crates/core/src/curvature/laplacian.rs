//! Laplacian `g^{j ibar} d_i dbar_j` of radial functions `u(|z|^2)`.
//!
//! At a radial point the metric is `diag(f' + x f'', f', ..., f')`, so
//! `Delta u = (u' + x u'') / (f' + x f'') + (n - 1) u' / f'`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::potential::PotentialFamily;
use crate::scalar::{Num, Scalar};

/// `Delta u` as a jet of order `u.order() - 2`; `fprime` must have order at
/// least `u.order() - 1`.
pub fn radial_laplacian_jet<S: Num>(u: &Jet<S>, fprime: &Jet<S>, n: usize) -> Result<Jet<S>> {
    if u.order() < 2 {
        return Err(Error::shortfall("radial Laplacian input", 2, u.order()));
    }
    let m = u.order() - 2;
    if fprime.order() < m + 1 {
        return Err(Error::shortfall(
            "f' jet for the radial Laplacian",
            m + 1,
            fprime.order(),
        ));
    }
    let du = u.derive()?;
    let ddu = du.derive()?;
    let du = du.truncate(m);
    let fp = fprime.truncate(m);
    let fpp = fprime.derive()?.truncate(m);
    let inner = u.value().ctx();
    let x = Jet::<S>::variable(&inner, u.base(), m);
    let radial = du.checked_add(&x.checked_mul(&ddu)?)?;
    let g11 = fp.checked_add(&x.checked_mul(&fpp)?)?;
    let tangential = du.checked_div(&fp)?.scale_i64(n as i64 - 1);
    radial.checked_div(&g11)?.checked_add(&tangential)
}

/// `Delta u` at the base point of `u`, which needs order at least 2.
pub fn radial_laplacian<S: Scalar>(u: &Jet<S>, fam: &PotentialFamily, n: usize) -> Result<S> {
    let ctx = u.value().ctx();
    let base: Arc<_> = u.base().clone();
    let fp = fam.fprime_jet::<S>(&ctx, &base, 1)?;
    Ok(radial_laplacian_jet(&u.truncate(2), &fp, n)?
        .value()
        .clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn constants_are_harmonic() {
        let base = Arc::new(q(2, 3));
        let u = Jet::constant(&(), &base, 4, q(7, 1));
        assert_eq!(
            radial_laplacian(&u, &PotentialFamily::Simanca, 2).unwrap(),
            0
        );
    }

    #[test]
    fn flat_laplacian_of_x() {
        let fam = PotentialFamily::flat(q(1, 1), 2).unwrap();
        let base = Arc::new(q(5, 2));
        let u = Jet::<Rational>::variable(&(), &base, 2);
        assert_eq!(radial_laplacian(&u, &fam, 2).unwrap(), 2);
    }

    #[test]
    fn jet_laplacian_order_drops_by_two() {
        let fam = PotentialFamily::Simanca;
        let base = Arc::new(q(1, 1));
        let u = Jet::<Rational>::variable(&(), &base, 5).square();
        let fp = fam.fprime_jet::<Rational>(&(), &base, 4).unwrap();
        let lap = radial_laplacian_jet(&u, &fp, 2).unwrap();
        assert_eq!(lap.order(), 3);
        // u = x^2: (2x + 2x) / 1 + 2x / (1 + 1/x) = 4 + 1 at x = 1
        assert_eq!(*lap.value(), 5);
    }
}
