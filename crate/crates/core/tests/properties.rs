use std::sync::Arc;

use proptest::prelude::*;
use radial_kahler::curvature::{build_frame, point_invariants, Depth};
use radial_kahler::jet::Jet;
use radial_kahler::obstruction::{gh_direct, gh_recursion};
use radial_kahler::potential::PotentialFamily;
use radial_kahler::resolvability::AxisPoint;
use radial_kahler::scalar::{format_rational, parse_rational, Interval, Num, Rational, Scalar};

const BITS: u32 = 192;

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

fn rational() -> impl Strategy<Value = Rational> {
    (-60i64..=60, 1i64..=12).prop_map(|(n, d)| q(n, d))
}

fn poly() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(rational(), 1..6)
}

fn eval(p: &[Rational], x: &Rational) -> Rational {
    p.iter().rev().fold(Rational::new(), |acc, c| acc * x + c)
}

fn derivative(p: &[Rational]) -> Vec<Rational> {
    let d: Vec<Rational> = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| Rational::from(c * i as i64))
        .collect();
    if d.is_empty() {
        vec![Rational::new()]
    } else {
        d
    }
}

/// Taylor coefficients of a polynomial at `x0`.
fn taylor(p: &[Rational], x0: &Rational, order: usize) -> Vec<Rational> {
    let mut d = p.to_vec();
    let mut fact = Rational::from(1);
    (0..=order)
        .map(|k| {
            if k > 0 {
                fact *= k as i64;
            }
            let v = eval(&d, x0) / &fact;
            d = derivative(&d);
            v
        })
        .collect()
}

fn product(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::new(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += Rational::from(x * y);
        }
    }
    out
}

fn family() -> impl Strategy<Value = PotentialFamily> {
    prop_oneof![
        (1i64..=6).prop_map(|k| PotentialFamily::flat(q(k, 2), 2).unwrap()),
        (prop_oneof![Just(1), Just(-1)], 1i64..=6, 2u32..=4)
            .prop_map(|(e, k, n)| PotentialFamily::epsilon(e, q(k, 2), n).unwrap()),
        Just(PotentialFamily::Simanca),
        Just(PotentialFamily::EguchiHanson),
    ]
}

fn point_for(fam: &PotentialFamily, k: i64) -> Rational {
    match fam {
        PotentialFamily::Epsilon { eps: -1, .. } => q(1, 1) + q(k, 50),
        _ => q(k, 50),
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn jet_arithmetic_matches_polynomials(p in poly(), r in poly(), x0 in rational()) {
        let order = 5;
        let base = Arc::new(x0.clone());
        let jp = Jet::new(base.clone(), taylor(&p, &x0, order));
        let jr = Jet::new(base.clone(), taylor(&r, &x0, order));
        let prod = Jet::new(base.clone(), taylor(&product(&p, &r), &x0, order));
        prop_assert_eq!(jp.mul_ref(&jr), prod.clone());
        if !jr.value().is_zero() {
            prop_assert_eq!(prod.checked_div(&jr).unwrap(), jp.clone());
        }
        let d = Jet::new(base, taylor(&derivative(&p), &x0, order - 1));
        prop_assert_eq!(jp.derive().unwrap(), d);
    }

    #[test]
    fn rational_text_round_trips(x in rational()) {
        prop_assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
    }

    #[test]
    fn recursion_and_direct_routes_agree(fam in family(), k in 1i64..=150) {
        let x = point_for(&fam, k);
        let fp = fam.fprime_jet::<Interval>(&BITS, &Arc::new(x), 10).unwrap();
        let a = gh_recursion(&fp, 10).unwrap();
        let b = gh_direct(&fp, 10, &Interval::zero(&BITS)).unwrap();
        for (u, v) in a.iter().zip(&b) {
            prop_assert!(u.compatible_with(v));
        }
    }

    #[test]
    fn additive_constant_is_invisible(fam in family(), k in 1i64..=150, c in rational()) {
        let x = point_for(&fam, k);
        let fp = fam.fprime_jet::<Interval>(&BITS, &Arc::new(x), 8).unwrap();
        let a = gh_direct(&fp, 8, &Interval::zero(&BITS)).unwrap();
        let b = gh_direct(&fp, 8, &Interval::from_rational_prec(BITS, &c)).unwrap();
        for (u, v) in a.iter().zip(&b) {
            prop_assert!(u.compatible_with(v));
        }
    }

    #[test]
    fn curvature_has_kahler_symmetries(fam in family(), k in 1i64..=150) {
        let x = point_for(&fam, k);
        let n = fam.natural_dim() as usize;
        let fr = build_frame::<Interval>(&BITS, &fam, n, &x, Depth::Curvature).unwrap();
        for i in 0..n {
            for j in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        let v = &fr.r[i][j][a][b];
                        prop_assert!(v.compatible_with(&fr.r[a][j][i][b]));
                        prop_assert!(v.compatible_with(&fr.r[i][b][a][j]));
                    }
                }
            }
        }
        let p = point_invariants(&fr);
        prop_assert!(p.r2.sign() != radial_kahler::scalar::Sign::Negative);
        prop_assert!(p.ric2.sign() != radial_kahler::scalar::Sign::Negative);
    }

    #[test]
    fn axis_points_parse_back(num in 1i64..=500, den in 1i64..=40) {
        let s = q(num, den);
        let p = AxisPoint::parse(&format!("s={}", format_rational(&s))).unwrap();
        prop_assert_eq!(p.x(), Rational::from(&s * &s));
    }
}
