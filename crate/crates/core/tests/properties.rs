use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use qgt_core::branching::link_row;
use qgt_core::characters::{character_poly, is_weyl_invariant, qdimension, qdimension_product};
use qgt_core::coherent::{fourier_coefficients, OmegaParams};
use qgt_core::{BaseParam, LaurentPoly, Signature, TypeLabel};

const NVARS: usize = 2;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn poly() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec(((-3i32..=3, -3i32..=3), -5i64..=5), 0..5).prop_map(|terms| {
        LaurentPoly::from_terms(
            NVARS,
            terms.into_iter().map(|((a, b), c)| (vec![a, b], rat(c, 1))),
        )
        .unwrap()
    })
}

fn point() -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec((1i64..=7, 1i64..=7), NVARS)
        .prop_map(|v| v.into_iter().map(|(n, d)| rat(n, d)).collect())
}

fn signature(max_rank: usize, max_part: i64) -> impl Strategy<Value = Signature> {
    prop::collection::vec(0..=max_part, 1..=max_rank).prop_map(|mut v| {
        v.sort_unstable_by(|a, b| b.cmp(a));
        Signature::new(v).unwrap()
    })
}

fn bcd() -> impl Strategy<Value = TypeLabel> {
    prop_oneof![Just(TypeLabel::B), Just(TypeLabel::C), Just(TypeLabel::D)]
}

fn base() -> impl Strategy<Value = BaseParam> {
    prop_oneof![Just("1/2"), Just("4/5"), Just("2/3"), Just("1")].prop_map(|s| BaseParam::parse(s).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &LaurentPoly::one(NVARS), a.clone());
    }

    #[test]
    fn division_inverts_multiplication(a in poly(), b in poly()) {
        prop_assume!(!b.is_zero());
        prop_assert_eq!((&a * &b).exact_div(&b).unwrap(), a);
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in poly(), b in poly(), x in point()) {
        let va = a.evaluate(&x).unwrap();
        let vb = b.evaluate(&x).unwrap();
        prop_assert_eq!((&a * &b).evaluate(&x).unwrap(), &va * &vb);
        prop_assert_eq!((&a + &b).evaluate(&x).unwrap(), va + vb);
    }

    #[test]
    fn substitution_commutes_with_evaluation(a in poly(), x in point()) {
        let sub = a.substitute_last(&x[NVARS - 1]).unwrap();
        prop_assert_eq!(sub.evaluate(&x[..NVARS - 1]).unwrap(), a.evaluate(&x).unwrap());
    }

    #[test]
    fn characters_are_weyl_invariant(ty in bcd(), s in signature(3, 3)) {
        let chi = character_poly(ty, s.parts()).unwrap();
        prop_assert!(is_weyl_invariant(ty, &chi));
        prop_assert!(chi.terms().all(|(_, c)| *c > BigRational::zero()));
    }

    #[test]
    fn product_formula_matches_evaluation(ty in bcd(), s in signature(3, 4), p in base()) {
        prop_assert_eq!(
            qdimension_product(ty, s.parts(), &p).unwrap(),
            qdimension(ty, s.parts(), &p).unwrap()
        );
    }

    #[test]
    fn links_are_stochastic(ty in bcd(), s in signature(3, 4), p in base()) {
        let row = link_row(ty, &s, &p).unwrap();
        prop_assert_eq!(row.sum(), BigRational::one());
        prop_assert!(row.entries.values().all(|w| *w > BigRational::zero()));
        for mu in row.entries.keys() {
            prop_assert!(mu.parts().iter().zip(s.parts()).all(|(m, l)| m <= l));
        }
    }

    #[test]
    fn fourier_coefficients_are_symmetric(gamma in 0.0f64..2.0, beta in 0.0f64..1.0, alpha in 0.0f64..0.5) {
        let omega = OmegaParams::new(vec![alpha], vec![beta], gamma).unwrap();
        let psi = fourier_coefficients(&omega, 20, 1e-15).unwrap();
        for m in 0..=20 {
            prop_assert!((psi.get(m).unwrap() - psi.get(-m).unwrap()).abs() < 1e-15);
            prop_assert!(psi.get(m).unwrap() >= -1e-15);
        }
    }
}
