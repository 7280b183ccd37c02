use std::collections::BTreeMap;

use lagcob::cochains::{Context, Generator, GeneratorSet};
use lagcob::novikov::{
    bareiss_rank, bounding_cochain_pushforward, build_complex, homotopy_data_check, int, mc_leading_order, nov_add,
    nov_mul, nov_truncate, nov_val, rational, solve_leading_deformation, Certificate, ExampleSpec, FilteredComplex,
    MCStatus, NovikovElement, NovikovError, DEFAULT_CUTOFF, KAB, Q,
};
use num_rational::BigRational;
use proptest::prelude::*;

const CUT: f64 = DEFAULT_CUTOFF;

fn t(e: f64) -> NovikovElement {
    NovikovElement::t(e, CUT)
}

fn q(n: i64, d: i64) -> Q {
    BigRational::new(n.into(), d.into())
}

#[test]
fn product_of_sum_and_monomial() {
    let lhs = &(&t(1.0) + &t(2.0)) * &t(0.5);
    assert_eq!(lhs, &t(1.5) + &t(2.5));
    assert_eq!(nov_mul(&nov_add(&t(1.0), &t(2.0)), &t(0.5)), lhs);
}

#[test]
fn like_terms_merge() {
    let a = &NovikovElement::monomial(0.3, int(2), CUT) - &t(0.3);
    assert_eq!(a, t(0.3));
    assert_eq!(nov_val(&a), 0.3);
}

#[test]
fn zero_has_infinite_valuation() {
    let z = NovikovElement::zero(CUT);
    assert!(z.is_zero());
    assert_eq!(z.val(), f64::INFINITY);
    assert!((&t(0.7) - &t(0.7)).is_zero());
}

#[test]
fn terms_are_sorted_merged_and_cut() {
    let a = NovikovElement::new(vec![(2.0, int(1)), (0.5, int(3)), (2.0, int(-1)), (7.0, int(4))], 5.0);
    assert_eq!(a.terms(), &[(0.5, int(3))]);
    assert!(a.dropped());
    assert_eq!(a.cutoff(), 5.0);
    let b = NovikovElement::new(vec![(1.0, int(0))], 5.0);
    assert!(b.is_zero() && !b.dropped());
}

#[test]
fn truncation_keeps_lower_terms() {
    let a = NovikovElement::new(vec![(0.5, int(1)), (1.5, int(2)), (3.0, int(-1))], CUT);
    let b = nov_truncate(&a, 1.5);
    assert_eq!(b.terms(), &[(0.5, int(1))]);
}

#[test]
fn exponents_within_tolerance_merge() {
    let a = NovikovElement::new(vec![(0.1 + 0.2, int(1)), (0.3, int(1))], CUT);
    assert_eq!(a.terms().len(), 1);
    assert_eq!(a.coefficient_near(0.3), int(2));
}

#[test]
fn exact_division() {
    let a = &(&t(1.0) + &t(2.0)) * &(&t(0.5) - &t(1.5));
    let d = &t(0.5) - &t(1.5);
    assert_eq!(a.div_exact(&d).unwrap(), &t(1.0) + &t(2.0));
    assert_eq!(t(1.0).div_exact(&t(2.0)).unwrap(), t(-1.0));
    assert!(t(1.0).div_exact(&NovikovElement::zero(CUT)).is_none());
}

#[test]
fn display_and_scale() {
    assert_eq!(format!("{}", NovikovElement::monomial(0.6, int(-1), CUT)), "-T^0.6");
    assert_eq!(t(1.0).scale(&q(3, 2)).terms(), &[(1.0, q(3, 2))]);
    assert_eq!(t(1.0).shift(0.25).val(), 1.25);
}

#[test]
fn rational_conversion_is_exact() {
    assert_eq!(rational(0.5), q(1, 2));
    assert_eq!(rational(0.1), rational(0.1));
    assert_eq!(rational(1.25) - rational(0.25), int(1));
}

#[test]
fn whitney_complex_is_acyclic() {
    for n in 2..=5 {
        let c = build_complex(&ExampleSpec::Whitney { n, a: 1.0 }, CUT).unwrap();
        assert!(!c.is_curved());
        assert!(c.d_squared_failures().is_empty());
        assert_eq!(c.arrows.len(), 2);
        assert!(c.homology().unwrap().values().all(|r| *r == 0));
    }
}

#[test]
fn figure_eight_homology_has_rank_four() {
    let c = build_complex(&ExampleSpec::FigureEight { e: 1.0 }, CUT).unwrap();
    let h = c.homology().unwrap();
    assert_eq!(h.get(&0), Some(&2));
    assert_eq!(h.get(&1), Some(&2));
}

#[test]
fn handle_complex_curvature_only_for_k_zero() {
    assert!(build_complex(&ExampleSpec::Handle { k: 0, n: 2, a: 1.0, b: 0.4 }, CUT).unwrap().is_curved());
    for k in 1..=2 {
        let c = build_complex(&ExampleSpec::Handle { k, n: 2, a: 1.0, b: 0.4 }, CUT).unwrap();
        assert!(!c.is_curved());
        assert!(c.d_squared_failures().is_empty());
    }
}

#[test]
fn curved_homology_is_an_error() {
    let c = build_complex(&ExampleSpec::Handle { k: 0, n: 1, a: 1.0, b: 0.4 }, CUT).unwrap();
    assert!(matches!(c.homology(), Err(NovikovError::Curved(_))));
}

#[test]
fn handle_unobstructed_when_b_below_a() {
    for n in 1..=3 {
        let mc = mc_leading_order(&build_complex(&ExampleSpec::Handle { k: 0, n, a: 1.0, b: 0.4 }, CUT).unwrap());
        assert_eq!(mc.status, MCStatus::UnobstructedAtLeadingOrder);
        assert_eq!(mc.leading_cochain.len(), 1);
        let (gen, coeff) = &mc.leading_cochain[0];
        assert_eq!(gen, "(q+,1)->(q-,1)");
        assert_eq!(coeff.val(), 1.0 - 0.4);
        assert_eq!(coeff.leading().unwrap().1, int(-1));
    }
}

#[test]
fn handle_obstructed_when_b_above_a() {
    let mc = mc_leading_order(&build_complex(&ExampleSpec::Handle { k: 0, n: 2, a: 0.4, b: 1.0 }, CUT).unwrap());
    assert_eq!(mc.status, MCStatus::Obstructed);
    assert!(matches!(mc.certificate, Certificate::NegativeExponent { .. }));
    assert!((mc.gap.unwrap() - 0.6).abs() < 1e-12);
}

#[test]
fn handle_at_equal_areas_is_obstructed() {
    let mc = mc_leading_order(&build_complex(&ExampleSpec::Handle { k: 0, n: 2, a: 0.7, b: 0.7 }, CUT).unwrap());
    assert!(!mc.is_unobstructed());
}

#[test]
fn antisurgery_verdicts() {
    let same = mc_leading_order(&build_complex(&ExampleSpec::AntisurgerySurgery { a_plus: 2.0, a_minus: 2.0 }, CUT).unwrap());
    assert!(same.is_unobstructed());
    assert_eq!(same.certificate, Certificate::ZeroCurvature);
    let diff = mc_leading_order(&build_complex(&ExampleSpec::AntisurgerySurgery { a_plus: 2.0, a_minus: 3.0 }, CUT).unwrap());
    assert!(!diff.is_unobstructed());
    assert!(matches!(diff.certificate, Certificate::NoSource { .. }));
}

#[test]
fn kab_bounding_cochain() {
    let k = KAB::new(4.0, 3.0, 1.0).unwrap();
    assert_eq!((k.a, k.b), (1.0, 0.5));
    let mc = mc_leading_order(&build_complex(&ExampleSpec::SurgeryTraceKab { e_a: 4.0, e_b: 3.0, e: 1.0 }, CUT).unwrap());
    assert!(mc.is_unobstructed());
    let r = bounding_cochain_pushforward(&k, &mc).unwrap();
    assert_eq!(r.exponent, 0.5);
    assert_eq!(r.expected, 1.5 - 1.0);
    assert!(r.exact_identity);
    assert_eq!(k.a_exact() - k.b_exact(), q(1, 2));
}

#[test]
fn kab_boundary_case_is_rejected() {
    let k = KAB::new(4.0, 2.0, 1.0).unwrap();
    let mc = mc_leading_order(&build_complex(&ExampleSpec::SurgeryTraceKab { e_a: 4.0, e_b: 2.0, e: 1.0 }, CUT).unwrap());
    assert!(matches!(bounding_cochain_pushforward(&k, &mc), Err(NovikovError::NonPositive { .. })));
}

#[test]
fn kab_rejects_nonpositive_areas() {
    assert!(KAB::new(1.0, 3.0, 1.0).is_err());
    assert!(KAB::new(4.0, 3.0, -1.0).is_err());
}

#[test]
fn leading_deformation_constraint() {
    let d = solve_leading_deformation(2.0, 0.5, 2.0, 1.0, 0.5).unwrap();
    assert_eq!(d.d0, 0.5);
    assert_eq!(d.expected_d0, 0.5);
    assert_eq!(d.a0, int(1));
    assert!(d.constraint_exact);
    assert!(matches!(solve_leading_deformation(2.0, 0.5, 2.0, 1.0, 0.9), Err(NovikovError::Constraint(_))));
}

#[test]
fn intersection_complex_cancels_at_leading_order() {
    let c = build_complex(&ExampleSpec::IntersectionLeSection { e: 2.0, e_prime: 0.5, a: 2.0, b: 1.0, c: 0.5 }, CUT).unwrap();
    let image = c.m1(&c.generator_chain("p"));
    assert_eq!(image.get("q"), Some(&t(2.0)), "{image:?}");
}

#[test]
fn homotopy_data() {
    let r = homotopy_data_check(4.0, 3.0, 1.0, CUT).unwrap();
    assert!(r.pass);
    assert_eq!(r.checks.len(), 4);
    for c in &r.checks {
        assert_eq!(c.pi_i_plus, lagcob::novikov::chain_add(&c.pi_i_plus, &BTreeMap::new()));
        assert!(c.pass, "{}", c.generator);
    }
}

fn tiny_complex() -> FilteredComplex {
    let gens = vec![Generator::morse("a", 0), Generator::morse("b", 1), Generator::morse("c", 1)];
    let gs = GeneratorSet::new("tiny", Context::ImmersedLagrangian, gens).unwrap();
    FilteredComplex::new("tiny", gs, CUT)
}

#[test]
fn arrow_checks() {
    let mut c = tiny_complex();
    assert!(matches!(c.add_arrow("b", "c", vec![t(1.0)]), Err(NovikovError::Degree { .. })));
    assert!(matches!(
        c.add_arrow("a", "b", vec![NovikovElement::new(vec![(-1.0, int(1))], CUT)]),
        Err(NovikovError::NegativeWeight { .. })
    ));
    assert!(matches!(c.add_arrow("a", "z", vec![t(1.0)]), Err(NovikovError::UnknownGenerator(_))));
    assert!(matches!(c.add_curvature("b", NovikovElement::one(CUT)), Err(NovikovError::CurvedAtZero(_))));
    c.add_arrow("a", "b", vec![t(1.0)]).unwrap();
    assert_eq!(c.homology().unwrap(), BTreeMap::from([(0, 0), (1, 1)]));
}

#[test]
fn bareiss_rank_over_the_novikov_field() {
    let m = vec![vec![t(1.0), t(2.0)], vec![t(0.5), t(1.5)]];
    assert_eq!(bareiss_rank(m), 1);
    let m = vec![vec![t(1.0), t(2.0)], vec![t(0.5), &t(1.5) + &t(3.0)]];
    assert_eq!(bareiss_rank(m), 2);
    assert_eq!(bareiss_rank(vec![vec![NovikovElement::zero(CUT)]]), 0);
}

fn element() -> impl Strategy<Value = NovikovElement> {
    prop::collection::vec((0u32..48, -6i64..=6), 0..5).prop_map(|v| {
        NovikovElement::new(v.into_iter().map(|(e, c)| (e as f64 / 8.0, int(c))).collect(), 30.0)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn addition_is_a_commutative_group(a in element(), b in element(), c in element()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a + &NovikovElement::zero(30.0), a.clone());
        prop_assert!((&a + &(-&a)).is_zero());
    }

    #[test]
    fn multiplication_is_commutative_associative_distributive(a in element(), b in element(), c in element()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &NovikovElement::one(30.0), a.clone());
    }

    #[test]
    fn valuation_is_multiplicative(a in element(), b in element()) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        prop_assert_eq!((&a * &b).val(), a.val() + b.val());
    }

    #[test]
    fn valuation_of_a_sum_is_at_least_the_minimum(a in element(), b in element()) {
        prop_assert!((&a + &b).val() >= a.val().min(b.val()));
    }

    #[test]
    fn canonical_form(a in element()) {
        let ts = a.terms();
        prop_assert!(ts.windows(2).all(|w| w[0].0 < w[1].0));
        prop_assert!(ts.iter().all(|(e, c)| *e < a.cutoff() && *c != int(0)));
    }

    #[test]
    fn handle_verdict_matches_areas(i in 1u32..40, j in 1u32..40) {
        let (a, b) = (i as f64 / 8.0, j as f64 / 8.0);
        let mc = mc_leading_order(&build_complex(&ExampleSpec::Handle { k: 0, n: 2, a, b }, CUT).unwrap());
        prop_assert_eq!(mc.is_unobstructed(), b < a);
    }

    #[test]
    fn flux_identity_is_exact(ea in 8u32..80, eb in 4u32..60, e in 1u32..20) {
        let (ea, eb, e) = (ea as f64 / 8.0, eb as f64 / 8.0, e as f64 / 8.0);
        prop_assume!(ea > eb && ea > 2.0 * e);
        let k = KAB::new(ea, eb, e).unwrap();
        prop_assert_eq!(k.a_exact() - k.b_exact(), k.flux_exact());
    }
}
