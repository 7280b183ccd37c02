use std::collections::BTreeMap;

use lagcob::cochains::{
    chi, chi_bot, chi_si, compose, generators_bottlenecked, generators_immersed, random_cobordism, random_end,
    BaseGrading, BottleneckedCobordism, CochainError, Context, Exclusion, Generator, GeneratorSet, ImmersedModel,
    Role,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn degrees(gs: &GeneratorSet) -> BTreeMap<String, i64> {
    gs.active().map(|g| (g.label.clone(), g.degree)).collect()
}

fn table(entries: &[(&str, i64)]) -> BTreeMap<String, i64> {
    entries.iter().map(|(l, d)| (l.to_string(), *d)).collect()
}

fn sign(d: i64) -> i64 {
    if d.rem_euclid(2) == 0 { 1 } else { -1 }
}

#[test]
fn whitney_generators() {
    for n in 1..=5usize {
        let gs = generators_immersed(&ImmersedModel::Whitney { n, r: 1.0 }).unwrap();
        let n = n as i64;
        assert_eq!(degrees(&gs), table(&[("e", 0), ("x", n), ("(q-->q+)", -1), ("(q+->q-)", n + 1)]));
        assert_eq!(chi(&gs), 0);
    }
}

#[test]
fn circle_generators() {
    let gs = generators_immersed(&ImmersedModel::Circle { e: 1.0 }).unwrap();
    assert_eq!(degrees(&gs), table(&[("e", 0), ("x", 1)]));
    assert_eq!(chi(&gs), 0);
}

#[test]
fn figure_eight_generators() {
    let gs = generators_immersed(&ImmersedModel::FigureEight { e: 1.0 }).unwrap();
    assert_eq!(degrees(&gs), table(&[("e", 0), ("x", 1), ("(0->pi)", 1), ("(pi->0)", 0)]));
    assert_eq!(chi(&gs), 0);
}

#[test]
fn local_slices() {
    for n in 1..=5usize {
        for k in 0..=n {
            let (ki, ni) = (k as i64, n as i64);
            let plus = generators_immersed(&ImmersedModel::LocalPositive { k, n }).unwrap();
            assert_eq!(degrees(&plus), table(&[("(q+->q-)", ki + 1), ("(q-->q+)", ni - ki - 1)]));
            let minus = generators_immersed(&ImmersedModel::LocalNegative { k, n }).unwrap();
            assert_eq!(degrees(&minus), table(&[("x+", ki + 1), ("x-", ni - ki - 1)]));
            let mut a = plus.degrees();
            let mut b = minus.degrees();
            a.sort();
            b.sort();
            assert_eq!(a, b, "k={k} n={n}");
        }
    }
}

#[test]
fn local_slice_euler_characteristics() {
    let plus = generators_immersed(&ImmersedModel::LocalPositive { k: 0, n: 2 }).unwrap();
    let minus = generators_immersed(&ImmersedModel::LocalNegative { k: 0, n: 2 }).unwrap();
    assert_eq!((chi_si(&plus), chi_si(&minus)), (-2, -2));
}

#[test]
fn empty_set_has_zero_euler_characteristic() {
    let gs = GeneratorSet::new("empty", Context::ImmersedLagrangian, vec![]).unwrap();
    assert_eq!((chi(&gs), chi_si(&gs), chi_bot(&gs)), (0, 0, 0));
}

#[test]
fn handle_generator_table() {
    for n in 1..=5usize {
        for k in 0..=n {
            let (ki, ni) = (k as i64, n as i64);
            let h = BottleneckedCobordism::handle(k, n, 1.0, 0.4).unwrap();
            let (a, b) = h.default_window;
            let gs = generators_bottlenecked(&h, a, b).unwrap();
            let expected = table(&[
                ("x+", ki + 1),
                ("(q+,1)->(q-,1)", ki + 1),
                ("(q+,0)->(q-,0)", ki + 2),
                ("x-", ni - ki - 1),
                ("(q-,0)->(q+,0)", ni - ki - 1),
                ("y", ni - ki),
            ]);
            assert_eq!(degrees(&gs), expected, "k={k} n={n}");
        }
    }
}

#[test]
fn k02_table() {
    let h = BottleneckedCobordism::handle(0, 1, 1.0, 0.4).unwrap();
    let gs = generators_bottlenecked(&h, h.default_window.0, h.default_window.1).unwrap();
    let expected = table(&[
        ("x+", 1),
        ("(q+,1)->(q-,1)", 1),
        ("(q+,0)->(q-,0)", 2),
        ("x-", 0),
        ("(q-,0)->(q+,0)", 0),
        ("y", 1),
    ]);
    assert_eq!(degrees(&gs), expected);
}

#[test]
fn handle_euler_characteristics_agree() {
    for n in 1..=5usize {
        for k in 0..=n {
            let h = BottleneckedCobordism::handle(k, n, 1.0, 0.4).unwrap();
            let gs = generators_bottlenecked(&h, h.default_window.0, h.default_window.1).unwrap();
            let closed = sign(k as i64 + 1) + sign(n as i64 - k as i64 + 1);
            assert_eq!(chi_bot(&gs), closed, "k={k} n={n}");
            assert_eq!(h.plus.chi_si(), closed);
            assert_eq!(h.minus.chi_si(), closed);
        }
    }
}

#[test]
fn window_must_contain_critical_values() {
    let h = BottleneckedCobordism::handle(0, 2, 1.0, 0.4).unwrap();
    let tc = h.critical_values[0];
    assert!(matches!(generators_bottlenecked(&h, tc + 0.1, tc + 1.0), Err(CochainError::Window { .. })));
    assert!(matches!(generators_bottlenecked(&h, 0.5, 0.5), Err(CochainError::Window { .. })));
}

#[test]
fn double_point_degrees_sum_to_dimension() {
    for model in [
        ImmersedModel::Whitney { n: 3, r: 1.0 },
        ImmersedModel::FigureEight { e: 1.0 },
        ImmersedModel::LocalPositive { k: 1, n: 4 },
    ] {
        let l = model.end_lagrangian().unwrap();
        let gs = l.generator_set();
        for dp in &l.double_points {
            let s = gs.degree(&dp.forward_label()).unwrap() + gs.degree(&dp.backward_label()).unwrap();
            assert_eq!(s, l.n as i64);
        }
    }
}

#[test]
fn excluded_copies_sit_one_degree_above_their_partner() {
    for n in 1..=4usize {
        for k in 0..=n {
            let h = BottleneckedCobordism::handle(k, n, 1.0, 0.4).unwrap();
            let gs = generators_bottlenecked(&h, h.default_window.0, h.default_window.1).unwrap();
            let excluded: Vec<&Generator> = gs.generators.iter().filter(|g| g.excluded == Some(Exclusion::Window)).collect();
            assert_eq!(excluded.len(), 1);
            for g in excluded {
                assert_eq!(g.base_grading, Some(BaseGrading::Min));
                let key = g.label.replace(",1)", ",0)");
                let partner = gs.get(&key).unwrap();
                assert_eq!(partner.base_grading, Some(BaseGrading::Max));
                assert_eq!(g.degree, partner.degree + 1, "{}", g.label);
            }
        }
    }
}

#[test]
fn discard_sets_a_generator_aside() {
    let h = BottleneckedCobordism::handle(0, 2, 1.0, 0.4).unwrap();
    let gs = generators_bottlenecked(&h, h.default_window.0, h.default_window.1).unwrap();
    let before = chi_bot(&gs);
    let gs = gs.discard("y").unwrap();
    assert_eq!(gs.get("y").unwrap().excluded, Some(Exclusion::Discarded));
    assert_eq!(chi_bot(&gs), before - sign(2));
    assert!(matches!(gs.discard("nope"), Err(CochainError::UnknownGenerator(_))));
}

#[test]
fn duplicate_labels_are_rejected() {
    let gens = vec![Generator::morse("a", 0), Generator::morse("a", 1)];
    assert!(matches!(GeneratorSet::new("dup", Context::ImmersedLagrangian, gens), Err(CochainError::DuplicateLabel(_))));
}

#[test]
fn unregistered_models_are_rejected() {
    assert!(matches!(ImmersedModel::from_name("torus", &BTreeMap::new()), Err(CochainError::Unregistered(_))));
    let p = BTreeMap::from([("k".to_string(), 3.0), ("n".to_string(), 2.0)]);
    assert!(ImmersedModel::from_name("local-negative", &p).unwrap().end_lagrangian().is_err());
}

#[test]
fn identity_composition_preserves_chi_bot() {
    for model in [ImmersedModel::Whitney { n: 2, r: 1.0 }, ImmersedModel::LocalPositive { k: 0, n: 2 }] {
        let h = BottleneckedCobordism::handle(0, 2, 1.0, 0.4).unwrap();
        let h_gs = generators_bottlenecked(&h, h.default_window.0, h.default_window.1).unwrap();
        let end = model.end_lagrangian().unwrap();
        let id = BottleneckedCobordism::identity(&end);
        let id_gs = generators_bottlenecked(&id, -1.0, 1.0).unwrap();
        assert_eq!(chi_bot(&id_gs), chi_si(&end.generator_set()));
        if end == h.plus {
            let c = compose(&id_gs, &h_gs).unwrap();
            assert_eq!(chi_bot(&c), chi_bot(&h_gs));
        }
    }
}

#[test]
fn mismatched_ends_do_not_compose() {
    let h = BottleneckedCobordism::handle(0, 2, 1.0, 0.4).unwrap();
    let gs = generators_bottlenecked(&h, h.default_window.0, h.default_window.1).unwrap();
    assert!(matches!(compose(&gs, &gs), Err(CochainError::EndMismatch(_))));
}

#[test]
fn composition_relabels_only_the_interior() {
    let end = ImmersedModel::Whitney { n: 2, r: 1.0 }.end_lagrangian().unwrap();
    let id = BottleneckedCobordism::identity(&end);
    let gs = generators_bottlenecked(&id, -1.0, 1.0).unwrap();
    let c = compose(&gs, &gs).unwrap();
    assert!(c.generators.iter().filter(|g| g.role == Role::EndPlus).all(|g| !g.label.contains('/')));
    assert!(c.generators.iter().filter(|g| g.role == Role::EndMinus).all(|g| !g.label.contains('/')));
    assert!(c.generators.iter().filter(|g| g.role == Role::Interior).all(|g| g.label.contains('/')));
}

proptest! {
    #[test]
    fn chi_bot_composes(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 1 + (seed % 4) as usize;
        let ends: Vec<_> = (0..3).map(|j| random_end(&format!("L{j}"), n, &mut rng)).collect();
        let k1 = random_cobordism("K1", &ends[0], &ends[1], &mut rng);
        let k2 = random_cobordism("K2", &ends[1], &ends[2], &mut rng);
        let g1 = generators_bottlenecked(&k1, -1.0, 1.0).unwrap();
        let g2 = generators_bottlenecked(&k2, -1.0, 1.0).unwrap();
        let c = compose(&g1, &g2).unwrap();
        prop_assert_eq!(chi_bot(&c), chi_bot(&g1) + chi_bot(&g2) - ends[1].chi_si());
    }

    #[test]
    fn random_ends_have_dual_double_points(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = random_end("L", n, &mut rng);
        let gs = l.generator_set();
        for dp in &l.double_points {
            prop_assert_eq!(gs.degree(&dp.forward_label()).unwrap() + gs.degree(&dp.backward_label()).unwrap(), n as i64);
        }
    }
}
