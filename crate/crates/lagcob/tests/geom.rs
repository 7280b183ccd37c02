use std::f64::consts::PI;

use lagcob::geom::cobordism::{constant_homotopy, translated_circle, TranslatedCircle, TruncationProfile};
use lagcob::geom::models::{make_local_slice, make_nonclosed_graph, make_product_torus, shear};
use lagcob::geom::{
    make_bottlenecked_handle, make_double_bottleneck, make_figure_eight, make_generalized_suspension,
    make_local_surgery_trace, make_null_cobordism, make_section, make_sheared_torus, make_suspension,
    make_whitney_sphere, truncate, whitney_area, whitney_radius, AmbientSpace, DoubleBottleneckSpec, ExactGraphs,
    GeomError, Immersion, ScalarField, SmoothMap, C64,
};
use lagcob::verify::{self, check_lagrangian, critical_points, find_self_intersections, JacobianMode, ShadowMethod};
use std::sync::Arc;

fn close(a: &[C64], b: &[C64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn at(imm: &Immersion, x: &[f64]) -> Vec<C64> {
    imm.eval_domain(x).unwrap_or_else(|| panic!("{x:?} outside the domain of {}", imm.label))
}

#[test]
fn whitney_double_point_at_poles() {
    let w = make_whitney_sphere(2, 1.0).unwrap();
    let zero = vec![c(0.0, 0.0); 2];
    assert!(close(&at(&w, &[1.0, 0.0, 0.0]), &zero, 1e-12));
    assert!(close(&at(&w, &[-1.0, 0.0, 0.0]), &zero, 1e-12));
}

#[test]
fn whitney_circle_point() {
    let w = make_whitney_sphere(1, 1.0).unwrap();
    assert!(close(&at(&w, &[0.0, 1.0]), &[c(1.0, 0.0)], 1e-12));
}

#[test]
fn whitney_area_radius_inverse() {
    for r in [0.3, 1.0, 2.2] {
        assert!((whitney_area(r) - 4.0 / 3.0 * r.powi(3)).abs() < 1e-12);
        assert!((whitney_radius(whitney_area(r)) - r).abs() < 1e-12);
    }
}

#[test]
fn whitney_rejects_bad_parameters() {
    assert!(make_whitney_sphere(0, 1.0).is_err());
    assert!(make_whitney_sphere(2, -1.0).is_err());
}

#[test]
fn null_cobordism_values() {
    let k = make_null_cobordism(1).unwrap();
    assert!(close(&at(&k, &[0.0, 0.0]), &[c(0.0, 0.0), c(0.0, 0.0)], 1e-12));
    let v = at(&k, &[1.0, 0.0]);
    assert!(close(&v, &[c(0.0, 0.0), c(1.0, -1.0)], 1e-12), "{v:?}");
}

#[test]
fn null_cobordism_negative_slice_is_empty() {
    let k = make_null_cobordism(1).unwrap();
    let s = verify::slice(&k, -0.5, 2000, 1, Some(&[0.0])).unwrap();
    assert!(s.points.is_empty());
}

#[test]
fn local_trace_origin_and_pair() {
    for (k, n) in [(0, 1), (1, 2), (2, 4)] {
        let t = make_local_surgery_trace(k, n).unwrap();
        let v = at(&t, &vec![0.0; n + 1]);
        assert!(v.iter().all(|z| z.norm() < 1e-12), "k={k} n={n}: {v:?}");
    }
    let t = make_local_surgery_trace(0, 1).unwrap();
    let (a, b) = (at(&t, &[1.0, 0.0]), at(&t, &[-1.0, 0.0]));
    let slot = t.ambient.cobordism_slot.unwrap();
    let x = |v: &[C64]| -> Vec<C64> { v.iter().enumerate().filter(|(i, _)| *i != slot).map(|(_, z)| *z).collect() };
    assert!(close(&x(&a), &x(&b), 1e-12));
    assert!(!close(&a, &b, 1e-6));
}

#[test]
fn local_trace_rejects_k_above_n() {
    assert!(make_local_surgery_trace(3, 2).is_err());
}

#[test]
fn negative_local_slice_is_embedded() {
    let l = make_local_slice(1, 2, false).unwrap();
    assert!(!l.charts().is_empty());
    let si = find_self_intersections(&l, 10_000, 1e-3, 9);
    assert!(si.is_empty(), "{} double points", si.len());
}

#[test]
fn shear_matrix_value() {
    // (q₁, p₁, q₂, p₂) = (1, 0, 1, 0)
    assert_eq!(shear([1.0, 1.0], [0.0, 0.0]), [1.5, 0.0, 1.5, 0.0]);
}

#[test]
fn sheared_torus_critical_values() {
    let t = make_sheared_torus().unwrap();
    let mut cps = critical_points(&t, 256, 4);
    cps.sort_by(|a, b| a.value.total_cmp(&b.value));
    let values: Vec<f64> = cps.iter().map(|c| c.value).collect();
    assert_eq!(values.len(), 4, "{values:?}");
    for (v, want) in values.iter().zip([-1.5, -0.5, 0.5, 1.5]) {
        assert!((v - want).abs() < 1e-9, "{values:?}");
    }
    let mut idx: Vec<usize> = cps.iter().map(|c| c.upward_index.unwrap()).collect();
    idx.sort();
    assert_eq!(idx, vec![0, 1, 1, 2]);
}

#[test]
fn figure_eight_values() {
    let e = 1.3;
    let f = make_figure_eight(e).unwrap();
    let (a, b) = (f.eval_real(0, &[0.0]), f.eval_real(0, &[PI]));
    assert!(f.ambient.difference(&a, &b).iter().all(|d| d.abs() < 1e-12), "{a:?} {b:?}");
    assert!(close(&at(&f, &[PI / 2.0]), &[c(PI, e / 8.0)], 1e-12), "{:?}", at(&f, &[PI / 2.0]));
}

#[test]
fn section_heights() {
    let z = make_section(0.0).unwrap();
    for th in [0.0, 1.0, 4.0] {
        assert!(at(&z, &[th])[0].im.abs() < 1e-12);
    }
    let s = make_section(2.0 * PI).unwrap();
    for th in [0.0, 1.0, 4.0] {
        assert!((at(&s, &[th])[0].im - 1.0).abs() < 1e-12);
    }
}

#[test]
fn section_annulus_area() {
    for e in [0.5, 2.0] {
        let s = make_section(e).unwrap();
        let sh = verify::shadow_area(&s, ShadowMethod::BoundaryIntegral, 0, 0).unwrap();
        assert!((sh.total - e).abs() < 1e-9, "E'={e}: {:?}", sh.lobes);
    }
}

#[test]
fn constant_homotopy_suspension_is_product() {
    let w = make_whitney_sphere(1, 1.0).unwrap();
    let h = constant_homotopy(&w, 2.0);
    let s = make_suspension(&h);
    let r = check_lagrangian(&s, 2000, 1e-6, JacobianMode::Analytic, 1).unwrap();
    assert!(r.passed, "{}", r.max_residual);
    for t in [-1.0, 0.3] {
        let sl = h.slice_immersion(t);
        for th in [0.2, 1.7] {
            let a = sl.eval(0, &[th]);
            assert!(close(&a, &w.eval(0, &[th]), 1e-12));
        }
    }
}

#[test]
fn generalized_suspension_of_one_homotopy_is_ordinary() {
    let h = translated_circle(TranslatedCircle { r: 0.7, alpha: [0.3, -0.2], beta: [0.1, 0.4] });
    let rho: Vec<Arc<dyn SmoothMap>> = vec![Arc::new(ScalarField::coordinate(1, 0))];
    let gen = make_generalized_suspension(&[h.clone()], rho, 1).unwrap();
    let ord = make_suspension(&h);
    for (chart, u) in [(0, vec![0.4, 0.2]), (0, vec![2.0, -0.6])] {
        assert!(close(&gen.eval(chart, &u), &ord.eval(chart, &u), 1e-12));
    }
}

#[test]
fn generalized_suspension_two_circles_lagrangian() {
    let hs = vec![
        translated_circle(TranslatedCircle { r: 0.6, alpha: [0.2, 0.7], beta: [-0.5, 0.1] }),
        translated_circle(TranslatedCircle { r: 0.9, alpha: [-0.3, 0.4], beta: [0.6, -0.8] }),
    ];
    let rho: Vec<Arc<dyn SmoothMap>> =
        (0..2).map(|i| Arc::new(ScalarField::coordinate(2, i)) as Arc<dyn SmoothMap>).collect();
    let g = make_generalized_suspension(&hs, rho, 2).unwrap();
    let r = check_lagrangian(&g, 10_000, 1e-6, JacobianMode::Analytic, 3).unwrap();
    assert!(r.passed, "{}", r.max_residual);
}

#[test]
fn double_bottleneck_intersections_at_critical_points_of_rho() {
    // E large enough that ρ∇h never pushes the branches over θ = π/2 and 3π/2 together
    let eps = 1.0;
    let imm = make_double_bottleneck(&DoubleBottleneckSpec::new(ExactGraphs::figure_eight(4.0, 0.3).unwrap(), eps)).unwrap();
    let slot = imm.ambient.cobordism_slot.unwrap();
    let si = find_self_intersections(&imm, 4000, 1e-3, 5);
    assert!(!si.is_empty());
    for s in &si {
        let t = imm.eval(s.p.chart, &s.p.u)[slot].re;
        assert!((t.abs() - 1.0 / 3f64.sqrt()).abs() < 1e-6, "t = {t}");
    }
}

#[test]
fn bottlenecked_handle_low_dimensional_counts() {
    let h = make_bottlenecked_handle(0, 1, 1.0, 0.4).unwrap();
    let si = find_self_intersections(&h, 4000, 1e-3, 2);
    assert_eq!(si.len(), 4, "two geometric double points give four ordered pairs");
    assert_eq!(critical_points(&h, 256, 2).len(), 1);
}

#[test]
fn handle_rejects_nonpositive_areas() {
    assert!(make_bottlenecked_handle(0, 1, 0.0, 0.4).is_err());
    assert!(make_bottlenecked_handle(0, 1, 1.0, -1.0).is_err());
}

#[test]
fn truncating_a_product_keeps_the_product() {
    let w = make_whitney_sphere(1, 1.0).unwrap();
    let p = make_suspension(&constant_homotopy(&w, 3.0));
    let t = truncate(&p, -1.0, 1.0, TruncationProfile { epsilon: 0.2 }).unwrap();
    let slot = t.ambient.cobordism_slot.unwrap();
    for u in [vec![0.3, 0.5], vec![2.0, -0.5]] {
        let a = t.eval(0, &u);
        let b = p.eval(0, &u);
        let strip = |v: &[C64]| -> Vec<C64> { v.iter().enumerate().filter(|(i, _)| *i != slot).map(|(_, z)| *z).collect() };
        assert!(close(&strip(&a), &strip(&b), 1e-9));
    }
}

#[test]
fn truncation_rejects_narrow_windows() {
    let w = make_whitney_sphere(1, 1.0).unwrap();
    let p = make_suspension(&constant_homotopy(&w, 3.0));
    let r = truncate(&p, 0.0, 0.1, TruncationProfile { epsilon: 0.2 });
    assert!(matches!(r, Err(GeomError::Parameter(_))));
}

#[test]
fn ambient_space_validates_slot() {
    assert!(AmbientSpace::new(0, None).is_err());
    assert!(AmbientSpace::new(2, Some(2)).is_err());
    assert!(AmbientSpace::new(2, Some(1)).is_ok());
}

#[test]
fn analytic_jacobians_agree_with_finite_differences() {
    let models = [
        make_whitney_sphere(3, 1.2).unwrap(),
        make_local_surgery_trace(1, 3).unwrap(),
        make_sheared_torus().unwrap(),
        make_product_torus().unwrap(),
        make_figure_eight(0.8).unwrap(),
        make_bottlenecked_handle(1, 2, 1.0, 0.4).unwrap(),
    ];
    for m in &models {
        for p in verify::sampling::sample_charts(&m.charts(), 50, 8) {
            let a = m.jacobian(p.chart, &p.u);
            let f = m.jacobian_fd(p.chart, &p.u, 1e-5);
            let scale = 1.0 + a.norm();
            assert!((a - f).norm() / scale < 1e-6, "{}", m.label);
        }
    }
}

#[test]
fn nonclosed_graph_is_not_lagrangian() {
    let g = make_nonclosed_graph().unwrap();
    let r = check_lagrangian(&g, 1000, 1e-6, JacobianMode::Analytic, 0).unwrap();
    assert!(!r.passed);
    assert!((r.max_residual - 1.0).abs() < 0.5);
}

#[test]
fn product_torus_is_exactly_lagrangian() {
    let r = check_lagrangian(&make_product_torus().unwrap(), 10_000, 1e-12, JacobianMode::Analytic, 0).unwrap();
    assert!(r.passed, "{}", r.max_residual);
}
