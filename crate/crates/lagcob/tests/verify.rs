use std::f64::consts::PI;

use lagcob::geom::cobordism::constant_homotopy;
use lagcob::geom::models::{make_nonclosed_graph, make_product_torus};
use lagcob::geom::{
    make_figure_eight, make_null_cobordism, make_section, make_sheared_torus, make_suspension, make_whitney_sphere,
    whitney_bottleneck_family, whitney_bottleneck_suspension,
};
use lagcob::verify::{
    check_lagrangian, critical_points, find_self_intersections, find_slice_double_points, hofer_norm, make_teardrop,
    shadow_area, slice, verify_teardrop, JacobianMode, ShadowMethod, VerifyError,
};

#[test]
fn product_torus_residual_is_machine_zero() {
    let r = check_lagrangian(&make_product_torus().unwrap(), 10_000, 1e-12, JacobianMode::Analytic, 1).unwrap();
    assert!(r.passed && r.samples == 10_000, "{}", r.max_residual);
}

#[test]
fn nonclosed_graph_fails_with_unit_residual() {
    let r = check_lagrangian(&make_nonclosed_graph().unwrap(), 1000, 1e-6, JacobianMode::Analytic, 1).unwrap();
    assert!(!r.passed);
    assert!((r.max_residual - 1.0).abs() < 1e-9, "{}", r.max_residual);
    assert!(r.worst_point.is_some());
}

#[test]
fn sheared_torus_passes_in_both_modes() {
    let t = make_sheared_torus().unwrap();
    for mode in [JacobianMode::Analytic, JacobianMode::FiniteDifference] {
        let r = check_lagrangian(&t, 5000, 1e-6, mode, 2).unwrap();
        assert!(r.passed, "{mode:?}: {}", r.max_residual);
    }
}

#[test]
fn null_cobordism_slice_is_the_whitney_sphere() {
    let k = make_null_cobordism(2).unwrap();
    let s = slice(&k, 1.0, 2000, 3, Some(&[0.0])).unwrap();
    assert!(s.points.len() >= 1000);
    for img in s.images.iter().take(1000) {
        // z_i = x_i(1 + 2𝚥x₀) on the unit sphere
        let (x1, x2) = (img[0][0], img[1][0]);
        let x0 = if x1.abs() > x2.abs() { img[0][1] / (2.0 * x1) } else { img[1][1] / (2.0 * x2) };
        assert!((x0 * x0 + x1 * x1 + x2 * x2 - 1.0).abs() < 1e-9, "{img:?}");
        assert!((img[0][1] - 2.0 * x0 * x1).abs() < 1e-9 && (img[1][1] - 2.0 * x0 * x2).abs() < 1e-9);
    }
}

#[test]
fn slice_below_the_cobordism_is_empty() {
    let k = make_null_cobordism(1).unwrap();
    let s = slice(&k, -3.0, 1000, 3, Some(&[0.0])).unwrap();
    assert!(s.points.is_empty() && s.color.is_empty());
}

#[test]
fn slice_at_a_critical_value_is_rejected() {
    let k = make_null_cobordism(1).unwrap();
    assert!(matches!(slice(&k, 0.0, 100, 3, Some(&[0.0])), Err(VerifyError::Regularity { .. })));
}

#[test]
fn slice_needs_a_cobordism_coordinate() {
    let w = make_whitney_sphere(2, 1.0).unwrap();
    assert!(matches!(slice(&w, 0.0, 100, 3, None), Err(VerifyError::Unsupported(_))));
}

#[test]
fn sheared_torus_slices() {
    let t = make_sheared_torus().unwrap();
    let crit = [-1.5, -0.5, 0.5, 1.5];
    for level in [-1.0, 0.0, 1.0] {
        let s = slice(&t, level, 2000, 4, Some(&crit)).unwrap();
        assert!(!s.points.is_empty(), "t={level}");
        assert_eq!(s.points.len(), s.color.len());
    }
    let dps = find_slice_double_points(&t, 0.0, 3000, 1e-3, 4).unwrap();
    assert!(!dps.is_empty());
}

#[test]
fn null_cobordism_critical_point() {
    let cps = critical_points(&make_null_cobordism(2).unwrap(), 256, 5);
    assert_eq!(cps.len(), 1);
    assert_eq!(cps[0].upward_index, Some(3));
    assert!(cps[0].hessian_eigenvalues.iter().all(|l| *l > 0.0));
    assert!(!cps[0].degenerate);
}

#[test]
fn local_trace_critical_points() {
    for (k, n) in [(0, 1), (1, 3), (4, 5)] {
        let cps = critical_points(&lagcob::geom::make_local_surgery_trace(k, n).unwrap(), 128, 6);
        assert_eq!(cps.len(), 1);
        assert_eq!(cps[0].upward_index, Some(k + 1));
        assert!(cps[0].domain_point.iter().all(|x| x.abs() < 1e-8));
    }
}

#[test]
fn sheared_torus_critical_values() {
    let mut v: Vec<f64> = critical_points(&make_sheared_torus().unwrap(), 256, 7).iter().map(|c| c.value).collect();
    v.sort_by(f64::total_cmp);
    assert_eq!(v.len(), 4);
    for (a, b) in v.iter().zip([-1.5, -0.5, 0.5, 1.5]) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn whitney_double_point() {
    let w = make_whitney_sphere(2, 1.0).unwrap();
    let si = find_self_intersections(&w, 3000, 1e-3, 8);
    assert_eq!(si.len(), 2);
    for s in &si {
        assert!((s.p_domain[0].abs() - 1.0).abs() < 1e-8 && (s.q_domain[0].abs() - 1.0).abs() < 1e-8);
        assert!(s.p_domain[0] * s.q_domain[0] < 0.0);
        assert!(s.image.iter().all(|z| z[0].abs() < 1e-8 && z[1].abs() < 1e-8));
    }
}

#[test]
fn section_is_embedded() {
    assert!(find_self_intersections(&make_section(1.0).unwrap(), 3000, 1e-3, 8).is_empty());
}

#[test]
fn figure_eight_double_point() {
    let si = find_self_intersections(&make_figure_eight(1.0).unwrap(), 3000, 1e-3, 8);
    assert_eq!(si.len(), 2);
    for s in &si {
        let mut th = [s.p_domain[0].rem_euclid(2.0 * PI), s.q_domain[0].rem_euclid(2.0 * PI)];
        th.sort_by(f64::total_cmp);
        let lo = th[0].min((th[0] - 2.0 * PI).abs());
        assert!(lo < 1e-8 && (th[1] - PI).abs() < 1e-8, "{th:?}");
    }
}

#[test]
fn whitney_shadow_area() {
    let sh = shadow_area(&make_whitney_sphere(2, 1.0).unwrap(), ShadowMethod::BoundaryIntegral, 0, 0).unwrap();
    assert!((sh.total - 8.0 / 3.0).abs() < 1e-6, "{:?}", sh.lobes);
    for (_, a) in &sh.lobes {
        assert!((a - 4.0 / 3.0).abs() < 1e-6);
    }
}

#[test]
fn monte_carlo_shadow_is_close() {
    let sh = shadow_area(&make_whitney_sphere(2, 1.0).unwrap(), ShadowMethod::MonteCarlo, 200_000, 0).unwrap();
    assert!((sh.total - 8.0 / 3.0).abs() < 0.5, "{}", sh.total);
    let coarse = shadow_area(&make_whitney_sphere(2, 1.0).unwrap(), ShadowMethod::MonteCarlo, 100, 0).unwrap();
    assert!(!coarse.warnings.is_empty());
}

#[test]
fn zero_section_suspension_has_no_shadow() {
    let z = make_section(0.0).unwrap();
    let p = make_suspension(&constant_homotopy(&z, 1.0));
    let sh = shadow_area(&p, ShadowMethod::MonteCarlo, 5000, 0).unwrap();
    assert!(sh.total.abs() < 1e-12);
}

#[test]
fn figure_eight_lobe_area() {
    for e in [0.5, 1.0, 4.0] {
        let sh = shadow_area(&make_figure_eight(e).unwrap(), ShadowMethod::BoundaryIntegral, 0, 0).unwrap();
        assert!((sh.total - e).abs() < 1e-6);
    }
}

#[test]
fn hofer_norm_of_constant_homotopy_vanishes() {
    let h = constant_homotopy(&make_whitney_sphere(1, 1.0).unwrap(), 1.0);
    assert!(hofer_norm(&h, 64, &[]).unwrap().abs() < 1e-12);
}

#[test]
fn hofer_norm_of_whitney_bottleneck_matches_its_shadow() {
    let h = whitney_bottleneck_family(1.0).unwrap();
    let norm = hofer_norm(&h, 200, &[0.0]).unwrap();
    let sh = shadow_area(&whitney_bottleneck_suspension(1.0).unwrap(), ShadowMethod::BoundaryIntegral, 0, 0).unwrap();
    assert!((norm - sh.total).abs() < 1e-4, "{norm} vs {}", sh.total);
}

#[test]
fn teardrop_boundary_and_area() {
    let td = make_teardrop(&[0.0, 1.0], 1.0).unwrap();
    let rep = verify_teardrop(&td, 512);
    assert!(rep.boundary_residual < 1e-8);
    assert!((rep.area - 4.0 / 3.0).abs() < 1e-6);
    assert!(td.map(0.0, 0.0).iter().all(|z| z.norm() == 0.0));
}

#[test]
fn teardrop_area_scales_cubically() {
    let p = [0.6, 0.8];
    let a1 = verify_teardrop(&make_teardrop(&p, 1.0).unwrap(), 256).area;
    let a2 = verify_teardrop(&make_teardrop(&p, 2.0).unwrap(), 256).area;
    assert!((a2 / a1 - 8.0).abs() < 1e-6);
}

#[test]
fn teardrop_rejects_off_equator_points() {
    assert!(make_teardrop(&[1.0, 1.0], 1.0).is_err());
    assert!(make_teardrop(&[1.0, 0.0], 0.0).is_err());
}
