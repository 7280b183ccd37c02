use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use lagcob::geom::C64;
use lagcob::grading::{
    det_squared_phase, figure_eight_path, handle_path, index_by_formula, index_by_winding, kahler_angles,
    self_intersection_index, transverse_angles, whitney_path, LagrangianFrame,
};
use proptest::prelude::*;

fn real_frame(n: usize) -> LagrangianFrame {
    LagrangianFrame::standard(n)
}

fn imaginary_frame(n: usize) -> LagrangianFrame {
    let basis = (0..n)
        .map(|i| (0..n).map(|j| if i == j { C64::new(0.0, 1.0) } else { C64::new(0.0, 0.0) }).collect())
        .collect();
    LagrangianFrame::new(basis).unwrap()
}

#[test]
fn standard_frame_has_zero_phase() {
    for n in 1..=4 {
        assert!(det_squared_phase(&real_frame(n)).abs() < 1e-12);
    }
}

#[test]
fn rotated_line_doubles_phase() {
    let f = LagrangianFrame::new(vec![vec![C64::from_polar(1.0, FRAC_PI_4)]]).unwrap();
    assert!((det_squared_phase(&f) - FRAC_PI_2).abs() < 1e-12);
    let g = LagrangianFrame::new(vec![vec![C64::from_polar(1.0, FRAC_PI_2)]]).unwrap();
    assert!((det_squared_phase(&g) - PI).abs() < 1e-12);
}

#[test]
fn non_lagrangian_frame_is_rejected() {
    let basis = vec![vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)], vec![C64::new(0.0, 1.0), C64::new(0.0, 0.0)]];
    assert!(LagrangianFrame::new(basis).is_err());
}

#[test]
fn transverse_real_and_imaginary_planes() {
    for n in 1..=4 {
        let (re, im) = (real_frame(n), imaginary_frame(n));
        let half = n as f64 / 2.0;
        let to_im = transverse_angles(&re, &im).unwrap();
        assert!(to_im.iter().all(|a| (a - FRAC_PI_2).abs() < 1e-12), "{to_im:?}");
        // ℝⁿ graded by 0 and 𝚥ℝⁿ by n/2
        let onto_im = self_intersection_index(n, half, 0.0, &to_im).unwrap();
        let onto_re = self_intersection_index(n, 0.0, half, &transverse_angles(&im, &re).unwrap()).unwrap();
        assert_eq!((onto_im, onto_re), (n as i64, 0));
    }
}

#[test]
fn non_transverse_planes_are_rejected() {
    assert!(transverse_angles(&real_frame(2), &real_frame(2)).is_err());
}

#[test]
fn non_integer_index_is_an_error() {
    assert!(self_intersection_index(2, 0.3, 0.0, &[FRAC_PI_2, FRAC_PI_2]).is_err());
}

#[test]
fn local_trace_indices() {
    for n in 1..=5usize {
        for k in 0..=n {
            let up = index_by_winding(&handle_path(k, n, "q-", "q+").unwrap()).unwrap();
            let down = index_by_winding(&handle_path(k, n, "q+", "q-").unwrap()).unwrap();
            assert_eq!(up, n as i64 - k as i64 - 1, "k={k} n={n}");
            assert_eq!(down, k as i64 + 1, "k={k} n={n}");
        }
    }
}

#[test]
fn formula_agrees_with_winding_on_local_traces() {
    for n in 1..=5usize {
        for k in 0..=n {
            for (a, b) in [("q-", "q+"), ("q+", "q-")] {
                let p = handle_path(k, n, a, b).unwrap();
                assert_eq!(index_by_formula(&p).unwrap(), index_by_winding(&p).unwrap());
            }
        }
    }
}

#[test]
fn whitney_sphere_indices() {
    for n in 2..=4usize {
        assert_eq!(index_by_winding(&whitney_path(n, 1.0, "q-", "q+").unwrap()).unwrap(), -1);
        assert_eq!(index_by_winding(&whitney_path(n, 1.0, "q+", "q-").unwrap()).unwrap(), n as i64 + 1);
    }
}

#[test]
fn figure_eight_indices() {
    assert_eq!(index_by_winding(&figure_eight_path(1.0, "pi", "0").unwrap()).unwrap(), 0);
    assert_eq!(index_by_winding(&figure_eight_path(1.0, "0", "pi").unwrap()).unwrap(), 1);
    assert_eq!(index_by_formula(&figure_eight_path(2.0, "0", "pi").unwrap()).unwrap(), 1);
}

#[test]
fn unknown_generator_is_an_error() {
    assert!(handle_path(0, 2, "q+", "q+").is_err());
    assert!(handle_path(0, 2, "a", "b").is_err());
}

fn invertible(n: usize, entries: &[f64]) -> Option<Vec<Vec<f64>>> {
    let m: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| entries[i * n + j] + if i == j { 3.0 } else { 0.0 }).collect()).collect();
    let mat = nalgebra::DMatrix::from_fn(n, n, |i, j| m[i][j]);
    (mat.determinant().abs() > 0.1).then_some(m)
}

proptest! {
    #[test]
    fn phase_invariant_under_real_basis_change(
        n in 1usize..=4,
        phases in prop::collection::vec(-3.0f64..3.0, 4),
        entries in prop::collection::vec(-1.0f64..1.0, 16),
    ) {
        let Some(g) = invertible(n, &entries) else { return Ok(()) };
        let basis: Vec<Vec<C64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { C64::from_polar(1.0, phases[i]) } else { C64::new(0.0, 0.0) }).collect())
            .collect();
        let f = LagrangianFrame::new(basis.clone()).unwrap();
        let mixed: Vec<Vec<C64>> = (0..n)
            .map(|i| (0..n).map(|c| (0..n).map(|j| basis[j][c] * g[j][i]).sum()).collect())
            .collect();
        let h = LagrangianFrame::new(mixed).unwrap();
        let d = (det_squared_phase(&f) - det_squared_phase(&h)).rem_euclid(2.0 * PI);
        prop_assert!(d.min(2.0 * PI - d) < 1e-10);
    }

    #[test]
    fn kahler_angles_of_a_frame_with_itself_vanish(n in 1usize..=4, phases in prop::collection::vec(-3.0f64..3.0, 4)) {
        let basis: Vec<Vec<C64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { C64::from_polar(1.0, phases[i]) } else { C64::new(0.0, 0.0) }).collect())
            .collect();
        let f = LagrangianFrame::new(basis).unwrap();
        let a = kahler_angles(&f, &f);
        prop_assert!(a.iter().all(|x| x.abs() < 1e-9 || (x - PI).abs() < 1e-9));
    }

    #[test]
    fn winding_invariant_under_reparameterization(n in 1usize..=5, k in 0usize..=5, power in 0.3f64..3.0) {
        prop_assume!(k <= n);
        for (a, b) in [("q-", "q+"), ("q+", "q-")] {
            let p = handle_path(k, n, a, b).unwrap();
            let r = p.reparameterized(move |s: f64| s.powf(power));
            prop_assert_eq!(index_by_winding(&r).unwrap(), index_by_winding(&p).unwrap());
        }
    }

    #[test]
    fn winding_invariant_under_positive_rescaling(n in 1usize..=5, k in 0usize..=5, amp in 0.1f64..0.9, freq in 0.5f64..4.0) {
        prop_assume!(k <= n);
        for (a, b) in [("q-", "q+"), ("q+", "q-")] {
            let p = handle_path(k, n, a, b).unwrap();
            let r = p.rescaled(move |i, s| 1.0 + amp * (freq * s + i as f64).sin());
            prop_assert_eq!(index_by_winding(&r).unwrap(), index_by_winding(&p).unwrap());
        }
    }

    #[test]
    fn orders_are_dual(n in 1usize..=5, k in 0usize..=5) {
        prop_assume!(k <= n);
        let up = index_by_winding(&handle_path(k, n, "q-", "q+").unwrap()).unwrap();
        let down = index_by_winding(&handle_path(k, n, "q+", "q-").unwrap()).unwrap();
        prop_assert_eq!(up + down, n as i64);
    }
}
