//! Critical points of the height π_ℝ by Newton iteration on its gradient.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use super::{sampling, DEDUP_RADIUS, DEGENERATE_EIGEN, NEWTON_MAX_ITER, NEWTON_TOL};
use crate::geom::smooth::{domain_distance, hessian};
use crate::geom::{ChartPoint, Immersion};

#[derive(Debug, Clone, Serialize)]
pub struct CriticalPoint {
    pub location: ChartPoint,
    pub domain_point: Vec<f64>,
    pub value: f64,
    /// Number of positive Hessian eigenvalues, or None when degenerate.
    pub upward_index: Option<usize>,
    pub hessian_eigenvalues: Vec<f64>,
    pub hessian_eigen_signs: Vec<i8>,
    pub gradient_norm: f64,
    pub degenerate: bool,
}

fn wrap_into_chart(imm: &Immersion, chart: usize, u: &mut [f64]) {
    let periods = imm.domain_periods();
    let ch = &imm.charts()[chart];
    for (k, x) in u.iter_mut().enumerate() {
        if let Some(Some(p)) = periods.get(k) {
            *x = ch.lo[k] + (*x - ch.lo[k]).rem_euclid(*p);
        }
    }
}

/// Newton on ∇h from one seed.
fn newton(imm: &Immersion, slot: usize, seed: &ChartPoint) -> Option<ChartPoint> {
    let map = imm.map();
    let mut u = seed.u.clone();
    let ch = imm.charts()[seed.chart].clone();
    for _ in 0..NEWTON_MAX_ITER {
        let (_, g, h) = hessian(&**map, seed.chart, &u, 2 * slot);
        let gv = DVector::from_vec(g);
        if gv.norm() < 1e-13 {
            break;
        }
        let step = h.lu().solve(&gv)?;
        for (x, s) in u.iter_mut().zip(step.iter()) {
            *x -= s;
        }
        wrap_into_chart(imm, seed.chart, &mut u);
        if !u.iter().all(|x| x.is_finite()) {
            return None;
        }
        if step.norm() < NEWTON_TOL {
            break;
        }
    }
    if !ch.accepts(&u) {
        return None;
    }
    Some(ChartPoint::new(seed.chart, u))
}

pub fn classify(imm: &Immersion, slot: usize, p: ChartPoint) -> CriticalPoint {
    let (value, g, h) = hessian(&**imm.map(), p.chart, &p.u, 2 * slot);
    let eig = SymmetricEigen::new(h).eigenvalues;
    let mut ev: Vec<f64> = eig.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    let degenerate = ev.iter().any(|l| l.abs() < DEGENERATE_EIGEN);
    let signs: Vec<i8> = ev.iter().map(|l| if l.abs() < DEGENERATE_EIGEN { 0 } else if *l > 0.0 { 1 } else { -1 }).collect();
    let up = ev.iter().filter(|l| **l > DEGENERATE_EIGEN).count();
    CriticalPoint {
        domain_point: imm.domain_point(&p),
        location: p,
        value,
        upward_index: (!degenerate).then_some(up),
        hessian_eigenvalues: ev,
        hessian_eigen_signs: signs,
        gradient_norm: g.iter().map(|x| x * x).sum::<f64>().sqrt(),
        degenerate,
    }
}

/// Critical points of π_ℝ found from quasi-random seeds plus `extra` seeds.
pub fn critical_points_from(imm: &Immersion, n_seeds: usize, extra: &[ChartPoint], seed: u64) -> Vec<CriticalPoint> {
    let Some(slot) = imm.ambient.cobordism_slot else {
        return Vec::new();
    };
    let mut seeds = sampling::sample_charts(&imm.charts(), n_seeds, seed);
    seeds.extend_from_slice(extra);
    let found: Vec<ChartPoint> = seeds.par_iter().filter_map(|s| newton(imm, slot, s)).collect();
    let periods = imm.domain_periods();
    let mut out: Vec<CriticalPoint> = Vec::new();
    for p in found {
        let cp = classify(imm, slot, p);
        if cp.gradient_norm >= 1e-8 {
            continue;
        }
        if out.iter().any(|q| domain_distance(&q.domain_point, &cp.domain_point, &periods) < DEDUP_RADIUS) {
            continue;
        }
        out.push(cp);
    }
    out.sort_by(|a, b| a.value.total_cmp(&b.value));
    out
}

pub fn critical_points(imm: &Immersion, n_seeds: usize, seed: u64) -> Vec<CriticalPoint> {
    critical_points_from(imm, n_seeds, &[], seed)
}

/// Hessian of π_ℝ at a point, for tests.
pub fn height_hessian(imm: &Immersion, p: &ChartPoint) -> Option<DMatrix<f64>> {
    let slot = imm.ambient.cobordism_slot?;
    Some(hessian(&**imm.map(), p.chart, &p.u, 2 * slot).2)
}
