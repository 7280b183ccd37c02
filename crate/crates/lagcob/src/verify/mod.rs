//! Numerical oracles: the Lagrangian condition, slices, critical points, double points and areas.

pub mod area;
pub mod critical;
pub mod intersections;
pub mod quad;
pub mod sampling;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::geom::{ChartPoint, HomotopyWithPrimitive, Immersion};

pub use area::{
    hofer_norm, make_teardrop, shadow_area, strip_area, truncation_hofer, verify_teardrop, ShadowMethod, ShadowReport,
    Teardrop, TruncationHofer,
};
pub use critical::{critical_points, critical_points_from, CriticalPoint};
pub use intersections::{find_self_intersections, find_slice_double_points, slice, SelfIntersection, SliceResult};

/// Central finite-difference step.
pub const FD_STEP: f64 = 1e-5;
pub const NEWTON_TOL: f64 = 1e-10;
pub const NEWTON_MAX_ITER: usize = 50;
pub const DEDUP_RADIUS: f64 = 1e-6;
pub const DEGENERATE_EIGEN: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("evaluation failed at chart {chart}, point {point:?}")]
    Evaluation { chart: usize, point: Vec<f64> },
    #[error("t = {t} is within {tol:e} of the critical value {critical}")]
    Regularity { t: f64, critical: f64, tol: f64 },
    #[error("{0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum JacobianMode {
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone, Serialize)]
pub struct LagrangianReport {
    pub max_residual: f64,
    pub worst_point: Option<ChartPoint>,
    pub samples: usize,
    pub mode: JacobianMode,
    pub tol: f64,
    pub passed: bool,
}

/// ω(a, b) = Σ a_q b_p − a_p b_q for interleaved (q, p) rows.
pub fn omega(a: &[f64], b: &[f64]) -> f64 {
    a.chunks(2).zip(b.chunks(2)).map(|(x, y)| x[0] * y[1] - x[1] * y[0]).sum()
}

/// Norm of the pulled-back 2-form, Σ_{i<j} ω(∂ᵢ, ∂ⱼ)² under the root.
pub fn pullback_residual(jac: &DMatrix<f64>) -> f64 {
    let d = jac.ncols();
    let cols: Vec<Vec<f64>> = (0..d).map(|j| jac.column(j).iter().copied().collect()).collect();
    let mut s = 0.0;
    for i in 0..d {
        for j in i + 1..d {
            let w = omega(&cols[i], &cols[j]);
            s += w * w;
        }
    }
    s.sqrt()
}

/// Max over quasi-random samples of the pulled-back symplectic form.
pub fn check_lagrangian(
    imm: &Immersion,
    n_samples: usize,
    tol: f64,
    mode: JacobianMode,
    seed: u64,
) -> Result<LagrangianReport, VerifyError> {
    let pts = sampling::sample_charts(&imm.charts(), n_samples, seed);
    let res: Vec<(f64, &ChartPoint)> = pts
        .par_iter()
        .map(|p| {
            let jac = match mode {
                JacobianMode::Analytic => imm.jacobian(p.chart, &p.u),
                JacobianMode::FiniteDifference => imm.jacobian_fd(p.chart, &p.u, FD_STEP),
            };
            (pullback_residual(&jac), p)
        })
        .collect();
    let mut worst: Option<(f64, &ChartPoint)> = None;
    for (r, p) in res {
        if !r.is_finite() {
            return Err(VerifyError::Evaluation { chart: p.chart, point: p.u.clone() });
        }
        if worst.is_none_or(|(w, _)| r > w) {
            worst = Some((r, p));
        }
    }
    let max_residual = worst.map_or(0.0, |w| w.0);
    Ok(LagrangianReport {
        max_residual,
        worst_point: worst.map(|w| w.1.clone()),
        samples: pts.len(),
        mode,
        tol,
        passed: max_residual < tol,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PrimitiveReport {
    pub max_residual: f64,
    pub samples: usize,
}

/// Max over samples of |ω(∂_j i_t, ∂_t i_t) − ∂_j H_t|, all derivatives by central differences.
pub fn check_primitive(h: &HomotopyWithPrimitive, n_samples: usize, seed: u64) -> PrimitiveReport {
    let pts = sampling::sample_charts(&h.map.charts(), n_samples, seed);
    let n = h.ambient.n_complex;
    let worst = pts
        .par_iter()
        .map(|p| {
            let jac = crate::geom::smooth::jacobian_fd(&*h.map, p.chart, &p.u, FD_STEP);
            let d = p.u.len() - 1;
            let col = |j: usize| -> Vec<f64> { (0..2 * n).map(|r| jac[(r, j)]).collect() };
            let dt = col(d);
            (0..d).map(|j| (omega(&col(j), &dt) - jac[(2 * n, j)]).abs()).fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    PrimitiveReport { max_residual: worst, samples: pts.len() }
}
