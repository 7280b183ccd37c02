//! Areas by line integrals ∮p dq, Hofer norms, bottleneck strips and the Whitney teardrop.

use std::collections::HashSet;

use serde::Serialize;

use super::quad::{gauss, integrate, integrate_pieces};
use super::{sampling, VerifyError};
use crate::geom::smooth::wrap;
use crate::geom::{
    make_whitney_sphere, AreaLoop, Chart, ChartPoint, HomotopyWithPrimitive, Immersion, TruncationProfile, C64,
};

pub const QUAD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShadowMethod {
    BoundaryIntegral,
    MonteCarlo,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShadowReport {
    pub method: ShadowMethod,
    /// Enclosed area of each lobe.
    pub lobes: Vec<(String, f64)>,
    pub total: f64,
    pub warnings: Vec<String>,
}

/// ∮ p dq along a loop of the model, in its plane.
pub fn loop_area(imm: &Immersion, lp: &AreaLoop) -> Result<f64, VerifyError> {
    let period = imm.ambient.period(lp.coord);
    let mut total = 0.0;
    for seg in &lp.segments {
        let z = |s: f64| -> Result<C64, VerifyError> {
            let x = seg(s);
            imm.eval_domain(&x)
                .map(|v| v[lp.coord])
                .ok_or(VerifyError::Evaluation { chart: usize::MAX, point: x })
        };
        // probe once so a failing segment surfaces as an error rather than NaN
        z(0.5)?;
        let h = 1e-3;
        let f = |s: f64| {
            let q = |d: f64| z(s + d).map(|c| c.re).unwrap_or(f64::NAN);
            let q0 = q(0.0);
            let dq = |d: f64| match period {
                Some(p) => wrap(q(d) - q0, p),
                None => q(d) - q0,
            };
            let der = if s < 2.0 * h {
                (-25.0 * dq(0.0) + 48.0 * dq(h) - 36.0 * dq(2.0 * h) + 16.0 * dq(3.0 * h) - 3.0 * dq(4.0 * h)) / (12.0 * h)
            } else if s > 1.0 - 2.0 * h {
                (25.0 * dq(0.0) - 48.0 * dq(-h) + 36.0 * dq(-2.0 * h) - 16.0 * dq(-3.0 * h) + 3.0 * dq(-4.0 * h)) / (12.0 * h)
            } else {
                (-dq(2.0 * h) + 8.0 * dq(h) - 8.0 * dq(-h) + dq(-2.0 * h)) / (12.0 * h)
            };
            z(s).map(|c| c.im).unwrap_or(f64::NAN) * der
        };
        total += integrate(&f, 0.0, 1.0, QUAD_TOL);
    }
    if !total.is_finite() {
        return Err(VerifyError::Evaluation { chart: usize::MAX, point: vec![] });
    }
    Ok(total)
}

/// Shadow of the model's projection: per-lobe enclosed areas and their sum.
pub fn shadow_area(
    imm: &Immersion,
    method: ShadowMethod,
    n_samples: usize,
    seed: u64,
) -> Result<ShadowReport, VerifyError> {
    match method {
        ShadowMethod::BoundaryIntegral => {
            let mut lobes = Vec::new();
            for lp in &imm.area_loops {
                lobes.push((lp.label.clone(), loop_area(imm, lp)?.abs()));
            }
            let total = lobes.iter().map(|l| l.1).sum();
            Ok(ShadowReport { method, lobes, total, warnings: Vec::new() })
        }
        ShadowMethod::MonteCarlo => {
            let mut warnings = Vec::new();
            if n_samples < 1000 {
                warnings.push(format!("only {n_samples} samples; shadow resolution is coarse"));
            }
            let coord = imm.ambient.cobordism_slot.or(imm.area_loops.first().map(|l| l.coord)).unwrap_or(0);
            let pts = sampling::sample_charts(&imm.charts(), n_samples, seed);
            let zs: Vec<C64> = pts.iter().map(|p| imm.eval(p.chart, &p.u)[coord]).collect();
            if zs.is_empty() {
                return Ok(ShadowReport { method, lobes: vec![], total: 0.0, warnings });
            }
            let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
            for z in &zs {
                x0 = x0.min(z.re);
                x1 = x1.max(z.re);
                y0 = y0.min(z.im);
                y1 = y1.max(z.im);
            }
            let g = ((zs.len() as f64).sqrt() / 2.0).max(1.0) as usize;
            let (dx, dy) = ((x1 - x0).max(1e-300) / g as f64, (y1 - y0).max(1e-300) / g as f64);
            let cells: HashSet<(usize, usize)> = zs
                .iter()
                .map(|z| ((((z.re - x0) / dx) as usize).min(g - 1), (((z.im - y0) / dy) as usize).min(g - 1)))
                .collect();
            let total = if y1 - y0 < 1e-12 || x1 - x0 < 1e-12 { 0.0 } else { cells.len() as f64 * dx * dy };
            Ok(ShadowReport { method, lobes: vec![("occupied cells".into(), total)], total, warnings })
        }
    }
}

/// Largest and smallest values of f over a chart: quasi-random samples, then compass search.
pub fn extremes<F: Fn(&[f64]) -> f64>(chart: &Chart, f: &F, n: usize, seed: u64) -> Option<(f64, f64)> {
    let pts = sampling::sample_charts(std::slice::from_ref(chart), n, seed);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut worst: Option<(f64, Vec<f64>)> = None;
    for p in pts {
        let v = f(&p.u);
        if !v.is_finite() {
            continue;
        }
        if best.as_ref().is_none_or(|b| v > b.0) {
            best = Some((v, p.u.clone()));
        }
        if worst.as_ref().is_none_or(|w| v < w.0) {
            worst = Some((v, p.u));
        }
    }
    let (b, w) = (best?, worst?);
    let hi = compass(chart, f, b.1, b.0, 1.0);
    let lo = -compass(chart, &|u: &[f64]| -f(u), w.1, -w.0, 1.0);
    Some((hi, lo))
}

fn compass<F: Fn(&[f64]) -> f64>(chart: &Chart, f: &F, mut x: Vec<f64>, mut fx: f64, _sign: f64) -> f64 {
    let widths: Vec<f64> = chart.lo.iter().zip(&chart.hi).map(|(a, b)| b - a).collect();
    let mut step = 0.05;
    while step > 1e-10 {
        let mut moved = false;
        for k in 0..x.len() {
            for dir in [1.0, -1.0] {
                let mut y = x.clone();
                y[k] += dir * step * widths[k];
                if !chart.accepts(&y) {
                    continue;
                }
                let fy = f(&y);
                if fy > fx {
                    x = y;
                    fx = fy;
                    moved = true;
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    fx
}

/// sup_q H_t − inf_q H_t over all slice charts.
fn oscillation(h: &HomotopyWithPrimitive, t: f64, n: usize, seed: u64) -> f64 {
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for (c, ch) in h.q_charts(t).iter().enumerate() {
        let f = |q: &[f64]| h.primitive(c, q, t);
        if let Some((a, b)) = extremes(ch, &f, n, seed) {
            hi = hi.max(a);
            lo = lo.min(b);
        }
    }
    if hi >= lo {
        hi - lo
    } else {
        0.0
    }
}

/// ∫ (sup_q H_t − inf_q H_t) dt over the homotopy's time range.
pub fn hofer_norm(h: &HomotopyWithPrimitive, resolution: usize, breaks: &[f64]) -> Result<f64, VerifyError> {
    let (a, b) = h.t_range;
    if !a.is_finite() || !b.is_finite() {
        return Err(VerifyError::Unsupported("Hofer norm needs a compact time range".into()));
    }
    let f = |t: f64| oscillation(h, t, resolution, 7);
    Ok(integrate_pieces(&f, a, b, breaks, 1e-7))
}

#[derive(Debug, Clone, Serialize)]
pub struct TruncationHofer {
    pub cut: f64,
    pub epsilon: f64,
    /// ∫ (sup G_s − inf G_s) ds for G_s = ∂_sρ · H_ρ.
    pub norm: f64,
    /// sup H − inf H over the window [cut − ε, cut + ε].
    pub osc_h: f64,
    pub bound: f64,
}

/// Hofer norm of the exact homotopy that flattens K around a cut, against 2ε(sup H − inf H).
pub fn truncation_hofer(
    h: &HomotopyWithPrimitive,
    cut: f64,
    profile: TruncationProfile,
    resolution: usize,
) -> Result<TruncationHofer, VerifyError> {
    let eps = profile.epsilon;
    if cut - eps <= h.t_range.0 || cut + eps >= h.t_range.1 {
        return Err(VerifyError::Unsupported(format!("window around {cut} leaves the homotopy's range")));
    }
    let charts = h.map.charts();
    let window = |c: &Chart| {
        let d = c.dim() - 1;
        let mut lo = c.lo.clone();
        let mut hi = c.hi.clone();
        lo[d] = cut - eps;
        hi[d] = cut + eps;
        let mut w = Chart::boxed(c.label.clone(), lo, hi);
        if let Some(a) = c.accept.clone() {
            w = w.with_accept(move |u: &[f64]| a(u));
        }
        w
    };
    let mut hmax = f64::NEG_INFINITY;
    let mut hmin = f64::INFINITY;
    for (ci, c) in charts.iter().enumerate() {
        let w = window(c);
        let f = |u: &[f64]| h.map.eval_f64(ci, u)[h.map.out_dim() - 1];
        if let Some((a, b)) = extremes(&w, &f, resolution, 11) {
            hmax = hmax.max(a);
            hmin = hmin.min(b);
        }
    }
    let osc_s = |s: f64| {
        let mut hi = f64::NEG_INFINITY;
        let mut lo = f64::INFINITY;
        for (ci, c) in charts.iter().enumerate() {
            let w = window(c);
            let g = |u: &[f64]| {
                let d = u.len() - 1;
                let du = u[d] - cut;
                let mut v = u.to_vec();
                v[d] = cut + profile.rho(du, s);
                if !c.accepts(&v) {
                    return f64::NAN;
                }
                profile.drho_ds(du, s) * h.map.eval_f64(ci, &v)[h.map.out_dim() - 1]
            };
            if let Some((a, b)) = extremes(&w, &g, resolution, 13) {
                hi = hi.max(a);
                lo = lo.min(b);
            }
        }
        if hi >= lo {
            hi - lo
        } else {
            0.0
        }
    };
    let norm = integrate(&osc_s, 0.0, 1.0, 1e-7);
    let osc_h = hmax - hmin;
    Ok(TruncationHofer { cut, epsilon: eps, norm, osc_h, bound: 2.0 * eps * osc_h })
}

/// |∫_{t0}^{t1} (H_t(q₁) − H_t(q₀)) dt| between two preimages of a bottleneck double point.
pub fn strip_area(h: &HomotopyWithPrimitive, p: &ChartPoint, q: &ChartPoint, t0: f64, t1: f64) -> f64 {
    let d = p.u.len() - 1;
    let f = |t: f64| h.primitive(q.chart, &q.u[..d], t) - h.primitive(p.chart, &p.u[..d], t);
    integrate(&f, t0, t1, 1e-12).abs()
}

/// The holomorphic teardrop z ↦ (p₁z, …, pₙz) on D = {a + 𝚥b | a ∈ [0, r], |b| ≤ 2a√(r² − a²)}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Teardrop {
    pub p: Vec<f64>,
    pub r: f64,
}

pub fn make_teardrop(p: &[f64], r: f64) -> Result<Teardrop, VerifyError> {
    let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 || !(r > 0.0) {
        return Err(VerifyError::Unsupported(format!("teardrop needs |p| = 1 and r > 0 (|p| = {norm})")));
    }
    Ok(Teardrop { p: p.to_vec(), r })
}

impl Teardrop {
    pub fn half_width(&self, a: f64) -> f64 {
        2.0 * a * (self.r * self.r - a * a).max(0.0).sqrt()
    }

    pub fn map(&self, a: f64, b: f64) -> Vec<C64> {
        let z = C64::new(a, b);
        self.p.iter().map(|x| z * *x).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TeardropReport {
    pub boundary_residual: f64,
    pub area: f64,
}

/// Distance of u(∂D) from the Whitney sphere, and ∫ u*ω.
pub fn verify_teardrop(td: &Teardrop, n_boundary: usize) -> TeardropReport {
    let n = td.p.len();
    let sphere = make_whitney_sphere(n, td.r).expect("valid sphere");
    let mut residual: f64 = 0.0;
    for i in 0..=n_boundary {
        let a = td.r * i as f64 / n_boundary as f64;
        for sign in [1.0, -1.0] {
            let w = td.map(a, sign * td.half_width(a));
            let re: Vec<f64> = w.iter().map(|c| c.re).collect();
            let im: Vec<f64> = w.iter().map(|c| c.im).collect();
            let rr: f64 = re.iter().map(|x| x * x).sum();
            let x0 = if rr > 0.0 {
                re.iter().zip(&im).map(|(x, y)| x * y).sum::<f64>() / (2.0 * rr)
            } else {
                sign * td.r
            };
            let mut x = vec![x0];
            x.extend_from_slice(&re);
            let len = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let x: Vec<f64> = x.iter().map(|v| v * td.r / len).collect();
            let img = sphere.eval_domain(&x).expect("sphere point");
            let d = img.iter().zip(&w).map(|(u, v)| (u - v).norm_sqr()).sum::<f64>().sqrt();
            residual = residual.max(d);
        }
    }
    let h = 1e-5;
    let density = |a: f64, b: f64| {
        let da: Vec<C64> = td.map(a + h, b).iter().zip(td.map(a - h, b)).map(|(x, y)| (x - y) / (2.0 * h)).collect();
        let db: Vec<C64> = td.map(a, b + h).iter().zip(td.map(a, b - h)).map(|(x, y)| (x - y) / (2.0 * h)).collect();
        da.iter().zip(&db).map(|(x, y)| x.re * y.im - x.im * y.re).sum::<f64>()
    };
    let outer = |a: f64| {
        let w = td.half_width(a);
        gauss(-w, w, |b| density(a, b))
    };
    let area = integrate(&outer, 0.0, td.r, 1e-11);
    TeardropReport { boundary_residual: residual, area }
}
