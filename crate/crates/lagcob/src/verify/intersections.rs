//! Double points by Newton on i(u) − i(v), and slices K|_t by Newton along height fibers.

use nalgebra::{DMatrix, DVector, SVD};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{critical, sampling, VerifyError, DEDUP_RADIUS, NEWTON_MAX_ITER, NEWTON_TOL};
use crate::geom::smooth::domain_distance;
use crate::geom::{ChartPoint, Immersion};

/// An ordered pair (p → q) of distinct domain points with the same image.
#[derive(Debug, Clone, Serialize)]
pub struct SelfIntersection {
    pub p: ChartPoint,
    pub q: ChartPoint,
    pub p_domain: Vec<f64>,
    pub q_domain: Vec<f64>,
    pub image: Vec<[f64; 2]>,
    pub residual: f64,
}

fn to_pairs(v: &[f64]) -> Vec<[f64; 2]> {
    v.chunks(2).map(|c| [c[0], c[1]]).collect()
}

fn wrap_into_chart(imm: &Immersion, p: &mut ChartPoint) {
    let periods = imm.domain_periods();
    let ch = &imm.charts()[p.chart];
    for (k, x) in p.u.iter_mut().enumerate() {
        if let Some(Some(per)) = periods.get(k) {
            *x = ch.lo[k] + (*x - ch.lo[k]).rem_euclid(*per);
        }
    }
}

/// Rows of the real image to compare, and a residual map on a pair.
struct PairSystem<'a> {
    imm: &'a Immersion,
    /// Height constraints at this level, for slices.
    level: Option<(usize, f64)>,
}

impl PairSystem<'_> {
    fn rows(&self) -> Vec<usize> {
        let n = self.imm.ambient.n_complex;
        (0..2 * n).filter(|r| self.level.is_none_or(|(s, _)| r / 2 != s)).collect()
    }

    fn residual(&self, p: &ChartPoint, q: &ChartPoint) -> Vec<f64> {
        let a = self.imm.eval_real(p.chart, &p.u);
        let b = self.imm.eval_real(q.chart, &q.u);
        let d = self.imm.ambient.difference(&a, &b);
        let mut f: Vec<f64> = self.rows().into_iter().map(|r| d[r]).collect();
        if let Some((s, t)) = self.level {
            f.push(a[2 * s] - t);
            f.push(b[2 * s] - t);
        }
        f
    }

    fn jacobian(&self, p: &ChartPoint, q: &ChartPoint) -> DMatrix<f64> {
        let ja = self.imm.jacobian(p.chart, &p.u);
        let jb = self.imm.jacobian(q.chart, &q.u);
        let (da, db) = (ja.ncols(), jb.ncols());
        let rows = self.rows();
        let extra = if self.level.is_some() { 2 } else { 0 };
        let mut j = DMatrix::zeros(rows.len() + extra, da + db);
        for (i, &r) in rows.iter().enumerate() {
            for c in 0..da {
                j[(i, c)] = ja[(r, c)];
            }
            for c in 0..db {
                j[(i, da + c)] = -jb[(r, c)];
            }
        }
        if let Some((s, _)) = self.level {
            let m = rows.len();
            for c in 0..da {
                j[(m, c)] = ja[(2 * s, c)];
            }
            for c in 0..db {
                j[(m + 1, da + c)] = jb[(2 * s, c)];
            }
        }
        j
    }

    fn solve(&self, p0: &ChartPoint, q0: &ChartPoint) -> Option<(ChartPoint, ChartPoint, f64)> {
        let mut p = p0.clone();
        let mut q = q0.clone();
        let da = p.u.len();
        for _ in 0..NEWTON_MAX_ITER {
            let f = DVector::from_vec(self.residual(&p, &q));
            if !f.iter().all(|x| x.is_finite()) {
                return None;
            }
            if f.norm() < 1e-13 {
                break;
            }
            let j = self.jacobian(&p, &q);
            if !j.iter().all(|x| x.is_finite()) {
                return None;
            }
            let step = SVD::try_new(j, true, true, f64::EPSILON, 500)?.solve(&f, 1e-13).ok()?;
            for k in 0..da {
                p.u[k] -= step[k];
            }
            for k in 0..q.u.len() {
                q.u[k] -= step[da + k];
            }
            wrap_into_chart(self.imm, &mut p);
            wrap_into_chart(self.imm, &mut q);
            if step.norm() < NEWTON_TOL {
                break;
            }
        }
        let res = DVector::from_vec(self.residual(&p, &q)).norm();
        let charts = self.imm.charts();
        if res < 1e-9 && charts[p.chart].accepts(&p.u) && charts[q.chart].accepts(&q.u) {
            Some((p, q, res))
        } else {
            None
        }
    }
}

fn collect(
    imm: &Immersion,
    sys: &PairSystem<'_>,
    seeds: Vec<(ChartPoint, ChartPoint)>,
    separation: f64,
) -> Vec<SelfIntersection> {
    let periods = imm.domain_periods();
    let solved: Vec<(ChartPoint, ChartPoint, f64)> = seeds.par_iter().filter_map(|(p, q)| sys.solve(p, q)).collect();
    let mut out: Vec<SelfIntersection> = Vec::new();
    for (p, q, residual) in solved {
        let pd = imm.domain_point(&p);
        let qd = imm.domain_point(&q);
        if domain_distance(&pd, &qd, &periods) < separation {
            continue;
        }
        let dup = out.iter().any(|s| {
            domain_distance(&s.p_domain, &pd, &periods) < DEDUP_RADIUS
                && domain_distance(&s.q_domain, &qd, &periods) < DEDUP_RADIUS
        });
        if dup {
            continue;
        }
        let image = to_pairs(&imm.eval_real(p.chart, &p.u));
        let rev = SelfIntersection {
            p: q.clone(),
            q: p.clone(),
            p_domain: qd.clone(),
            q_domain: pd.clone(),
            image: image.clone(),
            residual,
        };
        out.push(SelfIntersection { p, q, p_domain: pd, q_domain: qd, image, residual });
        out.push(rev);
    }
    out
}

/// For each point, the nearest other point in the image that is far in the domain.
fn nearest_pairs(
    imm: &Immersion,
    pts: &[ChartPoint],
    rows: &[usize],
    separation: f64,
) -> Vec<(ChartPoint, ChartPoint)> {
    let periods = imm.domain_periods();
    let imgs: Vec<Vec<f64>> = pts.iter().map(|p| imm.eval_real(p.chart, &p.u)).collect();
    let doms: Vec<Vec<f64>> = pts.iter().map(|p| imm.domain_point(p)).collect();
    (0..pts.len())
        .into_par_iter()
        .filter_map(|i| {
            let mut best: Option<(f64, usize)> = None;
            for j in 0..pts.len() {
                if i == j || domain_distance(&doms[i], &doms[j], &periods) < separation {
                    continue;
                }
                let d = imm.ambient.difference(&imgs[i], &imgs[j]);
                let dist: f64 = rows.iter().map(|&r| d[r] * d[r]).sum();
                if best.is_none_or(|(b, _)| dist < b) {
                    best = Some((dist, j));
                }
            }
            best.map(|(_, j)| (pts[i].clone(), pts[j].clone()))
        })
        .collect()
}

/// Seeded search for ordered double points; each geometric double point yields two entries.
pub fn find_self_intersections(
    imm: &Immersion,
    seed_pairs: usize,
    separation: f64,
    seed: u64,
) -> Vec<SelfIntersection> {
    let sys = PairSystem { imm, level: None };
    let mut seeds: Vec<(ChartPoint, ChartPoint)> =
        imm.double_points.iter().map(|d| (d.p.clone(), d.q.clone())).collect();
    let m = seed_pairs.min(1500);
    let pts = sampling::sample_charts(&imm.charts(), m, seed);
    seeds.extend(nearest_pairs(imm, &pts, &sys.rows(), separation));
    let rest = seed_pairs.saturating_sub(m);
    if rest > 0 && pts.len() > 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED);
        for _ in 0..rest {
            let a = rng.random_range(0..pts.len());
            let b = rng.random_range(0..pts.len());
            if a != b {
                seeds.push((pts[a].clone(), pts[b].clone()));
            }
        }
    }
    collect(imm, &sys, seeds, separation)
}

/// Points of K with π_ℝ = t.
#[derive(Debug, Clone, Serialize)]
pub struct SliceResult {
    pub t: f64,
    pub points: Vec<ChartPoint>,
    /// X-coordinates of each point, as (re, im) pairs.
    pub images: Vec<Vec<[f64; 2]>>,
    /// π_𝚥ℝ of each point.
    pub color: Vec<f64>,
    #[serde(skip)]
    pub immersion: Option<Immersion>,
}

fn project_to_level(imm: &Immersion, slot: usize, t: f64, p: &ChartPoint) -> Option<ChartPoint> {
    let mut q = p.clone();
    for _ in 0..NEWTON_MAX_ITER {
        let h = imm.eval_real(q.chart, &q.u)[2 * slot] - t;
        if h.abs() < 1e-12 {
            break;
        }
        let j = imm.jacobian(q.chart, &q.u);
        let g: Vec<f64> = (0..j.ncols()).map(|c| j[(2 * slot, c)]).collect();
        let g2: f64 = g.iter().map(|x| x * x).sum();
        if g2 < 1e-20 {
            return None;
        }
        for (x, gi) in q.u.iter_mut().zip(&g) {
            *x -= h * gi / g2;
        }
        wrap_into_chart(imm, &mut q);
    }
    let h = imm.eval_real(q.chart, &q.u)[2 * slot] - t;
    (h.abs() < 1e-9 && imm.charts()[q.chart].accepts(&q.u)).then_some(q)
}

/// The slice K|_t. `critical_values` are located when not supplied.
pub fn slice(
    imm: &Immersion,
    t: f64,
    n_samples: usize,
    seed: u64,
    critical_values: Option<&[f64]>,
) -> Result<SliceResult, VerifyError> {
    let slot = imm
        .ambient
        .cobordism_slot
        .ok_or_else(|| VerifyError::Unsupported("slicing needs a cobordism coordinate".into()))?;
    let located: Vec<f64>;
    let crit = match critical_values {
        Some(c) => c,
        None => {
            located = critical::critical_points(imm, 256, seed).iter().map(|c| c.value).collect();
            &located
        }
    };
    if let Some(c) = crit.iter().find(|c| (*c - t).abs() < 1e-6) {
        return Err(VerifyError::Regularity { t, critical: *c, tol: 1e-6 });
    }
    let seeds = sampling::sample_charts(&imm.charts(), n_samples, seed);
    let points: Vec<ChartPoint> = seeds.par_iter().filter_map(|p| project_to_level(imm, slot, t, p)).collect();
    let mut images = Vec::with_capacity(points.len());
    let mut color = Vec::with_capacity(points.len());
    for p in &points {
        let v = imm.eval_real(p.chart, &p.u);
        color.push(v[2 * slot + 1]);
        let x: Vec<f64> = v.chunks(2).enumerate().filter(|(k, _)| *k != slot).flat_map(|(_, c)| c.to_vec()).collect();
        images.push(to_pairs(&x));
    }
    let immersion = imm.slice_fn.as_ref().and_then(|f| f(t));
    Ok(SliceResult { t, points, images, color, immersion })
}

/// Pairs on the slice K|_t with equal X-image.
pub fn find_slice_double_points(
    imm: &Immersion,
    t: f64,
    n_samples: usize,
    separation: f64,
    seed: u64,
) -> Result<Vec<SelfIntersection>, VerifyError> {
    let slot = imm
        .ambient
        .cobordism_slot
        .ok_or_else(|| VerifyError::Unsupported("slicing needs a cobordism coordinate".into()))?;
    let sys = PairSystem { imm, level: Some((slot, t)) };
    let seeds_pts = sampling::sample_charts(&imm.charts(), n_samples, seed);
    let pts: Vec<ChartPoint> = seeds_pts.par_iter().filter_map(|p| project_to_level(imm, slot, t, p)).collect();
    let pts: Vec<ChartPoint> = pts.into_iter().take(1500).collect();
    let seeds = nearest_pairs(imm, &pts, &sys.rows(), separation);
    Ok(collect(imm, &sys, seeds, separation))
}
