//! Gradings of Lagrangian planes and integer indices of ordered self-intersections.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use nalgebra::{DMatrix, Schur};
use thiserror::Error;

use crate::geom::{ChartPoint, Immersion, C64};

pub const LAGRANGIAN_TOL: f64 = 1e-10;
pub const INTEGRALITY_TOL: f64 = 1e-6;
const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GradingError {
    #[error("frame is not Lagrangian: |ω(v{i}, v{j})| = {value:e}")]
    NotLagrangian { i: usize, j: usize, value: f64 },
    #[error("frame vectors are not real-linearly independent")]
    Dependent,
    #[error("frame has {vectors} vectors in ℂ^{dim}")]
    Shape { vectors: usize, dim: usize },
    #[error("planes are not transverse (Kähler angle {angle:e})")]
    NotTransverse { angle: f64 },
    #[error("short-path closure is ambiguous in coordinate {coord}")]
    ClosureTie { coord: usize },
    #[error("coordinate {coord} vanishes along the path at s = {s}")]
    Splitting { coord: usize, s: f64 },
    #[error("index {value} is not an integer")]
    Normalization { value: f64 },
    #[error("unknown generator {0}")]
    UnknownGenerator(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

/// n real-independent vectors in ℂⁿ spanning a Lagrangian plane.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianFrame {
    pub basis: Vec<Vec<C64>>,
}

fn herm(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

impl LagrangianFrame {
    pub fn new(basis: Vec<Vec<C64>>) -> Result<Self, GradingError> {
        Self::with_tol(basis, LAGRANGIAN_TOL)
    }

    /// As [`LagrangianFrame::new`], with ω measured relative to |vᵢ||vⱼ|.
    pub fn with_tol(basis: Vec<Vec<C64>>, tol: f64) -> Result<Self, GradingError> {
        let n = basis.len();
        if n == 0 || basis.iter().any(|v| v.len() != n) {
            return Err(GradingError::Shape { vectors: n, dim: basis.first().map_or(0, |v| v.len()) });
        }
        let norms: Vec<f64> = basis.iter().map(|v| herm(v, v).re.sqrt()).collect();
        for i in 0..n {
            for j in i + 1..n {
                let w = herm(&basis[i], &basis[j]).im / (norms[i] * norms[j]);
                if w.abs() > tol {
                    return Err(GradingError::NotLagrangian { i, j, value: w });
                }
            }
        }
        let frame = LagrangianFrame { basis };
        let sv = frame.real_matrix().singular_values();
        if sv.min() <= 1e-12 * sv.max() {
            return Err(GradingError::Dependent);
        }
        Ok(frame)
    }

    /// A split frame vᵢ = zᵢeᵢ.
    pub fn split(z: &[C64]) -> Result<Self, GradingError> {
        let n = z.len();
        Self::new((0..n).map(|i| (0..n).map(|k| if k == i { z[i] } else { C64::new(0.0, 0.0) }).collect()).collect())
    }

    pub fn standard(n: usize) -> Self {
        Self::split(&vec![C64::new(1.0, 0.0); n]).expect("ℝⁿ")
    }

    pub fn n(&self) -> usize {
        self.basis.len()
    }

    /// Columns are the basis vectors.
    pub fn matrix(&self) -> DMatrix<C64> {
        let n = self.n();
        DMatrix::from_fn(n, n, |r, c| self.basis[c][r])
    }

    fn real_matrix(&self) -> DMatrix<f64> {
        let n = self.n();
        DMatrix::from_fn(2 * n, n, |r, c| if r % 2 == 0 { self.basis[c][r / 2].re } else { self.basis[c][r / 2].im })
    }

    /// Unitary matrix carrying ℝⁿ onto the plane.
    pub fn unitary(&self) -> DMatrix<C64> {
        let n = self.n();
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
        for v in &self.basis {
            let mut w = v.clone();
            for u in &cols {
                let c = herm(u, &w).re;
                for (a, b) in w.iter_mut().zip(u) {
                    *a -= b * c;
                }
            }
            let len = herm(&w, &w).re.sqrt();
            cols.push(w.into_iter().map(|a| a / len).collect());
        }
        DMatrix::from_fn(n, n, |r, c| cols[c][r])
    }
}

/// arg(det(M)² / |det M|²) in [0, 2π).
pub fn det_squared_phase(frame: &LagrangianFrame) -> f64 {
    let d = frame.matrix().determinant();
    (d * d).arg().rem_euclid(TAU)
}

/// Counterclockwise Kähler angles βⱼ ∈ [0, π) rotating `from` onto `to`.
///
/// Writing U_to = U_from·O·diag(e^{𝚥β})·O′ with O, O′ real orthogonal, the βⱼ are half
/// the arguments of the eigenvalues of BBᵀ, B = U_from* U_to.
pub fn kahler_angles(from: &LagrangianFrame, to: &LagrangianFrame) -> Vec<f64> {
    let b = from.unitary().adjoint() * to.unitary();
    let s = &b * b.transpose();
    let (_, t) = Schur::new(s).unpack();
    let mut angles: Vec<f64> = (0..t.nrows()).map(|i| t[(i, i)].arg().rem_euclid(TAU) / 2.0).collect();
    for a in angles.iter_mut() {
        if *a > PI - 1e-13 {
            *a -= PI;
        }
    }
    angles.sort_by(f64::total_cmp);
    angles
}

/// Kähler angles rotating T_q onto T_p, erroring when the planes meet non-transversally.
pub fn transverse_angles(tq: &LagrangianFrame, tp: &LagrangianFrame) -> Result<Vec<f64>, GradingError> {
    let angles = kahler_angles(tq, tp);
    for &a in &angles {
        if a < TIE_TOL || a > PI - TIE_TOL {
            return Err(GradingError::NotTransverse { angle: a });
        }
    }
    Ok(angles)
}

/// ind(p→q) = n + θ(p) − θ(q) − (1/π)Σβⱼ, where the βⱼ rotate T_q onto T_p.
pub fn self_intersection_index(n: usize, theta_p: f64, theta_q: f64, angles: &[f64]) -> Result<i64, GradingError> {
    let value = n as f64 + theta_p - theta_q - angles.iter().sum::<f64>() / PI;
    let r = value.round();
    if (value - r).abs() > INTEGRALITY_TOL {
        return Err(GradingError::Normalization { value });
    }
    Ok(r as i64)
}

pub type Coefficient = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

/// A path of split planes span{zᵢ(s)eᵢ}, s ∈ [0, 1], from T_q to T_p.
#[derive(Clone)]
pub struct SplitPlanePath {
    pub label: String,
    pub coords: Vec<Coefficient>,
    pub steps: usize,
}

impl std::fmt::Debug for SplitPlanePath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SplitPlanePath({}, n = {})", self.label, self.coords.len())
    }
}

impl SplitPlanePath {
    pub fn new(label: impl Into<String>, coords: Vec<Coefficient>) -> Self {
        SplitPlanePath { label: label.into(), coords, steps: 4096 }
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn at(&self, s: f64) -> Vec<C64> {
        self.coords.iter().map(|z| z(s)).collect()
    }

    pub fn start(&self) -> Result<LagrangianFrame, GradingError> {
        LagrangianFrame::split(&self.at(0.0))
    }

    pub fn end(&self) -> Result<LagrangianFrame, GradingError> {
        LagrangianFrame::split(&self.at(1.0))
    }

    /// The path traversed backwards.
    pub fn reversed(&self) -> Self {
        let coords = self
            .coords
            .iter()
            .map(|z| {
                let z = z.clone();
                Arc::new(move |s: f64| z(1.0 - s)) as Coefficient
            })
            .collect();
        SplitPlanePath { label: format!("{} reversed", self.label), coords, steps: self.steps }
    }

    /// Reparameterize by a monotone bijection of [0, 1].
    pub fn reparameterized(&self, f: impl Fn(f64) -> f64 + Send + Sync + Clone + 'static) -> Self {
        let coords = self
            .coords
            .iter()
            .map(|z| {
                let (z, f) = (z.clone(), f.clone());
                Arc::new(move |s: f64| z(f(s))) as Coefficient
            })
            .collect();
        SplitPlanePath { label: self.label.clone(), coords, steps: self.steps }
    }

    /// Multiply each zᵢ by a positive function.
    pub fn rescaled(&self, scale: impl Fn(usize, f64) -> f64 + Send + Sync + Clone + 'static) -> Self {
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(i, z)| {
                let (z, g) = (z.clone(), scale.clone());
                Arc::new(move |s: f64| z(s) * g(i, s)) as Coefficient
            })
            .collect();
        SplitPlanePath { label: self.label.clone(), coords, steps: self.steps }
    }

    /// Unwrapped sweep of arg zᵢ² along the path, with the start phase.
    fn sweeps(&self) -> Result<Vec<(f64, f64)>, GradingError> {
        let mut out = Vec::with_capacity(self.n());
        for (i, z) in self.coords.iter().enumerate() {
            let mut prev = z(0.0);
            if prev.norm() < 1e-12 {
                return Err(GradingError::Splitting { coord: i, s: 0.0 });
            }
            let start = (prev * prev).arg();
            let mut total = 0.0;
            for k in 1..=self.steps {
                let s = k as f64 / self.steps as f64;
                let cur = z(s);
                if cur.norm() < 1e-12 {
                    return Err(GradingError::Splitting { coord: i, s });
                }
                let d = (cur * cur / (prev * prev)).arg();
                if d.abs() > 1.0 {
                    return Err(GradingError::Splitting { coord: i, s });
                }
                total += d;
                prev = cur;
            }
            out.push((start, total));
        }
        Ok(out)
    }
}

/// (1/2π)·Σᵢ (sweep of zᵢ²/|zᵢ²| + counterclockwise closure back to the start).
pub fn index_by_winding(path: &SplitPlanePath) -> Result<i64, GradingError> {
    let mut total = 0.0;
    for (i, (_, sweep)) in path.sweeps()?.into_iter().enumerate() {
        let closure = (-sweep).rem_euclid(TAU);
        if closure < TIE_TOL || closure > TAU - TIE_TOL {
            return Err(GradingError::ClosureTie { coord: i });
        }
        total += sweep + closure;
    }
    let value = total / TAU;
    let r = value.round();
    if (value - r).abs() > INTEGRALITY_TOL {
        return Err(GradingError::Normalization { value });
    }
    Ok(r as i64)
}

/// Gradings at both ends of a path, taking θ = arg det²/2π at the start.
pub fn path_gradings(path: &SplitPlanePath) -> Result<(f64, f64), GradingError> {
    let sw = path.sweeps()?;
    let theta_q = sw.iter().map(|(a, _)| a).sum::<f64>().rem_euclid(TAU) / TAU;
    let theta_p = theta_q + sw.iter().map(|(_, d)| d).sum::<f64>() / TAU;
    Ok((theta_p, theta_q))
}

/// The index formula evaluated with gradings transported along the path.
pub fn index_by_formula(path: &SplitPlanePath) -> Result<i64, GradingError> {
    let (theta_p, theta_q) = path_gradings(path)?;
    let angles = transverse_angles(&path.start()?, &path.end()?)?;
    self_intersection_index(path.n(), theta_p, theta_q, &angles)
}

fn generator_direction(from: &str, to: &str, a: &str, b: &str) -> Result<bool, GradingError> {
    match (from, to) {
        (x, y) if x == a && y == b => Ok(true),
        (x, y) if x == b && y == a => Ok(false),
        _ => Err(GradingError::UnknownGenerator(format!("({from}->{to})"))),
    }
}

/// Plane path of the local trace j^{k,n−k+1} joining the two preimages of its slice double point.
///
/// Along x = (x₀, 0, …, 0) the trace is split with zᵢ = 1 + 2𝚥σᵢx₀; the half turn of the
/// cobordism direction is carried by the twist e^{∓𝚥πs} on z₁.
pub fn handle_path(k: usize, n: usize, from: &str, to: &str) -> Result<SplitPlanePath, GradingError> {
    if k > n || n == 0 {
        return Err(GradingError::Parameter(format!("need 0 ≤ k ≤ n, n ≥ 1 (k = {k}, n = {n})")));
    }
    let forward = generator_direction(from, to, "q-", "q+")?;
    let coords = (1..=n)
        .map(|i| {
            let sigma = if i <= k { 1.0 } else { -1.0 };
            Arc::new(move |s: f64| {
                let x0 = 1.0 - 2.0 * s;
                let z = C64::new(1.0, 2.0 * sigma * x0);
                if i == 1 {
                    z * C64::from_polar(1.0, -PI * s)
                } else {
                    z
                }
            }) as Coefficient
        })
        .collect();
    let path = SplitPlanePath::new(format!("local-trace(k={k},n={n}) q+ to q-"), coords);
    Ok(if forward { path } else { path.reversed() })
}

/// Meridian x = r(cos πs, sin πs, 0, …) of the Whitney sphere, on which its tangent planes split.
pub fn whitney_path(n: usize, r: f64, from: &str, to: &str) -> Result<SplitPlanePath, GradingError> {
    if n == 0 || !(r > 0.0) {
        return Err(GradingError::Parameter(format!("need n ≥ 1 and r > 0 (n = {n}, r = {r})")));
    }
    let forward = generator_direction(from, to, "q-", "q+")?;
    let coords = (1..=n)
        .map(|i| {
            Arc::new(move |s: f64| {
                let phi = PI * s;
                if i == 1 {
                    C64::new(r * phi.cos(), 2.0 * r * r * (2.0 * phi).cos())
                } else {
                    C64::new(1.0, 2.0 * r * phi.cos())
                }
            }) as Coefficient
        })
        .collect();
    let path = SplitPlanePath::new(format!("whitney(n={n},r={r}) q+ to q-"), coords);
    Ok(if forward { path } else { path.reversed() })
}

/// Tangent line 2 + 𝚥(E/8)cos θ of the figure-eight along θ ∈ [0, π].
pub fn figure_eight_path(e: f64, from: &str, to: &str) -> Result<SplitPlanePath, GradingError> {
    if !(e > 0.0) {
        return Err(GradingError::Parameter(format!("E must be positive (E = {e})")));
    }
    let forward = generator_direction(from, to, "pi", "0")?;
    let z = Arc::new(move |s: f64| C64::new(2.0, e / 8.0 * (PI * s).cos())) as Coefficient;
    let path = SplitPlanePath::new(format!("figure-eight(E={e}) 0 to pi"), vec![z]);
    Ok(if forward { path } else { path.reversed() })
}

/// Tangent frame of an immersion at a domain point.
pub fn immersion_frame(imm: &Immersion, p: &ChartPoint) -> Result<LagrangianFrame, GradingError> {
    if imm.domain_dim != imm.ambient.n_complex {
        return Err(GradingError::Shape { vectors: imm.domain_dim, dim: imm.ambient.n_complex });
    }
    LagrangianFrame::with_tol(imm.tangent_frame(p.chart, &p.u), 1e-6)
}

/// θ(end) − θ(start) along a path of domain points, by unwrapping arg det².
pub fn grading_shift(imm: &Immersion, path: &dyn Fn(f64) -> ChartPoint, steps: usize) -> Result<f64, GradingError> {
    let phase = |s: f64| immersion_frame(imm, &path(s)).map(|f| det_squared_phase(&f));
    let mut prev = phase(0.0)?;
    let mut total = 0.0;
    for k in 1..=steps {
        let s = k as f64 / steps as f64;
        let cur = phase(s)?;
        let d = crate::geom::smooth::wrap(cur - prev, TAU);
        if d.abs() > 1.0 {
            return Err(GradingError::Splitting { coord: 0, s });
        }
        total += d;
        prev = cur;
    }
    Ok(total / TAU)
}

/// ind(p→q) on an immersion, transporting the grading along `path` from q to p.
pub fn index_along_path(
    imm: &Immersion,
    p: &ChartPoint,
    q: &ChartPoint,
    path: &dyn Fn(f64) -> ChartPoint,
    steps: usize,
) -> Result<i64, GradingError> {
    let shift = grading_shift(imm, path, steps)?;
    let tq = immersion_frame(imm, q)?;
    let tp = immersion_frame(imm, p)?;
    let angles = transverse_angles(&tq, &tp)?;
    self_intersection_index(imm.domain_dim, shift, 0.0, &angles)
}
