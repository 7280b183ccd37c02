//! Suspensions, generalized suspensions, double bottlenecks and truncation.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use super::smooth::{smoothstep, smoothstep_prime, Chart, Formula, Real, SmoothMap};
use super::{AmbientSpace, AreaLoop, ChartPoint, GeomError, HomotopyWithPrimitive, Immersion, KnownDoublePoint, Label};

/// A homotopy at a frozen time: (q) ↦ i_t(q), dropping the primitive.
pub struct FixedT {
    pub inner: Arc<dyn SmoothMap>,
    pub t: f64,
    pub charts: Vec<Chart>,
}

impl Formula for FixedT {
    fn dim(&self) -> usize {
        self.inner.dim() - 1
    }
    fn out_dim(&self) -> usize {
        self.inner.out_dim() - 1
    }
    fn charts(&self) -> Vec<Chart> {
        self.charts.clone()
    }
    fn eval<D: Real>(&self, chart: usize, q: &[D]) -> Vec<D> {
        let mut u = q.to_vec();
        u.push(D::cst(self.t));
        let mut out = D::call(&*self.inner, chart, &u);
        out.pop();
        out
    }
    fn domain_point(&self, chart: usize, q: &[f64]) -> Vec<f64> {
        let mut u = q.to_vec();
        u.push(self.t);
        let mut x = self.inner.domain_point(chart, &u);
        x.pop();
        x
    }
    fn domain_periods(&self) -> Vec<Option<f64>> {
        let mut p = self.inner.domain_periods();
        p.truncate(Formula::dim(self));
        p
    }
    fn locate(&self, x: &[f64]) -> Option<(usize, Vec<f64>)> {
        let mut y = x.to_vec();
        y.push(self.t);
        let (c, mut u) = self.inner.locate(&y)?;
        u.pop();
        Some((c, u))
    }
}

/// (q, t) ↦ (i_t(q), t + 𝚥H_t(q)).
pub struct SuspensionMap {
    pub inner: Arc<dyn SmoothMap>,
}

impl Formula for SuspensionMap {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn out_dim(&self) -> usize {
        self.inner.out_dim() + 1
    }
    fn charts(&self) -> Vec<Chart> {
        self.inner.charts()
    }
    fn eval<D: Real>(&self, chart: usize, u: &[D]) -> Vec<D> {
        let mut out = D::call(&*self.inner, chart, u);
        let h = out.pop().expect("primitive slot");
        out.push(u[u.len() - 1]);
        out.push(h);
        out
    }
    fn domain_point(&self, chart: usize, u: &[f64]) -> Vec<f64> {
        self.inner.domain_point(chart, u)
    }
    fn domain_periods(&self) -> Vec<Option<f64>> {
        self.inner.domain_periods()
    }
    fn locate(&self, x: &[f64]) -> Option<(usize, Vec<f64>)> {
        self.inner.locate(x)
    }
}

/// The suspension of an exact homotopy, a Lagrangian in X × ℂ.
pub fn make_suspension(h: &HomotopyWithPrimitive) -> Immersion {
    let n = h.ambient.n_complex;
    let mut periods = h.ambient.base_periods.clone();
    periods.resize(n + 1, None);
    let ambient = AmbientSpace::with_periods(n + 1, Some(n), periods).expect("valid ambient");
    let mut label = h.label.clone();
    label.model = format!("suspension[{}]", label.model);
    let mut imm = Immersion::new(label, ambient, Arc::new(SuspensionMap { inner: h.map.clone() }));
    let hh = h.clone();
    imm.slice_fn = Some(Arc::new(move |t: f64| {
        (t >= hh.t_range.0 && t <= hh.t_range.1).then(|| hh.slice_immersion(t))
    }));
    imm.homotopy = Some(h.clone());
    imm
}

/// A polynomial function on ℝᵈ returning its value and gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub dim: usize,
    /// (coefficient, exponent per variable).
    pub terms: Vec<(f64, Vec<u32>)>,
}

impl ScalarField {
    pub fn coordinate(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        ScalarField { dim, terms: vec![(1.0, e)] }
    }

    /// t ↦ t(t + ε)(t − ε) = t³ − ε²t.
    pub fn bottleneck(eps: f64) -> Self {
        ScalarField { dim: 1, terms: vec![(1.0, vec![3]), (-eps * eps, vec![1])] }
    }

    pub fn value<D: Real>(&self, y: &[D]) -> D {
        self.terms.iter().fold(D::cst(0.0), |acc, (c, e)| {
            acc + e.iter().zip(y).fold(D::cst(*c), |m, (&k, &v)| m * v.powi(k as i32))
        })
    }

    pub fn derivative<D: Real>(&self, y: &[D], i: usize) -> D {
        self.terms.iter().fold(D::cst(0.0), |acc, (c, e)| {
            if e[i] == 0 {
                return acc;
            }
            let mut m = D::cst(*c * e[i] as f64);
            for (j, (&k, &v)) in e.iter().zip(y).enumerate() {
                let k = if j == i { k - 1 } else { k };
                m *= v.powi(k as i32);
            }
            acc + m
        })
    }
}

impl Formula for ScalarField {
    fn dim(&self) -> usize {
        self.dim
    }
    fn out_dim(&self) -> usize {
        self.dim + 1
    }
    fn charts(&self) -> Vec<Chart> {
        vec![Chart::cube("R^d", self.dim, 1.0)]
    }
    fn eval<D: Real>(&self, _chart: usize, y: &[D]) -> Vec<D> {
        let mut out = vec![self.value(y)];
        out.extend((0..self.dim).map(|i| self.derivative(y, i)));
        out
    }
}

/// (q¹, …, qᵐ, y) ↦ (i¹_{ρ¹(y)}(q¹), …, y + 𝚥 Σ_α H^α_{ρ^α(y)}(q^α) dρ^α(y)).
pub struct GeneralizedSuspensionMap {
    homotopies: Vec<Arc<dyn SmoothMap>>,
    rho: Vec<Arc<dyn SmoothMap>>,
    q_dims: Vec<usize>,
    /// Number of charts per homotopy, for mixed-radix chart indices.
    radix: Vec<usize>,
    y_dim: usize,
    charts: Vec<Chart>,
}

impl GeneralizedSuspensionMap {
    fn split_chart(&self, mut c: usize) -> Vec<usize> {
        self.radix
            .iter()
            .map(|r| {
                let k = c % r;
                c /= r;
                k
            })
            .collect()
    }
}

impl Formula for GeneralizedSuspensionMap {
    fn dim(&self) -> usize {
        self.q_dims.iter().sum::<usize>() + self.y_dim
    }
    fn out_dim(&self) -> usize {
        self.homotopies.iter().map(|h| h.out_dim() - 1).sum::<usize>() + 2 * self.y_dim
    }
    fn charts(&self) -> Vec<Chart> {
        self.charts.clone()
    }
    fn eval<D: Real>(&self, chart: usize, u: &[D]) -> Vec<D> {
        let idx = self.split_chart(chart);
        let y = &u[u.len() - self.y_dim..];
        let mut out = Vec::with_capacity(Formula::out_dim(self));
        let mut cot = vec![D::cst(0.0); self.y_dim];
        let mut off = 0;
        for (a, h) in self.homotopies.iter().enumerate() {
            let r = D::call(&*self.rho[a], 0, y);
            let mut v = u[off..off + self.q_dims[a]].to_vec();
            off += self.q_dims[a];
            v.push(r[0]);
            let mut img = D::call(&**h, idx[a], &v);
            let hv = img.pop().expect("primitive slot");
            out.extend(img);
            for j in 0..self.y_dim {
                cot[j] += hv * r[1 + j];
            }
        }
        for j in 0..self.y_dim {
            out.push(y[j]);
            out.push(cot[j]);
        }
        out
    }
}

/// Generalized suspension over Y = [−1, 1]^{y_dim}.
pub fn make_generalized_suspension(
    homotopies: &[HomotopyWithPrimitive],
    rho_fns: Vec<Arc<dyn SmoothMap>>,
    y_dim: usize,
) -> Result<Immersion, GeomError> {
    make_generalized_suspension_on(homotopies, rho_fns, Chart::cube("Y", y_dim, 1.0))
}

pub fn make_generalized_suspension_on(
    homotopies: &[HomotopyWithPrimitive],
    rho_fns: Vec<Arc<dyn SmoothMap>>,
    y_chart: Chart,
) -> Result<Immersion, GeomError> {
    let y_dim = y_chart.dim();
    if homotopies.len() != rho_fns.len() {
        return Err(GeomError::Parameter(format!(
            "{} homotopies but {} functions rho",
            homotopies.len(),
            rho_fns.len()
        )));
    }
    if homotopies.is_empty() || y_dim == 0 {
        return Err(GeomError::Parameter("generalized suspension needs at least one homotopy and dim Y ≥ 1".into()));
    }
    if let Some(r) = rho_fns.iter().find(|r| r.dim() != y_dim || r.out_dim() != y_dim + 1) {
        return Err(GeomError::Parameter(format!(
            "rho must map R^{y_dim} to (value, gradient), got {} -> {}",
            r.dim(),
            r.out_dim()
        )));
    }
    let q_dims: Vec<usize> = homotopies.iter().map(|h| h.q_dim()).collect();
    let per: Vec<Vec<Chart>> = homotopies.iter().map(|h| h.map.charts()).collect();
    let radix: Vec<usize> = per.iter().map(|c| c.len()).collect();
    let total: usize = radix.iter().product();
    let mut charts = Vec::with_capacity(total);
    for c in 0..total {
        let mut rem = c;
        let idx: Vec<usize> = radix
            .iter()
            .map(|r| {
                let k = rem % r;
                rem /= r;
                k
            })
            .collect();
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        let mut names = Vec::new();
        for (a, &k) in idx.iter().enumerate() {
            let ch = &per[a][k];
            lo.extend_from_slice(&ch.lo[..q_dims[a]]);
            hi.extend_from_slice(&ch.hi[..q_dims[a]]);
            names.push(ch.label.clone());
        }
        lo.extend_from_slice(&y_chart.lo);
        hi.extend_from_slice(&y_chart.hi);
        names.push(y_chart.label.clone());
        let parts: Vec<Chart> = idx.iter().enumerate().map(|(a, &k)| per[a][k].clone()).collect();
        let rho = rho_fns.clone();
        let qd = q_dims.clone();
        let yc = y_chart.clone();
        charts.push(Chart::boxed(names.join("x"), lo, hi).with_accept(move |u: &[f64]| {
            let y = &u[u.len() - yc.dim()..];
            if !yc.accepts(y) {
                return false;
            }
            let mut off = 0;
            parts.iter().enumerate().all(|(a, ch)| {
                let mut v = u[off..off + qd[a]].to_vec();
                off += qd[a];
                v.push(rho[a].eval_f64(0, y)[0]);
                ch.accepts(&v)
            })
        }));
    }
    let n: usize = homotopies.iter().map(|h| h.ambient.n_complex).sum::<usize>() + y_dim;
    let map = GeneralizedSuspensionMap {
        homotopies: homotopies.iter().map(|h| h.map.clone()).collect(),
        rho: rho_fns,
        q_dims,
        radix,
        y_dim,
        charts,
    };
    let names: Vec<String> = homotopies.iter().map(|h| h.label.to_string()).collect();
    let label = Label::new("generalized-suspension", &[("m", homotopies.len() as f64), ("y_dim", y_dim as f64)])
        .note(names.join(" ; "));
    let slot = if y_dim == 1 { Some(n - 1) } else { None };
    Ok(Immersion::new(label, AmbientSpace::new(n, slot)?, Arc::new(map)))
}

/// The circle of radius r translated along a(t) = (a₁t + a₂t², b₁t + b₂t²) in ℂ,
/// with primitive H = r(β′ cos φ − α′ sin φ).
#[derive(Debug, Clone, Copy)]
pub struct TranslatedCircle {
    pub r: f64,
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
}

impl Formula for TranslatedCircle {
    fn dim(&self) -> usize {
        2
    }
    fn out_dim(&self) -> usize {
        3
    }
    fn charts(&self) -> Vec<Chart> {
        vec![Chart::boxed("S1xR", vec![0.0, -4.0], vec![TAU, 4.0])]
    }
    fn eval<D: Real>(&self, _chart: usize, u: &[D]) -> Vec<D> {
        let (phi, t) = (u[0], u[1]);
        let a = t * self.alpha[0] + t * t * self.alpha[1];
        let b = t * self.beta[0] + t * t * self.beta[1];
        let da = t * (2.0 * self.alpha[1]) + self.alpha[0];
        let db = t * (2.0 * self.beta[1]) + self.beta[0];
        let (s, c) = (phi.sin(), phi.cos());
        vec![a + c * self.r, b + s * self.r, (db * c - da * s) * self.r]
    }
    fn domain_periods(&self) -> Vec<Option<f64>> {
        vec![Some(TAU), None]
    }
}

pub fn translated_circle(c: TranslatedCircle) -> HomotopyWithPrimitive {
    HomotopyWithPrimitive::new(
        Label::new("translated-circle", &[("r", c.r)]),
        AmbientSpace::new(1, None).expect("n = 1"),
        Arc::new(c),
        (-4.0, 4.0),
    )
}

/// Product homotopy i_t = i with H = 0.
pub struct ConstantHomotopy {
    pub inner: Arc<dyn SmoothMap>,
    pub t_half: f64,
}

impl Formula for ConstantHomotopy {
    fn dim(&self) -> usize {
        self.inner.dim() + 1
    }
    fn out_dim(&self) -> usize {
        self.inner.out_dim() + 1
    }
    fn charts(&self) -> Vec<Chart> {
        self.inner
            .charts()
            .into_iter()
            .map(|c| {
                let mut lo = c.lo.clone();
                let mut hi = c.hi.clone();
                lo.push(-self.t_half);
                hi.push(self.t_half);
                let mut out = Chart::boxed(c.label.clone(), lo, hi);
                if let Some(a) = c.accept.clone() {
                    out = out.with_accept(move |u: &[f64]| a(&u[..u.len() - 1]));
                }
                out
            })
            .collect()
    }
    fn eval<D: Real>(&self, chart: usize, u: &[D]) -> Vec<D> {
        let mut out = D::call(&*self.inner, chart, &u[..u.len() - 1]);
        out.push(D::cst(0.0));
        out
    }
    fn domain_point(&self, chart: usize, u: &[f64]) -> Vec<f64> {
        let mut x = self.inner.domain_point(chart, &u[..u.len() - 1]);
        x.push(u[u.len() - 1]);
        x
    }
    fn domain_periods(&self) -> Vec<Option<f64>> {
        let mut p = self.inner.domain_periods();
        p.resize(self.inner.domain_point(0, &self.inner.charts()[0].lo).len(), None);
        p.push(None);
        p
    }
    fn locate(&self, x: &[f64]) -> Option<(usize, Vec<f64>)> {
        let (c, mut u) = self.inner.locate(&x[..x.len() - 1])?;
        u.push(x[x.len() - 1]);
        Some((c, u))
    }
}

pub fn constant_homotopy(l: &Immersion, t_half: f64) -> HomotopyWithPrimitive {
    let mut label = l.label.clone();
    label.model = format!("constant[{}]", label.model);
    HomotopyWithPrimitive::new(
        label,
        l.ambient.clone(),
        Arc::new(ConstantHomotopy { inner: l.map().clone(), t_half }),
        (-t_half, t_half),
    )
}

/// Whitney circles of radius √(R² − t²) with H_t = 2x₀t; their suspension is the Whitney 2-sphere of radius R.
#[derive(Debug, Clone, Copy)]
pub struct WhitneyCircleFamily {
    pub radius: f64,
}

impl WhitneyCircleFamily {
    fn r<D: Real>(&self, t: D) -> D {
        (D::cst(self.radius * self.radius) - t * t).sqrt()
    }
}

impl Formula for WhitneyCircleFamily {
    fn dim(&self) -> usize {
        2
    }
    fn out_dim(&self) -> usize {
        3
    }
    fn charts(&self) -> Vec<Chart> {
        let r = self.radius;
        vec![Chart::boxed("S1x(-R,R)", vec![0.0, -r], vec![TAU, r]).with_accept(move |u: &[f64]| u[1].abs() < r)]
    }
    fn eval<D: Real>(&self, _chart: usize, u: &[D]) -> Vec<D> {
        let (phi, t) = (u[0], u[1]);
        let r = self.r(t);
        let x0 = r * phi.cos();
        let x1 = r * phi.sin();
        vec![x1, x0 * x1 * 2.0, x0 * t * 2.0]
    }
    fn domain_point(&self, _chart: usize, u: &[f64]) -> Vec<f64> {
        let r = self.r(u[1]);
        vec![r * u[0].cos(), r * u[0].sin(), u[1]]
    }
    fn locate(&self, x: &[f64]) -> Option<(usize, Vec<f64>)> {
        Some((0, vec![x[1].atan2(x[0]).rem_euclid(TAU), x[2]]))
    }
}

/// The Whitney bottleneck family i^{1,0}_{A(t)}, A(t) = (4/3)(R² − t²)^{3/2}, t ∈ (−R, R).
pub fn whitney_bottleneck_family(radius: f64) -> Result<HomotopyWithPrimitive, GeomError> {
    if !(radius > 0.0) {
        return Err(GeomError::Parameter("radius must be positive".into()));
    }
    Ok(HomotopyWithPrimitive::new(
        Label::new("whitney-bottleneck", &[("R", radius)]).note("A(t) = 4/3 (R^2 - t^2)^(3/2), H_t = 2 x0 t"),
        AmbientSpace::new(1, None)?,
        Arc::new(WhitneyCircleFamily { radius }),
        (-radius, radius),
    ))
}

/// Suspension of [`whitney_bottleneck_family`], with its two shadow lobes t ≶ 0 as area loops.
pub fn whitney_bottleneck_suspension(radius: f64) -> Result<Immersion, GeomError> {
    let h = whitney_bottleneck_family(radius)?;
    let mut imm = make_suspension(&h);
    let r = move |t: f64| (radius * radius - t * t).max(0.0).sqrt();
    for (label, lo, hi) in [("lobe t<0", -radius, 0.0), ("lobe t>0", 0.0, radius)] {
        let out = move |s: f64| {
            let t = lo + s * (hi - lo);
            vec![r(t), 0.0, t]
        };
        let back = move |s: f64| {
            let t = hi - s * (hi - lo);
            vec![-r(t), 0.0, t]
        };
        imm.area_loops.push(AreaLoop { label: label.into(), coord: 1, segments: vec![Arc::new(out) as Arc<_>, Arc::new(back)] });
    }
    Ok(imm)
}

/// One exact graph q ↦ q + 𝚥p(q) over a box, with a function h on it.
#[derive(Clone)]
pub struct GraphBranch {
    pub chart: Chart,
    /// q ↦ p(q).
    pub p: Arc<dyn SmoothMap>,
    /// q ↦ (h(q), ∇h(q)).
    pub h: Arc<dyn SmoothMap>,
    /// q ↦ point of the base domain.
    pub domain_of: Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>,
}

/// A base Lagrangian given as a union of exact graphs in a cotangent chart.
#[derive(Clone)]
pub struct ExactGraphs {
    pub base: Immersion,
    pub branches: Vec<GraphBranch>,
}

/// Branch b ∈ {0, 1} of the figure-eight over q: p = ±(E/8) sin(q/2), h = ±cos(q/2).
#[derive(Debug, Clone, Copy)]
pub struct FigureEightBranch {
    pub e: f64,
    pub sign: f64,
    pub what: BranchPart,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchPart {
    P,
    H,
}

impl Formula for FigureEightBranch {
    fn dim(&self) -> usize {
        1
    }
    fn out_dim(&self) -> usize {
        match self.what {
            BranchPart::P => 1,
            BranchPart::H => 2,
        }
    }
    fn charts(&self) -> Vec<Chart> {
        vec![Chart::cube("q", 1, PI)]
    }
    fn eval<D: Real>(&self, _chart: usize, q: &[D]) -> Vec<D> {
        let half = q[0] * 0.5;
        match self.what {
            BranchPart::P => vec![half.sin() * (self.sign * self.e / 8.0)],
            BranchPart::H => vec![half.cos() * self.sign, half.sin() * (-0.5 * self.sign)],
        }
    }
}

impl ExactGraphs {
    /// The figure-eight L_E as two graphs over q ∈ (−π − δ, π + δ), with h = cos θ.
    ///
    /// In a double bottleneck the two branches also cross where |ρ(t)| = E/4, over
    /// θ = π/2 and 3π/2; sup |ρ| on [−1.25ε, 1.25ε] is about 0.703ε³, so keep that below E/4.
    pub fn figure_eight(e: f64, delta: f64) -> Result<Self, GeomError> {
        let base = super::models::make_figure_eight(e)?;
        let chart = || Chart::cube("q", 1, PI + delta);
        let branches = [(1.0, 0.0), (-1.0, PI)]
            .into_iter()
            .map(|(sign, shift)| GraphBranch {
                chart: chart(),
                p: Arc::new(FigureEightBranch { e, sign, what: BranchPart::P }),
                h: Arc::new(FigureEightBranch { e, sign, what: BranchPart::H }),
                domain_of: Arc::new(move |q: &[f64]| vec![(q[0] / 2.0 + shift).rem_euclid(TAU)]),
            })
            .collect();
        Ok(ExactGraphs { base, branches })
    }

    pub fn n(&self) -> usize {
        self.base.ambient.n_complex
    }

    /// Branch and q-coordinates of a base ambient point, if it lies on a branch.
    pub fn locate_image(&self, z: &[super::C64]) -> Vec<(usize, Vec<f64>)> {
        let mut out = Vec::new();
        for (b, br) in self.branches.iter().enumerate() {
            let mut q: Vec<f64> = z.iter().map(|c| c.re).collect();
            // bring periodic directions into the chart box
            for (k, qk) in q.iter_mut().enumerate() {
                if let Some(p) = self.base.ambient.period(k) {
                    let mid = 0.5 * (br.chart.lo[k] + br.chart.hi[k]);
                    *qk = mid + super::smooth::wrap(*qk - mid, p);
                }
            }
            if !br.chart.accepts(&q) {
                continue;
            }
            let p = br.p.eval_f64(0, &q);
            if p.iter().zip(z).all(|(a, c)| (a - c.im).abs() < 1e-9) {
                out.push((b, q));
            }
        }
        out
    }
}

/// The base Lagrangian, a function h and the bottleneck width ε.
#[derive(Clone)]
pub struct DoubleBottleneckSpec {
    pub graphs: ExactGraphs,
    pub epsilon: f64,
    /// Range of the cobordism parameter, as a multiple of ε.
    pub t_extent: f64,
}

impl DoubleBottleneckSpec {
    pub fn new(graphs: ExactGraphs, epsilon: f64) -> Self {
        DoubleBottleneckSpec { graphs, epsilon, t_extent: 1.25 }
    }

    pub fn rho(&self) -> ScalarField {
        ScalarField::bottleneck(self.epsilon)
    }

    /// Critical points ±ε/√3 of ρ.
    pub fn bottleneck_times(&self) -> [f64; 2] {
        let t = self.epsilon / 3f64.sqrt();
        [-t, t]
    }
}

/// (q, t) ↦ (q + 𝚥(p_b(q) + ρ(t)∇h_b(q)), ρ′(t)h_b(q)) on branch b.
pub struct DoubleBottleneckHomotopy {
    branches: Vec<GraphBranch>,
    rho: ScalarField,
    n: usize,
    t_half: f64,
    periods: Vec<Option<f64>>,
}

impl Formula for DoubleBottleneckHomotopy {
    fn dim(&self) -> usize {
        self.n + 1
    }
    fn out_dim(&self) -> usize {
        2 * self.n + 1
    }
    fn charts(&self) -> Vec<Chart> {
        self.branches
            .iter()
            .enumerate()
            .map(|(b, br)| {
                let mut lo = br.chart.lo.clone();
                let mut hi = br.chart.hi.clone();
                lo.push(-self.t_half);
                hi.push(self.t_half);
                let mut c = Chart::boxed(format!("branch{b}:{}", br.chart.label), lo, hi);
                if let Some(a) = br.chart.accept.clone() {
                    c = c.with_accept(move |u: &[f64]| a(&u[..u.len() - 1]));
                }
                c
            })
            .collect()
    }
    fn eval<D: Real>(&self, chart: usize, u: &[D]) -> Vec<D> {
        let br = &self.branches[chart];
        let (q, t) = u.split_at(self.n);
        let p = D::call(&*br.p, 0, q);
        let h = D::call(&*br.h, 0, q);
        let r = self.rho.value(t);
        let dr = self.rho.derivative(t, 0);
        let mut out = Vec::with_capacity(2 * self.n + 1);
        for k in 0..self.n {
            out.push(q[k]);
            out.push(p[k] + r * h[1 + k]);
        }
        out.push(dr * h[0]);
        out
    }
    fn domain_point(&self, chart: usize, u: &[f64]) -> Vec<f64> {
        let mut x = (self.branches[chart].domain_of)(&u[..self.n]);
        x.push(u[self.n]);
        x
    }
    fn domain_periods(&self) -> Vec<Option<f64>> {
        let mut p = self.periods.clone();
        p.push(None);
        p
    }
    fn locate(&self, _x: &[f64]) -> Option<(usize, Vec<f64>)> {
        None
    }
}

/// The standard double bottleneck: suspension of the exact homotopy d(ρ(t)h).
pub fn make_double_bottleneck(spec: &DoubleBottleneckSpec) -> Result<Immersion, GeomError> {
    let eps = spec.epsilon;
    if !(eps > 0.0) {
        return Err(GeomError::Parameter("epsilon must be positive".into()));
    }
    let g = &spec.graphs;
    let n = g.n();
    // dh must vanish at every preimage of a registered double point
    let mut pairs = Vec::new();
    for dp in &g.base.double_points {
        let zp = g.base.eval(dp.p.chart, &dp.p.u);
        let zq = g.base.eval(dp.q.chart, &dp.q.u);
        let lp = g.locate_image(&zp);
        let lq = g.locate_image(&zq);
        let bp = branch_of(g, &lp, &dp.p);
        let bq = branch_of(g, &lq, &dp.q);
        let (Some(bp), Some(bq)) = (bp, bq) else {
            return Err(GeomError::Precondition(format!(
                "double point {}/{} is not on the graph branches",
                dp.label_p, dp.label_q
            )));
        };
        for (b, q) in [&bp, &bq] {
            let h = g.branches[*b].h.eval_f64(0, q);
            let dh = h[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
            if dh > 1e-9 {
                return Err(GeomError::Precondition(format!(
                    "dh = {dh:e} ≠ 0 at a self-intersection preimage on branch {b}"
                )));
            }
        }
        pairs.push((dp.clone(), bp, bq));
    }
    let t_half = spec.t_extent * eps;
    let homotopy = DoubleBottleneckHomotopy {
        branches: g.branches.clone(),
        rho: spec.rho(),
        n,
        t_half,
        periods: g.base.domain_periods(),
    };
    let label = Label::new("double-bottleneck", &[("epsilon", eps)]).note(format!("base {}", g.base.label));
    let h = HomotopyWithPrimitive::new(label, g.base.ambient.clone(), Arc::new(homotopy), (-t_half, t_half));
    let mut imm = make_suspension(&h);
    imm.label.model = "double-bottleneck".into();
    for (dp, (bp, qp), (bq, qq)) in pairs {
        for (i, t) in spec.bottleneck_times().into_iter().enumerate() {
            let mut up = qp.clone();
            up.push(t);
            let mut uq = qq.clone();
            uq.push(t);
            imm.double_points.push(KnownDoublePoint {
                label_p: format!("({},{i})", dp.label_p),
                label_q: format!("({},{i})", dp.label_q),
                p: ChartPoint::new(bp, up),
                q: ChartPoint::new(bq, uq),
            });
        }
    }
    let [t0, t1] = spec.bottleneck_times();
    imm.meta.insert("bottleneck_t0".into(), t0);
    imm.meta.insert("bottleneck_t1".into(), t1);
    Ok(imm)
}

fn branch_of(g: &ExactGraphs, cands: &[(usize, Vec<f64>)], pt: &ChartPoint) -> Option<(usize, Vec<f64>)> {
    let x = g.base.domain_point(pt);
    let periods = g.base.domain_periods();
    cands
        .iter()
        .find(|(b, q)| super::smooth::domain_distance(&(g.branches[*b].domain_of)(q), &x, &periods) < 1e-7)
        .cloned()
}

/// The profile ρ(t, s) = t(1 − S(s)φ(|t|)) with φ(u) = 1 − S((u − ε/3)/(ε/3)), S the quintic smoothstep.
///
/// It is t for s ≤ 0 or |t| ≥ 2ε/3, vanishes for |t| ≤ ε/3 at s = 1, and is constant in s for s ≥ 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationProfile {
    pub epsilon: f64,
}

impl TruncationProfile {
    pub fn description(&self) -> String {
        format!("rho(t,s) = t(1 - S(s) phi(|t|)), phi(u) = 1 - S(3u/eps - 1), S = 6x^5-15x^4+10x^3, eps = {}", self.epsilon)
    }

    pub fn phi<D: Real>(&self, a: D) -> D {
        let e3 = self.epsilon / 3.0;
        D::cst(1.0) - smoothstep((a - e3) * (1.0 / e3))
    }

    pub fn phi_prime<D: Real>(&self, a: D) -> D {
        let e3 = self.epsilon / 3.0;
        -smoothstep_prime((a - e3) * (1.0 / e3)) * (1.0 / e3)
    }

    fn abs<D: Real>(t: D) -> (D, f64) {
        if t.val() < 0.0 {
            (-t, -1.0)
        } else {
            (t, 1.0)
        }
    }

    pub fn rho<D: Real>(&self, t: D, s: D) -> D {
        let (a, _) = Self::abs(t);
        t * (D::cst(1.0) - smoothstep(s) * self.phi(a))
    }

    pub fn drho_dt<D: Real>(&self, t: D, s: D) -> D {
        let (a, _) = Self::abs(t);
        D::cst(1.0) - smoothstep(s) * (self.phi(a) + a * self.phi_prime(a))
    }

    pub fn drho_ds<D: Real>(&self, t: D, s: D) -> D {
        let (a, _) = Self::abs(t);
        -t * smoothstep_prime(s) * self.phi(a)
    }
}

/// Reparameterized homotopy (q, t) ↦ (i_{σ(t)}(q), σ′(t)H_{σ(t)}(q)) where σ freezes time beyond each cut.
pub struct TruncatedHomotopy {
    pub inner: Arc<dyn SmoothMap>,
    pub profile: TruncationProfile,
    pub t_minus: f64,
    pub t_plus: f64,
    pub t_lo: f64,
    pub t_hi: f64,
}

impl TruncatedHomotopy {
    /// σ(t) and σ′(t).
    pub fn sigma<D: Real>(&self, t: D) -> (D, D) {
        let mid = if self.t_minus.is_finite() { 0.5 * (self.t_minus + self.t_plus) } else { f64::NEG_INFINITY };
        let (cut, side) = if t.val() >= mid { (self.t_plus, 1.0) } else { (self.t_minus, -1.0) };
        let u = t - cut;
        if u.val() * side >= 0.0 {
            return (D::cst(cut), D::cst(0.0));
        }
        let one = D::cst(1.0);
        (
            self.profile.rho(u, one) + cut,
            self.profile.drho_dt(u, one),
        )
    }
}

impl Formula for TruncatedHomotopy {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn out_dim(&self) -> usize {
        self.inner.out_dim()
    }
    fn charts(&self) -> Vec<Chart> {
        let (lo_t, hi_t) = (self.t_lo, self.t_hi);
        let probe = (self.inner.charts(), self.sigma_f64_fn());
        probe
            .0
            .into_iter()
            .map(|c| {
                let d = c.dim() - 1;
                let mut lo = c.lo.clone();
                let mut hi = c.hi.clone();
                lo[d] = lo_t;
                hi[d] = hi_t;
                let acc = c.accept.clone();
                let sig = probe.1.clone();
                let mut out = Chart::boxed(c.label.clone(), lo, hi);
                if let Some(a) = acc {
                    out = out.with_accept(move |u: &[f64]| {
                        let mut v = u.to_vec();
                        v[d] = sig(u[d]);
                        a(&v)
                    });
                }
                out
            })
            .collect()
    }
    fn eval<D: Real>(&self, chart: usize, u: &[D]) -> Vec<D> {
        let d = u.len() - 1;
        let (s, ds) = self.sigma(u[d]);
        let mut v = u.to_vec();
        v[d] = s;
        let mut out = D::call(&*self.inner, chart, &v);
        let h = out.pop().expect("primitive slot");
        out.push(h * ds);
        out
    }
    fn domain_point(&self, chart: usize, u: &[f64]) -> Vec<f64> {
        let d = u.len() - 1;
        let mut v = u.to_vec();
        v[d] = self.sigma(u[d]).0;
        let mut x = self.inner.domain_point(chart, &v);
        let last = x.len() - 1;
        x[last] = u[d];
        x
    }
    fn domain_periods(&self) -> Vec<Option<f64>> {
        self.inner.domain_periods()
    }
    fn locate(&self, _x: &[f64]) -> Option<(usize, Vec<f64>)> {
        None
    }
}

impl TruncatedHomotopy {
    fn sigma_f64_fn(&self) -> Arc<dyn Fn(f64) -> f64 + Send + Sync> {
        let me = TruncatedHomotopy {
            inner: self.inner.clone(),
            profile: self.profile,
            t_minus: self.t_minus,
            t_plus: self.t_plus,
            t_lo: self.t_lo,
            t_hi: self.t_hi,
        };
        Arc::new(move |t| me.sigma(t).0)
    }
}

/// Charts of several maps side by side, indexed consecutively.
pub struct UnionMap {
    pub parts: Vec<(Arc<dyn SmoothMap>, Vec<Chart>)>,
}

impl UnionMap {
    fn split(&self, mut c: usize) -> (usize, usize) {
        for (i, (_, ch)) in self.parts.iter().enumerate() {
            if c < ch.len() {
                return (i, c);
            }
            c -= ch.len();
        }
        panic!("chart index out of range")
    }
}

impl Formula for UnionMap {
    fn dim(&self) -> usize {
        self.parts[0].0.dim()
    }
    fn out_dim(&self) -> usize {
        self.parts[0].0.out_dim()
    }
    fn charts(&self) -> Vec<Chart> {
        self.parts.iter().flat_map(|(_, c)| c.iter().cloned()).collect()
    }
    fn eval<D: Real>(&self, chart: usize, u: &[D]) -> Vec<D> {
        let (i, c) = self.split(chart);
        D::call(&*self.parts[i].0, c, u)
    }
    fn domain_point(&self, chart: usize, u: &[f64]) -> Vec<f64> {
        let (i, c) = self.split(chart);
        self.parts[i].0.domain_point(c, u)
    }
    fn domain_periods(&self) -> Vec<Option<f64>> {
        self.parts[0].0.domain_periods()
    }
    fn locate(&self, x: &[f64]) -> Option<(usize, Vec<f64>)> {
        let mut off = 0;
        for (m, ch) in &self.parts {
            if let Some((c, u)) = m.locate(x) {
                return Some((off + c, u));
            }
            off += ch.len();
        }
        None
    }
}

/// Length of the cylindrical ends attached by [`truncate`].
pub const END_LENGTH: f64 = 1.0;

/// The truncation K‖_{[t−, t+]}; `t_minus` may be −∞.
///
/// Near each finite cut K must be the suspension of its homotopy on [t± − ε, t± + ε];
/// otherwise a critical value lies within ε of the cut and this fails.
pub fn truncate(
    k: &Immersion,
    t_minus: f64,
    t_plus: f64,
    profile: TruncationProfile,
) -> Result<Immersion, GeomError> {
    let eps = profile.epsilon;
    if !(eps > 0.0) {
        return Err(GeomError::Parameter("truncation epsilon must be positive".into()));
    }
    if !t_plus.is_finite() || t_minus >= t_plus {
        return Err(GeomError::Parameter("need t- < t+ with t+ finite".into()));
    }
    if t_minus.is_finite() && t_plus - t_minus < 4.0 * eps / 3.0 {
        return Err(GeomError::Parameter("window [t-, t+] narrower than 4 eps / 3".into()));
    }
    let slot = k
        .ambient
        .cobordism_slot
        .ok_or_else(|| GeomError::Precondition("truncation needs a cobordism coordinate".into()))?;
    let h = k
        .homotopy
        .as_ref()
        .ok_or_else(|| GeomError::Precondition("input carries no suspension homotopy near the cuts".into()))?;
    for cut in [t_minus, t_plus].into_iter().filter(|c| c.is_finite()) {
        if cut - eps <= h.t_range.0 || cut + eps >= h.t_range.1 {
            return Err(GeomError::Precondition(format!(
                "cut {cut} is within eps = {eps} of a critical value (suspension covers only {:?})",
                h.t_range
            )));
        }
    }
    let t_lo = if t_minus.is_finite() { t_minus - END_LENGTH } else { t_plus - eps };
    let th = TruncatedHomotopy { inner: h.map.clone(), profile, t_minus, t_plus, t_lo, t_hi: t_plus + END_LENGTH };
    let sigma = th.sigma_f64_fn();
    let new_h = HomotopyWithPrimitive::new(
        {
            let mut l = h.label.clone();
            l.model = format!("truncated[{}]", l.model);
            l
        },
        h.ambient.clone(),
        Arc::new(th),
        (t_lo, t_plus + END_LENGTH),
    );
    let sus = make_suspension(&new_h);
    let mut parts: Vec<(Arc<dyn SmoothMap>, Vec<Chart>)> = Vec::new();
    let covers_all = t_minus.is_finite() && h.t_range.0 < t_minus - eps;
    let margin = 0.8 * eps;
    let (keep_lo, keep_hi) = (t_minus + margin, t_plus - margin);
    if !covers_all {
        // the original away from the cuts, where it is untouched
        let orig = k.map().clone();
        let charts: Vec<Chart> = k
            .charts()
            .into_iter()
            .enumerate()
            .map(|(ci, c)| {
                let o = orig.clone();
                c.with_accept(move |u: &[f64]| {
                    let t = o.eval_f64(ci, u)[2 * slot];
                    t >= keep_lo && t <= keep_hi
                })
            })
            .collect();
        parts.push((orig, charts));
    }
    parts.push((sus.map().clone(), sus.charts()));
    let mut label = k.label.clone();
    label.model = format!("truncation[{}]", label.model);
    label.params.insert("t_minus".into(), t_minus);
    label.params.insert("t_plus".into(), t_plus);
    label = label.note(profile.description());
    let mut out = Immersion::new(label, k.ambient.clone(), Arc::new(UnionMap { parts }));
    let hh = h.clone();
    let orig_slice = k.slice_fn.clone();
    out.slice_fn = Some(Arc::new(move |t: f64| {
        if t > t_plus + END_LENGTH || (t_minus.is_finite() && t < t_minus - END_LENGTH) {
            return None;
        }
        let s = sigma(t);
        if s > hh.t_range.0 && s < hh.t_range.1 {
            Some(hh.slice_immersion(s))
        } else {
            orig_slice.as_ref().and_then(|f| f(s))
        }
    }));
    if covers_all {
        out.homotopy = Some(new_h);
    }
    out.meta.insert("epsilon".into(), eps);
    Ok(out)
}
