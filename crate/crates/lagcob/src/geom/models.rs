//! Closed-form standard models: Whitney spheres, surgery traces, tori and circles in T*S¹.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use super::smooth::{Chart, Formula, Real};
use super::{AmbientSpace, AreaLoop, ChartPoint, GeomError, Immersion, KnownDoublePoint, Label};

/// Teardrop area of the Whitney sphere of radius r.
pub fn whitney_area(r: f64) -> f64 {
    4.0 / 3.0 * r.powi(3)
}

/// Radius of the Whitney sphere of teardrop area A.
pub fn whitney_radius(a: f64) -> f64 {
    (3.0 * a / 4.0).cbrt()
}

/// Two stereographic charts of Sⁿ_r ⊂ ℝⁿ⁺¹ with poles on the last axis.
///
/// Chart 0 covers x_n ≥ 0 and chart 1 covers x_n ≤ 0 when |w| ≤ 1.
#[derive(Debug, Clone, Copy)]
pub struct SphereCharts {
    pub n: usize,
    pub r: f64,
}

impl SphereCharts {
    pub fn point<D: Real>(&self, chart: usize, w: &[D]) -> Vec<D> {
        let s = w.iter().fold(D::cst(0.0), |acc, &x| acc + x * x);
        let den = (s + 1.0).recip();
        let mut x: Vec<D> = w.iter().map(|&wi| wi * den * (2.0 * self.r)).collect();
        let last = (D::cst(1.0) - s) * den * self.r;
        x.push(if chart == 0 { last } else { -last });
        x
    }

    pub fn locate(&self, x: &[f64]) -> (usize, Vec<f64>) {
        let xn = x[self.n];
        let chart = if xn >= 0.0 { 0 } else { 1 };
        let den = self.r + xn.abs();
        (chart, x[..self.n].iter().map(|v| v / den).collect())
    }

    pub fn charts(&self, tag: &str) -> Vec<Chart> {
        ["upper", "lower"]
            .iter()
            .map(|h| {
                Chart::cube(format!("{tag}:{h}"), self.n, 1.0)
                    .with_accept(|w: &[f64]| w.iter().map(|v| v * v).sum::<f64>() <= 1.0)
            })
            .collect()
    }
}

fn push_c<D: Real>(out: &mut Vec<D>, re: D, im: D) {
    out.push(re);
    out.push(im);
}

/// Whitney sphere z_i = x_i(1 + 2𝚥x₀) on Sⁿ_r.
#[derive(Debug, Clone, Copy)]
pub struct WhitneyFormula {
    pub sphere: SphereCharts,
}

impl Formula for WhitneyFormula {
    fn dim(&self) -> usize {
        self.sphere.n
    }
    fn out_dim(&self) -> usize {
        2 * self.sphere.n
    }
    fn charts(&self) -> Vec<Chart> {
        self.sphere.charts("S")
    }
    fn eval<D: Real>(&self, chart: usize, w: &[D]) -> Vec<D> {
        let x = self.sphere.point(chart, w);
        let mut out = Vec::with_capacity(2 * self.sphere.n);
        for &xi in &x[1..] {
            push_c(&mut out, xi, x[0] * xi * 2.0);
        }
        out
    }
    fn domain_point(&self, chart: usize, w: &[f64]) -> Vec<f64> {
        self.sphere.point(chart, w)
    }
    fn locate(&self, x: &[f64]) -> Option<(usize, Vec<f64>)> {
        (x.len() == self.sphere.n + 1).then(|| self.sphere.locate(x))
    }
}

fn axis_point(len: usize, value: f64) -> Vec<f64> {
    let mut x = vec![0.0; len];
    x[0] = value;
    x
}

/// The Whitney sphere of radius r; its teardrop class has area (4/3)r³.
pub fn make_whitney_sphere(n: usize, r: f64) -> Result<Immersion, GeomError> {
    if n < 1 {
        return Err(GeomError::Parameter("Whitney sphere needs n ≥ 1".into()));
    }
    if !(r > 0.0) {
        return Err(GeomError::Parameter("Whitney radius must be positive".into()));
    }
    let sphere = SphereCharts { n, r };
    let f = WhitneyFormula { sphere };
    let label = Label::new("whitney", &[("n", n as f64), ("r", r)])
        .note(format!("teardrop area A = 4r^3/3 = {}", whitney_area(r)));
    let mut imm = Immersion::new(label, AmbientSpace::new(n, None)?, Arc::new(f));
    let (cp, up) = sphere.locate(&axis_point(n + 1, r));
    let (cq, uq) = sphere.locate(&axis_point(n + 1, -r));
    imm.double_points.push(KnownDoublePoint {
        label_p: "q+".into(),
        label_q: "q-".into(),
        p: ChartPoint::new(cp, up),
        q: ChartPoint::new(cq, uq),
    });
    // Equator x_2 = … = 0 drawn in the (q₁, p₁) plane: one loop per sign of x₁.
    for (name, a, b) in [("lobe x1>0", 0.0, PI), ("lobe x1<0", PI, TAU)] {
        let seg = move |s: f64| {
            let phi = a + s * (b - a);
            let mut x = vec![0.0; n + 1];
            x[0] = r * phi.cos();
            x[1] = r * phi.sin();
            x
        };
        imm.area_loops.push(AreaLoop { label: name.into(), coord: 0, segments: vec![Arc::new(seg)] });
    }
    imm.meta.insert("teardrop_area".into(), whitney_area(r));
    Ok(imm)
}

/// The quadratic trace family (x_i + 2𝚥σ_i x_i x₀, x₀² + Σσ_i x_i² − 𝚥x₀).
#[derive(Debug, Clone)]
pub struct TraceFormula {
    pub sigma: Vec<f64>,
    pub half: f64,
}

impl Formula for TraceFormula {
    fn dim(&self) -> usize {
        self.sigma.len() + 1
    }
    fn out_dim(&self) -> usize {
        2 * (self.sigma.len() + 1)
    }
    fn charts(&self) -> Vec<Chart> {
        vec![Chart::cube("R^(n+1)", self.sigma.len() + 1, self.half)]
    }
    fn eval<D: Real>(&self, _chart: usize, x: &[D]) -> Vec<D> {
        let mut out = Vec::with_capacity(self.out_dim());
        let mut h = x[0] * x[0];
        for (i, &s) in self.sigma.iter().enumerate() {
            let xi = x[i + 1];
            push_c(&mut out, xi, x[0] * xi * (2.0 * s));
            h += xi * xi * s;
        }
        push_c(&mut out, h, -x[0]);
        out
    }
}

/// Whitney-sphere slices of the null cobordism as an exact homotopy over t > 0.
#[derive(Debug, Clone, Copy)]
struct NullSliceHomotopy {
    n: usize,
    t_max: f64,
}

impl Formula for NullSliceHomotopy {
    fn dim(&self) -> usize {
        self.n + 1
    }
    fn out_dim(&self) -> usize {
        2 * self.n + 1
    }
    fn charts(&self) -> Vec<Chart> {
        let s = SphereCharts { n: self.n, r: 1.0 };
        s.charts("S")
            .into_iter()
            .map(|c| {
                let mut lo = c.lo.clone();
                let mut hi = c.hi.clone();
                lo.push(0.0);
                hi.push(self.t_max);
                let n = self.n;
                Chart::boxed(c.label, lo, hi)
                    .with_accept(move |u: &[f64]| u[..n].iter().map(|v| v * v).sum::<f64>() <= 1.0 && u[n] > 0.0)
            })
            .collect()
    }
    fn eval<D: Real>(&self, chart: usize, u: &[D]) -> Vec<D> {
        let t = u[self.n];
        let rt = t.sqrt();
        let xh = SphereCharts { n: self.n, r: 1.0 }.point(chart, &u[..self.n]);
        let x: Vec<D> = xh.iter().map(|&v| v * rt).collect();
        let mut out = Vec::with_capacity(self.out_dim());
        for &xi in &x[1..] {
            push_c(&mut out, xi, x[0] * xi * 2.0);
        }
        // the cobordism coordinate is t − 𝚥x₀, so H_t = −x₀
        out.push(-x[0]);
        out
    }
}

impl NullSliceHomotopy {
    fn into_homotopy(self) -> super::HomotopyWithPrimitive {
        super::HomotopyWithPrimitive::new(
            Label::new("null-cobordism-slices", &[("n", self.n as f64)]),
            AmbientSpace::new(self.n, None).expect("n ≥ 1"),
            Arc::new(self),
            (0.0, self.t_max),
        )
    }
}

fn trace_immersion(label: Label, sigma: Vec<f64>, half: f64) -> Result<Immersion, GeomError> {
    let n = sigma.len();
    let f = TraceFormula { sigma, half };
    Ok(Immersion::new(label, AmbientSpace::new(n + 1, Some(n))?, Arc::new(f)))
}

/// The null cobordism j^{n,1}: its slice at t > 0 is the Whitney sphere of radius √t.
pub fn make_null_cobordism(n: usize) -> Result<Immersion, GeomError> {
    if n < 1 {
        return Err(GeomError::Parameter("null cobordism needs n ≥ 1".into()));
    }
    let mut imm = trace_immersion(Label::new("null-cobordism", &[("n", n as f64)]), vec![1.0; n], 1.5)?;
    imm.homotopy = Some(NullSliceHomotopy { n, t_max: 4.0 }.into_homotopy());
    imm.slice_fn = Some(Arc::new(move |t: f64| if t > 0.0 { make_whitney_sphere(n, t.sqrt()).ok() } else { None }));
    Ok(imm)
}

/// The local (k, n−k+1) surgery trace.
pub fn make_local_surgery_trace(k: usize, n: usize) -> Result<Immersion, GeomError> {
    if n < 1 || k > n {
        return Err(GeomError::Parameter(format!("local trace needs 0 ≤ k ≤ n, n ≥ 1 (got k={k}, n={n})")));
    }
    let sigma: Vec<f64> = (1..=n).map(|i| if i <= k { 1.0 } else { -1.0 }).collect();
    let mut imm = trace_immersion(Label::new("local-trace", &[("k", k as f64), ("n", n as f64)]), sigma, 1.5)?;
    // x = (±1, 0, …) share their X-image on the slice t = 1.
    imm.meta.insert("slice_double_point_t".into(), 1.0);
    imm.meta.insert("critical_value".into(), 0.0);
    Ok(imm)
}

/// The slice L^{k,n−k,±} of the local trace at t = ±1 as an explicit immersion in ℂⁿ.
///
/// The positive slice x₀² + Σσx² = 1 is parameterized by positive coordinates
/// P = (x₀, x₁..x_k) = √(1+|N|²)·ω with ω ∈ Sᵏ and N the negative coordinates.
pub fn make_local_slice(k: usize, n: usize, positive: bool) -> Result<Immersion, GeomError> {
    if n < 1 || k > n || (!positive && k == n) {
        return Err(GeomError::Parameter(format!("no {} slice for k={k}, n={n}", if positive { "positive" } else { "negative" })));
    }
    let f = QuadricSlice { k, n, positive, half: 1.5, scale: 1.0 };
    let label = Label::new(if positive { "local-slice+" } else { "local-slice-" }, &[("k", k as f64), ("n", n as f64)]);
    let mut imm = Immersion::new(label, AmbientSpace::new(n, None)?, Arc::new(f.clone()));
    if positive {
        let mut xp = vec![0.0; n + 1];
        xp[0] = 1.0;
        let mut xm = xp.clone();
        xm[0] = -1.0;
        let p = f.locate(&xp).map(|(c, u)| ChartPoint::new(c, u)).expect("on slice");
        let q = f.locate(&xm).map(|(c, u)| ChartPoint::new(c, u)).expect("on slice");
        imm.double_points.push(KnownDoublePoint { label_p: "q+".into(), label_q: "q-".into(), p, q });
    }
    Ok(imm)
}

/// Parameterization of the level sets x₀² + Σσ_i x_i² = ±1 mapped by the trace formula.
#[derive(Debug, Clone)]
pub struct QuadricSlice {
    pub k: usize,
    pub n: usize,
    pub positive: bool,
    pub half: f64,
    /// The level is ±scale², with the free block scaled along.
    pub scale: f64,
}

impl QuadricSlice {
    pub fn sphere_dim(&self) -> usize {
        if self.positive {
            self.k
        } else {
            self.n - self.k - 1
        }
    }

    /// Domain point x ∈ ℝⁿ⁺¹ for chart coordinates (ω-chart, free block).
    pub fn point<D: Real>(&self, chart: usize, u: &[D]) -> Vec<D> {
        let sd = self.sphere_dim();
        let (w, free) = u.split_at(sd);
        let fsq = free.iter().fold(D::cst(0.0), |a, &v| a + v * v);
        let scale = (fsq + 1.0).sqrt();
        let omega: Vec<D> = if sd == 0 {
            vec![D::cst(if chart == 0 { 1.0 } else { -1.0 })]
        } else {
            SphereCharts { n: sd, r: 1.0 }.point(chart, w)
        };
        let sc = self.scale;
        let mut x = vec![D::cst(0.0); self.n + 1];
        if self.positive {
            // sphere block: x₀, x₁..x_k ; free block: x_{k+1}..x_n
            for (i, o) in omega.iter().enumerate() {
                x[i] = *o * scale * sc;
            }
            for (j, f) in free.iter().enumerate() {
                x[self.k + 1 + j] = *f * sc;
            }
        } else {
            // sphere block: x_{k+1}..x_n ; free block: x₀, x₁..x_k
            for (j, f) in free.iter().enumerate() {
                x[j] = *f * sc;
            }
            for (i, o) in omega.iter().enumerate() {
                x[self.k + 1 + i] = *o * scale * sc;
            }
        }
        x
    }

    pub fn sigma(&self, i: usize) -> f64 {
        if i <= self.k {
            1.0
        } else {
            -1.0
        }
    }
}

impl Formula for QuadricSlice {
    fn dim(&self) -> usize {
        self.n
    }
    fn out_dim(&self) -> usize {
        2 * self.n
    }
    fn charts(&self) -> Vec<Chart> {
        let sd = self.sphere_dim();
        let fd = self.n - sd;
        let half = self.half;
        (0..2)
            .map(|c| {
                let mut lo = vec![-1.0; sd];
                let mut hi = vec![1.0; sd];
                lo.extend(std::iter::repeat_n(-half, fd));
                hi.extend(std::iter::repeat_n(half, fd));
                Chart::boxed(format!("slice:{c}"), lo, hi)
                    .with_accept(move |u: &[f64]| u[..sd].iter().map(|v| v * v).sum::<f64>() <= 1.0)
            })
            .collect()
    }
    fn eval<D: Real>(&self, chart: usize, u: &[D]) -> Vec<D> {
        let x = self.point(chart, u);
        let mut out = Vec::with_capacity(2 * self.n);
        for i in 1..=self.n {
            push_c(&mut out, x[i], x[0] * x[i] * (2.0 * self.sigma(i)));
        }
        out
    }
    fn domain_point(&self, chart: usize, u: &[f64]) -> Vec<f64> {
        self.point(chart, u)
    }
    fn locate(&self, x: &[f64]) -> Option<(usize, Vec<f64>)> {
        if x.len() != self.n + 1 {
            return None;
        }
        let sd = self.sphere_dim();
        let x: Vec<f64> = x.iter().map(|v| v / self.scale).collect();
        let (block, free): (Vec<f64>, Vec<f64>) = if self.positive {
            (x[..=self.k].to_vec(), x[self.k + 1..].to_vec())
        } else {
            (x[self.k + 1..].to_vec(), x[..=self.k].to_vec())
        };
        let scale = (1.0 + free.iter().map(|v| v * v).sum::<f64>()).sqrt();
        let omega: Vec<f64> = block.iter().map(|v| v / scale).collect();
        let (chart, w) = if sd == 0 {
            (if omega[0] >= 0.0 { 0 } else { 1 }, Vec::new())
        } else {
            SphereCharts { n: sd, r: 1.0 }.locate(&omega)
        };
        let mut u = w;
        u.extend(free);
        Some((chart, u))
    }
}

/// Product torus sheared by (q₁ + ½q₂ + 𝚥(4/3 p₁ − 2/3 p₂), q₂ + ½q₁ + 𝚥(4/3 p₂ − 2/3 p₁)).
#[derive(Debug, Clone, Copy)]
pub struct ShearedTorus;

pub const SHEAR_Q: [[f64; 2]; 2] = [[1.0, 0.5], [0.5, 1.0]];
pub const SHEAR_P: [[f64; 2]; 2] = [[4.0 / 3.0, -2.0 / 3.0], [-2.0 / 3.0, 4.0 / 3.0]];

/// The linear shear applied to (q₁, p₁, q₂, p₂).
pub fn shear<D: Real>(q: [D; 2], p: [D; 2]) -> [D; 4] {
    [
        q[0] * SHEAR_Q[0][0] + q[1] * SHEAR_Q[0][1],
        p[0] * SHEAR_P[0][0] + p[1] * SHEAR_P[0][1],
        q[0] * SHEAR_Q[1][0] + q[1] * SHEAR_Q[1][1],
        p[0] * SHEAR_P[1][0] + p[1] * SHEAR_P[1][1],
    ]
}

impl Formula for ShearedTorus {
    fn dim(&self) -> usize {
        2
    }
    fn out_dim(&self) -> usize {
        4
    }
    fn charts(&self) -> Vec<Chart> {
        vec![Chart::boxed("T2", vec![0.0, 0.0], vec![TAU, TAU])]
    }
    fn eval<D: Real>(&self, _chart: usize, th: &[D]) -> Vec<D> {
        shear([th[0].cos(), th[1].cos()], [th[0].sin(), th[1].sin()]).to_vec()
    }
    fn domain_periods(&self) -> Vec<Option<f64>> {
        vec![Some(TAU), Some(TAU)]
    }
}

/// The sheared product torus, with π_ℝ the real part of the first coordinate.
pub fn make_sheared_torus() -> Result<Immersion, GeomError> {
    let label = Label::new("sheared-torus", &[]).note("product torus (cos θ1 + j sin θ1, cos θ2 + j sin θ2) before shearing");
    Ok(Immersion::new(label, AmbientSpace::new(2, Some(0))?, Arc::new(ShearedTorus)))
}

/// The unsheared product torus.
#[derive(Debug, Clone, Copy)]
pub struct ProductTorus;

impl Formula for ProductTorus {
    fn dim(&self) -> usize {
        2
    }
    fn out_dim(&self) -> usize {
        4
    }
    fn charts(&self) -> Vec<Chart> {
        vec![Chart::boxed("T2", vec![0.0, 0.0], vec![TAU, TAU])]
    }
    fn eval<D: Real>(&self, _chart: usize, th: &[D]) -> Vec<D> {
        vec![th[0].cos(), th[0].sin(), th[1].cos(), th[1].sin()]
    }
    fn domain_periods(&self) -> Vec<Option<f64>> {
        vec![Some(TAU), Some(TAU)]
    }
}

pub fn make_product_torus() -> Result<Immersion, GeomError> {
    Ok(Immersion::new(Label::new("product-torus", &[]), AmbientSpace::new(2, None)?, Arc::new(ProductTorus)))
}

/// θ ↦ (2θ, (E/8) sin θ) in T*S¹.
#[derive(Debug, Clone, Copy)]
pub struct FigureEight {
    pub e: f64,
}

impl Formula for FigureEight {
    fn dim(&self) -> usize {
        1
    }
    fn out_dim(&self) -> usize {
        2
    }
    fn charts(&self) -> Vec<Chart> {
        vec![Chart::boxed("S1", vec![0.0], vec![TAU])]
    }
    fn eval<D: Real>(&self, _chart: usize, th: &[D]) -> Vec<D> {
        vec![th[0] * 2.0, th[0].sin() * (self.e / 8.0)]
    }
    fn domain_periods(&self) -> Vec<Option<f64>> {
        vec![Some(TAU)]
    }
}

/// The figure-eight curve L_E, one double point at base point 0.
pub fn make_figure_eight(e: f64) -> Result<Immersion, GeomError> {
    if !(e > 0.0) {
        return Err(GeomError::Parameter("figure-eight needs E > 0".into()));
    }
    let ambient = AmbientSpace::with_periods(1, None, vec![Some(TAU)])?;
    let mut imm = Immersion::new(Label::new("figure-eight", &[("E", e)]), ambient, Arc::new(FigureEight { e }));
    imm.double_points.push(KnownDoublePoint {
        label_p: "0".into(),
        label_q: "pi".into(),
        p: ChartPoint::new(0, vec![0.0]),
        q: ChartPoint::new(0, vec![PI]),
    });
    let upper = |s: f64| vec![PI * s];
    let lower = |s: f64| vec![TAU - PI * s];
    imm.area_loops.push(AreaLoop {
        label: "between branches".into(),
        coord: 0,
        segments: vec![Arc::new(upper), Arc::new(lower)],
    });
    Ok(imm)
}

/// θ ↦ (θ, E′/2π).
#[derive(Debug, Clone, Copy)]
pub struct Section {
    pub height: f64,
}

impl Formula for Section {
    fn dim(&self) -> usize {
        1
    }
    fn out_dim(&self) -> usize {
        2
    }
    fn charts(&self) -> Vec<Chart> {
        vec![Chart::boxed("S1", vec![0.0], vec![TAU])]
    }
    fn eval<D: Real>(&self, _chart: usize, th: &[D]) -> Vec<D> {
        vec![th[0], D::cst(self.height)]
    }
    fn domain_periods(&self) -> Vec<Option<f64>> {
        vec![Some(TAU)]
    }
}

/// The constant section at height E′/2π; with the zero section it bounds an annulus of area E′.
pub fn make_section(e_prime: f64) -> Result<Immersion, GeomError> {
    if !e_prime.is_finite() {
        return Err(GeomError::Parameter("E' must be finite".into()));
    }
    let ambient = AmbientSpace::with_periods(1, None, vec![Some(TAU)])?;
    let mut imm =
        Immersion::new(Label::new("section", &[("Eprime", e_prime)]), ambient, Arc::new(Section { height: e_prime / TAU }));
    imm.area_loops.push(AreaLoop {
        label: "annulus with zero section".into(),
        coord: 0,
        segments: vec![Arc::new(|s: f64| vec![TAU * s])],
    });
    Ok(imm)
}

/// Graph of the 1-form p = (q₂, 0) over ℝ², which is not closed.
#[derive(Debug, Clone, Copy)]
pub struct NonClosedGraph;

impl Formula for NonClosedGraph {
    fn dim(&self) -> usize {
        2
    }
    fn out_dim(&self) -> usize {
        4
    }
    fn charts(&self) -> Vec<Chart> {
        vec![Chart::cube("R2", 2, 1.0)]
    }
    fn eval<D: Real>(&self, _chart: usize, q: &[D]) -> Vec<D> {
        vec![q[0], q[1], q[1], D::cst(0.0)]
    }
}

pub fn make_nonclosed_graph() -> Result<Immersion, GeomError> {
    Ok(Immersion::new(Label::new("nonclosed-graph", &[]), AmbientSpace::new(2, None)?, Arc::new(NonClosedGraph)))
}
