//! The double-bottlenecked surgery trace K^{k,n−k+1}_{A,B}.
//!
//! Start from the quadric Q = {x₀² + x₁² + Σ_{i≥2} σᵢxᵢ² = R²} ⊂ ℝⁿ⁺², mapped by
//! xᵢ ↦ xᵢ(1 + 2𝚥σᵢx₀) with x₁ as the cobordism coordinate. Its slice at x₁ = s
//! is L^{k,n−k,+} scaled by r(s) = √(R² − s²), with primitive H_s = 2s·x₀.
//! Retiming s = g(t) = s_c + κ(t³ − t) creates bottlenecks at t = ∓1/√3: the
//! slice teardrop there has area A, and the strip between them has area B.

use std::sync::Arc;

use super::models::{QuadricSlice, SphereCharts};
use super::smooth::{Chart, Formula, Real};
use super::{AmbientSpace, AreaLoop, ChartPoint, GeomError, Immersion, KnownDoublePoint, Label};

/// Slice teardrop area as a function of the level x₁ = s.
pub fn level_area(radius: f64, s: f64) -> f64 {
    4.0 / 3.0 * (radius * radius - s * s).max(0.0).powf(1.5)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HandleGeometry {
    pub k: usize,
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub radius: f64,
    /// Levels at the two bottlenecks.
    pub s1: f64,
    pub s2: f64,
    pub s_c: f64,
    pub kappa: f64,
    /// The Q chart covers x₁ < s_b; the retimed chart starts at g(t_a) = s_a.
    pub s_a: f64,
    pub s_b: f64,
    pub t_a: f64,
    pub t_top: f64,
    pub half: f64,
}

impl HandleGeometry {
    pub fn new(k: usize, n: usize, a: f64, b: f64) -> Result<Self, GeomError> {
        if n < 1 || k > n {
            return Err(GeomError::Parameter(format!("handle needs 0 ≤ k ≤ n, n ≥ 1 (got k={k}, n={n})")));
        }
        if !(a > 0.0) || !(b > 0.0) {
            return Err(GeomError::Parameter("areas A and B must be positive".into()));
        }
        if b >= a {
            return Err(GeomError::Parameter(format!(
                "this realization needs B < A: the upper teardrop has area A - B = {}",
                a - b
            )));
        }
        let radius = (a / (4.0 / 3.0 * 0.75f64.powf(1.5))).cbrt();
        let s1 = -radius / 2.0;
        let r2 = (3.0 * (a - b) / 4.0).powf(2.0 / 3.0);
        let s2 = -(radius * radius - r2).sqrt();
        let s_c = 0.5 * (s1 + s2);
        let kappa = (s1 - s2) * 3.0 * 3f64.sqrt() / 4.0;
        let s_a = s1 - 0.5 * (s1 + radius);
        let s_b = s1 - 0.25 * (s1 + radius);
        let mut g = HandleGeometry {
            k,
            n,
            a,
            b,
            radius,
            s1,
            s2,
            s_c,
            kappa,
            s_a,
            s_b,
            t_a: 0.0,
            t_top: 1.2,
            half: 1.5 * radius,
        };
        g.t_a = g.tau(s_a);
        Ok(g)
    }

    pub fn bottleneck_times() -> [f64; 2] {
        let t = 1.0 / 3f64.sqrt();
        [-t, t]
    }

    pub fn g<D: Real>(&self, t: D) -> D {
        (t * t * t - t) * self.kappa + self.s_c
    }

    pub fn g_prime<D: Real>(&self, t: D) -> D {
        (t * t * 3.0 - 1.0) * self.kappa
    }

    pub fn r<D: Real>(&self, s: D) -> D {
        (D::cst(self.radius * self.radius) - s * s).sqrt()
    }

    /// Inverse of g on the increasing branch t < −1/√3.
    pub fn tau(&self, s: f64) -> f64 {
        let t0 = -1.0 / 3f64.sqrt();
        let mut lo = t0 - 1.0;
        while self.g(lo) > s {
            lo = t0 + 2.0 * (lo - t0);
        }
        let mut hi = t0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.g(mid) > s {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        let mut t = 0.5 * (lo + hi);
        for _ in 0..3 {
            let d = self.g_prime(t);
            if d.abs() > 1e-12 {
                t -= (self.g(t) - s) / d;
            }
        }
        t
    }

    /// τ in dual arithmetic, by Newton steps from the converged value.
    pub fn tau_d<D: Real>(&self, s: D) -> D {
        let mut t = D::cst(self.tau(s.val()));
        for _ in 0..3 {
            t -= (self.g(t) - s) / self.g_prime(t);
        }
        t
    }

    pub fn sigma(&self, i: usize) -> f64 {
        // slice index i ≥ 1 stands for x_{i+1}
        if i <= self.k {
            1.0
        } else {
            -1.0
        }
    }

    fn slice(&self, positive: bool, scale: f64) -> QuadricSlice {
        QuadricSlice { k: self.k, n: self.n, positive, half: self.half / self.radius, scale }
    }

    /// Time of the critical point x₁ = −R.
    pub fn critical_time(&self) -> f64 {
        self.tau(-self.radius)
    }
}

const R_CHARTS: usize = 2;

/// Charts 0, 1: (slice coordinates, t) with t ∈ [t_a, t_top]; chart 2: the quadric near x₁ = −R.
#[derive(Debug, Clone, Copy)]
pub struct HandleFormula {
    pub geo: HandleGeometry,
}

impl HandleFormula {
    /// Point of Q ⊂ ℝⁿ⁺² as (x₀, x₁, x₂, …).
    fn quadric_point<D: Real>(&self, chart: usize, u: &[D]) -> (Vec<D>, D) {
        let g = &self.geo;
        let n = g.n;
        if chart < R_CHARTS {
            let t = u[n];
            let s = g.g(t);
            let rr = g.r(s);
            let y = g.slice(true, 1.0).point(chart, &u[..n]);
            let mut x = Vec::with_capacity(n + 2);
            x.push(y[0] * rr);
            x.push(s);
            x.extend(y[1..].iter().map(|&v| v * rr));
            (x, t)
        } else {
            let (w, nn) = u.split_at(g.k + 1);
            let nsq = nn.iter().fold(D::cst(0.0), |a, &v| a + v * v);
            let scale = (nsq + g.radius * g.radius).sqrt();
            // sphere block ordered (x₀, x₂, …, x_{k+1}, x₁) with the pole on +x₁
            let blk = SphereCharts { n: g.k + 1, r: 1.0 }.point(1, w);
            let mut x = Vec::with_capacity(n + 2);
            x.push(blk[0] * scale);
            x.push(blk[g.k + 1] * scale);
            x.extend(blk[1..=g.k].iter().map(|&v| v * scale));
            x.extend_from_slice(nn);
            let t = g.tau_d(x[1]);
            (x, t)
        }
    }
}

impl Formula for HandleFormula {
    fn dim(&self) -> usize {
        self.geo.n + 1
    }
    fn out_dim(&self) -> usize {
        2 * (self.geo.n + 1)
    }
    fn charts(&self) -> Vec<Chart> {
        let g = self.geo;
        let mut out: Vec<Chart> = g
            .slice(true, 1.0)
            .charts()
            .into_iter()
            .map(|c| {
                let mut lo = c.lo.clone();
                let mut hi = c.hi.clone();
                lo.push(g.t_a);
                hi.push(g.t_top);
                let acc = c.accept.clone().expect("slice charts carry a predicate");
                Chart::boxed(format!("retimed:{}", c.label), lo, hi).with_accept(move |u: &[f64]| acc(&u[..g.n]))
            })
            .collect();
        let me = *self;
        let mut lo = vec![-1.0; g.k + 1];
        let mut hi = vec![1.0; g.k + 1];
        lo.extend(std::iter::repeat_n(-g.half, g.n - g.k));
        hi.extend(std::iter::repeat_n(g.half, g.n - g.k));
        out.push(Chart::boxed("quadric", lo, hi).with_accept(move |u: &[f64]| {
            u[..=g.k].iter().map(|v| v * v).sum::<f64>() <= 1.0 && me.quadric_point(2, u).0[1] < g.s_b
        }));
        out
    }
    fn eval<D: Real>(&self, chart: usize, u: &[D]) -> Vec<D> {
        let g = &self.geo;
        let (x, t) = self.quadric_point(chart, u);
        let mut out = Vec::with_capacity(2 * (g.n + 1));
        for i in 1..=g.n {
            let xi = x[i + 1];
            out.push(xi);
            out.push(x[0] * xi * (2.0 * g.sigma(i)));
        }
        out.push(t);
        out.push(x[1] * x[0] * g.g_prime(t) * 2.0);
        out
    }
    /// (x₀, x₂, …, x_{n+1}, t); x₁ = g(t) is implied.
    fn domain_point(&self, chart: usize, u: &[f64]) -> Vec<f64> {
        let (x, t) = self.quadric_point(chart, u);
        let mut y = vec![x[0]];
        y.extend_from_slice(&x[2..]);
        y.push(t);
        y
    }
    fn locate(&self, y: &[f64]) -> Option<(usize, Vec<f64>)> {
        let g = &self.geo;
        let n = g.n;
        if y.len() != n + 2 {
            return None;
        }
        let t = y[n + 1];
        let s = g.g(t);
        if t < 0.5 * (g.t_a + g.tau(g.s_b)) {
            let nn = &y[g.k + 1..=n];
            let scale = (g.radius * g.radius + nn.iter().map(|v| v * v).sum::<f64>()).sqrt();
            let mut blk = vec![y[0] / scale];
            blk.extend(y[1..=g.k].iter().map(|v| v / scale));
            blk.push(s / scale);
            let den = 1.0 - blk[g.k + 1];
            let mut u: Vec<f64> = blk[..=g.k].iter().map(|v| v / den).collect();
            u.extend_from_slice(nn);
            Some((2, u))
        } else {
            let rr = g.r(s);
            let yh: Vec<f64> = y[..=n].iter().map(|v| v / rr).collect();
            let (c, mut u) = g.slice(true, 1.0).locate(&yh)?;
            u.push(t);
            Some((c, u))
        }
    }
}

/// The double-bottlenecked (k, n−k+1) surgery trace with teardrop area A and strip area B.
pub fn make_bottlenecked_handle(k: usize, n: usize, a: f64, b: f64) -> Result<Immersion, GeomError> {
    let geo = HandleGeometry::new(k, n, a, b)?;
    let f = HandleFormula { geo };
    let label = Label::new("bottlenecked-handle", &[("k", k as f64), ("n", n as f64), ("A", a), ("B", b)])
        .note(format!("g(t) = {} + {} (t^3 - t), R = {}", geo.s_c, geo.kappa, geo.radius));
    let mut imm = Immersion::new(label, AmbientSpace::new(n + 1, Some(n))?, Arc::new(f));
    let [t0, t1] = HandleGeometry::bottleneck_times();
    // ŷ = (±1, 0, …) at both bottlenecks
    let at = move |t: f64, sign: f64| {
        let rr = geo.r(geo.g(t));
        let mut y = vec![0.0; n + 2];
        y[0] = sign * rr;
        y[n + 1] = t;
        y
    };
    for (i, t) in [(0, t0), (1, t1)] {
        let p = f.locate(&at(t, 1.0)).expect("on handle");
        let q = f.locate(&at(t, -1.0)).expect("on handle");
        imm.double_points.push(KnownDoublePoint {
            label_p: format!("(q+,{i})"),
            label_q: format!("(q-,{i})"),
            p: ChartPoint::new(p.0, p.1),
            q: ChartPoint::new(q.0, q.1),
        });
    }
    let seg_t = move |ta: f64, tb: f64, sign: f64| -> Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync> {
        Arc::new(move |s: f64| at(ta + s * (tb - ta), sign))
    };
    let tb = geo.tau(geo.s_b);
    let psi_b = (-geo.s_b / geo.radius).acos();
    let circle = {
        let r = geo.radius;
        Arc::new(move |s: f64| {
            let psi = psi_b * (1.0 - 2.0 * s);
            let mut y = vec![0.0; n + 2];
            y[0] = r * psi.sin();
            y[n + 1] = geo.tau(-r * psi.cos());
            y
        }) as Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>
    };
    imm.area_loops.push(AreaLoop {
        label: "teardrop at bottleneck 0".into(),
        coord: n,
        segments: vec![seg_t(t0, tb, 1.0), circle, seg_t(tb, t0, -1.0)],
    });
    imm.area_loops.push(AreaLoop {
        label: "strip between bottlenecks".into(),
        coord: n,
        segments: vec![seg_t(t0, t1, 1.0), seg_t(t1, t0, -1.0)],
    });
    let g2 = geo;
    imm.slice_fn = Some(Arc::new(move |t: f64| {
        if t > g2.t_top {
            return None;
        }
        let s = g2.g(t);
        let lvl = g2.radius * g2.radius - s * s;
        if lvl.abs() < 1e-12 {
            return None;
        }
        if lvl < 0.0 && g2.k == g2.n {
            return None;
        }
        let qs = g2.slice(lvl > 0.0, lvl.abs().sqrt());
        let label = Label::new(if lvl > 0.0 { "handle-slice+" } else { "handle-slice-" }, &[("t", t)]);
        Some(Immersion::new(label, AmbientSpace::new(g2.n, None).expect("n ≥ 1"), Arc::new(qs)))
    }));
    imm.meta.insert("R".into(), geo.radius);
    imm.meta.insert("critical_time".into(), geo.critical_time());
    imm.meta.insert("bottleneck_t0".into(), t0);
    imm.meta.insert("bottleneck_t1".into(), t1);
    Ok(imm)
}
