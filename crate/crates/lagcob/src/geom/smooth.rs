//! Smooth maps evaluated over forward-mode dual numbers.
//!
//! Every model is written once, generically over [`Real`], and evaluated with
//! `f64` for values, [`Dual64`] for Jacobian columns and [`HyperDual64`] for
//! Hessian entries. Compositions of models go through the object-safe
//! [`SmoothMap`] so they can be stored behind `Arc`.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_dual::{Dual64, DualNum, HyperDual64};

/// Scalar types the models are evaluated over.
pub trait Real: DualNum<Primitive = f64> + Copy + Send + Sync {
    fn cst(x: f64) -> Self;
    fn val(&self) -> f64;
    fn call(map: &dyn SmoothMap, chart: usize, u: &[Self]) -> Vec<Self>;
}

impl Real for f64 {
    fn cst(x: f64) -> Self {
        x
    }
    fn val(&self) -> f64 {
        *self
    }
    fn call(map: &dyn SmoothMap, chart: usize, u: &[Self]) -> Vec<Self> {
        map.eval_f64(chart, u)
    }
}

impl Real for Dual64 {
    fn cst(x: f64) -> Self {
        Dual64::from_re(x)
    }
    fn val(&self) -> f64 {
        self.re
    }
    fn call(map: &dyn SmoothMap, chart: usize, u: &[Self]) -> Vec<Self> {
        map.eval_dual(chart, u)
    }
}

impl Real for HyperDual64 {
    fn cst(x: f64) -> Self {
        HyperDual64::from_re(x)
    }
    fn val(&self) -> f64 {
        self.re
    }
    fn call(map: &dyn SmoothMap, chart: usize, u: &[Self]) -> Vec<Self> {
        map.eval_hyper(chart, u)
    }
}

pub type Accept = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// A coordinate box used for sampling, optionally cut down by a predicate.
#[derive(Clone)]
pub struct Chart {
    pub label: String,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub accept: Option<Accept>,
}

impl std::fmt::Debug for Chart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Chart")
            .field("label", &self.label)
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .field("accept", &self.accept.is_some())
            .finish()
    }
}

impl Chart {
    pub fn boxed(label: impl Into<String>, lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len());
        Chart { label: label.into(), lo, hi, accept: None }
    }

    pub fn cube(label: impl Into<String>, dim: usize, half: f64) -> Self {
        Self::boxed(label, vec![-half; dim], vec![half; dim])
    }

    pub fn with_accept(mut self, f: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> Self {
        let prev = self.accept.take();
        self.accept = Some(match prev {
            None => Arc::new(f),
            Some(p) => Arc::new(move |u: &[f64]| p(u) && f(u)),
        });
        self
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn in_box(&self, u: &[f64]) -> bool {
        u.iter().zip(self.lo.iter().zip(&self.hi)).all(|(x, (a, b))| *x >= *a && *x <= *b)
    }

    pub fn accepts(&self, u: &[f64]) -> bool {
        self.in_box(u) && self.accept.as_ref().is_none_or(|f| f(u))
    }

    /// Map a point of the unit cube into the box.
    pub fn from_unit(&self, s: &[f64]) -> Vec<f64> {
        s.iter().zip(self.lo.iter().zip(&self.hi)).map(|(s, (a, b))| a + s * (b - a)).collect()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }
}

/// Object-safe smooth map from chart coordinates to `out_dim` reals.
pub trait SmoothMap: Send + Sync {
    fn dim(&self) -> usize;
    fn out_dim(&self) -> usize;
    fn charts(&self) -> Vec<Chart>;
    fn eval_f64(&self, chart: usize, u: &[f64]) -> Vec<f64>;
    fn eval_dual(&self, chart: usize, u: &[Dual64]) -> Vec<Dual64>;
    fn eval_hyper(&self, chart: usize, u: &[HyperDual64]) -> Vec<HyperDual64>;
    /// Point of the underlying manifold, comparable across charts.
    fn domain_point(&self, chart: usize, u: &[f64]) -> Vec<f64>;
    /// Periods of the domain-point coordinates (empty when none are periodic).
    fn domain_periods(&self) -> Vec<Option<f64>>;
    /// Inverse of `domain_point`.
    fn locate(&self, x: &[f64]) -> Option<(usize, Vec<f64>)>;
}

/// A smooth map written once for every [`Real`].
pub trait Formula: Send + Sync {
    fn dim(&self) -> usize;
    fn out_dim(&self) -> usize;
    fn charts(&self) -> Vec<Chart>;
    fn eval<D: Real>(&self, chart: usize, u: &[D]) -> Vec<D>;
    fn domain_point(&self, _chart: usize, u: &[f64]) -> Vec<f64> {
        u.to_vec()
    }
    fn domain_periods(&self) -> Vec<Option<f64>> {
        Vec::new()
    }
    fn locate(&self, x: &[f64]) -> Option<(usize, Vec<f64>)> {
        Some((0, x.to_vec()))
    }
}

impl<F: Formula> SmoothMap for F {
    fn dim(&self) -> usize {
        Formula::dim(self)
    }
    fn out_dim(&self) -> usize {
        Formula::out_dim(self)
    }
    fn charts(&self) -> Vec<Chart> {
        Formula::charts(self)
    }
    fn eval_f64(&self, chart: usize, u: &[f64]) -> Vec<f64> {
        self.eval(chart, u)
    }
    fn eval_dual(&self, chart: usize, u: &[Dual64]) -> Vec<Dual64> {
        self.eval(chart, u)
    }
    fn eval_hyper(&self, chart: usize, u: &[HyperDual64]) -> Vec<HyperDual64> {
        self.eval(chart, u)
    }
    fn domain_point(&self, chart: usize, u: &[f64]) -> Vec<f64> {
        Formula::domain_point(self, chart, u)
    }
    fn domain_periods(&self) -> Vec<Option<f64>> {
        Formula::domain_periods(self)
    }
    fn locate(&self, x: &[f64]) -> Option<(usize, Vec<f64>)> {
        Formula::locate(self, x)
    }
}

/// Jacobian (out_dim × dim) by one dual pass per column.
pub fn jacobian(map: &dyn SmoothMap, chart: usize, u: &[f64]) -> DMatrix<f64> {
    let d = map.dim();
    let m = map.out_dim();
    let mut jac = DMatrix::zeros(m, d);
    for j in 0..d {
        let uj: Vec<Dual64> =
            u.iter().enumerate().map(|(i, &x)| Dual64::new(x, if i == j { 1.0 } else { 0.0 })).collect();
        let out = map.eval_dual(chart, &uj);
        for (i, o) in out.iter().enumerate() {
            jac[(i, j)] = o.eps;
        }
    }
    jac
}

/// Central finite-difference Jacobian with step `h`.
pub fn jacobian_fd(map: &dyn SmoothMap, chart: usize, u: &[f64], h: f64) -> DMatrix<f64> {
    let d = map.dim();
    let m = map.out_dim();
    let mut jac = DMatrix::zeros(m, d);
    let mut up = u.to_vec();
    let mut dn = u.to_vec();
    for j in 0..d {
        up[j] = u[j] + h;
        dn[j] = u[j] - h;
        let a = map.eval_f64(chart, &up);
        let b = map.eval_f64(chart, &dn);
        for i in 0..m {
            jac[(i, j)] = (a[i] - b[i]) / (2.0 * h);
        }
        up[j] = u[j];
        dn[j] = u[j];
    }
    jac
}

/// Value, gradient and Hessian of output component `k`.
pub fn hessian(map: &dyn SmoothMap, chart: usize, u: &[f64], k: usize) -> (f64, Vec<f64>, DMatrix<f64>) {
    let d = map.dim();
    let mut grad = vec![0.0; d];
    let mut hess = DMatrix::zeros(d, d);
    let mut value = map.eval_f64(chart, u)[k];
    for i in 0..d {
        for j in i..d {
            let v: Vec<HyperDual64> = u
                .iter()
                .enumerate()
                .map(|(l, &x)| {
                    HyperDual64::new(x, if l == i { 1.0 } else { 0.0 }, if l == j { 1.0 } else { 0.0 }, 0.0)
                })
                .collect();
            let o = map.eval_hyper(chart, &v)[k];
            value = o.re;
            if i == j {
                grad[i] = o.eps1;
            }
            hess[(i, j)] = o.eps1eps2;
            hess[(j, i)] = o.eps1eps2;
        }
    }
    (value, grad, hess)
}

/// Value and gradient of output component `k`.
pub fn gradient(map: &dyn SmoothMap, chart: usize, u: &[f64], k: usize) -> (f64, Vec<f64>) {
    let jac = jacobian(map, chart, u);
    let value = map.eval_f64(chart, u)[k];
    (value, (0..map.dim()).map(|j| jac[(k, j)]).collect())
}

/// Distance between domain points, reducing periodic coordinates.
pub fn domain_distance(a: &[f64], b: &[f64], periods: &[Option<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(i, (x, y))| {
            let mut d = x - y;
            if let Some(Some(p)) = periods.get(i) {
                d = wrap(d, *p);
            }
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Reduce `d` into (−p/2, p/2].
pub fn wrap(d: f64, p: f64) -> f64 {
    let mut r = d.rem_euclid(p);
    if r > p / 2.0 {
        r -= p;
    }
    r
}

/// Quintic smoothstep 6x⁵ − 15x⁴ + 10x³ clamped to [0, 1].
pub fn smoothstep<D: Real>(x: D) -> D {
    if x.val() <= 0.0 {
        D::cst(0.0)
    } else if x.val() >= 1.0 {
        D::cst(1.0)
    } else {
        let x3 = x * x * x;
        x3 * (x * (x * 6.0 - 15.0) + 10.0)
    }
}

/// Derivative of [`smoothstep`].
pub fn smoothstep_prime<D: Real>(x: D) -> D {
    if x.val() <= 0.0 || x.val() >= 1.0 {
        D::cst(0.0)
    } else {
        let y = x * (D::cst(1.0) - x);
        y * y * 30.0
    }
}
