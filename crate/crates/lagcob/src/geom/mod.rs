//! Explicit Lagrangian immersions and cobordism models in ℂᴺ.

pub mod cobordism;
pub mod handle;
pub mod models;
pub mod smooth;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::{Complex, DMatrix};
use serde::Serialize;
use thiserror::Error;

pub use cobordism::{
    make_double_bottleneck, make_generalized_suspension, make_suspension, truncate, whitney_bottleneck_family,
    whitney_bottleneck_suspension,
    DoubleBottleneckSpec, ExactGraphs, GraphBranch, ScalarField, TruncationProfile,
};
pub use handle::{make_bottlenecked_handle, HandleGeometry};
pub use models::{
    make_figure_eight, make_local_surgery_trace, make_null_cobordism, make_section, make_sheared_torus,
    make_whitney_sphere, whitney_area, whitney_radius,
};
pub use smooth::{Chart, Formula, Real, SmoothMap};

pub type C64 = Complex<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

/// The ambient ℂᴺ with its standard form Σ dqᵢ∧dpᵢ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmbientSpace {
    pub n_complex: usize,
    pub cobordism_slot: Option<usize>,
    /// Per coordinate, the period of the real part (T*S¹ directions).
    pub base_periods: Vec<Option<f64>>,
}

impl AmbientSpace {
    pub fn new(n_complex: usize, cobordism_slot: Option<usize>) -> Result<Self, GeomError> {
        Self::with_periods(n_complex, cobordism_slot, Vec::new())
    }

    pub fn with_periods(
        n_complex: usize,
        cobordism_slot: Option<usize>,
        base_periods: Vec<Option<f64>>,
    ) -> Result<Self, GeomError> {
        if n_complex == 0 {
            return Err(GeomError::Parameter("ambient space needs at least one coordinate".into()));
        }
        if let Some(s) = cobordism_slot {
            if s >= n_complex {
                return Err(GeomError::Parameter(format!("cobordism slot {s} out of range")));
            }
        }
        if base_periods.len() > n_complex || base_periods.iter().flatten().any(|p| *p <= 0.0) {
            return Err(GeomError::Parameter("bad base periods".into()));
        }
        Ok(AmbientSpace { n_complex, cobordism_slot, base_periods })
    }

    pub fn period(&self, k: usize) -> Option<f64> {
        self.base_periods.get(k).copied().flatten()
    }

    /// Difference of two points with periodic real parts reduced.
    pub fn difference(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        (0..a.len())
            .map(|i| {
                let d = a[i] - b[i];
                match (i % 2, self.period(i / 2)) {
                    (0, Some(p)) => smooth::wrap(d, p),
                    _ => d,
                }
            })
            .collect()
    }
}

/// Model name plus parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Label {
    pub model: String,
    pub params: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl Label {
    pub fn new(model: &str, params: &[(&str, f64)]) -> Self {
        Label {
            model: model.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            notes: Vec::new(),
        }
    }

    pub fn note(mut self, s: impl Into<String>) -> Self {
        self.notes.push(s.into());
        self
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.model)?;
        if !self.params.is_empty() {
            let ps: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, "({})", ps.join(","))?;
        }
        Ok(())
    }
}

/// A domain point in a given chart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChartPoint {
    pub chart: usize,
    pub u: Vec<f64>,
}

impl ChartPoint {
    pub fn new(chart: usize, u: Vec<f64>) -> Self {
        ChartPoint { chart, u }
    }
}

/// An analytically known double point, named by its two preimages.
#[derive(Debug, Clone, Serialize)]
pub struct KnownDoublePoint {
    pub label_p: String,
    pub label_q: String,
    pub p: ChartPoint,
    pub q: ChartPoint,
}

/// A closed curve in the domain whose image bounds a region in one coordinate plane.
#[derive(Clone)]
pub struct AreaLoop {
    pub label: String,
    pub coord: usize,
    /// Pieces parameterized over [0, 1], in domain coordinates.
    pub segments: Vec<Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>>,
}

impl fmt::Debug for AreaLoop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AreaLoop({}, coord {}, {} segments)", self.label, self.coord, self.segments.len())
    }
}

pub type SliceFn = Arc<dyn Fn(f64) -> Option<Immersion> + Send + Sync>;

/// A parameterized map from a labeled domain into ℂᴺ.
#[derive(Clone)]
pub struct Immersion {
    pub label: Label,
    pub ambient: AmbientSpace,
    pub domain_dim: usize,
    map: Arc<dyn SmoothMap>,
    analytic: bool,
    pub double_points: Vec<KnownDoublePoint>,
    pub area_loops: Vec<AreaLoop>,
    pub homotopy: Option<HomotopyWithPrimitive>,
    pub slice_fn: Option<SliceFn>,
    pub meta: BTreeMap<String, f64>,
}

impl fmt::Debug for Immersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Immersion")
            .field("label", &self.label)
            .field("ambient", &self.ambient)
            .field("domain_dim", &self.domain_dim)
            .field("charts", &self.map.charts().len())
            .finish()
    }
}

impl Immersion {
    pub fn new(label: Label, ambient: AmbientSpace, map: Arc<dyn SmoothMap>) -> Self {
        assert_eq!(map.out_dim(), 2 * ambient.n_complex, "map output must be interleaved re/im pairs");
        Immersion {
            label,
            ambient,
            domain_dim: map.dim(),
            map,
            analytic: true,
            double_points: Vec::new(),
            area_loops: Vec::new(),
            homotopy: None,
            slice_fn: None,
            meta: BTreeMap::new(),
        }
    }

    pub fn map(&self) -> &Arc<dyn SmoothMap> {
        &self.map
    }

    pub fn charts(&self) -> Vec<Chart> {
        self.map.charts()
    }

    pub fn has_analytic_jacobian(&self) -> bool {
        self.analytic
    }

    /// Drop the analytic Jacobian; callers fall back to finite differences.
    pub fn without_jacobian(mut self) -> Self {
        self.analytic = false;
        self
    }

    pub fn eval_real(&self, chart: usize, u: &[f64]) -> Vec<f64> {
        self.map.eval_f64(chart, u)
    }

    pub fn eval(&self, chart: usize, u: &[f64]) -> Vec<C64> {
        let v = self.eval_real(chart, u);
        v.chunks(2).map(|c| C64::new(c[0], c[1])).collect()
    }

    /// Evaluate at a point given in domain coordinates.
    pub fn eval_domain(&self, x: &[f64]) -> Option<Vec<C64>> {
        let (c, u) = self.map.locate(x)?;
        Some(self.eval(c, &u))
    }

    pub fn locate(&self, x: &[f64]) -> Option<ChartPoint> {
        self.map.locate(x).map(|(c, u)| ChartPoint::new(c, u))
    }

    pub fn domain_point(&self, p: &ChartPoint) -> Vec<f64> {
        self.map.domain_point(p.chart, &p.u)
    }

    pub fn domain_periods(&self) -> Vec<Option<f64>> {
        self.map.domain_periods()
    }

    /// Real Jacobian, rows interleaved (Re z₀, Im z₀, …).
    pub fn jacobian(&self, chart: usize, u: &[f64]) -> DMatrix<f64> {
        if self.analytic {
            smooth::jacobian(&*self.map, chart, u)
        } else {
            smooth::jacobian_fd(&*self.map, chart, u, 1e-5)
        }
    }

    pub fn jacobian_fd(&self, chart: usize, u: &[f64], h: f64) -> DMatrix<f64> {
        smooth::jacobian_fd(&*self.map, chart, u, h)
    }

    /// Complex tangent frame: one vector in ℂᴺ per domain direction.
    pub fn tangent_frame(&self, chart: usize, u: &[f64]) -> Vec<Vec<C64>> {
        let j = self.jacobian(chart, u);
        (0..j.ncols())
            .map(|c| (0..self.ambient.n_complex).map(|k| C64::new(j[(2 * k, c)], j[(2 * k + 1, c)])).collect())
            .collect()
    }

    /// Height function π_ℝ = Re of the cobordism coordinate.
    pub fn height(&self, chart: usize, u: &[f64]) -> Option<f64> {
        self.ambient.cobordism_slot.map(|s| self.eval_real(chart, u)[2 * s])
    }

    pub fn with_meta(mut self, k: &str, v: f64) -> Self {
        self.meta.insert(k.to_string(), v);
        self
    }
}

/// A family of Lagrangians `i_t` with a primitive `H_t` of its flux.
///
/// The underlying map takes `(q…, t)` and returns the interleaved image of
/// `i_t(q)` followed by `H_t(q)`.
#[derive(Clone)]
pub struct HomotopyWithPrimitive {
    pub label: Label,
    pub ambient: AmbientSpace,
    pub map: Arc<dyn SmoothMap>,
    pub t_range: (f64, f64),
}

impl fmt::Debug for HomotopyWithPrimitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HomotopyWithPrimitive({}, t in {:?})", self.label, self.t_range)
    }
}

impl HomotopyWithPrimitive {
    pub fn new(label: Label, ambient: AmbientSpace, map: Arc<dyn SmoothMap>, t_range: (f64, f64)) -> Self {
        assert_eq!(map.out_dim(), 2 * ambient.n_complex + 1);
        HomotopyWithPrimitive { label, ambient, map, t_range }
    }

    pub fn q_dim(&self) -> usize {
        self.map.dim() - 1
    }

    /// (i_t(q), H_t(q)).
    pub fn eval(&self, chart: usize, q: &[f64], t: f64) -> (Vec<C64>, f64) {
        let mut u = q.to_vec();
        u.push(t);
        let v = self.map.eval_f64(chart, &u);
        let n = self.ambient.n_complex;
        ((0..n).map(|k| C64::new(v[2 * k], v[2 * k + 1])).collect(), v[2 * n])
    }

    pub fn primitive(&self, chart: usize, q: &[f64], t: f64) -> f64 {
        self.eval(chart, q, t).1
    }

    /// Charts of the slice at fixed t (the last coordinate dropped).
    pub fn q_charts(&self, t: f64) -> Vec<Chart> {
        self.map
            .charts()
            .into_iter()
            .map(|c| {
                let n = c.dim() - 1;
                let acc = c.accept.clone();
                let mut out = Chart::boxed(c.label.clone(), c.lo[..n].to_vec(), c.hi[..n].to_vec());
                if let Some(a) = acc {
                    out = out.with_accept(move |q: &[f64]| {
                        let mut u = q.to_vec();
                        u.push(t);
                        a(&u)
                    });
                }
                out
            })
            .collect()
    }

    /// The Lagrangian i_t as an immersion in X.
    pub fn slice_immersion(&self, t: f64) -> Immersion {
        let fixed = cobordism::FixedT { inner: self.map.clone(), t, charts: self.q_charts(t) };
        let mut label = self.label.clone();
        label.model = format!("{}|t", label.model);
        label.params.insert("t".into(), t);
        Immersion::new(label, self.ambient.clone(), Arc::new(fixed))
    }
}
