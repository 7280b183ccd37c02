use std::collections::BTreeMap;

use lagcob::cli::registry::{build_model, Params};
use lagcob::cli::{self, document, Outcome};
use lagcob::cochains::{self, generators_bottlenecked, BottleneckedCobordism, GeneratorSet, ImmersedModel};
use lagcob::geom::{Immersion, C64};
use lagcob::novikov::{self, Q, DEFAULT_CUTOFF};
use lagcob::verify::{self, JacobianMode};
use pyo3::exceptions::{PyTypeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;
use serde_json::Value;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(a) => PyList::new(py, a.iter().map(|x| to_py(py, x)).collect::<PyResult<Vec<_>>>()?)?.into_any(),
        Value::Object(o) => {
            let d = PyDict::new(py);
            for (k, x) in o {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

fn ser<'py>(py: Python<'py>, x: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &serde_json::to_value(x).map_err(err)?)
}

fn params(kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<Params> {
    let mut p = BTreeMap::new();
    if let Some(d) = kwargs {
        for (k, v) in d.iter() {
            p.insert(k.extract::<String>()?, v.extract::<f64>()?);
        }
    }
    Ok(p)
}

fn outcome<'py>(py: Python<'py>, command: &str, o: Result<Outcome, cli::CliError>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &document(command, &o.map_err(err)?))
}

fn degree_map(gs: &GeneratorSet) -> BTreeMap<String, i64> {
    gs.active().map(|g| (g.label.clone(), g.degree)).collect()
}

/// An explicit immersion from the model registry.
#[pyclass(name = "Immersion", module = "lagcob", frozen)]
struct PyImmersion {
    inner: Immersion,
}

#[pymethods]
impl PyImmersion {
    #[new]
    #[pyo3(signature = (model, **kwargs))]
    fn new(model: &str, kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        Ok(PyImmersion { inner: build_model(model, &params(kwargs)?).map_err(err)? })
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label.to_string()
    }

    #[getter]
    fn domain_dim(&self) -> usize {
        self.inner.domain_dim
    }

    #[getter]
    fn ambient_dim(&self) -> usize {
        self.inner.ambient.n_complex
    }

    /// Image of a domain point, or None outside every chart.
    fn __call__(&self, x: Vec<f64>) -> PyResult<Option<Vec<C64>>> {
        if x.len() != self.inner.domain_dim {
            return Err(PyValueError::new_err(format!("expected {} coordinates", self.inner.domain_dim)));
        }
        Ok(self.inner.eval_domain(&x))
    }

    /// Sampled image points and the colour channel.
    #[pyo3(signature = (count = 1000, seed = 0))]
    fn sample(&self, count: usize, seed: u64) -> (Vec<Vec<C64>>, Vec<f64>) {
        let pts = verify::sampling::sample_charts(&self.inner.charts(), count, seed);
        let images: Vec<Vec<C64>> = pts.iter().map(|p| self.inner.eval(p.chart, &p.u)).collect();
        let color = images.iter().map(|z| cli::color_of(&self.inner, z)).collect();
        (images, color)
    }

    #[pyo3(signature = (samples = 10_000, tol = 1e-6, finite_difference = false, seed = 0))]
    fn check_lagrangian<'py>(
        &self,
        py: Python<'py>,
        samples: usize,
        tol: f64,
        finite_difference: bool,
        seed: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let mode = if finite_difference { JacobianMode::FiniteDifference } else { JacobianMode::Analytic };
        ser(py, &verify::check_lagrangian(&self.inner, samples, tol, mode, seed).map_err(err)?)
    }

    #[pyo3(signature = (seeds = 256, seed = 0))]
    fn critical_points<'py>(&self, py: Python<'py>, seeds: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        ser(py, &verify::critical_points(&self.inner, seeds, seed))
    }

    #[pyo3(signature = (seed_pairs = 3000, separation = 1e-3, seed = 0))]
    fn self_intersections<'py>(
        &self,
        py: Python<'py>,
        seed_pairs: usize,
        separation: f64,
        seed: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        ser(py, &verify::find_self_intersections(&self.inner, seed_pairs, separation, seed))
    }

    fn __repr__(&self) -> String {
        format!("Immersion({})", self.inner.label)
    }
}

/// An element of the Novikov field with rational coefficients.
#[pyclass(name = "NovikovElement", module = "lagcob", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyNovikov {
    inner: novikov::NovikovElement,
}

fn coefficient(x: &Bound<'_, PyAny>) -> PyResult<Q> {
    if let Ok(q) = x.extract::<Q>() {
        return Ok(q);
    }
    if let Ok(i) = x.extract::<i64>() {
        return Ok(novikov::int(i));
    }
    Err(PyTypeError::new_err("coefficients must be int or fractions.Fraction"))
}

fn other(x: &Bound<'_, PyAny>, cutoff: f64) -> PyResult<novikov::NovikovElement> {
    if let Ok(e) = x.cast::<PyNovikov>() {
        return Ok(e.get().inner.clone());
    }
    Ok(novikov::NovikovElement::monomial(0.0, coefficient(x)?, cutoff))
}

#[pymethods]
impl PyNovikov {
    /// Σ c·T^λ from (λ, c) pairs.
    #[new]
    #[pyo3(signature = (terms = Vec::new(), cutoff = DEFAULT_CUTOFF))]
    fn new(terms: Vec<(f64, Bound<'_, PyAny>)>, cutoff: f64) -> PyResult<Self> {
        let ts = terms.iter().map(|(e, c)| Ok((*e, coefficient(c)?))).collect::<PyResult<Vec<_>>>()?;
        if ts.iter().any(|(e, _)| !e.is_finite()) {
            return Err(PyValueError::new_err("exponents must be finite"));
        }
        Ok(PyNovikov { inner: novikov::NovikovElement::new(ts, cutoff) })
    }

    /// The monomial T^λ.
    #[staticmethod]
    #[pyo3(signature = (exponent, cutoff = DEFAULT_CUTOFF))]
    fn t(exponent: f64, cutoff: f64) -> Self {
        PyNovikov { inner: novikov::NovikovElement::t(exponent, cutoff) }
    }

    #[getter]
    fn terms(&self) -> Vec<(f64, Q)> {
        self.inner.terms().to_vec()
    }

    #[getter]
    fn cutoff(&self) -> f64 {
        self.inner.cutoff()
    }

    #[getter]
    fn dropped(&self) -> bool {
        self.inner.dropped()
    }

    fn val(&self) -> f64 {
        self.inner.val()
    }

    fn truncate(&self, cutoff: f64) -> Self {
        PyNovikov { inner: self.inner.truncate(cutoff) }
    }

    fn __add__(&self, o: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PyNovikov { inner: &self.inner + &other(o, self.inner.cutoff())? })
    }

    fn __radd__(&self, o: &Bound<'_, PyAny>) -> PyResult<Self> {
        self.__add__(o)
    }

    fn __sub__(&self, o: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PyNovikov { inner: &self.inner - &other(o, self.inner.cutoff())? })
    }

    fn __rsub__(&self, o: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PyNovikov { inner: &other(o, self.inner.cutoff())? - &self.inner })
    }

    fn __mul__(&self, o: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PyNovikov { inner: &self.inner * &other(o, self.inner.cutoff())? })
    }

    fn __rmul__(&self, o: &Bound<'_, PyAny>) -> PyResult<Self> {
        self.__mul__(o)
    }

    fn __neg__(&self) -> Self {
        PyNovikov { inner: -&self.inner }
    }

    fn __eq__(&self, o: &Bound<'_, PyAny>) -> bool {
        other(o, self.inner.cutoff()).is_ok_and(|x| x == self.inner)
    }

    fn __bool__(&self) -> bool {
        !self.inner.is_zero()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("NovikovElement({})", self.inner)
    }
}

/// Generator degrees of a registered immersed Lagrangian.
#[pyfunction]
#[pyo3(signature = (model, **kwargs))]
fn generators(model: &str, kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<BTreeMap<String, i64>> {
    let m = ImmersedModel::from_name(model, &params(kwargs)?).map_err(err)?;
    Ok(degree_map(&cochains::generators_immersed(&m).map_err(err)?))
}

/// χ^si of a registered immersed Lagrangian.
#[pyfunction]
#[pyo3(signature = (model, **kwargs))]
fn chi_si(model: &str, kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<i64> {
    let m = ImmersedModel::from_name(model, &params(kwargs)?).map_err(err)?;
    Ok(cochains::chi_si(&cochains::generators_immersed(&m).map_err(err)?))
}

/// Active generators of the bottlenecked handle over its default window, and χ^bot.
#[pyfunction]
#[pyo3(signature = (k, n, a = 1.0, b = 0.4))]
fn handle_generators(k: usize, n: usize, a: f64, b: f64) -> PyResult<(BTreeMap<String, i64>, i64)> {
    let h = BottleneckedCobordism::handle(k, n, a, b).map_err(err)?;
    let gs = generators_bottlenecked(&h, h.default_window.0, h.default_window.1).map_err(err)?;
    Ok((degree_map(&gs), cochains::chi_bot(&gs)))
}

#[pyfunction]
#[pyo3(signature = (model, count = 1000, seed = 0, **kwargs))]
fn sample<'py>(py: Python<'py>, model: &str, count: usize, seed: u64, kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<Bound<'py, PyAny>> {
    outcome(py, "sample", cli::cmd_sample(model, &params(kwargs)?, count, seed))
}

#[pyfunction]
#[pyo3(signature = (model, samples = 10_000, tol = 1e-6, seed = 0, **kwargs))]
fn verify_model<'py>(
    py: Python<'py>,
    model: &str,
    samples: usize,
    tol: f64,
    seed: u64,
    kwargs: Option<&Bound<'_, PyDict>>,
) -> PyResult<Bound<'py, PyAny>> {
    outcome(py, "verify", cli::cmd_verify(model, &params(kwargs)?, samples, tol, seed))
}

#[pyfunction]
#[pyo3(signature = (model, generator = None, **kwargs))]
fn index<'py>(py: Python<'py>, model: &str, generator: Option<&str>, kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<Bound<'py, PyAny>> {
    outcome(py, "index", cli::cmd_index(model, &params(kwargs)?, generator))
}

#[pyfunction]
#[pyo3(signature = (scenario = None, compose = None, chains = 100, seed = 0, **kwargs))]
fn euler<'py>(
    py: Python<'py>,
    scenario: Option<&str>,
    compose: Option<&str>,
    chains: usize,
    seed: u64,
    kwargs: Option<&Bound<'_, PyDict>>,
) -> PyResult<Bound<'py, PyAny>> {
    outcome(py, "euler", cli::cmd_euler(scenario, compose, chains, &params(kwargs)?, seed))
}

#[pyfunction]
#[pyo3(signature = (example, cutoff = DEFAULT_CUTOFF, **kwargs))]
fn floer<'py>(py: Python<'py>, example: &str, cutoff: f64, kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<Bound<'py, PyAny>> {
    outcome(py, "floer", cli::cmd_floer(example, &params(kwargs)?, cutoff))
}

/// Run the command line with the given arguments; returns the exit code.
#[pyfunction]
fn main(py: Python<'_>, args: Vec<String>) -> i32 {
    py.detach(|| cli::main_with(std::iter::once("lagcob".to_string()).chain(args)))
}

#[pymodule]
#[pyo3(name = "lagcob")]
fn lagcob_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyImmersion>()?;
    m.add_class::<PyNovikov>()?;
    m.add_function(wrap_pyfunction!(generators, m)?)?;
    m.add_function(wrap_pyfunction!(chi_si, m)?)?;
    m.add_function(wrap_pyfunction!(handle_generators, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(verify_model, m)?)?;
    m.add_function(wrap_pyfunction!(index, m)?)?;
    m.add_function(wrap_pyfunction!(euler, m)?)?;
    m.add_function(wrap_pyfunction!(floer, m)?)?;
    m.add_function(wrap_pyfunction!(main, m)?)?;
    m.add("MODELS", lagcob::cli::registry::MODELS.to_vec())?;
    Ok(())
}
