//! Named geometric models with their parameters.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geom::cobordism::{translated_circle, TranslatedCircle};
use crate::geom::models::{make_local_slice, make_product_torus};
use crate::geom::{
    make_bottlenecked_handle, make_double_bottleneck, make_figure_eight, make_generalized_suspension,
    make_local_surgery_trace, make_null_cobordism, make_section, make_sheared_torus, make_whitney_sphere,
    whitney_bottleneck_suspension, DoubleBottleneckSpec, ExactGraphs, GeomError, Immersion, ScalarField, SmoothMap,
};

pub const MODELS: [&str; 13] = [
    "whitney",
    "null-cobordism",
    "local-trace",
    "local-slice+",
    "local-slice-",
    "sheared-torus",
    "product-torus",
    "figure-eight",
    "section",
    "handle",
    "double-bottleneck",
    "whitney-family",
    "generalized-suspension",
];

pub type Params = BTreeMap<String, f64>;

fn get(p: &Params, k: &str, default: f64) -> f64 {
    p.get(k).copied().unwrap_or(default)
}

fn int(p: &Params, k: &str, default: usize) -> Result<usize, GeomError> {
    let v = get(p, k, default as f64);
    if v < 0.0 || v.fract() != 0.0 {
        return Err(GeomError::Parameter(format!("{k} must be a non-negative integer")));
    }
    Ok(v as usize)
}

/// Two translated circles suspended over Y = [−1, 1]² with ρ^α = y_α and random motions.
pub fn random_generalized_suspension(seed: u64) -> Result<Immersion, GeomError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut circle = || {
        let mut c = || -> f64 { rng.random_range(-1.0..1.0) };
        TranslatedCircle { r: 0.5 + 0.5 * c().abs(), alpha: [c(), c()], beta: [c(), c()] }
    };
    let hs = vec![translated_circle(circle()), translated_circle(circle())];
    let rho: Vec<Arc<dyn SmoothMap>> =
        (0..2).map(|i| Arc::new(ScalarField::coordinate(2, i)) as Arc<dyn SmoothMap>).collect();
    make_generalized_suspension(&hs, rho, 2)
}

pub fn figure_eight_double_bottleneck(e: f64, eps: f64) -> Result<Immersion, GeomError> {
    make_double_bottleneck(&DoubleBottleneckSpec::new(ExactGraphs::figure_eight(e, 0.3)?, eps))
}

pub fn build_model(name: &str, p: &Params) -> Result<Immersion, GeomError> {
    match name {
        "whitney" => make_whitney_sphere(int(p, "n", 2)?, get(p, "r", 1.0)),
        "null-cobordism" => make_null_cobordism(int(p, "n", 1)?),
        "local-trace" => make_local_surgery_trace(int(p, "k", 0)?, int(p, "n", 2)?),
        "local-slice+" => make_local_slice(int(p, "k", 0)?, int(p, "n", 2)?, true),
        "local-slice-" => make_local_slice(int(p, "k", 0)?, int(p, "n", 2)?, false),
        "sheared-torus" => make_sheared_torus(),
        "product-torus" => make_product_torus(),
        "figure-eight" => make_figure_eight(get(p, "E", 1.0)),
        "section" => make_section(get(p, "E", 1.0)),
        "handle" => make_bottlenecked_handle(int(p, "k", 0)?, int(p, "n", 1)?, get(p, "A", 1.0), get(p, "B", 0.4)),
        "double-bottleneck" => figure_eight_double_bottleneck(get(p, "E", 1.0), get(p, "eps", 0.5)),
        "whitney-family" => whitney_bottleneck_suspension(get(p, "r", 1.0)),
        "generalized-suspension" => random_generalized_suspension(get(p, "instance", 0.0) as u64),
        other => Err(GeomError::Parameter(format!("unknown model {other}; registered: {}", MODELS.join(", ")))),
    }
}
