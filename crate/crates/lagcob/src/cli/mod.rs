//! The `lagcob` command line: model registry, point-cloud export, checks and Floer example runs.

pub mod registry;
pub mod suite;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::cochains::{
    chi_bot, compose, generators_bottlenecked, random_cobordism, random_end, BottleneckedCobordism, CochainError,
    GeneratorSet,
};
use crate::geom::{GeomError, Immersion};
use crate::grading::{self, GradingError};
use crate::novikov::{
    bounding_cochain_pushforward, build_complex, homotopy_data_check, mc_leading_order, ExampleSpec, NovikovError,
    DEFAULT_CUTOFF, KAB,
};
use crate::verify::{self, JacobianMode, ShadowMethod, VerifyError};
use registry::{build_model, Params};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Grading(#[from] GradingError),
    #[error(transparent)]
    Cochain(#[from] CochainError),
    #[error(transparent)]
    Novikov(#[from] NovikovError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "lagcob", version, about = "Lagrangian cobordism models, Floer generators and Novikov obstruction analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

/// Model and example parameters; unset ones take per-model defaults.
#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct ParamArgs {
    #[arg(long)]
    pub n: Option<f64>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long = "E")]
    pub e: Option<f64>,
    #[arg(long = "A")]
    pub a: Option<f64>,
    #[arg(long = "B")]
    pub b: Option<f64>,
    #[arg(long = "C")]
    pub c: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub instance: Option<f64>,
    #[arg(long = "E-prime", alias = "E_prime")]
    pub e_prime: Option<f64>,
    #[arg(long = "E-a", alias = "E_a")]
    pub e_a: Option<f64>,
    #[arg(long = "E-b", alias = "E_b")]
    pub e_b: Option<f64>,
    #[arg(long = "A-plus", alias = "A_plus")]
    pub a_plus: Option<f64>,
    #[arg(long = "A-minus", alias = "A_minus")]
    pub a_minus: Option<f64>,
}

impl ParamArgs {
    pub fn to_params(&self) -> Params {
        let pairs = [
            ("n", self.n),
            ("k", self.k),
            ("r", self.r),
            ("E", self.e),
            ("A", self.a),
            ("B", self.b),
            ("C", self.c),
            ("eps", self.eps),
            ("instance", self.instance),
            ("E_prime", self.e_prime),
            ("E_a", self.e_a),
            ("E_b", self.e_b),
            ("A_plus", self.a_plus),
            ("A_minus", self.a_minus),
        ];
        pairs.into_iter().filter_map(|(k, v)| v.map(|v| (k.to_string(), v))).collect()
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample points of a model as a point cloud.
    Sample {
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// The slice of a cobordism at π_ℝ = t.
    Slice {
        #[arg(long)]
        model: String,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        /// Also search for double points of the slice.
        #[arg(long)]
        double_points: bool,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Lagrangian residual, primitive residual and shadow areas.
    Verify {
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Critical points of π_ℝ on a cobordism.
    Critical {
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = 256)]
        seeds: usize,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Degrees of ordered self-intersections.
    Index {
        #[arg(long)]
        model: String,
        /// Report only this generator, e.g. q-_to_q+.
        #[arg(long)]
        generator: Option<String>,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Euler characteristics of generator sets.
    Euler {
        #[arg(long)]
        scenario: Option<String>,
        /// `random`, or a top-to-bottom list of pieces among id+, handle, id-.
        #[arg(long)]
        compose: Option<String>,
        /// Number of random chains for `--compose random`.
        #[arg(long, default_value_t = 100)]
        chains: usize,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// A registered Floer example: complex, homology and Maurer-Cartan analysis.
    Floer {
        #[arg(long)]
        example: String,
        #[arg(long, default_value_t = DEFAULT_CUTOFF)]
        cutoff: f64,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Run every acceptance criterion and print a table.
    Suite,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Sample { .. } => "sample",
            Command::Slice { .. } => "slice",
            Command::Verify { .. } => "verify",
            Command::Critical { .. } => "critical",
            Command::Index { .. } => "index",
            Command::Euler { .. } => "euler",
            Command::Floer { .. } => "floer",
            Command::Suite => "suite",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Assertion {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Assertion { name: name.into(), pass, detail: detail.into() }
    }
}

/// What a command produced: JSON results, optional CSV rows, and assertions.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub params: Value,
    pub results: Value,
    pub assertions: Vec<Assertion>,
    pub table: Option<(Vec<String>, Vec<Vec<f64>>)>,
    pub text: Option<String>,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }
}

/// The JSON document written for every command.
pub fn document(command: &str, o: &Outcome) -> Value {
    let mut results = o.results.clone();
    if let Value::Object(m) = &mut results {
        m.insert("assertions".into(), serde_json::to_value(&o.assertions).expect("serializable"));
        m.insert("pass".into(), Value::Bool(o.pass()));
    }
    json!({ "schema_version": SCHEMA_VERSION, "command": command, "params": o.params, "results": results })
}

fn csv_bytes(header: &[String], rows: &[Vec<f64>]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.iter().map(|x| format!("{x:?}")))?;
    }
    w.into_inner().map_err(|e| CliError::Usage(e.to_string()))
}

/// Render the outcome in the requested format.
pub fn render(command: &str, o: &Outcome, format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&document(command, o))?;
            s.push('\n');
            Ok(s.into_bytes())
        }
        Format::Csv => {
            let (h, rows) =
                o.table.as_ref().ok_or_else(|| CliError::Usage(format!("{command} has no CSV form; use --format json")))?;
            csv_bytes(h, rows)
        }
    }
}

fn pairs(z: &[crate::geom::C64]) -> Vec<[f64; 2]> {
    z.iter().map(|c| [c.re, c.im]).collect()
}

fn point_table(points: &[Vec<[f64; 2]>], color: &[f64]) -> (Vec<String>, Vec<Vec<f64>>) {
    let dim = points.first().map_or(0, |p| p.len());
    let mut header: Vec<String> = (0..dim).flat_map(|i| [format!("re{i}"), format!("im{i}")]).collect();
    header.push("color".into());
    let rows = points
        .iter()
        .zip(color)
        .map(|(p, c)| p.iter().flat_map(|z| [z[0], z[1]]).chain([*c]).collect())
        .collect();
    (header, rows)
}

/// π_𝚥ℝ on cobordisms, the last imaginary part otherwise.
/// The colour channel of a sampled point: Im of the cobordism coordinate, else of the last one.
pub fn color_of(imm: &Immersion, z: &[crate::geom::C64]) -> f64 {
    match imm.ambient.cobordism_slot {
        Some(s) => z[s].im,
        None => z.last().map_or(0.0, |c| c.im),
    }
}

fn params_value(model: &str, p: &Params, extra: Value) -> Value {
    let mut m = serde_json::Map::new();
    m.insert("model".into(), json!(model));
    for (k, v) in p {
        m.insert(k.clone(), json!(v));
    }
    if let Value::Object(e) = extra {
        m.extend(e);
    }
    Value::Object(m)
}

pub fn cmd_sample(model: &str, p: &Params, count: usize, seed: u64) -> Result<Outcome, CliError> {
    let imm = build_model(model, p)?;
    let pts = verify::sampling::sample_charts(&imm.charts(), count, seed);
    let (points, color): (Vec<Vec<[f64; 2]>>, Vec<f64>) = pts
        .iter()
        .map(|q| {
            let z = imm.eval(q.chart, &q.u);
            (pairs(&z), color_of(&imm, &z))
        })
        .unzip();
    let params = params_value(model, p, json!({ "count": count, "seed": seed }));
    let results = json!({
        "model": imm.label.to_string(),
        "points": points,
        "color_channel": color,
        "metadata": { "params": params, "seed": seed, "sample_count": points.len() },
    });
    Ok(Outcome {
        params,
        results,
        assertions: vec![Assertion::new("lengths", points.len() == color.len(), format!("{} points", points.len()))],
        table: Some(point_table(&points, &color)),
        text: None,
    })
}

pub fn cmd_slice(model: &str, p: &Params, t: f64, samples: usize, double_points: bool, seed: u64) -> Result<Outcome, CliError> {
    let imm = build_model(model, p)?;
    let s = verify::slice(&imm, t, samples, seed, None)?;
    let mut results = json!({ "t": t, "points": s.images, "color_channel": s.color, "count": s.images.len() });
    if double_points {
        let dps = verify::find_slice_double_points(&imm, t, samples, 1e-3, seed)?;
        results["double_points"] = serde_json::to_value(&dps)?;
    }
    Ok(Outcome {
        params: params_value(model, p, json!({ "t": t, "samples": samples, "seed": seed })),
        results,
        assertions: Vec::new(),
        table: Some(point_table(&s.images, &s.color)),
        text: None,
    })
}

pub fn cmd_verify(model: &str, p: &Params, samples: usize, tol: f64, seed: u64) -> Result<Outcome, CliError> {
    let imm = build_model(model, p)?;
    let mode = if imm.has_analytic_jacobian() { JacobianMode::Analytic } else { JacobianMode::FiniteDifference };
    let rep = verify::check_lagrangian(&imm, samples, tol, mode, seed)?;
    let mut assertions =
        vec![Assertion::new("lagrangian", rep.passed, format!("max residual {:e} < {tol:e}", rep.max_residual))];
    let mut results = json!({ "lagrangian": rep });
    if !imm.area_loops.is_empty() {
        let sh = verify::shadow_area(&imm, ShadowMethod::BoundaryIntegral, 0, seed)?;
        results["shadow"] = serde_json::to_value(&sh)?;
    }
    if let Some(h) = &imm.homotopy {
        let pr = verify::check_primitive(h, samples.min(2000), seed);
        assertions.push(Assertion::new("primitive", pr.max_residual < 1e-4, format!("{:e}", pr.max_residual)));
        results["primitive"] = serde_json::to_value(&pr)?;
    }
    Ok(Outcome {
        params: params_value(model, p, json!({ "samples": samples, "tol": tol, "seed": seed })),
        results,
        assertions,
        table: None,
        text: None,
    })
}

pub fn cmd_critical(model: &str, p: &Params, seeds: usize, seed: u64) -> Result<Outcome, CliError> {
    let imm = build_model(model, p)?;
    let cps = verify::critical_points(&imm, seeds, seed);
    let mut assertions = vec![Assertion::new(
        "nondegenerate",
        cps.iter().all(|c| !c.degenerate),
        format!("{} critical points", cps.len()),
    )];
    if model == "local-trace" || model == "handle" {
        let k = p.get("k").copied().unwrap_or(0.0) as usize;
        let ok = cps.len() == 1 && cps[0].upward_index == Some(k + 1);
        assertions.push(Assertion::new("single index k+1", ok, format!("expected one point of index {}", k + 1)));
    }
    Ok(Outcome {
        params: params_value(model, p, json!({ "seeds": seeds, "seed": seed })),
        results: json!({ "critical_points": cps }),
        assertions,
        table: None,
        text: None,
    })
}

/// The two ordered self-intersections of a model, keyed `p_to_q`, as paths from p to q.
fn index_paths(model: &str, p: &Params) -> Result<(usize, Vec<(String, grading::SplitPlanePath)>), CliError> {
    let int = |k: &str, d: f64| p.get(k).copied().unwrap_or(d) as usize;
    let (n, pair): (usize, [&str; 2]) = match model {
        "local-trace" | "local-slice+" | "handle" | "whitney" => (int("n", 2.0), ["q-", "q+"]),
        "figure-eight" => (1, ["pi", "0"]),
        other => return Err(CliError::Usage(format!("no self-intersection paths registered for {other}"))),
    };
    let mut out = Vec::new();
    for (a, b) in [(pair[0], pair[1]), (pair[1], pair[0])] {
        let path = match model {
            "whitney" => grading::whitney_path(n, p.get("r").copied().unwrap_or(1.0), a, b)?,
            "figure-eight" => grading::figure_eight_path(p.get("E").copied().unwrap_or(1.0), a, b)?,
            _ => grading::handle_path(int("k", 0.0), n, a, b)?,
        };
        out.push((format!("{a}_to_{b}"), path));
    }
    Ok((n, out))
}

pub fn cmd_index(model: &str, p: &Params, generator: Option<&str>) -> Result<Outcome, CliError> {
    let (n, paths) = index_paths(model, p)?;
    let mut winding = BTreeMap::new();
    let mut formula = BTreeMap::new();
    let mut assertions = Vec::new();
    let mut values = Vec::new();
    for (key, path) in &paths {
        let w = grading::index_by_winding(path)?;
        let f = grading::index_by_formula(path)?;
        assertions.push(Assertion::new(format!("formula agrees on {key}"), w == f, format!("winding {w}, formula {f}")));
        values.push(w);
        if generator.is_none_or(|g| g == key) {
            winding.insert(key.clone(), w);
            formula.insert(key.clone(), f);
        }
    }
    if let Some(g) = generator {
        if winding.is_empty() {
            return Err(CliError::Usage(format!("unknown generator {g}")));
        }
    }
    let sum: i64 = values.iter().sum();
    assertions.push(Assertion::new("duality", sum == n as i64, format!("sum {sum}, n = {n}")));
    Ok(Outcome {
        params: params_value(model, p, json!({ "generator": generator })),
        results: json!({ "indices": winding, "formula": formula }),
        assertions,
        table: None,
        text: None,
    })
}

fn handle_params(p: &Params) -> (usize, usize, f64, f64) {
    let int = |k: &str, d: f64| p.get(k).copied().unwrap_or(d) as usize;
    (int("k", 0.0), int("n", 2.0), p.get("A").copied().unwrap_or(1.0), p.get("B").copied().unwrap_or(0.4))
}

fn default_generators(k: &BottleneckedCobordism) -> Result<GeneratorSet, CochainError> {
    generators_bottlenecked(k, k.default_window.0, k.default_window.1)
}

/// χ^bot(K^{+0} ∘ K^{0−}) against χ^bot(K^{+0}) + χ^bot(K^{0−}) − χ^si(L⁰), folding a chain from the bottom.
pub fn composition_check(pieces: &[BottleneckedCobordism]) -> Result<(i64, i64), CochainError> {
    let mut acc = default_generators(pieces.last().expect("nonempty chain"))?;
    let mut expected = chi_bot(&acc);
    for upper in pieces.iter().rev().skip(1) {
        let up = default_generators(upper)?;
        expected += chi_bot(&up) - upper.minus.chi_si();
        acc = compose(&up, &acc)?;
    }
    Ok((chi_bot(&acc), expected))
}

pub fn random_chain(n: usize, len: usize, rng: &mut ChaCha8Rng) -> Vec<BottleneckedCobordism> {
    let ends: Vec<_> = (0..=len).map(|i| random_end(&format!("L{i}"), n, rng)).collect();
    (0..len).map(|i| random_cobordism(&format!("K{i}"), &ends[i], &ends[i + 1], rng)).collect()
}

pub fn cmd_euler(scenario: Option<&str>, compose_spec: Option<&str>, chains: usize, p: &Params, seed: u64) -> Result<Outcome, CliError> {
    let (k, n, a, b) = handle_params(p);
    let mut assertions = Vec::new();
    let mut results = json!({});
    if scenario.is_none() && compose_spec.is_none() {
        return Err(CliError::Usage("euler needs --scenario handle or --compose SPEC".into()));
    }
    if let Some(s) = scenario {
        if s != "handle" {
            return Err(CliError::Usage(format!("unknown scenario {s}")));
        }
        let kk = BottleneckedCobordism::handle(k, n, a, b)?;
        let gs = default_generators(&kk)?;
        let (cp, cm, cb) = (kk.plus.chi_si(), kk.minus.chi_si(), chi_bot(&gs));
        let sign = |e: i64| if e.rem_euclid(2) == 0 { 1 } else { -1 };
        let formula = sign(k as i64 + 1) + sign(n as i64 - k as i64 + 1);
        assertions.push(Assertion::new("chi_plus = chi_minus = chi_bot", cp == cm && cm == cb, format!("{cp}, {cm}, {cb}")));
        assertions.push(Assertion::new("closed form", cb == formula, format!("(-1)^(k+1) + (-1)^(n-k+1) = {formula}")));
        results = json!({ "chi_plus": cp, "chi_minus": cm, "chi_bot": cb, "formula": formula, "generators": gs });
    }
    if let Some(spec) = compose_spec {
        if spec == "random" {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut failures = 0;
            for _ in 0..chains {
                let nn = 1 + (rand::RngExt::random_range(&mut rng, 0..4));
                let chain = random_chain(nn, 3, &mut rng);
                let (got, want) = composition_check(&chain)?;
                failures += usize::from(got != want);
            }
            assertions.push(Assertion::new("composition equation", failures == 0, format!("{failures} of {chains} chains fail")));
            results["compose"] = json!({ "chains": chains, "failures": failures });
        } else {
            let kk = BottleneckedCobordism::handle(k, n, a, b)?;
            let pieces: Vec<BottleneckedCobordism> = spec
                .split(',')
                .map(|s| match s.trim() {
                    "handle" => Ok(kk.clone()),
                    "id+" => Ok(BottleneckedCobordism::identity(&kk.plus)),
                    "id-" => Ok(BottleneckedCobordism::identity(&kk.minus)),
                    other => Err(CliError::Usage(format!("unknown piece {other}; use id+, handle, id-"))),
                })
                .collect::<Result<_, _>>()?;
            if pieces.is_empty() {
                return Err(CliError::Usage("empty composition".into()));
            }
            let (got, want) = composition_check(&pieces)?;
            assertions.push(Assertion::new("composition equation", got == want, format!("chi_bot {got}, expected {want}")));
            results["compose"] = json!({ "spec": spec, "chi_bot": got, "expected": want });
        }
    }
    Ok(Outcome {
        params: json!({ "scenario": scenario, "compose": compose_spec, "k": k, "n": n, "A": a, "B": b, "seed": seed }),
        results,
        assertions,
        table: None,
        text: None,
    })
}

pub fn cmd_floer(example: &str, p: &Params, cutoff: f64) -> Result<Outcome, CliError> {
    let spec = ExampleSpec::from_name(example, p)?;
    let c = build_complex(&spec, cutoff)?;
    let mc = mc_leading_order(&c);
    let mut assertions = Vec::new();
    let leading: Vec<Value> = mc
        .leading_cochain
        .iter()
        .map(|(g, e)| {
            let (exp, coeff) = e.leading().cloned().expect("nonzero coefficient");
            json!({ "gen": g, "exp": exp, "coeff": crate::novikov::format_rational(&coeff) })
        })
        .collect();
    let mut results = json!({
        "complex": c,
        "curved": c.is_curved(),
        "status": mc.status,
        "leading": leading,
        "mc": mc,
    });
    if !c.is_curved() {
        let dd = c.d_squared_failures();
        assertions.push(Assertion::new("d∘d = 0", dd.is_empty(), format!("{} failures", dd.len())));
        let h = c.homology()?;
        results["homology"] = json!({ "ranks": h, "total": h.values().sum::<usize>() });
    }
    // m¹(𝔟) + m⁰ vanishes at the leading order
    if mc.is_unobstructed() && c.is_curved() {
        let lhs = crate::novikov::chain_add(&c.m1(&mc.cochain()), &c.curvature_chain());
        let lambda = crate::novikov::chain_val(&c.curvature_chain());
        let v = crate::novikov::chain_val(&lhs);
        assertions.push(Assertion::new("leading-order cancellation", v > lambda, format!("residual valuation {v} > {lambda}")));
    }
    match spec {
        ExampleSpec::SurgeryTraceKab { e_a, e_b, e } => {
            let k = KAB::new(e_a, e_b, e)?;
            let push = bounding_cochain_pushforward(&k, &mc);
            assertions.push(Assertion::new(
                "pushforward exponent = E_b/2 - E",
                push.is_ok(),
                match &push {
                    Ok(r) => format!("{} = {}", r.exponent, r.expected),
                    Err(e) => e.to_string(),
                },
            ));
            if let Ok(r) = push {
                results["pushforward"] = serde_json::to_value(r)?;
            }
            let h = homotopy_data_check(e_a, e_b, e, cutoff)?;
            assertions.push(Assertion::new("π⁺∘i⁺ = id", h.pass, "four generators of CF(L_E_b)"));
            results["homotopy"] = serde_json::to_value(h)?;
        }
        ExampleSpec::IntersectionLeSection { e, e_prime, a, b, c: cc } => {
            let d = crate::novikov::solve_leading_deformation(e, e_prime, a, b, cc)?;
            let ok = (d.d0 - d.expected_d0).abs() <= crate::novikov::EXPONENT_TOL;
            assertions.push(Assertion::new("D0 = E/2 - E'", ok, format!("{} vs {}", d.d0, d.expected_d0)));
            results["deformation"] = serde_json::to_value(d)?;
        }
        _ => {}
    }
    let mut params = serde_json::to_value(spec)?;
    params["cutoff"] = json!(cutoff);
    Ok(Outcome { params, results, assertions, table: None, text: None })
}

fn write_out(bytes: &[u8], out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|source| CliError::Io { path: path.display().to_string(), source }),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(bytes).map_err(|source| CliError::Io { path: "stdout".into(), source })
        }
    }
}

/// Cap rayon workers from `LAGCOB_THREADS`.
pub fn configure_threads() {
    if let Some(n) = std::env::var("LAGCOB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|n| *n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let tol = cli.tol.unwrap_or(DEFAULT_TOL);
    let seed = cli.seed;
    match &cli.command {
        Command::Sample { model, count, params } => cmd_sample(model, &params.to_params(), *count, seed),
        Command::Slice { model, t, samples, double_points, params } => {
            cmd_slice(model, &params.to_params(), *t, *samples, *double_points, seed)
        }
        Command::Verify { model, samples, params } => cmd_verify(model, &params.to_params(), *samples, tol, seed),
        Command::Critical { model, seeds, params } => cmd_critical(model, &params.to_params(), *seeds, seed),
        Command::Index { model, generator, params } => cmd_index(model, &params.to_params(), generator.as_deref()),
        Command::Euler { scenario, compose, chains, params } => {
            cmd_euler(scenario.as_deref(), compose.as_deref(), *chains, &params.to_params(), seed)
        }
        Command::Floer { example, cutoff, params } => cmd_floer(example, &params.to_params(), *cutoff),
        Command::Suite => Ok(suite::run(seed)),
    }
}

/// Parse, run and write; returns the process exit code.
pub fn main_with(args: impl IntoIterator<Item = String>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    configure_threads();
    let start = Instant::now();
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let name = cli.command.name();
    let result = if let (Command::Suite, Some(text)) = (&cli.command, &outcome.text) {
        print!("{text}");
        match &cli.out {
            Some(_) => render(name, &outcome, Format::Json).and_then(|b| write_out(&b, cli.out.as_ref())),
            None => Ok(()),
        }
    } else {
        render(name, &outcome, cli.format).and_then(|b| write_out(&b, cli.out.as_ref()))
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        return 2;
    }
    eprintln!("{name}: {} in {:.2}s", if outcome.pass() { "pass" } else { "FAIL" }, start.elapsed().as_secs_f64());
    i32::from(!outcome.pass())
}
