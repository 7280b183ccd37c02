//! Floer generators of immersed Lagrangians and bottlenecked cobordisms, with Euler characteristics.

use std::collections::{BTreeMap, HashSet};

use rand::RngExt;
use serde::Serialize;
use thiserror::Error;

use crate::geom::HandleGeometry;
use crate::grading::{self, GradingError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CochainError {
    #[error("unregistered model {0}")]
    Unregistered(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("window [{t_minus}, {t_plus}] must contain the interior critical values {critical:?}")]
    Window { t_minus: f64, t_plus: f64, critical: Vec<f64> },
    #[error("ends do not match: {0}")]
    EndMismatch(String),
    #[error("duplicate generator label {0}")]
    DuplicateLabel(String),
    #[error("no generator labelled {0}")]
    UnknownGenerator(String),
    #[error(transparent)]
    Grading(#[from] GradingError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    MorseCritical,
    SelfIntersection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseGrading {
    Max,
    Min,
}

/// Where a generator sits on a cobordism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    /// A generator of an immersed Lagrangian.
    Slice,
    /// Critical point of f⁺ at t⁺.
    EndPlus,
    /// Critical point of f⁻ at t⁻.
    EndMinus,
    Interior,
    Bottleneck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exclusion {
    /// A min-grading bottleneck copy outside [t⁻, t⁺].
    Window,
    /// Set aside by hand, e.g. to match a displayed complex.
    Discarded,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Generator {
    pub kind: GeneratorKind,
    pub label: String,
    pub degree: i64,
    pub t_coordinate: Option<f64>,
    pub base_grading: Option<BaseGrading>,
    pub role: Role,
    pub excluded: Option<Exclusion>,
}

impl Generator {
    pub fn morse(label: impl Into<String>, degree: i64) -> Self {
        Generator {
            kind: GeneratorKind::MorseCritical,
            label: label.into(),
            degree,
            t_coordinate: None,
            base_grading: None,
            role: Role::Slice,
            excluded: None,
        }
    }

    pub fn self_intersection(label: impl Into<String>, degree: i64) -> Self {
        Generator { kind: GeneratorKind::SelfIntersection, ..Self::morse(label, degree) }
    }

    pub fn is_active(&self) -> bool {
        self.excluded.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Context {
    ImmersedLagrangian,
    BottleneckedCobordism { t_minus: f64, t_plus: f64, plus: EndLagrangian, minus: EndLagrangian },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorSet {
    pub name: String,
    pub context: Context,
    pub generators: Vec<Generator>,
}

impl GeneratorSet {
    pub fn new(name: impl Into<String>, context: Context, generators: Vec<Generator>) -> Result<Self, CochainError> {
        let mut seen = HashSet::new();
        for g in &generators {
            if !seen.insert(g.label.clone()) {
                return Err(CochainError::DuplicateLabel(g.label.clone()));
            }
        }
        Ok(GeneratorSet { name: name.into(), context, generators })
    }

    pub fn active(&self) -> impl Iterator<Item = &Generator> {
        self.generators.iter().filter(|g| g.is_active())
    }

    pub fn get(&self, label: &str) -> Option<&Generator> {
        self.generators.iter().find(|g| g.label == label)
    }

    pub fn degree(&self, label: &str) -> Option<i64> {
        self.get(label).map(|g| g.degree)
    }

    /// Sorted degrees of the active generators.
    pub fn degrees(&self) -> Vec<i64> {
        let mut d: Vec<i64> = self.active().map(|g| g.degree).collect();
        d.sort();
        d
    }

    /// Active generators per degree.
    pub fn degree_counts(&self) -> BTreeMap<i64, usize> {
        let mut m = BTreeMap::new();
        for g in self.active() {
            *m.entry(g.degree).or_insert(0) += 1;
        }
        m
    }

    pub fn discard(mut self, label: &str) -> Result<Self, CochainError> {
        let g = self
            .generators
            .iter_mut()
            .find(|g| g.label == label)
            .ok_or_else(|| CochainError::UnknownGenerator(label.to_string()))?;
        g.excluded = Some(Exclusion::Discarded);
        Ok(self)
    }
}

/// χ = Σ (−1)^deg over active generators.
pub fn chi(gs: &GeneratorSet) -> i64 {
    gs.active().map(|g| if g.degree.rem_euclid(2) == 0 { 1 } else { -1 }).sum()
}

/// χ^si of an immersed Lagrangian.
pub fn chi_si(gs: &GeneratorSet) -> i64 {
    chi(gs)
}

/// χ^bot of a bottlenecked cobordism.
pub fn chi_bot(gs: &GeneratorSet) -> i64 {
    chi(gs)
}

/// An ordered double point (p→q) of degree `degree`; its reverse has degree n − degree.
///
/// At a bottleneck sitting above the cobordism window the copy of (p→q) receives the
/// maximal grading from the base.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DoublePoint {
    pub p: String,
    pub q: String,
    pub degree: i64,
}

impl DoublePoint {
    pub fn forward_label(&self) -> String {
        format!("({}->{})", self.p, self.q)
    }

    pub fn backward_label(&self) -> String {
        format!("({}->{})", self.q, self.p)
    }
}

/// An end of a cobordism: Morse generators and ordered double points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EndLagrangian {
    pub name: String,
    pub n: usize,
    pub morse: Vec<(String, i64)>,
    pub double_points: Vec<DoublePoint>,
}

impl EndLagrangian {
    pub fn generators(&self) -> Vec<Generator> {
        let mut out: Vec<Generator> = self.morse.iter().map(|(l, d)| Generator::morse(l.clone(), *d)).collect();
        for dp in &self.double_points {
            out.push(Generator::self_intersection(dp.forward_label(), dp.degree));
            out.push(Generator::self_intersection(dp.backward_label(), self.n as i64 - dp.degree));
        }
        out
    }

    pub fn generator_set(&self) -> GeneratorSet {
        GeneratorSet::new(self.name.clone(), Context::ImmersedLagrangian, self.generators()).expect("unique labels")
    }

    pub fn chi_si(&self) -> i64 {
        chi(&self.generator_set())
    }
}

/// Immersed Lagrangians with a standard Morse function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum ImmersedModel {
    Whitney { n: usize, r: f64 },
    /// An embedded circle, e.g. a section S¹_E of T*S¹.
    Circle { e: f64 },
    FigureEight { e: f64 },
    /// L^{k,n−k,+}, near the surgery region.
    LocalPositive { k: usize, n: usize },
    /// L^{k+1,n−k−1,−}, near the surgery region.
    LocalNegative { k: usize, n: usize },
}

impl ImmersedModel {
    /// Look up a registered model by name.
    pub fn from_name(name: &str, params: &BTreeMap<String, f64>) -> Result<Self, CochainError> {
        let get = |k: &str| -> Result<f64, CochainError> {
            params.get(k).copied().ok_or_else(|| CochainError::Parameter(format!("{name} needs --{k}")))
        };
        let int = |k: &str| -> Result<usize, CochainError> {
            let v = get(k)?;
            if v < 0.0 || v.fract() != 0.0 {
                return Err(CochainError::Parameter(format!("{k} must be a non-negative integer")));
            }
            Ok(v as usize)
        };
        Ok(match name {
            "whitney" => ImmersedModel::Whitney { n: int("n")?, r: params.get("r").copied().unwrap_or(1.0) },
            "circle" | "section" => ImmersedModel::Circle { e: params.get("E").copied().unwrap_or(1.0) },
            "figure-eight" => ImmersedModel::FigureEight { e: params.get("E").copied().unwrap_or(1.0) },
            "local-positive" => ImmersedModel::LocalPositive { k: int("k")?, n: int("n")? },
            "local-negative" => ImmersedModel::LocalNegative { k: int("k")?, n: int("n")? },
            other => return Err(CochainError::Unregistered(other.to_string())),
        })
    }

    /// Generators and their degrees, with self-intersection degrees from the winding index.
    pub fn end_lagrangian(&self) -> Result<EndLagrangian, CochainError> {
        Ok(match *self {
            ImmersedModel::Whitney { n, r } => {
                if n < 1 || !(r > 0.0) {
                    return Err(CochainError::Parameter("whitney needs n ≥ 1, r > 0".into()));
                }
                let d = grading::index_by_winding(&grading::whitney_path(n, r, "q+", "q-")?)?;
                EndLagrangian {
                    name: format!("whitney(n={n})"),
                    n,
                    morse: vec![("e".into(), 0), ("x".into(), n as i64)],
                    double_points: vec![DoublePoint { p: "q+".into(), q: "q-".into(), degree: d }],
                }
            }
            ImmersedModel::Circle { e } => EndLagrangian {
                name: format!("circle(E={e})"),
                n: 1,
                morse: vec![("e".into(), 0), ("x".into(), 1)],
                double_points: vec![],
            },
            ImmersedModel::FigureEight { e } => {
                let d = grading::index_by_winding(&grading::figure_eight_path(e, "0", "pi")?)?;
                EndLagrangian {
                    name: format!("figure-eight(E={e})"),
                    n: 1,
                    morse: vec![("e".into(), 0), ("x".into(), 1)],
                    double_points: vec![DoublePoint { p: "0".into(), q: "pi".into(), degree: d }],
                }
            }
            ImmersedModel::LocalPositive { k, n } => {
                let d = grading::index_by_winding(&grading::handle_path(k, n, "q+", "q-")?)?;
                EndLagrangian {
                    name: format!("L^(k={k},n={n},+)"),
                    n,
                    morse: vec![],
                    double_points: vec![DoublePoint { p: "q+".into(), q: "q-".into(), degree: d }],
                }
            }
            ImmersedModel::LocalNegative { k, n } => {
                if k > n || n == 0 {
                    return Err(CochainError::Parameter(format!("need 0 ≤ k ≤ n, n ≥ 1 (k={k}, n={n})")));
                }
                EndLagrangian {
                    name: format!("L^(k+1={},n-k-1={},-)", k + 1, n as i64 - k as i64 - 1),
                    n,
                    // at k = n the pair is kept formally, x- in degree -1
                    morse: vec![("x+".into(), k as i64 + 1), ("x-".into(), n as i64 - k as i64 - 1)],
                    double_points: vec![],
                }
            }
        })
    }
}

pub fn generators_immersed(model: &ImmersedModel) -> Result<GeneratorSet, CochainError> {
    Ok(model.end_lagrangian()?.generator_set())
}

/// A double bottleneck copy of the slice double points at cobordism parameter t.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bottleneck {
    pub index: usize,
    pub t: f64,
    pub double_points: Vec<DoublePoint>,
    /// Whether the forward generators (p→q) take the maximal grading here.
    pub forward_max: bool,
}

/// Combinatorial data of a Lagrangian cobordism with double bottlenecks L⁺ ⇝ L⁻.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BottleneckedCobordism {
    pub name: String,
    pub plus: EndLagrangian,
    pub minus: EndLagrangian,
    /// Interior critical points of the admissible Morse function: label, degree, t.
    pub interior: Vec<(String, i64, f64)>,
    pub bottlenecks: Vec<Bottleneck>,
    /// Critical values of π_ℝ, which every window must contain.
    pub critical_values: Vec<f64>,
    pub default_window: (f64, f64),
}

impl BottleneckedCobordism {
    /// K^{k,n−k+1}_{A,B}: L^{k,n−k,+} ⇝ L^{k+1,n−k−1,−}.
    pub fn handle(k: usize, n: usize, a: f64, b: f64) -> Result<Self, CochainError> {
        if k > n || n == 0 {
            return Err(CochainError::Parameter(format!("need 0 ≤ k ≤ n, n ≥ 1 (k={k}, n={n})")));
        }
        if !(a > 0.0) || !(b > 0.0) {
            return Err(CochainError::Parameter("areas A and B must be positive".into()));
        }
        let plus = ImmersedModel::LocalPositive { k, n }.end_lagrangian()?;
        let minus = ImmersedModel::LocalNegative { k, n }.end_lagrangian()?;
        // the combinatorics do not depend on A, B; times come from the geometric model when it exists
        let [t0, t1] = HandleGeometry::bottleneck_times();
        let tc = HandleGeometry::new(k, n, a, b).map(|g| g.critical_time()).unwrap_or(-2.0);
        let dps = plus.double_points.clone();
        Ok(BottleneckedCobordism {
            name: format!("K^(k={k},n={n})_(A={a},B={b})"),
            plus,
            minus,
            interior: vec![("y".into(), n as i64 - k as i64, tc)],
            bottlenecks: vec![
                Bottleneck { index: 0, t: t0, double_points: dps.clone(), forward_max: false },
                Bottleneck { index: 1, t: t1, double_points: dps, forward_max: true },
            ],
            critical_values: vec![tc],
            default_window: (tc.min(t0) - 0.25, 0.0),
        })
    }

    /// The product L × ℝ with bottlenecks just outside [−1, 1].
    ///
    /// The admissible Morse function has maxima in t at both ends and a minimum in
    /// between, so each critical point of f appears at t = ±1 and once more, one
    /// degree up, at t = 0.
    pub fn identity(l: &EndLagrangian) -> Self {
        let dps = l.double_points.clone();
        let mut bottlenecks = Vec::new();
        if !dps.is_empty() {
            bottlenecks.push(Bottleneck { index: 0, t: -1.5, double_points: dps.clone(), forward_max: false });
            bottlenecks.push(Bottleneck { index: 1, t: 1.5, double_points: dps, forward_max: true });
        }
        BottleneckedCobordism {
            name: format!("id[{}]", l.name),
            plus: l.clone(),
            minus: l.clone(),
            interior: l.morse.iter().map(|(s, d)| (format!("{s}[1]"), d + 1, 0.0)).collect(),
            bottlenecks,
            critical_values: vec![],
            default_window: (-1.0, 1.0),
        }
    }
}

fn bottleneck_copies(b: &Bottleneck, n: usize) -> Vec<Generator> {
    let mut out = Vec::new();
    for dp in &b.double_points {
        let i = b.index;
        let fwd = format!("({},{i})->({},{i})", dp.p, dp.q);
        let bwd = format!("({},{i})->({},{i})", dp.q, dp.p);
        let (df, db) = (dp.degree, n as i64 - dp.degree);
        let (gf, gb, df, db) =
            if b.forward_max { (BaseGrading::Max, BaseGrading::Min, df, db + 1) } else { (BaseGrading::Min, BaseGrading::Max, df + 1, db) };
        for (label, degree, grade) in [(fwd, df, gf), (bwd, db, gb)] {
            out.push(Generator {
                kind: GeneratorKind::SelfIntersection,
                label,
                degree,
                t_coordinate: Some(b.t),
                base_grading: Some(grade),
                role: Role::Bottleneck,
                excluded: None,
            });
        }
    }
    out
}

fn apply_window(gens: &mut [Generator], t_minus: f64, t_plus: f64) {
    for g in gens.iter_mut() {
        if g.role != Role::Bottleneck || g.excluded == Some(Exclusion::Discarded) {
            continue;
        }
        let t = g.t_coordinate.unwrap_or(0.0);
        let inside = t >= t_minus && t <= t_plus;
        g.excluded = (!inside && g.base_grading == Some(BaseGrading::Min)).then_some(Exclusion::Window);
    }
}

/// I^bot(K, t⁺, t⁻): critical points of an admissible Morse function together with the
/// bottleneck self-intersections, dropping min-grading copies outside [t⁻, t⁺].
pub fn generators_bottlenecked(k: &BottleneckedCobordism, t_minus: f64, t_plus: f64) -> Result<GeneratorSet, CochainError> {
    if !(t_minus < t_plus) || k.critical_values.iter().any(|c| *c < t_minus || *c > t_plus) {
        return Err(CochainError::Window { t_minus, t_plus, critical: k.critical_values.clone() });
    }
    let mut gens = Vec::new();
    for (l, d) in &k.plus.morse {
        gens.push(Generator { t_coordinate: Some(t_plus), role: Role::EndPlus, ..Generator::morse(format!("{l}+"), *d) });
    }
    for (l, d) in &k.minus.morse {
        gens.push(Generator { t_coordinate: Some(t_minus), role: Role::EndMinus, ..Generator::morse(l.clone(), *d) });
    }
    for (l, d, t) in &k.interior {
        gens.push(Generator { t_coordinate: Some(*t), role: Role::Interior, ..Generator::morse(l.clone(), *d) });
    }
    let n = k.plus.n;
    for b in &k.bottlenecks {
        gens.extend(bottleneck_copies(b, n));
    }
    apply_window(&mut gens, t_minus, t_plus);
    GeneratorSet::new(
        k.name.clone(),
        Context::BottleneckedCobordism { t_minus, t_plus, plus: k.plus.clone(), minus: k.minus.clone() },
        gens,
    )
}

/// The generator set of K^{+0} ∘ K^{0−}, stacking `upper` on top of `lower` along L⁰.
pub fn compose(upper: &GeneratorSet, lower: &GeneratorSet) -> Result<GeneratorSet, CochainError> {
    let (
        Context::BottleneckedCobordism { t_minus: ua, t_plus: ub, plus: uplus, minus: uminus },
        Context::BottleneckedCobordism { t_minus: la, t_plus: lb, plus: lplus, minus: lminus },
    ) = (&upper.context, &lower.context)
    else {
        return Err(CochainError::EndMismatch("both pieces must be bottlenecked cobordisms".into()));
    };
    if uminus != lplus {
        return Err(CochainError::EndMismatch(format!("{} vs {}", uminus.name, lplus.name)));
    }
    let mut up_end: Vec<(i64, String)> =
        upper.generators.iter().filter(|g| g.role == Role::EndMinus).map(|g| (g.degree, g.label.clone())).collect();
    let mut low_end: Vec<(i64, String)> = lower
        .generators
        .iter()
        .filter(|g| g.role == Role::EndPlus)
        .map(|g| (g.degree, g.label.strip_suffix('+').unwrap_or(&g.label).to_string()))
        .collect();
    up_end.sort();
    low_end.sort();
    if up_end != low_end {
        return Err(CochainError::EndMismatch("critical points of f⁰ differ".into()));
    }
    let (lname, uname) = if upper.name == lower.name {
        (format!("{}#0", lower.name), format!("{}#1", upper.name))
    } else {
        (lower.name.clone(), upper.name.clone())
    };
    let mut gens = Vec::new();
    for g in &lower.generators {
        let mut g = g.clone();
        if g.role != Role::EndMinus {
            g.label = format!("{lname}/{}", g.label);
        }
        g.t_coordinate = g.t_coordinate.map(|t| t - lb);
        if g.role == Role::EndPlus {
            g.role = Role::Interior;
        }
        gens.push(g);
    }
    for g in upper.generators.iter().filter(|g| g.role != Role::EndMinus) {
        let mut g = g.clone();
        if g.role != Role::EndPlus {
            g.label = format!("{uname}/{}", g.label);
        }
        g.t_coordinate = g.t_coordinate.map(|t| t - ua);
        gens.push(g);
    }
    let (t_minus, t_plus) = (la - lb, ub - ua);
    apply_window(&mut gens, t_minus, t_plus);
    GeneratorSet::new(
        format!("({})o({})", upper.name, lower.name),
        Context::BottleneckedCobordism { t_minus, t_plus, plus: uplus.clone(), minus: lminus.clone() },
        gens,
    )
}

/// A random end with up to three Morse generators and two double points.
pub fn random_end<R: RngExt>(name: &str, n: usize, rng: &mut R) -> EndLagrangian {
    let n_i = n as i64;
    let morse = (0..rng.random_range(1..=3)).map(|i| (format!("m{i}"), rng.random_range(0..=n_i))).collect();
    let double_points = (0..rng.random_range(0..=2))
        .map(|i| DoublePoint { p: format!("a{i}"), q: format!("b{i}"), degree: rng.random_range(-1..=n_i + 1) })
        .collect();
    EndLagrangian { name: name.to_string(), n, morse, double_points }
}

/// A random bottlenecked cobordism plus ⇝ minus: random interior critical points, and
/// bottlenecks at t = ∓1.5 carrying the double points of each end.
pub fn random_cobordism<R: RngExt>(name: &str, plus: &EndLagrangian, minus: &EndLagrangian, rng: &mut R) -> BottleneckedCobordism {
    let n = plus.n as i64;
    let interior = (0..rng.random_range(0..=3))
        .map(|i| (format!("z{i}"), rng.random_range(0..=n + 1), rng.random_range(-0.9..0.9)))
        .collect();
    let mut bottlenecks = Vec::new();
    if !minus.double_points.is_empty() {
        bottlenecks.push(Bottleneck { index: 0, t: -1.5, double_points: minus.double_points.clone(), forward_max: false });
    }
    if !plus.double_points.is_empty() {
        bottlenecks.push(Bottleneck { index: 1, t: 1.5, double_points: plus.double_points.clone(), forward_max: true });
    }
    BottleneckedCobordism {
        name: name.to_string(),
        plus: plus.clone(),
        minus: minus.clone(),
        interior,
        bottlenecks,
        critical_values: vec![],
        default_window: (-1.0, 1.0),
    }
}
