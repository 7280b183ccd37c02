//! Registered example complexes and the checks built on them.

use std::collections::BTreeMap;

use num_traits::One;
use serde::Serialize;

use super::complex::{chain_add, Chain, FilteredComplex, MCResult};
use super::element::{int, rational, NovikovElement, Q, EXPONENT_TOL};
use super::NovikovError;
use crate::cochains::{
    generators_bottlenecked, generators_immersed, BaseGrading, BottleneckedCobordism, Context, EndLagrangian,
    Generator, GeneratorKind, GeneratorSet, ImmersedModel, Role,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "example", rename_all = "snake_case")]
pub enum ExampleSpec {
    Whitney { n: usize, a: f64 },
    FigureEight { e: f64 },
    Handle { k: usize, n: usize, a: f64, b: f64 },
    AntisurgerySurgery { a_plus: f64, a_minus: f64 },
    #[serde(rename = "surgery_trace_KAB")]
    SurgeryTraceKab { e_a: f64, e_b: f64, e: f64 },
    #[serde(rename = "intersection_LE_section")]
    IntersectionLeSection { e: f64, e_prime: f64, a: f64, b: f64, c: f64 },
}

impl ExampleSpec {
    pub const NAMES: [&'static str; 6] =
        ["whitney", "figure_eight", "handle", "antisurgery_surgery", "surgery_trace_KAB", "intersection_LE_section"];

    /// Look up an example by name; parameter keys are n, k, A, B, C, E, E_prime, A_plus, A_minus, E_a, E_b.
    pub fn from_name(name: &str, p: &BTreeMap<String, f64>) -> Result<Self, NovikovError> {
        let get = |k: &str, default: Option<f64>| -> Result<f64, NovikovError> {
            p.get(k).copied().or(default).ok_or_else(|| NovikovError::Parameter(format!("{name} needs {k}")))
        };
        let int = |k: &str, default: Option<f64>| -> Result<usize, NovikovError> {
            let v = get(k, default)?;
            if v < 0.0 || v.fract() != 0.0 {
                return Err(NovikovError::Parameter(format!("{k} must be a non-negative integer")));
            }
            Ok(v as usize)
        };
        Ok(match name.replace('-', "_").as_str() {
            "whitney" => ExampleSpec::Whitney { n: int("n", Some(2.0))?, a: get("A", Some(1.0))? },
            "figure_eight" => ExampleSpec::FigureEight { e: get("E", Some(1.0))? },
            "handle" => ExampleSpec::Handle {
                k: int("k", Some(0.0))?,
                n: int("n", Some(2.0))?,
                a: get("A", Some(1.0))?,
                b: get("B", Some(0.4))?,
            },
            "antisurgery_surgery" => {
                ExampleSpec::AntisurgerySurgery { a_plus: get("A_plus", None)?, a_minus: get("A_minus", None)? }
            }
            "surgery_trace_KAB" | "surgery_trace_kab" => {
                ExampleSpec::SurgeryTraceKab { e_a: get("E_a", None)?, e_b: get("E_b", None)?, e: get("E", None)? }
            }
            "intersection_LE_section" | "intersection_le_section" => ExampleSpec::IntersectionLeSection {
                e: get("E", None)?,
                e_prime: get("E_prime", None)?,
                a: get("A", None)?,
                b: get("B", None)?,
                c: get("C", None)?,
            },
            _ => return Err(NovikovError::Unregistered(name.to_string())),
        })
    }
}

fn positive(name: &str, x: f64) -> Result<(), NovikovError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(NovikovError::Parameter(format!("{name} must be positive, got {x}")))
    }
}

fn t(e: f64, cutoff: f64) -> NovikovElement {
    NovikovElement::t(e, cutoff)
}

pub fn build_complex(spec: &ExampleSpec, cutoff: f64) -> Result<FilteredComplex, NovikovError> {
    match *spec {
        ExampleSpec::Whitney { n, a } => {
            positive("A", a)?;
            if n < 1 {
                return Err(NovikovError::Parameter("whitney needs n ≥ 1".into()));
            }
            let gs = generators_immersed(&ImmersedModel::Whitney { n, r: 1.0 })?;
            let mut c = FilteredComplex::new(format!("whitney(n={n},A={a})"), gs, cutoff);
            c.add_arrow("(q-->q+)", "e", vec![t(a, cutoff)])?;
            c.add_arrow("x", "(q+->q-)", vec![t(a, cutoff)])?;
            Ok(c)
        }
        ExampleSpec::FigureEight { e } => {
            positive("E", e)?;
            let gs = generators_immersed(&ImmersedModel::FigureEight { e })?;
            let mut c = FilteredComplex::new(format!("figure_eight(E={e})"), gs, cutoff);
            c.add_arrow("(pi->0)", "(0->pi)", vec![t(e, cutoff), -t(e, cutoff)])?;
            c.add_arrow("e", "x", vec![t(0.0, cutoff), -t(0.0, cutoff)])?;
            Ok(c)
        }
        ExampleSpec::Handle { k, n, a, b } => {
            let k_ab = BottleneckedCobordism::handle(k, n, a, b)?;
            let (lo, hi) = k_ab.default_window;
            let gs = generators_bottlenecked(&k_ab, lo, hi)?;
            let mut c = FilteredComplex::new(format!("handle(k={k},n={n},A={a},B={b})"), gs, cutoff);
            c.add_arrow("(q+,1)->(q-,1)", "(q+,0)->(q-,0)", vec![t(b, cutoff)])?;
            c.add_arrow("(q-,0)->(q+,0)", "y", vec![t(a, cutoff)])?;
            if k == 0 {
                c.add_curvature("(q+,0)->(q-,0)", t(a, cutoff))?;
            }
            Ok(c)
        }
        ExampleSpec::AntisurgerySurgery { a_plus, a_minus } => {
            positive("A_plus", a_plus)?;
            positive("A_minus", a_minus)?;
            let mut c = FilteredComplex::new(format!("antisurgery_surgery(A+={a_plus},A-={a_minus})"), antisurgery_generators()?, cutoff);
            c.add_curvature("(q+->q-)", &t(a_plus, cutoff) - &t(a_minus, cutoff))?;
            Ok(c)
        }
        ExampleSpec::SurgeryTraceKab { e_a, e_b, e } => {
            let kab = KAB::new(e_a, e_b, e)?;
            let (a, b) = (kab.a, kab.b);
            let mut c = FilteredComplex::new(format!("surgery_trace_KAB(E_a={e_a},E_b={e_b},E={e})"), kab_generators(&kab)?, cutoff);
            c.add_arrow("(pi->0)_a", "y", vec![t(a, cutoff)])?;
            c.add_arrow("(0->pi)_b", "(0->pi)_a", vec![t(b, cutoff)])?;
            c.add_arrow("x1", "(0->pi)_a", vec![t(a, cutoff)])?;
            c.add_arrow("(pi->0)_a", "(0->pi)_b", vec![t(b + e_b, cutoff), -t(b + e_b, cutoff)])?;
            c.add_curvature("(0->pi)_a", t(a, cutoff))?;
            Ok(c)
        }
        ExampleSpec::IntersectionLeSection { e, e_prime, a, b, c: cc } => {
            let def = solve_leading_deformation(e, e_prime, a, b, cc)?;
            let gens = vec![Generator::morse("p", 0), Generator::morse("q", 1)];
            let gs = GeneratorSet::new("CF(L_E, S1_E')", Context::ImmersedLagrangian, gens)?;
            let mut c = FilteredComplex::new(format!("intersection_LE_section(E={e},E'={e_prime},A={a},B={b},C={cc})"), gs, cutoff);
            let deformation = NovikovElement::monomial(def.d0 + cc, def.a0.clone(), cutoff);
            c.add_arrow("p", "q", vec![t(a, cutoff), -t(b, cutoff), deformation])?;
            Ok(c)
        }
    }
}

fn gen(label: &str, degree: i64, role: Role, t: f64) -> Generator {
    Generator { t_coordinate: Some(t), role, ..Generator::morse(label, degree) }
}

fn si(label: &str, degree: i64, role: Role, t: f64, grade: Option<BaseGrading>) -> Generator {
    Generator {
        kind: GeneratorKind::SelfIntersection,
        t_coordinate: Some(t),
        role,
        base_grading: grade,
        ..Generator::self_intersection(label, degree)
    }
}

fn antisurgery_generators() -> Result<GeneratorSet, NovikovError> {
    let mut g = Vec::new();
    for (end, role, t) in [("-", Role::EndMinus, -1.0), ("+", Role::EndPlus, 1.0)] {
        for c in ["0", "1"] {
            g.push(gen(&format!("e{c}{end}"), 0, role, t));
            g.push(gen(&format!("x{c}{end}"), 1, role, t));
        }
    }
    g.push(gen("y-", 1, Role::Interior, -0.5));
    g.push(gen("y+", 1, Role::Interior, 0.5));
    g.push(si("(q+->q-)", 2, Role::Interior, 0.0, None));
    g.push(si("(q-->q+)", 0, Role::Interior, 0.0, None));
    Ok(GeneratorSet::new("K = surgery ∘ anti-surgery", Context::ImmersedLagrangian, g)?)
}

/// Parameters of the surgery trace K_{A,B} between L_{E_b} and S¹_E ⊔ S¹_{−E}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KAB {
    pub e_a: f64,
    pub e_b: f64,
    pub e: f64,
    /// (E_a − 2E)/2.
    pub a: f64,
    /// (E_a − E_b)/2.
    pub b: f64,
}

impl KAB {
    pub fn new(e_a: f64, e_b: f64, e: f64) -> Result<Self, NovikovError> {
        for (n, x) in [("E_a", e_a), ("E_b", e_b), ("E", e)] {
            positive(n, x)?;
        }
        let (a, b) = ((e_a - 2.0 * e) / 2.0, (e_a - e_b) / 2.0);
        positive("A = (E_a - 2E)/2", a)?;
        positive("B = (E_a - E_b)/2", b)?;
        Ok(KAB { e_a, e_b, e, a, b })
    }

    fn two() -> Q {
        int(2)
    }

    pub fn a_exact(&self) -> Q {
        (rational(self.e_a) - Self::two() * rational(self.e)) / Self::two()
    }

    pub fn b_exact(&self) -> Q {
        (rational(self.e_a) - rational(self.e_b)) / Self::two()
    }

    /// E_b/2 − E.
    pub fn flux_exact(&self) -> Q {
        rational(self.e_b) / Self::two() - rational(self.e)
    }
}

fn kab_generators(k: &KAB) -> Result<GeneratorSet, NovikovError> {
    let (t_minus, t_plus) = (-1.0, 1.0);
    let (t0, t1, tc) = (-0.5, 0.5, -0.25);
    let gens = vec![
        gen("e_b", 0, Role::EndPlus, t_plus),
        gen("x_b", 1, Role::EndPlus, t_plus),
        gen("e0", 0, Role::EndMinus, t_minus),
        gen("e1", 0, Role::EndMinus, t_minus),
        gen("x0", 1, Role::EndMinus, t_minus),
        gen("x1", 1, Role::EndMinus, t_minus),
        gen("e_a", 1, Role::Interior, 0.0),
        gen("x_a", 2, Role::Interior, 0.0),
        gen("y", 1, Role::Interior, tc),
        si("(0->pi)_a", 2, Role::Bottleneck, t0, Some(BaseGrading::Min)),
        si("(pi->0)_a", 0, Role::Bottleneck, t0, Some(BaseGrading::Max)),
        si("(0->pi)_b", 1, Role::Bottleneck, t1, Some(BaseGrading::Max)),
        si("(pi->0)_b", 1, Role::Bottleneck, t1, Some(BaseGrading::Min)),
    ];
    let plus = ImmersedModel::FigureEight { e: k.e_b }.end_lagrangian()?;
    let minus = EndLagrangian {
        name: format!("S1_{e} ⊔ S1_-{e}", e = k.e),
        n: 1,
        morse: vec![("e0".into(), 0), ("x0".into(), 1), ("e1".into(), 0), ("x1".into(), 1)],
        double_points: vec![],
    };
    let gs = GeneratorSet::new(
        format!("K_(A={},B={})", k.a, k.b),
        Context::BottleneckedCobordism { t_minus, t_plus, plus, minus },
        gens,
    )?;
    Ok(gs.discard("(pi->0)_b")?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PushforwardReport {
    pub a: f64,
    pub b: f64,
    /// Leading exponent of π⁺_*𝔟.
    pub exponent: f64,
    /// E_b/2 − E.
    pub expected: f64,
    /// A − B = E_b/2 − E held in exact rational arithmetic.
    pub exact_identity: bool,
    pub image: Chain,
}

/// Push the bounding cochain of K_{A,B} to CF(L_{E_b}) and check its exponent against the flux.
pub fn bounding_cochain_pushforward(k: &KAB, result: &MCResult) -> Result<PushforwardReport, NovikovError> {
    let (a_q, b_q, flux) = (k.a_exact(), k.b_exact(), k.flux_exact());
    let exact_identity = &a_q - &b_q == flux;
    if !exact_identity {
        return Err(NovikovError::Identity(format!("A - B = {} but E_b/2 - E = {}", &a_q - &b_q, flux)));
    }
    let expected = k.e_b / 2.0 - k.e;
    if expected <= EXPONENT_TOL {
        return Err(NovikovError::NonPositive { exponent: expected });
    }
    if !result.is_unobstructed() {
        return Err(NovikovError::Identity(format!("no bounding cochain: {:?}", result.certificate)));
    }
    let cochain = result.cochain();
    let coeff = cochain
        .get("(0->pi)_b")
        .ok_or_else(|| NovikovError::Identity("bounding cochain has no (0->pi)_b term".into()))?;
    let exponent = coeff.val();
    if (exponent - expected).abs() > EXPONENT_TOL || (exponent - (k.a - k.b)).abs() > EXPONENT_TOL {
        return Err(NovikovError::Identity(format!("exponent {exponent} != E_b/2 - E = {expected}")));
    }
    let image = pi_plus(k, &cochain);
    Ok(PushforwardReport { a: k.a, b: k.b, exponent, expected, exact_identity, image })
}

/// Solution of T^A − T^B + a₀T^{D₀}·T^C = 0 at leading order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeadingDeformation {
    pub d0: f64,
    #[serde(serialize_with = "super::element::serialize_rational")]
    pub a0: Q,
    /// E/2 − E′.
    pub expected_d0: f64,
    /// B + E′ = E/2 + C held exactly in rationals (otherwise within tolerance).
    pub constraint_exact: bool,
}

pub fn solve_leading_deformation(e: f64, e_prime: f64, a: f64, b: f64, c: f64) -> Result<LeadingDeformation, NovikovError> {
    for (n, x) in [("E", e), ("E_prime", e_prime), ("A", a), ("B", b), ("C", c)] {
        positive(n, x)?;
    }
    let lhs = rational(b) + rational(e_prime);
    let rhs = rational(e) / int(2) + rational(c);
    let constraint_exact = lhs == rhs;
    if !constraint_exact && ((b + e_prime) - (e / 2.0 + c)).abs() > EXPONENT_TOL {
        return Err(NovikovError::Constraint(format!("B + E' = {} but E/2 + C = {}", b + e_prime, e / 2.0 + c)));
    }
    if (a - b).abs() <= EXPONENT_TOL {
        return Err(NovikovError::Parameter("A = B leaves no leading term to cancel".into()));
    }
    // cancel the lower of T^A and −T^B
    let (d0, a0) = if b < a { (b - c, Q::one()) } else { (a - c, -Q::one()) };
    Ok(LeadingDeformation { d0, a0, expected_d0: e / 2.0 - e_prime, constraint_exact })
}

fn chain(terms: &[(&str, NovikovElement)]) -> Chain {
    terms.iter().fold(Chain::new(), |acc, (g, c)| chain_add(&acc, &Chain::from([(g.to_string(), c.clone())])))
}

/// i⁺: CF(L_{E_b}) → CF_bot(K) at leading order.
fn i_plus(k: &KAB, g: &str, cutoff: f64) -> Chain {
    let one = NovikovElement::one(cutoff);
    match g {
        "e_b" => chain(&[("e_b", one.clone()), ("e1", one.clone()), ("e0", -one)]),
        "x_b" => chain(&[("x_b", one.clone()), ("x0", one)]),
        "(pi->0)_b" => chain(&[("(pi->0)_a", t(-k.b, cutoff)), ("e0", t(k.a - k.b, cutoff))]),
        "(0->pi)_b" => {
            chain(&[("(0->pi)_b", one), ("x1", t(k.b - k.a, cutoff)), ("x0", -t(k.b - k.a, cutoff))])
        }
        _ => Chain::new(),
    }
}

/// H: CF_bot(K) → CF_bot(K) of degree −1 at leading order.
fn homotopy_h(k: &KAB, cutoff: f64) -> BTreeMap<String, Chain> {
    let one = NovikovElement::one(cutoff);
    BTreeMap::from([
        ("e_a".to_string(), chain(&[("e1", one.clone()), ("e0", -one.clone())])),
        ("y".to_string(), chain(&[("e0", one.clone())])),
        ("(0->pi)_a".to_string(), chain(&[("x1", t(-k.a, cutoff)), ("x0", -t(-k.a, cutoff))])),
        ("x_a".to_string(), chain(&[("x0", one)])),
    ])
}

/// π⁺: CF_bot(K) → CF(L_{E_b}), identifying (π→0)_a with T^B·(π→0)_b.
fn pi_plus(k: &KAB, c: &Chain) -> Chain {
    let mut out = Chain::new();
    for (g, coeff) in c {
        let cutoff = coeff.cutoff();
        let image = match g.as_str() {
            "e_b" | "x_b" | "(0->pi)_b" => Chain::from([(g.clone(), coeff.clone())]),
            "(pi->0)_a" => Chain::from([("(pi->0)_b".to_string(), coeff * &t(k.b, cutoff))]),
            _ => Chain::new(),
        };
        out = chain_add(&out, &image);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomotopyCheck {
    pub generator: String,
    pub i_plus: Chain,
    pub pi_i_plus: Chain,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomotopyReport {
    pub checks: Vec<HomotopyCheck>,
    pub homotopy: BTreeMap<String, Chain>,
    pub pass: bool,
}

pub const L_EB_GENERATORS: [&str; 4] = ["e_b", "x_b", "(pi->0)_b", "(0->pi)_b"];

/// π⁺∘i⁺ = id on the generators of CF(L_{E_b}).
pub fn homotopy_data_check(e_a: f64, e_b: f64, e: f64, cutoff: f64) -> Result<HomotopyReport, NovikovError> {
    let k = KAB::new(e_a, e_b, e)?;
    let checks: Vec<HomotopyCheck> = L_EB_GENERATORS
        .iter()
        .map(|g| {
            let ip = i_plus(&k, g, cutoff);
            let pip = pi_plus(&k, &ip);
            let id = Chain::from([(g.to_string(), NovikovElement::one(cutoff))]);
            let pass = pip.len() == 1 && pip.get(*g).is_some_and(|c| c.approx_eq(&id[*g]));
            HomotopyCheck { generator: g.to_string(), i_plus: ip, pi_i_plus: pip, pass }
        })
        .collect();
    let pass = checks.iter().all(|c| c.pass);
    Ok(HomotopyReport { checks, homotopy: homotopy_h(&k, cutoff), pass })
}
