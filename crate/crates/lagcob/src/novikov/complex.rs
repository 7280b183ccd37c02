//! Curved filtered complexes given as area-weighted arrow diagrams.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use super::element::{NovikovElement, Q, EXPONENT_TOL};
use super::NovikovError;
use crate::cochains::GeneratorSet;

/// A formal sum of generators with Novikov coefficients.
pub type Chain = BTreeMap<String, NovikovElement>;

pub fn chain_add(a: &Chain, b: &Chain) -> Chain {
    let mut out = a.clone();
    for (g, c) in b {
        let v = match out.get(g) {
            Some(x) => x + c,
            None => c.clone(),
        };
        out.insert(g.clone(), v);
    }
    out.retain(|_, c| !c.is_zero());
    out
}

pub fn chain_scale(a: &Chain, s: &NovikovElement) -> Chain {
    let mut out: Chain = a.iter().map(|(g, c)| (g.clone(), c * s)).collect();
    out.retain(|_, c| !c.is_zero());
    out
}

/// Least valuation among the coefficients.
pub fn chain_val(a: &Chain) -> f64 {
    a.values().map(|c| c.val()).fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Arrow {
    pub source: String,
    pub target: String,
    /// Individual strip or teardrop contributions, summed into `weight`.
    pub contributions: Vec<NovikovElement>,
    pub weight: NovikovElement,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilteredComplex {
    pub name: String,
    pub generators: GeneratorSet,
    pub arrows: Vec<Arrow>,
    /// m⁰ as (generator, weight).
    pub curvature: Vec<(String, NovikovElement)>,
    pub energy_cutoff: f64,
}

impl FilteredComplex {
    pub fn new(name: impl Into<String>, generators: GeneratorSet, energy_cutoff: f64) -> Self {
        FilteredComplex { name: name.into(), generators, arrows: Vec::new(), curvature: Vec::new(), energy_cutoff }
    }

    fn active_degree(&self, label: &str) -> Result<i64, NovikovError> {
        self.generators
            .active()
            .find(|g| g.label == label)
            .map(|g| g.degree)
            .ok_or_else(|| NovikovError::UnknownGenerator(label.to_string()))
    }

    pub fn add_arrow(&mut self, source: &str, target: &str, contributions: Vec<NovikovElement>) -> Result<(), NovikovError> {
        let (ds, dt) = (self.active_degree(source)?, self.active_degree(target)?);
        if dt != ds + 1 {
            return Err(NovikovError::Degree { src: source.into(), dst: target.into(), from: ds, to: dt });
        }
        let weight = contributions.iter().fold(NovikovElement::zero(self.energy_cutoff), |acc, c| &acc + c);
        if let Some(c) = contributions.iter().find(|c| c.val() < 0.0) {
            return Err(NovikovError::NegativeWeight { src: source.into(), dst: target.into(), val: c.val() });
        }
        self.arrows.push(Arrow { source: source.into(), target: target.into(), contributions, weight });
        Ok(())
    }

    pub fn add_curvature(&mut self, label: &str, weight: NovikovElement) -> Result<(), NovikovError> {
        self.active_degree(label)?;
        if weight.val() <= 0.0 {
            return Err(NovikovError::CurvedAtZero(label.to_string()));
        }
        self.curvature.push((label.to_string(), weight));
        Ok(())
    }

    pub fn curvature_chain(&self) -> Chain {
        let mut out = Chain::new();
        for (g, w) in &self.curvature {
            out = chain_add(&out, &Chain::from([(g.clone(), w.clone())]));
        }
        out
    }

    pub fn is_curved(&self) -> bool {
        !self.curvature_chain().is_empty()
    }

    pub fn m1(&self, chain: &Chain) -> Chain {
        let mut out = Chain::new();
        for a in &self.arrows {
            if let Some(c) = chain.get(&a.source) {
                out = chain_add(&out, &Chain::from([(a.target.clone(), c * &a.weight)]));
            }
        }
        out
    }

    pub fn generator_chain(&self, label: &str) -> Chain {
        Chain::from([(label.to_string(), NovikovElement::one(self.energy_cutoff))])
    }

    /// Generators g with m¹∘m¹(g) ≠ 0 below the cutoff.
    pub fn d_squared_failures(&self) -> Vec<(String, Chain)> {
        self.generators
            .active()
            .filter_map(|g| {
                let dd = self.m1(&self.m1(&self.generator_chain(&g.label)));
                (!dd.is_empty()).then(|| (g.label.clone(), dd))
            })
            .collect()
    }

    /// Matrix of m¹ from degree d to d + 1, rows indexed by targets.
    fn matrix(&self, d: i64) -> (Vec<String>, Vec<String>, Vec<Vec<NovikovElement>>) {
        let labels = |deg: i64| -> Vec<String> {
            self.generators.active().filter(|g| g.degree == deg).map(|g| g.label.clone()).collect()
        };
        let (cols, rows) = (labels(d), labels(d + 1));
        let mut m = vec![vec![NovikovElement::zero(self.energy_cutoff); cols.len()]; rows.len()];
        for a in &self.arrows {
            if let (Some(i), Some(j)) = (rows.iter().position(|r| *r == a.target), cols.iter().position(|c| *c == a.source)) {
                m[i][j] = &m[i][j] + &a.weight;
            }
        }
        (rows, cols, m)
    }

    /// Homology ranks over Λ by degree.
    pub fn homology(&self) -> Result<BTreeMap<i64, usize>, NovikovError> {
        if self.is_curved() {
            return Err(NovikovError::Curved(self.name.clone()));
        }
        let counts = self.generators.degree_counts();
        let mut ranks = BTreeMap::new();
        for (&d, &n) in &counts {
            let out_rank = bareiss_rank(self.matrix(d).2);
            let in_rank = bareiss_rank(self.matrix(d - 1).2);
            ranks.insert(d, n - out_rank - in_rank);
        }
        Ok(ranks)
    }
}

/// Rank by fraction-free elimination with exact long division.
pub fn bareiss_rank(mut m: Vec<Vec<NovikovElement>>) -> usize {
    let rows = m.len();
    let Some(cols) = m.first().map(|r| r.len()) else { return 0 };
    let cutoff = m.iter().flatten().map(|x| x.cutoff()).fold(0.0, f64::max);
    let mut prev = NovikovElement::one(cutoff);
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        for i in rank + 1..rows {
            for j in c + 1..cols {
                let num = &(&m[rank][c] * &m[i][j]) - &(&m[i][c] * &m[rank][j]);
                m[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
            m[i][c] = NovikovElement::zero(cutoff);
        }
        prev = m[rank][c].clone();
        rank += 1;
    }
    rank
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MCStatus {
    Obstructed,
    UnobstructedAtLeadingOrder,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Certificate {
    ZeroCurvature,
    /// m⁰ + m¹(𝔟) vanishes at order `order`.
    Cancellation { order: f64 },
    /// The only sources reaching `target` would need a cochain of valuation ≤ 0.
    NegativeExponent { target: String, source: String, required_exponent: f64 },
    /// No arrow reaches `target` at all.
    NoSource { target: String, order: f64 },
    /// Sources exist with positive exponent but the order-λ equations are inconsistent.
    Inconsistent { order: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MCResult {
    pub status: MCStatus,
    pub leading_cochain: Vec<(String, NovikovElement)>,
    pub certificate: Certificate,
    /// |exponent| missing for a valid cochain, on obstructed verdicts.
    pub gap: Option<f64>,
}

impl MCResult {
    pub fn is_unobstructed(&self) -> bool {
        self.status == MCStatus::UnobstructedAtLeadingOrder
    }

    pub fn cochain(&self) -> Chain {
        self.leading_cochain.iter().cloned().collect()
    }
}

/// Solve m⁰ + m¹(𝔟) = 0 at the leading order of the curvature, with val(𝔟) > 0.
pub fn mc_leading_order(c: &FilteredComplex) -> MCResult {
    let m0 = c.curvature_chain();
    if m0.is_empty() {
        return MCResult {
            status: MCStatus::UnobstructedAtLeadingOrder,
            leading_cochain: Vec::new(),
            certificate: Certificate::ZeroCurvature,
            gap: None,
        };
    }
    let lambda = chain_val(&m0);
    // one unknown per source: T^{λ − minval(s)}·s, so m¹ of it starts exactly at order λ
    let mut minval: BTreeMap<&str, f64> = BTreeMap::new();
    for a in c.arrows.iter().filter(|a| !a.weight.is_zero()) {
        let e = minval.entry(a.source.as_str()).or_insert(f64::INFINITY);
        *e = e.min(a.weight.val());
    }
    let unknowns: Vec<(&str, f64)> =
        minval.iter().map(|(s, v)| (*s, lambda - v)).filter(|(_, e)| *e > EXPONENT_TOL).collect();
    let targets: Vec<String> = c.generators.active().map(|g| g.label.clone()).collect();
    // rows: targets, columns: unknowns, augmented by −m⁰ at order λ
    let mut sys: Vec<Vec<Q>> = targets
        .iter()
        .map(|t| {
            let mut row: Vec<Q> = unknowns
                .iter()
                .map(|(s, e)| {
                    c.arrows
                        .iter()
                        .filter(|a| a.source == *s && a.target == *t)
                        .map(|a| a.weight.coefficient_near(lambda - e))
                        .sum()
                })
                .collect();
            row.push(-m0.get(t).map_or_else(Q::zero, |w| w.coefficient_near(lambda)));
            row
        })
        .collect();
    if let Some(x) = solve_rational(&mut sys, unknowns.len()) {
        let cochain: Vec<(String, NovikovElement)> = unknowns
            .iter()
            .zip(x)
            .filter(|(_, v)| !v.is_zero())
            .map(|((s, e), v)| (s.to_string(), NovikovElement::monomial(*e, v, c.energy_cutoff)))
            .collect();
        return MCResult {
            status: MCStatus::UnobstructedAtLeadingOrder,
            leading_cochain: cochain,
            certificate: Certificate::Cancellation { order: lambda },
            gap: None,
        };
    }
    // witness: a leading curvature target and the best source reaching it
    let (target, _) = m0.iter().find(|(_, w)| (w.val() - lambda).abs() <= EXPONENT_TOL).expect("leading term");
    let best = c
        .arrows
        .iter()
        .filter(|a| a.target == *target && !a.weight.is_zero())
        .map(|a| (a.source.clone(), lambda - a.weight.val()))
        .max_by(|a, b| a.1.total_cmp(&b.1));
    let certificate = match best {
        None => Certificate::NoSource { target: target.clone(), order: lambda },
        Some((source, e)) if e <= EXPONENT_TOL => {
            Certificate::NegativeExponent { target: target.clone(), source, required_exponent: e }
        }
        Some(_) => Certificate::Inconsistent { order: lambda },
    };
    let gap = match &certificate {
        Certificate::NegativeExponent { required_exponent, .. } => Some(required_exponent.abs()),
        _ => None,
    };
    MCResult { status: MCStatus::Obstructed, leading_cochain: Vec::new(), certificate, gap }
}

/// Gaussian elimination on an augmented system; a solution with free variables set to zero.
fn solve_rational(m: &mut [Vec<Q>], n: usize) -> Option<Vec<Q>> {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = Q::one() / &m[r][c];
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..=n {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    let mut x = vec![Q::zero(); n];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][n].clone();
    }
    Some(x)
}
