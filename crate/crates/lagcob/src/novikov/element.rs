//! Truncated Novikov series Σ aᵢT^{λᵢ} with real exponents and rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

pub type Q = BigRational;

pub const DEFAULT_CUTOFF: f64 = 100.0;
/// Exponents from different arithmetic paths are compared to this tolerance.
pub const EXPONENT_TOL: f64 = 1e-12;

pub fn rational(x: f64) -> Q {
    Q::from_float(x).expect("finite")
}

pub fn int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NovikovElement {
    terms: Vec<(f64, Q)>,
    cutoff: f64,
    dropped: bool,
}

impl NovikovElement {
    /// Normalize: sort, merge exponents within [`EXPONENT_TOL`] onto the smaller one, drop zero coefficients and terms at or beyond the cutoff.
    pub fn new(terms: Vec<(f64, Q)>, cutoff: f64) -> Self {
        let mut terms: Vec<(f64, Q)> = terms;
        terms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<(f64, Q)> = Vec::with_capacity(terms.len());
        let mut dropped = false;
        for (e, c) in terms {
            assert!(e.is_finite(), "exponent must be finite");
            if e >= cutoff {
                dropped |= !c.is_zero();
                continue;
            }
            match out.last_mut() {
                Some(last) if e - last.0 <= EXPONENT_TOL => last.1 += c,
                _ => out.push((e, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        NovikovElement { terms: out, cutoff, dropped }
    }

    pub fn zero(cutoff: f64) -> Self {
        NovikovElement { terms: Vec::new(), cutoff, dropped: false }
    }

    pub fn one(cutoff: f64) -> Self {
        Self::monomial(0.0, Q::one(), cutoff)
    }

    pub fn monomial(exponent: f64, coefficient: Q, cutoff: f64) -> Self {
        Self::new(vec![(exponent, coefficient)], cutoff)
    }

    /// T^λ.
    pub fn t(exponent: f64, cutoff: f64) -> Self {
        Self::monomial(exponent, Q::one(), cutoff)
    }

    pub fn terms(&self) -> &[(f64, Q)] {
        &self.terms
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// Whether some nonzero term was lost to the cutoff.
    pub fn dropped(&self) -> bool {
        self.dropped
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Least exponent, +∞ for zero.
    pub fn val(&self) -> f64 {
        self.terms.first().map_or(f64::INFINITY, |t| t.0)
    }

    pub fn leading(&self) -> Option<&(f64, Q)> {
        self.terms.first()
    }

    /// Coefficient of T^λ, matching exponents to [`EXPONENT_TOL`].
    pub fn coefficient_near(&self, exponent: f64) -> Q {
        self.terms.iter().filter(|(e, _)| (e - exponent).abs() <= EXPONENT_TOL).map(|(_, c)| c.clone()).sum()
    }

    pub fn truncate(&self, level: f64) -> Self {
        let mut out = Self::new(self.terms.clone(), level.min(self.cutoff));
        out.dropped |= self.dropped;
        out
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = Self::new(self.terms.iter().map(|(e, a)| (*e, a * c)).collect(), self.cutoff);
        out.dropped |= self.dropped;
        out
    }

    /// Multiply by T^λ.
    pub fn shift(&self, lambda: f64) -> Self {
        let mut out = Self::new(self.terms.iter().map(|(e, a)| (e + lambda, a.clone())).collect(), self.cutoff);
        out.dropped |= self.dropped;
        out
    }

    /// Exact quotient by long division from the lowest term, up to the cutoff.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (de, dc) = d.leading()?.clone();
        let cutoff = self.cutoff.max(d.cutoff);
        let mut rem = self.clone();
        let mut q = Vec::new();
        for _ in 0..10_000 {
            let Some((re, rc)) = rem.leading().cloned() else {
                return Some(NovikovElement::new(q, cutoff));
            };
            if re - de >= cutoff {
                return Some(NovikovElement::new(q, cutoff));
            }
            let term = NovikovElement::monomial(re - de, &rc / &dc, cutoff);
            q.push((re - de, &rc / &dc));
            let next = &rem - &(&term * d);
            if next.val() <= re {
                // leading term did not cancel: inexact
                return None;
            }
            rem = next;
        }
        None
    }

    fn combine(&self, other: &Self, terms: Vec<(f64, Q)>) -> Self {
        let mut out = Self::new(terms, self.cutoff.max(other.cutoff));
        out.dropped |= self.dropped || other.dropped;
        out
    }

    /// Approximate equality: same coefficients, exponents within [`EXPONENT_TOL`].
    pub fn approx_eq(&self, other: &Self) -> bool {
        self.terms.len() == other.terms.len()
            && self.terms.iter().zip(&other.terms).all(|(a, b)| (a.0 - b.0).abs() <= EXPONENT_TOL && a.1 == b.1)
    }
}

impl<'a> Add<&'a NovikovElement> for &'a NovikovElement {
    type Output = NovikovElement;
    fn add(self, rhs: &NovikovElement) -> NovikovElement {
        let mut t = self.terms.clone();
        t.extend(rhs.terms.iter().cloned());
        self.combine(rhs, t)
    }
}

impl<'a> Sub<&'a NovikovElement> for &'a NovikovElement {
    type Output = NovikovElement;
    fn sub(self, rhs: &NovikovElement) -> NovikovElement {
        let mut t = self.terms.clone();
        t.extend(rhs.terms.iter().map(|(e, c)| (*e, -c)));
        self.combine(rhs, t)
    }
}

impl<'a> Mul<&'a NovikovElement> for &'a NovikovElement {
    type Output = NovikovElement;
    fn mul(self, rhs: &NovikovElement) -> NovikovElement {
        let mut t = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                t.push((a + b, x * y));
            }
        }
        self.combine(rhs, t)
    }
}

impl Neg for &NovikovElement {
    type Output = NovikovElement;
    fn neg(self) -> NovikovElement {
        self.scale(&-Q::one())
    }
}

macro_rules! owned_op {
    ($tr:ident, $f:ident) => {
        impl $tr for NovikovElement {
            type Output = NovikovElement;
            fn $f(self, rhs: NovikovElement) -> NovikovElement {
                (&self).$f(&rhs)
            }
        }
    };
}
owned_op!(Add, add);
owned_op!(Sub, sub);
owned_op!(Mul, mul);

impl Neg for NovikovElement {
    type Output = NovikovElement;
    fn neg(self) -> NovikovElement {
        -(&self)
    }
}

pub fn nov_add(a: &NovikovElement, b: &NovikovElement) -> NovikovElement {
    a + b
}

pub fn nov_mul(a: &NovikovElement, b: &NovikovElement) -> NovikovElement {
    a * b
}

pub fn nov_val(a: &NovikovElement) -> f64 {
    a.val()
}

pub fn nov_truncate(a: &NovikovElement, level: f64) -> NovikovElement {
    a.truncate(level)
}

pub fn format_rational(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for NovikovElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if !a.is_one() {
                write!(f, "{}", format_rational(&a))?;
            }
            if *e == 0.0 {
                if a.is_one() {
                    write!(f, "1")?;
                }
            } else {
                write!(f, "T^{e}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for NovikovElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("NovikovElement", 4)?;
        let terms: Vec<(f64, String)> = self.terms.iter().map(|(e, c)| (*e, format_rational(c))).collect();
        st.serialize_field("terms", &terms)?;
        st.serialize_field("cutoff", &self.cutoff)?;
        st.serialize_field("dropped", &self.dropped)?;
        st.serialize_field("display", &self.to_string())?;
        st.end()
    }
}

pub fn to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn serialize_rational<S: Serializer>(q: &Q, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}
