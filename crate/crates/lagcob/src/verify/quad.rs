//! Adaptive Gauss–Legendre quadrature.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

fn rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(NonZeroUsize::new(15).expect("nonzero")))
}

/// Fixed 15-point Gauss–Legendre estimate on [a, b].
pub fn gauss<F: FnMut(f64) -> f64>(a: f64, b: f64, f: F) -> f64 {
    rule().integrate(a, b, f)
}

/// Bisect until the whole-interval estimate and the sum of both halves differ by < tol.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let whole = gauss(a, b, f);
    refine(f, a, b, whole, tol, 0)
}

const MAX_DEPTH: usize = 48;

fn refine<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: usize) -> f64 {
    let m = 0.5 * (a + b);
    let left = gauss(a, m, f);
    let right = gauss(m, b, f);
    if (left + right - whole).abs() < tol || depth >= MAX_DEPTH || m <= a || m >= b {
        return left + right;
    }
    refine(f, a, m, left, 0.5 * tol, depth + 1) + refine(f, m, b, right, 0.5 * tol, depth + 1)
}

/// Integrate over [a, b] split at the given interior breakpoints.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, breaks: &[f64], tol: f64) -> f64 {
    let mut pts = vec![a];
    pts.extend(breaks.iter().copied().filter(|x| *x > a && *x < b));
    pts.push(b);
    pts.sort_by(|x, y| x.total_cmp(y));
    let k = (pts.len() - 1) as f64;
    pts.windows(2).map(|w| integrate(f, w[0], w[1], tol / k)).sum()
}
