//! Quasi-random points in charts: Halton sequences with a seeded Cranley–Patterson shift.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geom::{Chart, ChartPoint};

const PRIMES: [u32; 24] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89];

/// Radical inverse of `i` in base `b`.
pub fn radical_inverse(mut i: u64, b: u32) -> f64 {
    let b = b as u64;
    let inv = 1.0 / b as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % b) as f64;
        i /= b;
        f *= inv;
    }
    r
}

/// The `i`-th Halton point in [0, 1)^dim.
pub fn halton(i: u64, dim: usize) -> Vec<f64> {
    assert!(dim <= PRIMES.len(), "Halton dimension {dim} too large");
    (0..dim).map(|k| radical_inverse(i, PRIMES[k])).collect()
}

/// A shifted Halton stream.
pub struct Halton {
    shift: Vec<f64>,
    next: u64,
}

impl Halton {
    pub fn new(dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Halton { shift: (0..dim).map(|_| rng.random::<f64>()).collect(), next: 1 }
    }

    pub fn next_point(&mut self) -> Vec<f64> {
        let mut p = halton(self.next, self.shift.len());
        self.next += 1;
        for (x, s) in p.iter_mut().zip(&self.shift) {
            *x = (*x + s).fract();
        }
        p
    }
}

/// Up to `n` accepted points, split evenly over the charts.
pub fn sample_charts(charts: &[Chart], n: usize, seed: u64) -> Vec<ChartPoint> {
    if charts.is_empty() || n == 0 {
        return Vec::new();
    }
    let per = n.div_ceil(charts.len());
    let mut out = Vec::with_capacity(n);
    for (c, ch) in charts.iter().enumerate() {
        let mut h = Halton::new(ch.dim(), seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(c as u64));
        let mut got = 0;
        let mut tries = 0;
        while got < per && tries < 50 * per + 100 {
            tries += 1;
            let u = ch.from_unit(&h.next_point());
            if ch.accepts(&u) {
                out.push(ChartPoint::new(c, u));
                got += 1;
            }
        }
    }
    out.truncate(n);
    out
}

/// Uniform random points in [0, 1)^dim.
pub fn uniform(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| (0..dim).map(|_| rng.random::<f64>()).collect()).collect()
}
