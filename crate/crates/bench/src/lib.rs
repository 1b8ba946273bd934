//! Inputs shared by the benchmarks.

use rootbe::{random_poly, trial_rng, Polynomial};

/// `x^7/2 + 3x^6 + x^5/2 + 5x^4 + 5x^3/2 + 3x^2 + 6x + 5/2`, whose Newton
/// polygon has four edges.
pub fn septic() -> Polynomial {
    Polynomial::from_real(&[2.5, 6.0, 3.0, 2.5, 5.0, 0.5, 3.0, 0.5]).unwrap()
}

/// `n` random polynomials of degree `d` and spread `k`, fixed seed.
pub fn random_set(d: usize, k: f64, n: usize) -> Vec<Polynomial> {
    (0..n as u64)
        .map(|t| random_poly(d, k, &mut trial_rng(0xbe, t)))
        .collect()
}

/// Valuation vector with a sawtooth profile, so the hull has many vertices
/// and the stack pops often.
pub fn sawtooth(d: usize) -> Vec<f64> {
    (0..=d)
        .map(|i| {
            let x = i as f64 / d as f64;
            -40.0 * (x - 0.5) * (x - 0.5) + if i % 3 == 0 { 0.0 } else { -0.7 }
        })
        .collect()
}
