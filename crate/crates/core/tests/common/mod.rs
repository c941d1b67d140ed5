//! Random FIF systems shared by the integration tests.

#![allow(dead_code)]

use fiflab::fif::{FifSystem, InterpolationData};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Sorted knots on `[0, 1]` with spacings drawn from `[0.5, 1.5]`.
pub fn random_knots(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let gaps: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(0.5..1.5)).collect();
    let total: f64 = gaps.iter().sum();
    let mut knots = vec![0.0];
    let mut acc = 0.0;
    for g in &gaps[..n - 2] {
        acc += g / total;
        knots.push(acc);
    }
    knots.push(1.0);
    knots
}

pub fn uniform_knots(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

pub fn random_values(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect()
}

/// Scalings with magnitudes in `[lo, hi)` and random signs.
pub fn random_alphas(rng: &mut ChaCha8Rng, count: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..count)
        .map(|_| {
            let a = rng.gen_range(lo..hi);
            if rng.gen_bool(0.5) {
                a
            } else {
                -a
            }
        })
        .collect()
}

pub fn affine(knots: Vec<f64>, values: Vec<Vec<f64>>, alphas: Vec<f64>) -> FifSystem {
    FifSystem::affine(InterpolationData::new(knots, values).unwrap(), alphas).unwrap()
}

/// A random affine system with `n` knots in `R^m` and `|α_k| ∈ [lo, hi)`.
pub fn random_affine(rng: &mut ChaCha8Rng, n: usize, m: usize, lo: f64, hi: f64) -> FifSystem {
    let knots = random_knots(rng, n);
    let values = random_values(rng, n, m);
    let alphas = random_alphas(rng, n - 1, lo, hi);
    affine(knots, values, alphas)
}
