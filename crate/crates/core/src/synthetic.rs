//! Seeded test and demo signals.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Uniform samples in `[-1, 1)`.
pub fn uniform_noise(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Cumulative sum of standard normal steps.
pub fn random_walk(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut x = 0.0;
    (0..n)
        .map(|_| {
            x += normal.sample(&mut rng);
            x
        })
        .collect()
}

/// A sine wave with period `period` whose samples in `start..=end` are held
/// at the value of `start`, a flattened stretch that breaks the pattern.
pub fn sine_with_flat_segment(n: usize, period: f64, start: usize, end: usize) -> Vec<f64> {
    let mut t: Vec<f64> = (0..n).map(|i| (TAU * i as f64 / period).sin()).collect();
    if start < n {
        let hold = t[start];
        for v in &mut t[start..=end.min(n - 1)] {
            *v = hold;
        }
    }
    t
}

/// Heartbeat-like signal: a sharp spike with a slower recovery wave every
/// `beat` samples plus a little noise. The beat starting at sample
/// `anomaly` has its spike missing and its wave inverted.
pub fn ecg_like(n: usize, beat: usize, anomaly: Option<usize>, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 0.02).unwrap();
    (0..n)
        .map(|i| {
            let phase = (i % beat) as f64 / beat as f64;
            let beat_start = i - i % beat;
            let odd = anomaly.is_some_and(|a| beat_start <= a && a < beat_start + beat);
            let spike = (-((phase - 0.2) / 0.02).powi(2)).exp();
            let wave = 0.3 * (-((phase - 0.5) / 0.08).powi(2)).exp();
            let clean = if odd { -wave } else { spike + wave };
            clean + noise.sample(&mut rng)
        })
        .collect()
}
