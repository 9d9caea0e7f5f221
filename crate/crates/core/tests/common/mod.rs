#![allow(dead_code)]

use rand::Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{ContinuousCDF, Normal};

use tdg_core::calibration::stream_rng;
use tdg_core::PValueVector;

pub use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    stream_rng(seed, stream)
}

/// `n` p-values, each a signal `Phi(Z - gamma)` with probability
/// `signal_frac` and uniform otherwise.
pub fn mixed_pvalues(rng: &mut ChaCha8Rng, n: usize, signal_frac: f64, gamma: f64) -> PValueVector<f64> {
    let normal = Normal::standard();
    let values = (0..n)
        .map(|_| {
            if rng.random::<f64>() < signal_frac {
                let z: f64 = rng.sample(StandardNormal);
                normal.cdf(z - gamma)
            } else {
                rng.random::<f64>()
            }
        })
        .collect();
    PValueVector::new(values).unwrap()
}

pub fn uniform_pvalues(rng: &mut ChaCha8Rng, n: usize) -> PValueVector<f64> {
    PValueVector::new((0..n).map(|_| rng.random::<f64>()).collect()).unwrap()
}

/// Holm's step-down procedure: reject the k-th smallest p-value while
/// `p_(k) <= alpha / (m - k + 1)`.
pub fn holm(p: &[f64], alpha: f64) -> Vec<usize> {
    let m = p.len();
    let mut ids: Vec<usize> = (1..=m).collect();
    ids.sort_by(|&a, &b| p[a - 1].total_cmp(&p[b - 1]).then(a.cmp(&b)));
    let mut out: Vec<usize> = ids
        .iter()
        .enumerate()
        .take_while(|&(k, &id)| p[id - 1] <= alpha / (m - k) as f64)
        .map(|(_, &id)| id)
        .collect();
    out.sort_unstable();
    out
}
