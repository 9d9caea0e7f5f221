//! Monte Carlo size estimates and calibration of the admissible K&R
//! constants `c_m`.
//!
//! Under independent uniform p-values the K&R-form local test on `m`
//! hypotheses fires for constant `c` iff
//!
//! ```text
//! c <= c* = max_i i / (1 + m u_(i))
//! ```
//!
//! so one pass over the samples yields the size for every `c` at once. The
//! bisection reuses these statistics (common random numbers), which makes the
//! estimated size an exactly monotone step function of `c`.
//!
//! Sample `k` of batch `b` is drawn from ChaCha8 seeded with `seed` on stream
//! `b`, so results do not depend on the number of threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::local_tests::{check_alpha, kr_c_unchecked, rejects_sorted, CTable, CriticalValueFamily};
use crate::scalar::Real;

/// Name of the generator recorded alongside results.
pub const RNG_NAME: &str = "ChaCha8";

const BATCH: usize = 1024;
const SE_GROUPS: usize = 20;

/// Generator for work unit `stream` of a run seeded with `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Applies `f` to `samples` sorted vectors of `m` iid uniforms and collects
/// the results in sample order.
fn map_uniform_samples<R, F>(m: usize, samples: usize, seed: u64, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(&[f64]) -> R + Sync,
{
    let batches = samples.div_ceil(BATCH);
    (0..batches)
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut rng = stream_rng(seed, b as u64);
            let count = BATCH.min(samples - b * BATCH);
            let mut u = vec![0.0f64; m];
            (0..count)
                .map(|_| {
                    u.iter_mut().for_each(|x| *x = rng.random::<f64>());
                    u.sort_unstable_by(f64::total_cmp);
                    f(&u)
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Fraction of iid-uniform p-vectors of length `m` on which the local test
/// of `fam` fires.
pub fn estimate_size<T: Real>(
    fam: &CriticalValueFamily<T>,
    m: usize,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if samples == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    if m == 0 {
        return Ok(0.0);
    }
    fam.ensure_supports(m)?;
    let hits = map_uniform_samples(m, samples, seed, |u| {
        let sorted: Vec<T> = u.iter().map(|&x| T::lit(x)).collect();
        rejects_sorted(fam, &sorted)
    })
    .into_iter()
    .filter(|&hit| hit)
    .count();
    Ok(hits as f64 / samples as f64)
}

/// Binomial standard error of an estimated size.
pub fn size_standard_error(size: f64, samples: usize) -> f64 {
    (size * (1.0 - size) / samples as f64).sqrt()
}

/// `alpha - size`: a gap clearly above zero means the local test does not
/// exhaust its level and can be improved.
pub fn exhaustion_gap<T: Real>(
    fam: &CriticalValueFamily<T>,
    m: usize,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let size = estimate_size(fam, m, samples, seed)?;
    Ok(fam.alpha().to_f64().unwrap_or(f64::NAN) - size)
}

/// `max_i i / (1 + m u_(i))` for sorted uniforms.
fn critical_statistic(u: &[f64]) -> f64 {
    let m = u.len() as f64;
    u.iter()
        .enumerate()
        .map(|(k, &x)| (k + 1) as f64 / (1.0 + m * x))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// The statistics `c*` of every sample, as used by [`calibrate_cm`].
pub fn critical_statistics(m: usize, samples: usize, seed: u64) -> Vec<f64> {
    map_uniform_samples(m, samples, seed, critical_statistic)
}

/// Estimated size at `c` from ascending statistics: the fraction with
/// `c* >= c`.
fn size_at(sorted_stats: &[f64], c: f64) -> f64 {
    let below = sorted_stats.partition_point(|&s| s < c);
    (sorted_stats.len() - below) as f64 / sorted_stats.len() as f64
}

/// Smallest `c` in `[lo, hi]` (to `tol`) whose estimated size is at most
/// `alpha`.
fn bisect(sorted_stats: &[f64], alpha: f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    if size_at(sorted_stats, hi) > alpha {
        return Err(Error::Bracket {
            lo,
            hi,
            reason: format!(
                "estimated size {} at the upper end exceeds alpha = {alpha}",
                size_at(sorted_stats, hi)
            ),
        });
    }
    if size_at(sorted_stats, lo) <= alpha {
        return Ok(lo);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if size_at(sorted_stats, mid) <= alpha {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// A calibrated constant with its Monte Carlo provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationResult {
    pub alpha: f64,
    pub m: usize,
    pub c_m: f64,
    /// Batch-means standard error over 20 contiguous groups of samples.
    pub standard_error: f64,
    pub samples: usize,
    pub seed: u64,
    pub rng: &'static str,
}

/// Smallest `c` such that the K&R-form local test on `m` iid uniform
/// p-values has estimated size at most `alpha`, searched by bisection on
/// `[1 / (1 + alpha), c]` with `c` the K&R constant.
pub fn calibrate_cm(alpha: f64, m: usize, samples: usize, seed: u64, tol: f64) -> Result<CalibrationResult> {
    check_alpha(alpha)?;
    if m == 0 {
        return Err(Error::Domain("calibration needs m >= 1".into()));
    }
    if samples == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let (lo, hi) = (1.0 / (1.0 + alpha), kr_c_unchecked(alpha));

    let stats = critical_statistics(m, samples, seed);
    let mut sorted = stats.clone();
    sorted.sort_unstable_by(f64::total_cmp);
    let c_m = bisect(&sorted, alpha, lo, hi, tol)?;

    let standard_error = if samples >= SE_GROUPS * 10 {
        let group = samples / SE_GROUPS;
        let estimates = stats
            .chunks_exact(group)
            .take(SE_GROUPS)
            .map(|chunk| {
                let mut s = chunk.to_vec();
                s.sort_unstable_by(f64::total_cmp);
                bisect(&s, alpha, lo, hi, tol)
            })
            .collect::<Result<Vec<_>>>()?;
        let k = estimates.len() as f64;
        let mean = estimates.iter().sum::<f64>() / k;
        let var = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (k - 1.0);
        (var / k).sqrt()
    } else {
        f64::NAN
    };

    Ok(CalibrationResult {
        alpha,
        m,
        c_m,
        standard_error,
        samples,
        seed,
        rng: RNG_NAME,
    })
}

/// Calibrates each size in `ms` with the same seed.
pub fn calibrate_table(
    alpha: f64,
    ms: &[usize],
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<Vec<CalibrationResult>> {
    ms.iter()
        .map(|&m| calibrate_cm(alpha, m, samples, seed, tol))
        .collect()
}

/// Critical-value table from calibration results. Sizes are sorted and each
/// constant is raised to the running maximum, so Monte Carlo noise can only
/// make the table more conservative.
pub fn to_c_table(results: &[CalibrationResult]) -> Result<CTable<f64>> {
    monotone_c_table(results.iter().map(|r| (r.m, r.c_m)).collect())
}

/// [`CTable`] from `(m, c_m)` rows in any order, raising each constant to the
/// running maximum over smaller sizes. Duplicate sizes keep the first row.
pub fn monotone_c_table(mut rows: Vec<(usize, f64)>) -> Result<CTable<f64>> {
    rows.sort_by_key(|&(m, _)| m);
    rows.dedup_by_key(|&mut (m, _)| m);
    let mut running = f64::NEG_INFINITY;
    for (_, c) in rows.iter_mut() {
        running = running.max(*c);
        *c = running;
    }
    CTable::new(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statistic_route_matches_threshold_route() {
        let (alpha, m, n, seed) = (0.05, 7, 20_000, 11);
        let stats = critical_statistics(m, n, seed);
        let mut sorted = stats.clone();
        sorted.sort_unstable_by(f64::total_cmp);
        for c in [0.9, 1.3, 1.7, 2.0, 2.16] {
            let fam = CriticalValueFamily::kr_with_constant(alpha, c).unwrap();
            assert_eq!(estimate_size(&fam, m, n, seed).unwrap(), size_at(&sorted, c));
        }
    }

    #[test]
    fn zero_thresholds_have_zero_size() {
        let fam = CriticalValueFamily::kr_with_constant(0.05, 1e9).unwrap();
        assert_eq!(estimate_size(&fam, 5, 5000, 1).unwrap(), 0.0);
    }

    #[test]
    fn reproducible() {
        let a = calibrate_cm(0.05, 4, 5000, 3, 1e-6).unwrap();
        let b = calibrate_cm(0.05, 4, 5000, 3, 1e-6).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rng, RNG_NAME);
    }

    #[test]
    fn bracket_lower_end_returned_when_valid() {
        let stats = vec![0.1, 0.2, 0.3];
        assert_eq!(bisect(&stats, 0.05, 0.5, 2.0, 1e-6).unwrap(), 0.5);
        assert!(matches!(
            bisect(&[5.0, 6.0], 0.05, 0.5, 2.0, 1e-6),
            Err(Error::Bracket { .. })
        ));
    }

    #[test]
    fn table_is_made_monotone() {
        let r = |m, c| CalibrationResult {
            alpha: 0.05,
            m,
            c_m: c,
            standard_error: 0.0,
            samples: 1,
            seed: 0,
            rng: RNG_NAME,
        };
        let t = to_c_table(&[r(2, 1.38), r(1, 0.95), r(3, 1.37)]).unwrap();
        assert_eq!(t.entries(), &[(1, 0.95), (2, 1.38), (3, 1.38)]);
    }

    #[test]
    fn argument_checks() {
        assert!(calibrate_cm(0.05, 0, 100, 1, 1e-4).is_err());
        assert!(calibrate_cm(1.5, 3, 100, 1, 1e-4).is_err());
        assert!(estimate_size(&CriticalValueFamily::simes(0.05).unwrap(), 3, 0, 1).is_err());
    }
}
