//! Simulation of the K&R improvement chain on synthetic p-values.
//!
//! True nulls are iid uniform; the `m1` false hypotheses (ids `1..=m1`) get
//! `p = Phi(Z - gamma)` with `Z` standard normal. Each replicate evaluates
//! every requested method on the nested sets `K_i` of the `i` smallest
//! p-values.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::calibration::stream_rng;
use crate::closed_testing::ShortcutState;
use crate::error::{Error, Result};
use crate::local_tests::{check_alpha, kr_c_constant, CTable, CriticalValueFamily};
use crate::procedures::{kr_coherent_sorted, kr_original_sorted, KrMethod};
use crate::pvalues::PValueVector;
use crate::set::IndexSet;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub m: usize,
    pub m1: usize,
    pub gamma: f64,
    pub reps: usize,
    pub seed: u64,
    /// Sizes `i` of the reported sets `K_i`.
    pub report_sets: Vec<usize>,
    pub methods: Vec<KrMethod>,
    pub alpha: f64,
    /// Constants for the admissible method; the shipped `alpha = 0.05` table
    /// when absent.
    pub c_table: Option<CTable<f64>>,
}

impl SimulationConfig {
    /// The standard comparison setting: `m = 1000`, `alpha = 0.05`, all four methods.
    pub fn new(m1: usize, gamma: f64, reps: usize, seed: u64, report_sets: Vec<usize>) -> Self {
        Self {
            m: 1000,
            m1,
            gamma,
            reps,
            seed,
            report_sets,
            methods: KrMethod::ALL.to_vec(),
            alpha: 0.05,
            c_table: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if self.m1 > self.m {
            return Err(Error::Validation(format!(
                "m1 = {} exceeds m = {}",
                self.m1, self.m
            )));
        }
        if self.reps == 0 {
            return Err(Error::Validation("reps must be at least 1".into()));
        }
        if let Some(&i) = self.report_sets.iter().find(|&&i| i == 0 || i > self.m) {
            return Err(Error::Validation(format!(
                "report set size {i} outside 1..={}",
                self.m
            )));
        }
        if !self.gamma.is_finite() {
            return Err(Error::Validation(format!("gamma = {} is not finite", self.gamma)));
        }
        if self.methods.is_empty() {
            return Err(Error::Validation("no methods requested".into()));
        }
        Ok(())
    }

    fn admissible_family(&self) -> Result<CriticalValueFamily<f64>> {
        match &self.c_table {
            Some(t) => CriticalValueFamily::kr_admissible(self.alpha, t.clone()),
            None => CriticalValueFamily::kr_admissible_default(self.alpha),
        }
    }
}

/// Which hypotheses are false in a simulated data set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthAssignment {
    pub false_ids: IndexSet,
}

impl TruthAssignment {
    /// `|S_1|`, the number of false hypotheses in `set`.
    pub fn true_discoveries(&self, set: &IndexSet) -> usize {
        set.intersection(&self.false_ids).len()
    }
}

/// p-values of replicate `rep`, drawn from stream `rep` of the configured
/// seed.
pub fn generate_pvalues(cfg: &SimulationConfig, rep: u64) -> Result<(PValueVector<f64>, TruthAssignment)> {
    let normal = Normal::standard();
    let mut rng = stream_rng(cfg.seed, rep);
    let values = (1..=cfg.m)
        .map(|id| {
            if id <= cfg.m1 {
                let z: f64 = rng.sample(StandardNormal);
                normal.cdf(z - cfg.gamma)
            } else {
                rng.random::<f64>()
            }
        })
        .collect();
    Ok((
        PValueVector::new(values)?,
        TruthAssignment {
            false_ids: IndexSet::full(cfg.m1),
        },
    ))
}

/// Averages of `d(K_i)` per method and reported set, with per-method
/// simultaneous violation rates.
#[derive(Debug, Clone, PartialEq)]
pub struct Table2Result {
    pub config: SimulationConfig,
    /// `averages[method][set]`, in the order of `config.methods` and
    /// `config.report_sets`.
    pub averages: Vec<Vec<f64>>,
    /// Monte Carlo standard errors of the averages.
    pub standard_errors: Vec<Vec<f64>>,
    /// Fraction of replicates in which some reported bound of the method
    /// exceeds the true number of discoveries.
    pub violation_rates: Vec<f64>,
    pub violation_standard_errors: Vec<f64>,
    /// Replicate-set pairs on which the chain order of the requested methods
    /// fails.
    pub chain_violations: u64,
}

impl Table2Result {
    pub fn average(&self, method: KrMethod, set: usize) -> Option<f64> {
        let a = self.config.methods.iter().position(|&m| m == method)?;
        let b = self.config.report_sets.iter().position(|&s| s == set)?;
        Some(self.averages[a][b])
    }
}

/// Integer accumulators; addition is exact, so the merge order is irrelevant.
#[derive(Clone)]
struct Tally {
    sum: Vec<u64>,
    sum_sq: Vec<u64>,
    violations: Vec<u64>,
    chain_violations: u64,
}

impl Tally {
    fn zero(methods: usize, sets: usize) -> Self {
        Self {
            sum: vec![0; methods * sets],
            sum_sq: vec![0; methods * sets],
            violations: vec![0; methods],
            chain_violations: 0,
        }
    }

    fn merge(mut self, other: Self) -> Self {
        let add = |a: &mut Vec<u64>, b: &[u64]| a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        add(&mut self.sum, &other.sum);
        add(&mut self.sum_sq, &other.sum_sq);
        add(&mut self.violations, &other.violations);
        self.chain_violations += other.chain_violations;
        self
    }
}

struct Evaluator {
    c: f64,
    closed: CriticalValueFamily<f64>,
    admissible: Option<CriticalValueFamily<f64>>,
}

impl Evaluator {
    /// `d(K_i)` for every method and reported set of one replicate.
    fn bounds(&self, cfg: &SimulationConfig, sorted: &[f64]) -> Result<Vec<usize>> {
        let m = cfg.m;
        let family = IndexSet::full(m);
        let mut out = Vec::with_capacity(cfg.methods.len() * cfg.report_sets.len());
        for &method in &cfg.methods {
            let state = match method {
                KrMethod::Closed => Some(ShortcutState::from_sorted(
                    &self.closed,
                    family.clone(),
                    sorted.to_vec(),
                )?),
                KrMethod::Admissible => Some(ShortcutState::from_sorted(
                    self.admissible.as_ref().expect("built when requested"),
                    family.clone(),
                    sorted.to_vec(),
                )?),
                _ => None,
            };
            for &i in &cfg.report_sets {
                let prefix = &sorted[..i];
                out.push(match (method, &state) {
                    (KrMethod::Original, _) => kr_original_sorted(self.c, m, prefix),
                    (KrMethod::Coherent, _) => kr_coherent_sorted(self.c, m, prefix),
                    (_, Some(state)) => state.d_sorted(prefix),
                    (_, None) => unreachable!("closed-testing methods carry a state"),
                });
            }
        }
        Ok(out)
    }
}

/// Runs the simulation. Replicate `r` uses generator stream `r`, so results
/// are identical for any thread count.
pub fn run_table2(cfg: &SimulationConfig) -> Result<Table2Result> {
    cfg.validate()?;
    let evaluator = Evaluator {
        c: kr_c_constant(cfg.alpha)?,
        closed: CriticalValueFamily::kr_original(cfg.alpha)?,
        admissible: if cfg.methods.contains(&KrMethod::Admissible) {
            let fam = cfg.admissible_family()?;
            fam.ensure_supports(cfg.m)?;
            Some(fam)
        } else {
            None
        },
    };
    let (nm, ns) = (cfg.methods.len(), cfg.report_sets.len());
    // positions of the requested methods in chain order
    let mut chain: Vec<usize> = (0..nm).collect();
    chain.sort_by_key(|&k| cfg.methods[k]);

    let tally = (0..cfg.reps as u64)
        .into_par_iter()
        .map(|rep| -> Result<Tally> {
            let (p, truth) = generate_pvalues(cfg, rep)?;
            let order = p.order(&p.family());
            let sorted: Vec<f64> = order.iter().map(|&id| p.get(id)).collect();
            let bounds = evaluator.bounds(cfg, &sorted)?;
            let truths: Vec<usize> = cfg
                .report_sets
                .iter()
                .map(|&i| order[..i].iter().filter(|&&id| truth.false_ids.contains(id)).count())
                .collect();

            let mut t = Tally::zero(nm, ns);
            for a in 0..nm {
                let mut violated = false;
                for b in 0..ns {
                    let d = bounds[a * ns + b] as u64;
                    t.sum[a * ns + b] = d;
                    t.sum_sq[a * ns + b] = d * d;
                    violated |= bounds[a * ns + b] > truths[b];
                }
                t.violations[a] = u64::from(violated);
            }
            for b in 0..ns {
                t.chain_violations += chain
                    .windows(2)
                    .filter(|w| bounds[w[0] * ns + b] > bounds[w[1] * ns + b])
                    .count() as u64;
            }
            Ok(t)
        })
        .try_reduce(|| Tally::zero(nm, ns), |a, b| Ok(a.merge(b)))?;

    let n = cfg.reps as f64;
    let mean = |k: usize| tally.sum[k] as f64 / n;
    let se = |k: usize| {
        let mu = mean(k);
        let var = (tally.sum_sq[k] as f64 / n - mu * mu).max(0.0);
        (var / n).sqrt()
    };
    let grid = |f: &dyn Fn(usize) -> f64| -> Vec<Vec<f64>> {
        (0..nm).map(|a| (0..ns).map(|b| f(a * ns + b)).collect()).collect()
    };
    let violation_rates: Vec<f64> = tally.violations.iter().map(|&v| v as f64 / n).collect();
    Ok(Table2Result {
        config: cfg.clone(),
        averages: grid(&mean),
        standard_errors: grid(&se),
        violation_standard_errors: violation_rates
            .iter()
            .map(|&r| (r * (1.0 - r) / n).sqrt())
            .collect(),
        violation_rates,
        chain_violations: tally.chain_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(m1: usize, gamma: f64) -> SimulationConfig {
        SimulationConfig {
            m: 50,
            m1,
            gamma,
            reps: 200,
            seed: 5,
            report_sets: vec![5, 10],
            methods: KrMethod::ALL.to_vec(),
            alpha: 0.05,
            c_table: None,
        }
    }

    #[test]
    fn truth_and_determinism() {
        let cfg = small(7, 3.0);
        let (p1, truth) = generate_pvalues(&cfg, 4).unwrap();
        let (p2, _) = generate_pvalues(&cfg, 4).unwrap();
        assert_eq!(p1, p2);
        assert_eq!(truth.false_ids, IndexSet::full(7));
        assert_eq!(run_table2(&cfg).unwrap(), run_table2(&cfg).unwrap());
    }

    #[test]
    fn chain_holds_on_small_runs() {
        let r = run_table2(&small(20, 3.0)).unwrap();
        assert_eq!(r.chain_violations, 0);
        for w in r.averages.windows(2) {
            assert!(w[0].iter().zip(&w[1]).all(|(a, b)| a <= b));
        }
    }

    #[test]
    fn all_signal_bounds_stay_below_size_minus_two() {
        let mut cfg = small(50, 40.0);
        cfg.report_sets = vec![50];
        cfg.methods = vec![KrMethod::Coherent];
        let r = run_table2(&cfg).unwrap();
        assert!(r.averages[0][0] <= 48.0);
    }

    #[test]
    fn validation() {
        let mut cfg = small(60, 1.0);
        assert!(run_table2(&cfg).is_err());
        cfg.m1 = 3;
        cfg.report_sets = vec![0];
        assert!(run_table2(&cfg).is_err());
        cfg.report_sets = vec![3];
        cfg.reps = 0;
        assert!(run_table2(&cfg).is_err());
    }
}
