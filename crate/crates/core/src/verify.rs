//! Randomized self-checks of the identities the library relies on.
//!
//! Each trial draws a small instance and runs five suites against it:
//! shortcut versus exhaustive closed testing, coherence of the closed testing
//! output, monotonicity across nested families, interpolation fixed points,
//! and the order of the K&R chain.

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::calibration::stream_rng;
use crate::closed_testing::{ClosedShortcut, ClosedTestingOracle, ShortcutState, SimesLikeTest};
use crate::error::{Error, Result};
use crate::local_tests::CriticalValueFamily;
use crate::procedure::{DiscoveryProcedure, ExtensionalProcedure};
use crate::procedures::{
    coherence_violation, dominates, interpolate, interpolate_generic, kr_procedure,
    monotone_stack_violation, KrMethod, KrOriginal,
};
use crate::pvalues::PValueVector;
use crate::set::IndexSet;

/// Largest instance the harness accepts.
pub const MAX_SCALE: usize = 12;

/// Families larger than this skip the exponential stack and interpolation
/// suites on the full instance and use a prefix instead.
const STACK_SCALE: usize = 8;

/// Deliberate defects for checking that the harness catches them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// The shortcut overstates `d(I)` by one whenever it can.
    ShortcutOverstatesFamily,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub scale: usize,
    pub trials: usize,
    pub seed: u64,
    pub fault: Option<Fault>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub trials: usize,
    /// Number of individual comparisons made per suite.
    pub checks: Vec<(&'static str, u64)>,
}

struct Instance {
    p: Arc<PValueVector<f64>>,
    family: CriticalValueFamily<f64>,
}

impl Instance {
    fn describe(&self) -> String {
        let ps: Vec<String> = self.p.values().iter().map(|x| format!("{x:.6}")).collect();
        format!(
            "{} alpha={} p=[{}]",
            self.family.kind(),
            self.family.alpha(),
            ps.join(", ")
        )
    }
}

fn draw_instance(scale: usize, seed: u64, trial: u64) -> Result<Instance> {
    let normal = Normal::standard();
    let mut rng = stream_rng(seed, trial);
    let n = rng.random_range(1..=scale);
    let signal = rng.random::<f64>();
    let gamma = rng.random_range(1.0..4.0);
    let values = (0..n)
        .map(|_| {
            if rng.random::<f64>() < signal {
                let z: f64 = rng.sample(StandardNormal);
                normal.cdf(z - gamma)
            } else {
                rng.random::<f64>()
            }
        })
        .collect();
    let family = match rng.random_range(0..4) {
        0 => CriticalValueFamily::simes(0.05)?,
        1 => CriticalValueFamily::simes(0.2)?,
        2 => CriticalValueFamily::kr_original(0.05)?,
        _ => CriticalValueFamily::kr_admissible_default(0.05)?,
    };
    Ok(Instance {
        p: Arc::new(PValueVector::new(values)?),
        family,
    })
}

fn counterexample(suite: &str, inst: &Instance, detail: String) -> Error {
    Error::Counterexample {
        suite: suite.to_string(),
        detail: format!("{detail}; instance: {}", inst.describe()),
    }
}

fn all_subsets(family: &IndexSet) -> impl Iterator<Item = (u64, IndexSet)> + '_ {
    (0..1u64 << family.len()).map(move |m| (m, IndexSet::from_mask(family, m)))
}

/// Shortcut bounds over every subset of the full family, with the optional
/// defect applied.
fn shortcut_table(inst: &Instance, fault: Option<Fault>) -> Result<ExtensionalProcedure> {
    let family = inst.p.family();
    let state = ShortcutState::new(&inst.family, &inst.p, &family)?;
    let full = family.len();
    ExtensionalProcedure::from_mask_fn(family.clone(), |mask| {
        let d = state.d(&inst.p, &IndexSet::from_mask(&family, mask));
        match fault {
            Some(Fault::ShortcutOverstatesFamily) if mask.count_ones() as usize == full => d + 1,
            _ => d,
        }
    })
}

pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifyReport> {
    if cfg.scale == 0 || cfg.scale > MAX_SCALE {
        return Err(Error::Validation(format!(
            "scale must be in 1..={MAX_SCALE}, got {}",
            cfg.scale
        )));
    }
    let mut counts = [0u64; 5];
    for trial in 0..cfg.trials as u64 {
        let inst = draw_instance(cfg.scale, cfg.seed, trial)?;
        let family = inst.p.family();

        // shortcut = brute-force d = brute-force g
        let suite = SimesLikeTest::new(inst.family.clone(), (*inst.p).clone())?;
        let oracle = ClosedTestingOracle::new(&suite, &family)?;
        let table = shortcut_table(&inst, cfg.fault)?;
        for (mask, s) in all_subsets(&family) {
            let (fast, d, g) = (table.eval_mask(mask), oracle.d(mask), oracle.g(mask));
            if fast != d || d != g {
                return Err(counterexample(
                    "oracle-equivalence",
                    &inst,
                    format!("S={{{s}}}: shortcut {fast}, brute-force d {d}, brute-force g {g}"),
                ));
            }
            counts[0] += 1;
        }

        if let Some((v, w)) = coherence_violation(&table)? {
            return Err(counterexample(
                "coherence",
                &inst,
                format!("V={{{v}}}, W={{{w}}}"),
            ));
        }
        counts[1] += 1;

        let j = IndexSet::full(family.len().min(STACK_SCALE));
        let builder = |i: &IndexSet| ClosedShortcut::new(&inst.family, Arc::clone(&inst.p), i);
        if let Some((i, s)) = monotone_stack_violation(builder, &j)? {
            return Err(counterexample(
                "monotone-stack",
                &inst,
                format!("I={{{i}}}, S={{{s}}}, J={{{j}}}"),
            ));
        }
        counts[2] += 1;

        // K&R nested statements: the closed form equals the definition, one
        // round is already coherent, and a second round changes nothing
        let original = KrOriginal::new(0.05, Arc::clone(&inst.p), &j)?;
        let closed_form = interpolate(&original)?;
        let generic = interpolate_generic(&original)?;
        let once = ExtensionalProcedure::materialize(&generic)?;
        let twice = ExtensionalProcedure::materialize(&interpolate(&once)?)?;
        for (mask, s) in all_subsets(&j) {
            let (a, b, c) = (closed_form.eval(&s), once.eval_mask(mask), twice.eval_mask(mask));
            if a != b || b != c || b < original.eval(&s) {
                return Err(counterexample(
                    "interpolation",
                    &inst,
                    format!(
                        "S={{{s}}}: closed form {a}, one round {b}, two rounds {c}, original {}",
                        original.eval(&s)
                    ),
                ));
            }
        }
        if let Some((v, w)) = coherence_violation(&once)? {
            return Err(counterexample(
                "interpolation",
                &inst,
                format!("interpolated K&R not coherent at V={{{v}}}, W={{{w}}}"),
            ));
        }
        counts[3] += 1;

        let chain = KrMethod::ALL
            .into_iter()
            .map(|m| kr_procedure(m, 0.05, Arc::clone(&inst.p), &family, None))
            .collect::<Result<Vec<_>>>()?;
        for (k, pair) in chain.windows(2).enumerate() {
            if !dominates(&pair[1], &pair[0])?.a_at_least_b() {
                return Err(counterexample(
                    "chain-ordering",
                    &inst,
                    format!(
                        "{} exceeds {} on some set",
                        KrMethod::ALL[k],
                        KrMethod::ALL[k + 1]
                    ),
                ));
            }
            counts[4] += 1;
        }
    }
    Ok(VerifyReport {
        trials: cfg.trials,
        checks: vec![
            ("oracle-equivalence", counts[0]),
            ("coherence", counts[1]),
            ("monotone-stack", counts[2]),
            ("interpolation", counts[3]),
            ("chain-ordering", counts[4]),
        ],
    })
}
