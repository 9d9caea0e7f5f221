//! Quadratic-time closed testing for Simes-like local tests.
//!
//! For thresholds that are nonincreasing in the set size `n`, the effective
//! local test within `I` only depends on the statistic
//!
//! ```text
//! h_I = max { n in 0..=|I| : p_(|I|-n+i : I) > l_{i:n} for i = 1..n }
//! ```
//!
//! and the closed testing bound becomes
//!
//! ```text
//! d(S) = max_{1 <= u <= |S|} 1 - u + #{ i in S : p_i <= l_{u:h_I} }.
//! ```

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::local_tests::CriticalValueFamily;
use crate::procedure::{DiscoveryProcedure, Provenance};
use crate::pvalues::PValueVector;
use crate::scalar::Real;
use crate::set::IndexSet;

#[derive(Debug, Clone)]
pub struct ShortcutState<T> {
    family: IndexSet,
    sorted_p: Vec<T>,
    h: usize,
    fam: CriticalValueFamily<T>,
    sweep: bool,
}

impl<T: Real> ShortcutState<T> {
    /// Builds the state for the family `family ⊆ {1..m}`.
    pub fn new(
        fam: &CriticalValueFamily<T>,
        p: &PValueVector<T>,
        family: &IndexSet,
    ) -> Result<Self> {
        if family.as_slice().last().copied().unwrap_or(0) > p.len() {
            return Err(Error::Domain(format!(
                "family refers to ids beyond the {} available p-values",
                p.len()
            )));
        }
        Self::from_sorted(fam, family.clone(), p.sorted_within(family))
    }

    /// State from the family's p-values already in increasing order.
    pub(crate) fn from_sorted(
        fam: &CriticalValueFamily<T>,
        family: IndexSet,
        sorted_p: Vec<T>,
    ) -> Result<Self> {
        let size = family.len();
        fam.ensure_supports(size)?;
        let h = compute_h(fam, &sorted_p);
        Ok(Self {
            family,
            sorted_p,
            h,
            fam: fam.clone(),
            sweep: fam.nondecreasing_in_i(size),
        })
    }

    pub fn family(&self) -> &IndexSet {
        &self.family
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn sorted_p(&self) -> &[T] {
        &self.sorted_p
    }

    pub fn critical_values(&self) -> &CriticalValueFamily<T> {
        &self.fam
    }

    /// `l_{u:h_I}`.
    pub fn threshold_at_h(&self, u: usize) -> T {
        self.fam.level(u, self.h)
    }

    /// `phi^I_S = 1{ p_(i:S) <= l_{i:h_I} for some i }`.
    pub fn effective_test(&self, p: &PValueVector<T>, set: &IndexSet) -> bool {
        p.sorted_within(set)
            .iter()
            .enumerate()
            .any(|(k, &q)| q <= self.threshold_at_h(k + 1))
    }

    /// `d^I(S)`. Uses a single sweep when the thresholds are nondecreasing in
    /// `u`, otherwise the direct double loop.
    pub fn d(&self, p: &PValueVector<T>, set: &IndexSet) -> usize {
        if set.is_empty() {
            return 0;
        }
        if !self.sweep {
            return self.d_reference(p, set);
        }
        self.d_sorted(&p.sorted_within(set))
    }

    /// `d^I(S)` given the p-values of `S` in increasing order.
    pub fn d_sorted(&self, sorted: &[T]) -> usize {
        if !self.sweep {
            return (1..=sorted.len())
                .map(|u| {
                    let l = self.threshold_at_h(u);
                    1 - u as i64 + sorted.iter().filter(|&&q| q <= l).count() as i64
                })
                .max()
                .unwrap_or(0)
                .max(0) as usize;
        }
        let mut best = 0i64;
        let mut count = 0usize;
        for u in 1..=sorted.len() {
            let l = self.threshold_at_h(u);
            while count < sorted.len() && sorted[count] <= l {
                count += 1;
            }
            best = best.max(1 - u as i64 + count as i64);
        }
        best as usize
    }

    /// `d^I(S)` by evaluating every term of the maximum directly, `O(|S|^2)`.
    pub fn d_reference(&self, p: &PValueVector<T>, set: &IndexSet) -> usize {
        (1..=set.len())
            .map(|u| {
                let l = self.threshold_at_h(u);
                let count = set.iter().filter(|&i| p.get(i) <= l).count();
                1 - u as i64 + count as i64
            })
            .max()
            .unwrap_or(0)
            .max(0) as usize
    }
}

fn compute_h<T: Real>(fam: &CriticalValueFamily<T>, sorted: &[T]) -> usize {
    let size = sorted.len();
    (1..=size)
        .rev()
        .find(|&n| (1..=n).all(|i| sorted[size - n + i - 1] > fam.level(i, n)))
        .unwrap_or(0)
}

/// Shortcut state over the full family `{1..m}`.
pub fn compute_shortcut_state<T: Real>(
    fam: &CriticalValueFamily<T>,
    p: &PValueVector<T>,
) -> Result<ShortcutState<T>> {
    ShortcutState::new(fam, p, &p.family())
}

/// `d^I(S)` from a prepared state. `set` must be a subset of the state's
/// family; the empty set yields 0.
pub fn shortcut_d<T: Real>(state: &ShortcutState<T>, p: &PValueVector<T>, set: &IndexSet) -> usize {
    state.d(p, set)
}

/// Closed testing procedure answered through the shortcut.
#[derive(Debug, Clone)]
pub struct ClosedShortcut<T> {
    state: ShortcutState<T>,
    p: Arc<PValueVector<T>>,
}

impl<T: Real> ClosedShortcut<T> {
    pub fn new(
        fam: &CriticalValueFamily<T>,
        p: Arc<PValueVector<T>>,
        family: &IndexSet,
    ) -> Result<Self> {
        let state = ShortcutState::new(fam, &p, family)?;
        Ok(Self { state, p })
    }

    pub fn state(&self) -> &ShortcutState<T> {
        &self.state
    }
}

impl<T: Real> DiscoveryProcedure for ClosedShortcut<T> {
    fn family(&self) -> &IndexSet {
        self.state.family()
    }

    fn eval(&self, set: &IndexSet) -> usize {
        self.state.d(&self.p, set)
    }

    fn provenance(&self) -> Provenance {
        Provenance::ClosedTesting
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_tests::CTable;

    fn example() -> (ShortcutState<f64>, PValueVector<f64>) {
        let p = PValueVector::new(vec![0.01, 0.2, 0.9]).unwrap();
        let fam = CriticalValueFamily::simes(0.05).unwrap();
        (compute_shortcut_state(&fam, &p).unwrap(), p)
    }

    #[test]
    fn h_examples() {
        let (state, _) = example();
        assert_eq!(state.h(), 2);

        let fam = CriticalValueFamily::simes(0.05).unwrap();
        let ones = PValueVector::new(vec![1.0; 6]).unwrap();
        assert_eq!(compute_shortcut_state(&fam, &ones).unwrap().h(), 6);
        let zeros = PValueVector::new(vec![0.0; 6]).unwrap();
        assert_eq!(compute_shortcut_state(&fam, &zeros).unwrap().h(), 0);
    }

    #[test]
    fn d_examples() {
        let (state, p) = example();
        assert_eq!(shortcut_d(&state, &p, &IndexSet::full(3)), 1);
        assert_eq!(shortcut_d(&state, &p, &IndexSet::new([1])), 1);
        assert_eq!(shortcut_d(&state, &p, &IndexSet::new([3])), 0);
        assert_eq!(shortcut_d(&state, &p, &IndexSet::empty()), 0);
        assert!((state.threshold_at_h(1) - 0.025).abs() < 1e-15);
        assert!((state.threshold_at_h(3) - 0.05).abs() < 1e-15);
    }

    #[test]
    fn h_zero_rejects_everything() {
        let fam = CriticalValueFamily::simes(0.05).unwrap();
        let p = PValueVector::new(vec![0.0, 0.001, 0.002]).unwrap();
        let state = compute_shortcut_state(&fam, &p).unwrap();
        assert_eq!(state.h(), 0);
        assert_eq!(state.d(&p, &IndexSet::full(3)), 3);
    }

    #[test]
    fn sweep_matches_reference() {
        let p = PValueVector::new(vec![0.001, 0.03, 0.0004, 0.2, 0.01, 0.7, 0.002]).unwrap();
        let fams = [
            CriticalValueFamily::simes(0.1).unwrap(),
            CriticalValueFamily::kr_original(0.05).unwrap(),
            CriticalValueFamily::kr_admissible(0.05, CTable::alpha_005()).unwrap(),
        ];
        for fam in &fams {
            let state = compute_shortcut_state(fam, &p).unwrap();
            for mask in 0..128u64 {
                let s = IndexSet::from_mask(&p.family(), mask);
                assert_eq!(state.d(&p, &s), state.d_reference(&p, &s));
            }
        }
    }

    #[test]
    fn admissible_table_must_cover_family() {
        let table = CTable::new(vec![(1, 1.0 / 1.05), (2, 1.38)]).unwrap();
        let fam = CriticalValueFamily::kr_admissible(0.05, table).unwrap();
        let p = PValueVector::new(vec![0.1, 0.2, 0.3]).unwrap();
        assert!(matches!(
            compute_shortcut_state(&fam, &p),
            Err(Error::MissingCalibration { .. })
        ));
    }
}
