//! Suites of local tests `phi_S`, one test per intersection hypothesis.

use crate::error::Result;
use crate::local_tests::{rejects_sorted, AlphaSchedule, CriticalValueFamily};
use crate::pvalues::PValueVector;
use crate::scalar::Real;
use crate::set::IndexSet;

/// A suite of local tests. Implementations must never reject the empty set.
pub trait LocalTest: Send + Sync {
    fn rejects(&self, set: &IndexSet) -> bool;

    fn describe(&self) -> String {
        "local test suite".to_string()
    }
}

impl<L: LocalTest + ?Sized> LocalTest for &L {
    fn rejects(&self, set: &IndexSet) -> bool {
        (**self).rejects(set)
    }
    fn describe(&self) -> String {
        (**self).describe()
    }
}

/// Simes-like suite defined by a critical-value family and observed p-values.
#[derive(Debug, Clone)]
pub struct SimesLikeTest<T> {
    fam: CriticalValueFamily<T>,
    p: PValueVector<T>,
}

impl<T: Real> SimesLikeTest<T> {
    pub fn new(fam: CriticalValueFamily<T>, p: PValueVector<T>) -> Result<Self> {
        fam.ensure_supports(p.len())?;
        Ok(Self { fam, p })
    }
}

impl<T: Real> LocalTest for SimesLikeTest<T> {
    fn rejects(&self, set: &IndexSet) -> bool {
        !set.is_empty() && rejects_sorted(&self.fam, &self.p.sorted_within(set))
    }

    fn describe(&self) -> String {
        format!("{} local tests at alpha = {}", self.fam.kind(), self.fam.alpha())
    }
}

/// `phi_S = 1{ min_{i in S} p_i <= alpha / |S| }`.
#[derive(Debug, Clone)]
pub struct BonferroniTest<T> {
    alpha: T,
    p: PValueVector<T>,
}

impl<T: Real> BonferroniTest<T> {
    pub fn new(alpha: T, p: PValueVector<T>) -> Self {
        Self { alpha, p }
    }
}

impl<T: Real> LocalTest for BonferroniTest<T> {
    fn rejects(&self, set: &IndexSet) -> bool {
        let cut = self.alpha / T::from_count(set.len().max(1));
        set.iter().any(|id| self.p.get(id) <= cut)
    }

    fn describe(&self) -> String {
        format!("Bonferroni local tests at alpha = {}", self.alpha)
    }
}

/// Fixed-sequence local tests with step-dependent levels:
/// `psi_S = 1{ p_i <= alpha_{rank(i)} for every i in I with i <= min(S) }`,
/// where `rank(i)` is the position of `i` within `I`.
#[derive(Debug, Clone)]
pub struct FixedSequenceTest<T> {
    family: IndexSet,
    schedule: AlphaSchedule<T>,
    p: PValueVector<T>,
}

impl<T: Real> FixedSequenceTest<T> {
    pub fn new(family: IndexSet, schedule: AlphaSchedule<T>, p: PValueVector<T>) -> Self {
        Self {
            family,
            schedule,
            p,
        }
    }
}

impl<T: Real> LocalTest for FixedSequenceTest<T> {
    fn rejects(&self, set: &IndexSet) -> bool {
        let Some(first) = set.iter().next() else {
            return false;
        };
        self.family
            .iter()
            .take_while(|&i| i <= first)
            .enumerate()
            .all(|(step, i)| self.p.get(i) <= self.schedule.level(step + 1))
    }

    fn describe(&self) -> String {
        "fixed-sequence local tests".to_string()
    }
}

/// Suite given by an arbitrary closure; the empty set is always accepted.
pub struct FnTest<F> {
    f: F,
    description: String,
}

impl<F: Fn(&IndexSet) -> bool + Send + Sync> FnTest<F> {
    pub fn new(description: impl Into<String>, f: F) -> Self {
        Self {
            f,
            description: description.into(),
        }
    }
}

impl<F: Fn(&IndexSet) -> bool + Send + Sync> LocalTest for FnTest<F> {
    fn rejects(&self, set: &IndexSet) -> bool {
        !set.is_empty() && (self.f)(set)
    }

    fn describe(&self) -> String {
        self.description.clone()
    }
}

/// Never rejects.
#[derive(Debug, Clone, Copy, Default)]
pub struct AcceptAll;

impl LocalTest for AcceptAll {
    fn rejects(&self, _: &IndexSet) -> bool {
        false
    }
}

/// Rejects every nonempty set.
#[derive(Debug, Clone, Copy, Default)]
pub struct RejectNonempty;

impl LocalTest for RejectNonempty {
    fn rejects(&self, set: &IndexSet) -> bool {
        !set.is_empty()
    }
}
