//! Classical error-rate guarantees restated as true discovery procedures.
//!
//! Each adapter is zero except on the sets the classical method makes a
//! statement about. Bounds are clamped into `[0, |S|]` on construction.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::fdp::fdp_to_tdg;
use crate::procedure::{Provenance, SparseProcedure};
use crate::scalar::Real;
use crate::set::IndexSet;

fn check_subset(set: &IndexSet, family: &IndexSet) -> Result<()> {
    if set.is_subset_of(family) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "set {{{set}}} is not contained in the family {{{family}}}"
        )))
    }
}

fn check_distinct<'a>(sets: impl Iterator<Item = &'a IndexSet>) -> Result<()> {
    let mut seen = HashSet::new();
    for set in sets {
        if !seen.insert(set) {
            return Err(Error::Validation(format!("set {{{set}}} is listed twice")));
        }
    }
    Ok(())
}

/// k-FWER on a rejection set `K`: at most `k - 1` false rejections, so
/// `d(K) = |K| - k + 1`.
pub fn adapt_kfwer(rejected: &IndexSet, k: usize, family: &IndexSet) -> Result<SparseProcedure> {
    if k < 1 {
        return Err(Error::Domain("k-FWER needs k >= 1".into()));
    }
    check_subset(rejected, family)?;
    let mut d = SparseProcedure::new(family.clone(), Provenance::KFwer);
    d.insert(rejected.clone(), (rejected.len() + 1).saturating_sub(k))?;
    Ok(d.with_kfwer(rejected.clone(), k))
}

/// False discovery exceedance: FDP of `K` at most `gamma`, so
/// `d(K) = ceil((1 - gamma) |K|)`.
pub fn adapt_fdx<T: Real>(rejected: &IndexSet, gamma: T, family: &IndexSet) -> Result<SparseProcedure> {
    check_subset(rejected, family)?;
    let mut d = SparseProcedure::new(family.clone(), Provenance::Fdx);
    d.insert(rejected.clone(), fdp_to_tdg(gamma, rejected)?)?;
    Ok(d)
}

/// Joint error rate over a list of sets `K_i` with at most `k_i - 1` false
/// hypotheses each: `d(K_i) = |K_i| - k_i + 1`.
pub fn adapt_jer(sets: &[(IndexSet, usize)], family: &IndexSet) -> Result<SparseProcedure> {
    check_distinct(sets.iter().map(|(s, _)| s))?;
    let mut d = SparseProcedure::new(family.clone(), Provenance::Jer);
    for (set, k) in sets {
        check_subset(set, family)?;
        d.insert(set.clone(), (set.len() + 1).saturating_sub(*k))?;
    }
    Ok(d)
}

/// FWER over intersection hypotheses: `d(K_i) = 1` exactly when the
/// intersection hypothesis of `K_i` is rejected.
pub fn adapt_intersection_fwer(
    sets: &[(IndexSet, bool)],
    family: &IndexSet,
) -> Result<SparseProcedure> {
    check_distinct(sets.iter().map(|(s, _)| s))?;
    let mut d = SparseProcedure::new(family.clone(), Provenance::IntersectionFwer);
    for (set, rejected) in sets {
        check_subset(set, family)?;
        d.insert(set.clone(), usize::from(*rejected))?;
    }
    Ok(d)
}

/// Partial conjunction test of "fewer than `k` false hypotheses in `I`":
/// `d(I) = k` when rejected.
pub fn adapt_partial_conjunction(rejected: bool, k: usize, family: &IndexSet) -> Result<SparseProcedure> {
    let mut d = SparseProcedure::new(family.clone(), Provenance::PartialConjunction);
    if rejected {
        d.insert(family.clone(), k)?;
    }
    Ok(d)
}

/// Upper confidence limit `u` for the proportion of true hypotheses in `I`:
/// `d(I) = ceil((1 - u) |I|)`.
pub fn adapt_pi0_interval<T: Real>(upper: T, family: &IndexSet) -> Result<SparseProcedure> {
    let mut d = SparseProcedure::new(family.clone(), Provenance::Pi0Interval);
    d.insert(family.clone(), fdp_to_tdg(upper, family)?)?;
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::procedure::DiscoveryProcedure;

    #[test]
    fn kfwer_examples() {
        let fam = IndexSet::full(4);
        let d = adapt_kfwer(&IndexSet::new([1, 3]), 1, &fam).unwrap();
        assert_eq!(d.eval(&IndexSet::new([1, 3])), 2);
        assert_eq!(d.eval(&IndexSet::new([1])), 0);
        let d = adapt_kfwer(&IndexSet::new([1, 3]), 3, &fam).unwrap();
        assert_eq!(d.eval(&IndexSet::new([1, 3])), 0);
        let d = adapt_kfwer(&IndexSet::empty(), 1, &fam).unwrap();
        assert_eq!(d.entries().count(), 0);
        assert!(matches!(adapt_kfwer(&fam, 0, &fam), Err(Error::Domain(_))));
        assert!(adapt_kfwer(&IndexSet::new([5]), 1, &fam).is_err());
    }

    #[test]
    fn fdx_examples() {
        let fam = IndexSet::full(12);
        let k = IndexSet::full(10);
        assert_eq!(adapt_fdx(&k, 0.1, &fam).unwrap().eval(&k), 9);
        assert_eq!(adapt_fdx(&k, 1.0, &fam).unwrap().eval(&k), 0);
        assert_eq!(adapt_fdx(&k, 0.0, &fam).unwrap().eval(&k), 10);
        assert!(adapt_fdx(&k, 1.5, &fam).is_err());
    }

    #[test]
    fn jer_examples() {
        let fam = IndexSet::full(5);
        let sets = vec![(IndexSet::new([2]), 1), (IndexSet::new([2, 4, 5]), 2)];
        let d = adapt_jer(&sets, &fam).unwrap();
        assert_eq!(d.entries().count(), 2);
        assert_eq!(d.eval(&IndexSet::new([2])), 1);
        assert_eq!(d.eval(&IndexSet::new([2, 4, 5])), 2);
        assert_eq!(adapt_jer(&[], &fam).unwrap().entries().count(), 0);
        let dup = vec![(IndexSet::new([1]), 1), (IndexSet::new([1]), 1)];
        assert!(matches!(adapt_jer(&dup, &fam), Err(Error::Validation(_))));
    }

    #[test]
    fn intersection_fwer_examples() {
        let fam = IndexSet::full(3);
        let sets = vec![(IndexSet::new([1, 2]), true), (IndexSet::new([3]), false)];
        let d = adapt_intersection_fwer(&sets, &fam).unwrap();
        assert_eq!(d.eval(&IndexSet::new([1, 2])), 1);
        assert_eq!(d.eval(&IndexSet::new([3])), 0);
        assert_eq!(adapt_intersection_fwer(&[], &fam).unwrap().entries().count(), 0);
    }

    #[test]
    fn partial_conjunction_and_pi0() {
        let fam = IndexSet::full(6);
        assert_eq!(adapt_partial_conjunction(true, 3, &fam).unwrap().eval(&fam), 3);
        assert_eq!(adapt_partial_conjunction(false, 3, &fam).unwrap().eval(&fam), 0);
        assert_eq!(adapt_partial_conjunction(true, 0, &fam).unwrap().eval(&fam), 0);
        assert_eq!(adapt_pi0_interval(0.25, &fam).unwrap().eval(&fam), 5);
        assert_eq!(adapt_pi0_interval(1.0, &fam).unwrap().eval(&fam), 0);
        assert_eq!(adapt_pi0_interval(0.0, &fam).unwrap().eval(&fam), 6);
    }
}
