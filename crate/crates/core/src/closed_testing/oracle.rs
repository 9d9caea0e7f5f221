//! Exponential-time closed testing straight from the definitions.
//!
//! These routines enumerate the subset lattice of the family and are meant
//! for small families only (at most [`ORACLE_LIMIT`] hypotheses). They are the
//! reference against which the quadratic-time shortcut is verified.

use rayon::prelude::*;

use super::suites::LocalTest;
use crate::error::{Error, Result};
use crate::procedure::{check_oracle_scale, ExtensionalProcedure, Provenance, ORACLE_LIMIT};
use crate::set::{submasks, IndexSet};

fn subset_mask(family: &IndexSet, set: &IndexSet) -> Result<u64> {
    check_oracle_scale(family, ORACLE_LIMIT)?;
    set.mask_within(family)
        .ok_or_else(|| Error::Domain(format!("set {{{set}}} is not contained in the family")))
}

/// `phi^I_S = min { phi_U : S ⊆ U ⊆ I }`.
pub fn effective_local_test<L: LocalTest + ?Sized>(
    suite: &L,
    family: &IndexSet,
    set: &IndexSet,
) -> Result<bool> {
    let s = subset_mask(family, set)?;
    let full = full_mask(family.len());
    Ok(effective_direct(suite, family, s, full))
}

fn effective_direct<L: LocalTest + ?Sized>(suite: &L, family: &IndexSet, s: u64, full: u64) -> bool {
    submasks(full & !s).all(|extra| suite.rejects(&IndexSet::from_mask(family, s | extra)))
}

/// `d^I(S) = min { |S \ U| : U ⊆ S, phi^I_U = 0 }`.
pub fn brute_force_d<L: LocalTest + ?Sized>(
    suite: &L,
    family: &IndexSet,
    set: &IndexSet,
) -> Result<usize> {
    let s = subset_mask(family, set)?;
    let full = full_mask(family.len());
    let mut by_size: Vec<u64> = submasks(s).collect();
    by_size.sort_by_key(|u| std::cmp::Reverse(u.count_ones()));
    let accepted = by_size
        .into_iter()
        .find(|&u| !effective_direct(suite, family, u, full))
        .expect("the empty set is never rejected");
    Ok((s.count_ones() - accepted.count_ones()) as usize)
}

/// `g^I(S) = min { |S \ V| : V ⊆ I, phi_V = 0 }`.
pub fn brute_force_g<L: LocalTest + ?Sized>(
    suite: &L,
    family: &IndexSet,
    set: &IndexSet,
) -> Result<usize> {
    let s = subset_mask(family, set)?;
    let full = full_mask(family.len());
    Ok(submasks(full)
        .filter(|&v| !suite.rejects(&IndexSet::from_mask(family, v)))
        .map(|v| (s & !v).count_ones() as usize)
        .min()
        .unwrap_or(0))
}

#[inline]
pub(crate) fn full_mask(n: usize) -> u64 {
    if n == 0 {
        0
    } else {
        u64::MAX >> (64 - n)
    }
}

/// A suite evaluated once on every subset of a family.
#[derive(Debug, Clone)]
pub struct ClosedTestingOracle {
    family: IndexSet,
    phi: Vec<bool>,
    effective: Vec<bool>,
}

impl ClosedTestingOracle {
    pub fn new<L: LocalTest + ?Sized>(suite: &L, family: &IndexSet) -> Result<Self> {
        check_oracle_scale(family, ORACLE_LIMIT)?;
        let n = family.len();
        let size = 1usize << n;
        let phi: Vec<bool> = (0..size)
            .into_par_iter()
            .map(|mask| mask != 0 && suite.rejects(&IndexSet::from_mask(family, mask as u64)))
            .collect();
        // minimum over supersets, one coordinate at a time
        let mut effective = phi.clone();
        for bit in 0..n {
            let b = 1usize << bit;
            for mask in 0..size {
                if mask & b == 0 {
                    effective[mask] = effective[mask] && effective[mask | b];
                }
            }
        }
        Ok(Self {
            family: family.clone(),
            phi,
            effective,
        })
    }

    pub fn family(&self) -> &IndexSet {
        &self.family
    }

    pub fn local(&self, mask: u64) -> bool {
        self.phi[mask as usize]
    }

    pub fn effective(&self, mask: u64) -> bool {
        self.effective[mask as usize]
    }

    /// Effective test by explicit superset enumeration over the stored `phi`.
    pub fn effective_by_enumeration(&self, mask: u64) -> bool {
        let full = full_mask(self.family.len());
        submasks(full & !mask).all(|extra| self.phi[(mask | extra) as usize])
    }

    /// `d^I(S)` by minimizing over all `U ⊆ S`.
    pub fn d(&self, mask: u64) -> usize {
        submasks(mask)
            .filter(|&u| !self.effective[u as usize])
            .map(|u| (mask.count_ones() - u.count_ones()) as usize)
            .min()
            .expect("the empty set is never rejected")
    }

    /// `g^I(S)` by minimizing over all `V ⊆ I`.
    pub fn g(&self, mask: u64) -> usize {
        (0..self.phi.len())
            .filter(|&v| !self.phi[v])
            .map(|v| (mask & !(v as u64)).count_ones() as usize)
            .min()
            .expect("the empty set is never rejected")
    }

    /// The closed testing procedure on every subset, via
    /// `d(S) = 0` if `phi^I_S = 0`, else `1 + min_{i in S} d(S \ {i})`.
    pub fn procedure(&self) -> ExtensionalProcedure {
        let size = self.phi.len();
        let mut d = vec![0usize; size];
        for mask in 1..size {
            if self.effective[mask] {
                let mut best = usize::MAX;
                let mut rest = mask;
                while rest != 0 {
                    let bit = rest & rest.wrapping_neg();
                    best = best.min(d[mask ^ bit]);
                    rest ^= bit;
                }
                d[mask] = best + 1;
            }
        }
        ExtensionalProcedure::from_mask_fn(self.family.clone(), |m| d[m as usize])
            .expect("family size already checked")
            .with_provenance(Provenance::ClosedTesting)
    }
}

/// Closed testing of `suite` on `family`, materialized on every subset.
pub fn closed_testing<L: LocalTest + ?Sized>(
    suite: &L,
    family: &IndexSet,
) -> Result<ExtensionalProcedure> {
    Ok(ClosedTestingOracle::new(suite, family)?.procedure())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_testing::suites::{AcceptAll, RejectNonempty, SimesLikeTest};
    use crate::local_tests::CriticalValueFamily;
    use crate::procedure::DiscoveryProcedure;
    use crate::pvalues::PValueVector;

    fn simes_example() -> SimesLikeTest<f64> {
        SimesLikeTest::new(
            CriticalValueFamily::simes(0.05).unwrap(),
            PValueVector::new(vec![0.01, 0.2, 0.9]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn effective_test_examples() {
        let suite = simes_example();
        let fam = IndexSet::full(3);
        assert!(effective_local_test(&suite, &fam, &IndexSet::new([1])).unwrap());
        assert!(!effective_local_test(&suite, &fam, &IndexSet::empty()).unwrap());
        assert!(!effective_local_test(&suite, &fam, &IndexSet::new([2, 3])).unwrap());
    }

    #[test]
    fn brute_force_examples() {
        let suite = simes_example();
        let fam = IndexSet::full(3);
        assert_eq!(brute_force_d(&suite, &fam, &fam).unwrap(), 1);
        assert_eq!(brute_force_g(&suite, &fam, &fam).unwrap(), 1);
        assert_eq!(brute_force_d(&suite, &fam, &IndexSet::empty()).unwrap(), 0);
        assert_eq!(brute_force_g(&suite, &fam, &IndexSet::empty()).unwrap(), 0);
        for s in [IndexSet::new([1]), IndexSet::new([1, 2]), IndexSet::new([3])] {
            assert_eq!(
                brute_force_d(&AcceptAll, &fam, &s).unwrap(),
                0,
                "always accepting"
            );
            assert_eq!(brute_force_d(&RejectNonempty, &fam, &s).unwrap(), s.len());
        }
    }

    #[test]
    fn scale_guard_and_domain() {
        let big = IndexSet::full(ORACLE_LIMIT + 1);
        assert!(matches!(
            brute_force_d(&AcceptAll, &big, &IndexSet::new([1])),
            Err(Error::OracleScale { .. })
        ));
        assert!(effective_local_test(&AcceptAll, &IndexSet::full(3), &IndexSet::new([4])).is_err());
    }

    #[test]
    fn oracle_tables_agree_with_free_functions() {
        let suite = simes_example();
        let fam = IndexSet::full(3);
        let oracle = ClosedTestingOracle::new(&suite, &fam).unwrap();
        let table = oracle.procedure();
        for mask in 0..8u64 {
            let s = IndexSet::from_mask(&fam, mask);
            assert_eq!(oracle.effective(mask), oracle.effective_by_enumeration(mask));
            assert_eq!(
                oracle.effective(mask),
                effective_local_test(&suite, &fam, &s).unwrap()
            );
            let d = brute_force_d(&suite, &fam, &s).unwrap();
            assert_eq!(oracle.d(mask), d);
            assert_eq!(oracle.g(mask), d);
            assert_eq!(table.eval(&s), d);
        }
    }
}
