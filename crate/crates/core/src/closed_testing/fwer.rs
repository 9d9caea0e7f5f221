//! Familywise-error views of a procedure: unit rejections, consonance, and
//! the projection `r(S) = |S ∩ R|`.

use crate::error::Result;
use crate::procedure::{
    check_oracle_scale, DiscoveryProcedure, ExtensionalProcedure, Provenance, PAIR_ORACLE_LIMIT,
};
use crate::set::{submasks, IndexSet};

use super::oracle::full_mask;

/// `R = { i in I : d({i}) = 1 }`.
pub fn fwer_rejections<P: DiscoveryProcedure + ?Sized>(d: &P) -> IndexSet {
    IndexSet::new(
        d.family()
            .iter()
            .filter(|&i| d.eval(&IndexSet::new([i])) == 1),
    )
}

/// Whether every set with a positive bound contains a unit rejection.
pub fn is_consonant<P: DiscoveryProcedure + ?Sized>(d: &P) -> Result<bool> {
    let table = ExtensionalProcedure::materialize(d)?;
    let n = table.len_bits();
    let units: u64 = (0..n)
        .filter(|&b| table.eval_mask(1 << b) == 1)
        .fold(0, |acc, b| acc | 1 << b);
    let consonant = (1..1u64 << n).all(|s| table.eval_mask(s) == 0 || s & units != 0);
    debug_assert!(
        n > PAIR_ORACLE_LIMIT
            || !coherent_table(&table)
            || consonant == additive_table(&table),
        "consonance disagrees with additivity on a coherent procedure"
    );
    Ok(consonant)
}

/// Whether `d(V ∪ W) = d(V) + d(W)` for every disjoint `V, W`.
pub fn is_additive<P: DiscoveryProcedure + ?Sized>(d: &P) -> Result<bool> {
    check_oracle_scale(d.family(), PAIR_ORACLE_LIMIT)?;
    Ok(additive_table(&ExtensionalProcedure::materialize(d)?))
}

fn additive_table(t: &ExtensionalProcedure) -> bool {
    disjoint_pairs(t.len_bits()).all(|(v, w)| t.eval_mask(v | w) == t.eval_mask(v) + t.eval_mask(w))
}

pub(crate) fn coherent_table(t: &ExtensionalProcedure) -> bool {
    coherent_violation(t).is_none()
}

/// First disjoint pair of masks breaking `d(V) + d(W) <= d(V ∪ W) <= d(V) + |W|`.
pub(crate) fn coherent_violation(t: &ExtensionalProcedure) -> Option<(u64, u64)> {
    disjoint_pairs(t.len_bits()).find(|&(v, w)| {
        let (dv, dw, du) = (t.eval_mask(v), t.eval_mask(w), t.eval_mask(v | w));
        dv + dw > du || du > dv + w.count_ones() as usize
    })
}

/// Every ordered pair of disjoint masks over `n` bits.
pub(crate) fn disjoint_pairs(n: usize) -> impl Iterator<Item = (u64, u64)> {
    (0..=full_mask(n)).flat_map(|s| submasks(s).map(move |v| (v, s & !v)))
}

/// `r(S) = |S ∩ R|` with `R` the unit rejections of the source procedure.
#[derive(Debug, Clone)]
pub struct FwerProjection {
    family: IndexSet,
    rejections: IndexSet,
}

impl FwerProjection {
    pub fn rejections(&self) -> &IndexSet {
        &self.rejections
    }
}

impl DiscoveryProcedure for FwerProjection {
    fn family(&self) -> &IndexSet {
        &self.family
    }

    fn eval(&self, set: &IndexSet) -> usize {
        set.intersection(&self.rejections).len()
    }

    fn provenance(&self) -> Provenance {
        Provenance::FwerProjection
    }
}

pub fn fwer_projection<P: DiscoveryProcedure + ?Sized>(d: &P) -> FwerProjection {
    FwerProjection {
        family: d.family().clone(),
        rejections: fwer_rejections(d),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_testing::{closed_testing, AcceptAll, SimesLikeTest};
    use crate::local_tests::CriticalValueFamily;
    use crate::pvalues::PValueVector;

    #[test]
    fn simes_rejections_example() {
        let suite = SimesLikeTest::new(
            CriticalValueFamily::simes(0.05).unwrap(),
            PValueVector::new(vec![0.01, 0.2, 0.9]).unwrap(),
        )
        .unwrap();
        let d = closed_testing(&suite, &IndexSet::full(3)).unwrap();
        assert_eq!(fwer_rejections(&d), IndexSet::new([1]));
        let none = closed_testing(&AcceptAll, &IndexSet::full(3)).unwrap();
        assert!(fwer_rejections(&none).is_empty());
        assert!(fwer_projection(&none).rejections().is_empty());
    }

    #[test]
    fn projection_is_consonant_and_additive() {
        let mut t = ExtensionalProcedure::zero(IndexSet::full(4)).unwrap();
        t.set(&IndexSet::new([2]), 1).unwrap();
        t.set(&IndexSet::new([4]), 1).unwrap();
        let r = fwer_projection(&t);
        assert_eq!(r.rejections(), &IndexSet::new([2, 4]));
        assert!(is_consonant(&r).unwrap());
        assert!(is_additive(&r).unwrap());
        assert_eq!(r.eval(&IndexSet::new([1, 2, 4])), 2);
    }

    #[test]
    fn single_hypothesis_is_consonant() {
        for v in 0..=1 {
            let mut t = ExtensionalProcedure::zero(IndexSet::new([7])).unwrap();
            t.set(&IndexSet::new([7]), v).unwrap();
            assert!(is_consonant(&t).unwrap());
        }
    }

    #[test]
    fn intersection_only_signal_is_not_consonant() {
        let mut t = ExtensionalProcedure::zero(IndexSet::full(2)).unwrap();
        t.set(&IndexSet::full(2), 1).unwrap();
        assert!(!is_consonant(&t).unwrap());
        assert!(!is_additive(&t).unwrap());
    }

    #[test]
    fn disjoint_pair_count() {
        assert_eq!(disjoint_pairs(3).count(), 27);
    }
}
