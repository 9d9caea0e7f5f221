//! Finite sets of hypothesis ids.
//!
//! Ids are 1-based. An [`IndexSet`] stores its members as a strictly
//! increasing sequence; the oracle routines additionally address subsets of a
//! small family through bit masks over the family's positions.

use std::fmt;

use crate::error::{Error, Result};

/// Largest family the bit-mask routines can address.
pub const MASK_BITS: usize = 64;

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSet {
    members: Vec<usize>,
}

impl IndexSet {
    /// Builds a set from ids in any order; duplicates collapse.
    ///
    /// Panics on id 0, which is never a valid hypothesis id. Use
    /// [`IndexSet::try_new`] for untrusted input.
    pub fn new<I: IntoIterator<Item = usize>>(ids: I) -> Self {
        Self::try_new(ids).expect("hypothesis ids are 1-based")
    }

    pub fn try_new<I: IntoIterator<Item = usize>>(ids: I) -> Result<Self> {
        let mut members: Vec<usize> = ids.into_iter().collect();
        if members.contains(&0) {
            return Err(Error::Validation("hypothesis ids start at 1".into()));
        }
        members.sort_unstable();
        members.dedup();
        Ok(Self { members })
    }

    /// Wraps an already strictly increasing id sequence.
    pub(crate) fn from_sorted(members: Vec<usize>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(members.first().is_none_or(|&x| x > 0));
        Self { members }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// The family `{1, ..., m}`.
    pub fn full(m: usize) -> Self {
        Self {
            members: (1..=m).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn contains(&self, id: usize) -> bool {
        self.members.binary_search(&id).is_ok()
    }

    pub fn is_subset_of(&self, other: &IndexSet) -> bool {
        if self.len() > other.len() {
            return false;
        }
        let mut rest = other.members.iter();
        'outer: for &x in &self.members {
            for &y in rest.by_ref() {
                if y == x {
                    continue 'outer;
                }
                if y > x {
                    return false;
                }
            }
            return false;
        }
        true
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (a, b) = (&self.members, &other.members);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        IndexSet::from_sorted(out)
    }

    pub fn intersection(&self, other: &IndexSet) -> IndexSet {
        IndexSet::from_sorted(self.iter().filter(|&x| other.contains(x)).collect())
    }

    pub fn difference(&self, other: &IndexSet) -> IndexSet {
        IndexSet::from_sorted(self.iter().filter(|&x| !other.contains(x)).collect())
    }

    /// Bit mask of `self` relative to the positions of `family`, or `None`
    /// when `self` is not a subset of `family`.
    pub fn mask_within(&self, family: &IndexSet) -> Option<u64> {
        debug_assert!(family.len() <= MASK_BITS);
        let mut mask = 0u64;
        let mut pos = 0usize;
        for &x in &self.members {
            while pos < family.members.len() && family.members[pos] < x {
                pos += 1;
            }
            if pos == family.members.len() || family.members[pos] != x {
                return None;
            }
            mask |= 1u64 << pos;
            pos += 1;
        }
        Some(mask)
    }

    /// The subset of `family` selected by `mask`.
    pub fn from_mask(family: &IndexSet, mask: u64) -> IndexSet {
        let members = family
            .members
            .iter()
            .enumerate()
            .filter(|(pos, _)| mask >> pos & 1 == 1)
            .map(|(_, &x)| x)
            .collect();
        IndexSet::from_sorted(members)
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for x in &self.members {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{x}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromIterator<usize> for IndexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        IndexSet::new(iter)
    }
}

/// Iterates over all submasks of `mask`, including `mask` itself and 0.
pub(crate) fn submasks(mask: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & mask) };
        Some(cur)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_sorts_and_dedups() {
        let s = IndexSet::new([5, 1, 3, 3]);
        assert_eq!(s.as_slice(), &[1, 3, 5]);
        assert_eq!(s.len(), 3);
        assert!(IndexSet::try_new([0, 1]).is_err());
    }

    #[test]
    fn subset_and_algebra() {
        let a = IndexSet::new([1, 3]);
        let b = IndexSet::new([1, 2, 3, 4]);
        assert!(a.is_subset_of(&b));
        assert!(!b.is_subset_of(&a));
        assert!(IndexSet::empty().is_subset_of(&a));
        assert!(!IndexSet::new([5]).is_subset_of(&b));
        assert_eq!(b.difference(&a).as_slice(), &[2, 4]);
        assert_eq!(a.union(&IndexSet::new([2, 9])).as_slice(), &[1, 2, 3, 9]);
        assert_eq!(b.intersection(&IndexSet::new([4, 7])).as_slice(), &[4]);
    }

    #[test]
    fn masks_round_trip() {
        let family = IndexSet::new([2, 4, 7, 9]);
        let s = IndexSet::new([4, 9]);
        let mask = s.mask_within(&family).unwrap();
        assert_eq!(mask, 0b1010);
        assert_eq!(IndexSet::from_mask(&family, mask), s);
        assert_eq!(IndexSet::new([3]).mask_within(&family), None);
    }

    #[test]
    fn submask_enumeration_is_complete() {
        let subs: Vec<u64> = submasks(0b101).collect();
        assert_eq!(subs, vec![0b101, 0b100, 0b001, 0]);
        assert_eq!(submasks(0).count(), 1);
    }
}
