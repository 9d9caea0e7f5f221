//! Conversions between true-discovery bounds and false discovery proportion
//! bounds.

use crate::error::{Error, Result};
use crate::procedure::DiscoveryProcedure;
use crate::scalar::Real;
use crate::set::IndexSet;

/// Upper confidence bound `q` on the false discovery proportion of `set`.
#[derive(Debug, Clone, PartialEq)]
pub struct FdpBound<T = f64> {
    pub set: IndexSet,
    pub q: T,
}

/// `q(S) = (|S| - d(S)) / max(|S|, 1)`.
pub fn tdg_to_fdp<T: Real, P: DiscoveryProcedure + ?Sized>(
    d: &P,
    set: &IndexSet,
) -> Result<FdpBound<T>> {
    let bound = d.bound(set)?;
    let size = set.len();
    let q = T::from_count(size - bound) / T::from_count(size.max(1));
    Ok(FdpBound {
        set: set.clone(),
        q,
    })
}

/// `ceil((1 - q) |S|)`, clamped into `[0, |S|]`.
///
/// Products within a few ulps of an integer are snapped to it first, so
/// that `q = 0.3, |S| = 10` yields 7 rather than 8.
pub fn fdp_to_tdg<T: Real>(q: T, set: &IndexSet) -> Result<usize> {
    if !(q >= T::zero() && q <= T::one()) {
        return Err(Error::Domain(format!("FDP bound {q} outside [0, 1]")));
    }
    let size = set.len();
    let x = (T::one() - q) * T::from_count(size);
    let nearest = x.round();
    let slack = T::epsilon() * T::lit(16.0) * T::from_count(size.max(1));
    let x = if (x - nearest).abs() <= slack { nearest } else { x };
    let d = x.ceil().to_usize().unwrap_or(0);
    Ok(d.min(size))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::procedure::{ExtensionalProcedure, SparseProcedure, Provenance};

    fn single(set: &IndexSet, value: usize) -> SparseProcedure {
        let mut d = SparseProcedure::new(IndexSet::full(12), Provenance::Table);
        d.insert(set.clone(), value).unwrap();
        d
    }

    #[test]
    fn tdg_to_fdp_examples() {
        let s = IndexSet::full(10);
        let q: FdpBound<f64> = tdg_to_fdp(&single(&s, 7), &s).unwrap();
        assert!((q.q - 0.3).abs() < 1e-15);

        let empty = IndexSet::empty();
        let q: FdpBound<f64> = tdg_to_fdp(&single(&s, 7), &empty).unwrap();
        assert_eq!(q.q, 0.0);

        let five = IndexSet::full(5);
        let q: FdpBound<f64> = tdg_to_fdp(&single(&five, 5), &five).unwrap();
        assert_eq!(q.q, 0.0);
    }

    #[test]
    fn tdg_to_fdp_rejects_foreign_sets() {
        let d = ExtensionalProcedure::zero(IndexSet::full(3)).unwrap();
        assert!(tdg_to_fdp::<f64, _>(&d, &IndexSet::new([4])).is_err());
    }

    #[test]
    fn fdp_to_tdg_examples() {
        assert_eq!(fdp_to_tdg(0.3, &IndexSet::full(10)).unwrap(), 7);
        assert_eq!(fdp_to_tdg(1.0, &IndexSet::full(10)).unwrap(), 0);
        assert_eq!(fdp_to_tdg(0.25, &IndexSet::full(6)).unwrap(), 5);
        assert_eq!(fdp_to_tdg(0.25f32, &IndexSet::full(6)).unwrap(), 5);
        assert!(fdp_to_tdg(1.5, &IndexSet::full(6)).is_err());
        assert!(fdp_to_tdg(-0.1, &IndexSet::full(6)).is_err());
    }

    #[test]
    fn round_trip_never_loses_strength() {
        for size in 0..60usize {
            let s = IndexSet::full(size);
            for d in 0..=size {
                let q: FdpBound<f64> = tdg_to_fdp(&single_any(&s, d), &s).unwrap();
                assert_eq!(fdp_to_tdg(q.q, &s).unwrap(), d, "size {size} d {d}");
            }
        }
    }

    fn single_any(set: &IndexSet, value: usize) -> SparseProcedure {
        let mut d = SparseProcedure::new(set.clone(), Provenance::Table);
        d.insert(set.clone(), value).unwrap();
        d
    }
}
