use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::set::IndexSet;

/// Observed p-values `p_1, ..., p_m`, indexed by 1-based hypothesis id.
#[derive(Debug, Clone, PartialEq)]
pub struct PValueVector<T> {
    values: Vec<T>,
}

impl<T: Real> PValueVector<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        for (pos, &p) in values.iter().enumerate() {
            if !(p >= T::zero() && p <= T::one()) {
                return Err(Error::Validation(format!(
                    "p-value for id {} is {p}, outside [0, 1]",
                    pos + 1
                )));
            }
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// p-value of hypothesis `id` (1-based). Panics when out of range.
    pub fn get(&self, id: usize) -> T {
        self.values[id - 1]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// The ambient family `{1, ..., m}`.
    pub fn family(&self) -> IndexSet {
        IndexSet::full(self.values.len())
    }

    /// Members of `set` ordered by increasing p-value, ties broken by id.
    pub fn order(&self, set: &IndexSet) -> Vec<usize> {
        let mut ids: Vec<usize> = set.iter().collect();
        // stable: equal p-values keep increasing id order
        ids.sort_by(|&a, &b| self.cmp_ids(a, b));
        ids
    }

    /// p-values of `set` in increasing order: `p_(1:S) <= ... <= p_(|S|:S)`.
    pub fn sorted_within(&self, set: &IndexSet) -> Vec<T> {
        let mut v: Vec<T> = set.iter().map(|id| self.get(id)).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        v
    }

    fn cmp_ids(&self, a: usize, b: usize) -> Ordering {
        self.get(a)
            .partial_cmp(&self.get(b))
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    }
}
