//! Interpolation: propagating bounds between overlapping sets.
//!
//! ```text
//! dbar(S) = max_{U ⊆ I} d(U) - |U \ S| + d(S \ U)
//! ```
//!
//! A single round is a uniform improvement but is not always coherent when the
//! input makes statements about overlapping, non-nested sets; [`make_coherent`]
//! iterates to the fixed point.

use rayon::prelude::*;

use crate::closed_testing::full_mask;
use crate::error::Result;
use crate::procedure::{BoxedProcedure, DiscoveryProcedure, ExtensionalProcedure, Provenance};
use crate::set::IndexSet;

/// Lazy interpolation of a tabulated procedure; each query maximizes over all
/// `2^|I|` subsets.
#[derive(Debug, Clone)]
pub struct Interpolated {
    base: ExtensionalProcedure,
}

impl Interpolated {
    pub fn new(base: ExtensionalProcedure) -> Self {
        Self { base }
    }

    pub fn base(&self) -> &ExtensionalProcedure {
        &self.base
    }

    pub fn eval_mask(&self, s: u64) -> usize {
        interpolate_at(&self.base, s)
    }
}

fn interpolate_at(d: &ExtensionalProcedure, s: u64) -> usize {
    let full = full_mask(d.len_bits());
    (0..=full)
        .map(|u| {
            let gain = d.eval_mask(u) + d.eval_mask(s & !u);
            gain.saturating_sub((u & !s).count_ones() as usize)
        })
        .max()
        .unwrap_or(0)
}

impl DiscoveryProcedure for Interpolated {
    fn family(&self) -> &IndexSet {
        self.base.family()
    }

    fn eval(&self, set: &IndexSet) -> usize {
        set.mask_within(self.base.family())
            .map_or(0, |s| self.eval_mask(s))
    }

    fn provenance(&self) -> Provenance {
        Provenance::Interpolated
    }
}

/// `dbar`, using a closed form when the procedure carries one (k-FWER and
/// K&R) and the exponential definition otherwise.
pub fn interpolate<P: DiscoveryProcedure + ?Sized>(d: &P) -> Result<BoxedProcedure> {
    match d.closed_form_interpolation() {
        Some(closed) => Ok(closed),
        None => interpolate_generic(d),
    }
}

/// `dbar` straight from the definition, ignoring any closed form. Oracle
/// scale only.
pub fn interpolate_generic<P: DiscoveryProcedure + ?Sized>(d: &P) -> Result<BoxedProcedure> {
    Ok(Box::new(Interpolated::new(ExtensionalProcedure::materialize(d)?)))
}

/// One interpolation round over every subset.
pub fn interpolate_table(d: &ExtensionalProcedure) -> ExtensionalProcedure {
    let values: Vec<usize> = (0..=full_mask(d.len_bits()))
        .into_par_iter()
        .map(|s| interpolate_at(d, s))
        .collect();
    ExtensionalProcedure::from_mask_fn(d.family().clone(), |s| values[s as usize])
        .expect("family size already checked")
        .with_provenance(Provenance::Interpolated)
}

/// Repeats interpolation until nothing changes, giving a coherent procedure
/// that dominates `d`.
pub fn make_coherent<P: DiscoveryProcedure + ?Sized>(d: &P) -> Result<ExtensionalProcedure> {
    let mut current = ExtensionalProcedure::materialize(d)?;
    loop {
        let next = interpolate_table(&current);
        if next.values() == current.values() {
            return Ok(next);
        }
        current = next;
    }
}
