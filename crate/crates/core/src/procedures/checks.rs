//! Exhaustive checks of the structural properties of procedures.

use std::sync::Arc;

use crate::closed_testing::{coherent_violation, full_mask, LocalTest};
use crate::error::{Error, Result};
use crate::procedure::{
    check_oracle_scale, DiscoveryProcedure, ExtensionalProcedure, Provenance, ORACLE_LIMIT,
    PAIR_ORACLE_LIMIT,
};
use crate::set::{submasks, IndexSet};

/// First disjoint pair `(V, W)` violating
/// `d(V) + d(W) <= d(V ∪ W) <= d(V) + |W|`, if any.
pub fn coherence_violation<P: DiscoveryProcedure + ?Sized>(
    d: &P,
) -> Result<Option<(IndexSet, IndexSet)>> {
    check_oracle_scale(d.family(), PAIR_ORACLE_LIMIT)?;
    let table = ExtensionalProcedure::materialize(d)?;
    Ok(coherent_violation(&table).map(|(v, w)| {
        (
            IndexSet::from_mask(d.family(), v),
            IndexSet::from_mask(d.family(), w),
        )
    }))
}

pub fn is_coherent<P: DiscoveryProcedure + ?Sized>(d: &P) -> Result<bool> {
    Ok(coherence_violation(d)?.is_none())
}

/// First `(I, S)` with `S ⊆ I ⊆ J` and `d^I(S) < d^J(S)`, if any.
pub fn monotone_stack_violation<B, F>(builder: F, j: &IndexSet) -> Result<Option<(IndexSet, IndexSet)>>
where
    B: DiscoveryProcedure,
    F: Fn(&IndexSet) -> Result<B>,
{
    check_oracle_scale(j, ORACLE_LIMIT)?;
    let outer = ExtensionalProcedure::materialize(&builder(j)?)?;
    for i_mask in 0..=full_mask(j.len()) {
        let i = IndexSet::from_mask(j, i_mask);
        let inner = builder(&i)?;
        for s_mask in submasks(i_mask) {
            let s = IndexSet::from_mask(j, s_mask);
            if inner.eval(&s) < outer.eval_mask(s_mask) {
                return Ok(Some((i, s)));
            }
        }
    }
    Ok(None)
}

/// Whether `builder(I)(S) >= builder(J)(S)` for all `S ⊆ I ⊆ J`.
pub fn check_monotone_stack<B, F>(builder: F, j: &IndexSet) -> Result<bool>
where
    B: DiscoveryProcedure,
    F: Fn(&IndexSet) -> Result<B>,
{
    Ok(monotone_stack_violation(builder, j)?.is_none())
}

/// Pointwise comparison of two procedures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    Equal,
    /// `a >= b` everywhere, strictly somewhere.
    ADominates,
    BDominates,
    Incomparable,
}

impl Dominance {
    /// `a >= b` everywhere.
    pub fn a_at_least_b(self) -> bool {
        matches!(self, Dominance::Equal | Dominance::ADominates)
    }
}

/// Compares `a` and `b` on the given sets.
pub fn dominates_on<'s, A, B>(a: &A, b: &B, sets: impl IntoIterator<Item = &'s IndexSet>) -> Dominance
where
    A: DiscoveryProcedure + ?Sized,
    B: DiscoveryProcedure + ?Sized,
{
    let (mut above, mut below) = (false, false);
    for s in sets {
        let (x, y) = (a.eval(s), b.eval(s));
        above |= x > y;
        below |= x < y;
        if above && below {
            break;
        }
    }
    match (above, below) {
        (false, false) => Dominance::Equal,
        (true, false) => Dominance::ADominates,
        (false, true) => Dominance::BDominates,
        (true, true) => Dominance::Incomparable,
    }
}

/// Compares `a` and `b` on every subset of their common family.
pub fn dominates<A, B>(a: &A, b: &B) -> Result<Dominance>
where
    A: DiscoveryProcedure + ?Sized,
    B: DiscoveryProcedure + ?Sized,
{
    if a.family() != b.family() {
        return Err(Error::Domain("procedures are defined on different families".into()));
    }
    check_oracle_scale(a.family(), ORACLE_LIMIT)?;
    let fam = a.family();
    let sets: Vec<IndexSet> = (0..=full_mask(fam.len()))
        .map(|m| IndexSet::from_mask(fam, m))
        .collect();
    Ok(dominates_on(a, b, &sets))
}

/// `phi_S = 1{ d^S(S) > 0 }`.
pub fn induce_local_test<B, F>(builder: F, set: &IndexSet) -> Result<bool>
where
    B: DiscoveryProcedure,
    F: Fn(&IndexSet) -> Result<B>,
{
    Ok(builder(set)?.eval(set) > 0)
}

/// The suite `phi_S = 1{ d(S) > 0 }` induced by a single procedure.
#[derive(Debug, Clone)]
pub struct InducedSuite<P> {
    d: P,
}

impl<P: DiscoveryProcedure> InducedSuite<P> {
    pub fn new(d: P) -> Self {
        Self { d }
    }
}

impl<P: DiscoveryProcedure> LocalTest for InducedSuite<P> {
    fn rejects(&self, set: &IndexSet) -> bool {
        set.is_subset_of(self.d.family()) && self.d.eval(set) > 0
    }

    fn describe(&self) -> String {
        "local tests induced by a procedure".to_string()
    }
}

/// A single-family procedure viewed on a larger family `J`: `d^J(S) = d(S)`
/// when `S` lies in the original family and zero otherwise.
#[derive(Clone)]
pub struct TrivialEmbedding {
    base: Arc<dyn DiscoveryProcedure>,
    family: IndexSet,
}

impl TrivialEmbedding {
    pub fn new(base: Arc<dyn DiscoveryProcedure>, family: IndexSet) -> Self {
        Self { base, family }
    }

    /// A builder for [`check_monotone_stack`] and friends.
    pub fn builder(base: Arc<dyn DiscoveryProcedure>) -> impl Fn(&IndexSet) -> Result<Self> {
        move |family| Ok(Self::new(Arc::clone(&base), family.clone()))
    }
}

impl DiscoveryProcedure for TrivialEmbedding {
    fn family(&self) -> &IndexSet {
        &self.family
    }

    fn eval(&self, set: &IndexSet) -> usize {
        if set.is_subset_of(self.base.family()) {
            self.base.eval(set)
        } else {
            0
        }
    }

    fn provenance(&self) -> Provenance {
        Provenance::Embedded
    }
}
