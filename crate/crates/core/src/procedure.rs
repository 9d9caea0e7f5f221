//! Procedures with a true discovery guarantee: maps `S -> d(S)` giving a
//! simultaneous lower bound on the number of false hypotheses in `S`.
//!
//! Two realizations exist. [`ExtensionalProcedure`] stores an explicit value
//! for every subset of a small family and backs the exhaustive oracle
//! routines. Everything else answers queries on demand.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::set::{IndexSet, MASK_BITS};

/// Largest family the exponential routines will enumerate.
pub const ORACLE_LIMIT: usize = 20;

/// Largest family for routines that enumerate all `3^n` disjoint pairs.
pub const PAIR_ORACLE_LIMIT: usize = 16;

/// Which construction produced a procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Table,
    KFwer,
    Fdx,
    Jer,
    IntersectionFwer,
    PartialConjunction,
    Pi0Interval,
    KrOriginal,
    KrCoherent,
    ClosedTesting,
    FwerProjection,
    Interpolated,
    Embedded,
    Custom,
}

pub type BoxedProcedure = Box<dyn DiscoveryProcedure>;

pub trait DiscoveryProcedure: Send + Sync {
    /// The ambient family `I`.
    fn family(&self) -> &IndexSet;

    /// `d(S)` for `S` a subset of [`family`](Self::family). The subset
    /// relation is not checked; see [`bound`](Self::bound).
    fn eval(&self, set: &IndexSet) -> usize;

    fn provenance(&self) -> Provenance {
        Provenance::Custom
    }

    /// A closed-form interpolation, when the structure of the procedure
    /// admits one.
    fn closed_form_interpolation(&self) -> Option<BoxedProcedure> {
        None
    }

    /// Checked query: errors when `set` is not a subset of the family.
    fn bound(&self, set: &IndexSet) -> Result<usize> {
        if !set.is_subset_of(self.family()) {
            return Err(Error::Domain(format!(
                "set {{{set}}} is not contained in the family"
            )));
        }
        Ok(self.eval(set))
    }
}

impl<P: DiscoveryProcedure + ?Sized> DiscoveryProcedure for Box<P> {
    fn family(&self) -> &IndexSet {
        (**self).family()
    }
    fn eval(&self, set: &IndexSet) -> usize {
        (**self).eval(set)
    }
    fn provenance(&self) -> Provenance {
        (**self).provenance()
    }
    fn closed_form_interpolation(&self) -> Option<BoxedProcedure> {
        (**self).closed_form_interpolation()
    }
}

pub(crate) fn check_oracle_scale(family: &IndexSet, limit: usize) -> Result<()> {
    if family.len() > limit {
        return Err(Error::OracleScale {
            size: family.len(),
            limit,
        });
    }
    Ok(())
}

/// Dense table over every subset of a family of at most [`ORACLE_LIMIT`] ids,
/// addressed by bit mask over the family's positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionalProcedure {
    family: IndexSet,
    values: Vec<u32>,
    provenance: Provenance,
}

impl ExtensionalProcedure {
    pub fn zero(family: IndexSet) -> Result<Self> {
        check_oracle_scale(&family, ORACLE_LIMIT)?;
        let values = vec![0; 1usize << family.len()];
        Ok(Self {
            family,
            values,
            provenance: Provenance::Table,
        })
    }

    /// Tabulates `f` over all masks. Values are clamped into `[0, |S|]`.
    pub fn from_mask_fn(family: IndexSet, f: impl Fn(u64) -> usize) -> Result<Self> {
        check_oracle_scale(&family, ORACLE_LIMIT)?;
        let values = (0..1u64 << family.len())
            .map(|mask| f(mask).min(mask.count_ones() as usize) as u32)
            .collect();
        Ok(Self {
            family,
            values,
            provenance: Provenance::Table,
        })
    }

    /// Evaluates any procedure on every subset of its family.
    pub fn materialize<P: DiscoveryProcedure + ?Sized>(d: &P) -> Result<Self> {
        let family = d.family().clone();
        check_oracle_scale(&family, ORACLE_LIMIT)?;
        let values = (0..1u64 << family.len())
            .map(|mask| d.eval(&IndexSet::from_mask(&family, mask)) as u32)
            .collect();
        Ok(Self {
            family,
            values,
            provenance: d.provenance(),
        })
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    /// Sets `d(S)`; rejects values above `|S|`.
    pub fn set(&mut self, set: &IndexSet, value: usize) -> Result<()> {
        let mask = set.mask_within(&self.family).ok_or_else(|| {
            Error::Domain(format!("set {{{set}}} is not contained in the family"))
        })?;
        if value > set.len() {
            return Err(Error::Validation(format!(
                "bound {value} exceeds the size of {{{set}}}"
            )));
        }
        self.values[mask as usize] = value as u32;
        Ok(())
    }

    #[inline]
    pub fn eval_mask(&self, mask: u64) -> usize {
        self.values[mask as usize] as usize
    }

    pub fn len_bits(&self) -> usize {
        self.family.len()
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    /// Two-column text form: one `ids<TAB>bound` record per nonzero entry,
    /// preceded by a `# family` line. Absent subsets are zero.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# family\t{}", self.family);
        for (mask, &v) in self.values.iter().enumerate() {
            if v > 0 {
                let s = IndexSet::from_mask(&self.family, mask as u64);
                let _ = writeln!(out, "{s}\t{v}");
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let family = loop {
            let (no, line) = lines
                .next()
                .ok_or_else(|| Error::Validation("missing '# family' header".into()))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let rest = line.strip_prefix("# family").ok_or_else(|| {
                Error::Validation(format!("line {}: expected '# family' header", no + 1))
            })?;
            break parse_ids(rest, no + 1)?;
        };
        let mut table = Self::zero(family)?;
        for (no, line) in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (ids, bound) = line.split_once('\t').ok_or_else(|| {
                Error::Validation(format!("line {}: expected '<ids>\\t<bound>'", no + 1))
            })?;
            let set = parse_ids(ids, no + 1)?;
            let bound: usize = bound.trim().parse().map_err(|_| {
                Error::Validation(format!("line {}: bad bound '{}'", no + 1, bound.trim()))
            })?;
            table
                .set(&set, bound)
                .map_err(|e| Error::Validation(format!("line {}: {e}", no + 1)))?;
        }
        Ok(table)
    }
}

fn parse_ids(text: &str, line: usize) -> Result<IndexSet> {
    let ids = text
        .split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::Validation(format!("line {line}: bad id '{t}'")))
        })
        .collect::<Result<Vec<_>>>()?;
    IndexSet::try_new(ids).map_err(|e| Error::Validation(format!("line {line}: {e}")))
}

impl DiscoveryProcedure for ExtensionalProcedure {
    fn family(&self) -> &IndexSet {
        &self.family
    }

    fn eval(&self, set: &IndexSet) -> usize {
        match set.mask_within(&self.family) {
            Some(mask) => self.eval_mask(mask),
            None => 0,
        }
    }

    fn provenance(&self) -> Provenance {
        self.provenance
    }
}

/// Procedure that is zero except on finitely many listed sets. This is the
/// shape of every classical adapter.
#[derive(Debug, Clone)]
pub struct SparseProcedure {
    family: IndexSet,
    entries: HashMap<IndexSet, usize>,
    provenance: Provenance,
    kfwer: Option<(IndexSet, usize)>,
}

impl SparseProcedure {
    pub fn new(family: IndexSet, provenance: Provenance) -> Self {
        Self {
            family,
            entries: HashMap::new(),
            provenance,
            kfwer: None,
        }
    }

    /// Records `d(set) = value`, clamped into `[0, |set|]`.
    pub fn insert(&mut self, set: IndexSet, value: usize) -> Result<()> {
        if !set.is_subset_of(&self.family) {
            return Err(Error::Domain(format!(
                "set {{{set}}} is not contained in the family"
            )));
        }
        let value = value.min(set.len());
        if value > 0 {
            self.entries.insert(set, value);
        } else {
            self.entries.remove(&set);
        }
        Ok(())
    }

    pub(crate) fn with_kfwer(mut self, set: IndexSet, k: usize) -> Self {
        self.kfwer = Some((set, k));
        self
    }

    pub fn entries(&self) -> impl Iterator<Item = (&IndexSet, usize)> {
        self.entries.iter().map(|(s, &v)| (s, v))
    }
}

impl DiscoveryProcedure for SparseProcedure {
    fn family(&self) -> &IndexSet {
        &self.family
    }

    fn eval(&self, set: &IndexSet) -> usize {
        self.entries.get(set).copied().unwrap_or(0)
    }

    fn provenance(&self) -> Provenance {
        self.provenance
    }

    fn closed_form_interpolation(&self) -> Option<BoxedProcedure> {
        let (set, k) = self.kfwer.clone()?;
        Some(Box::new(InterpolatedKFwer {
            family: self.family.clone(),
            set,
            k,
        }))
    }
}

/// `S -> max(0, |S ∩ K| - k + 1)`: the interpolation of a k-FWER statement.
#[derive(Debug, Clone)]
pub struct InterpolatedKFwer {
    family: IndexSet,
    set: IndexSet,
    k: usize,
}

impl DiscoveryProcedure for InterpolatedKFwer {
    fn family(&self) -> &IndexSet {
        &self.family
    }

    fn eval(&self, set: &IndexSet) -> usize {
        (set.intersection(&self.set).len() + 1).saturating_sub(self.k)
    }

    fn provenance(&self) -> Provenance {
        Provenance::Interpolated
    }
}

const _: () = assert!(ORACLE_LIMIT < MASK_BITS);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extensional_rejects_oversized_bounds() {
        let mut t = ExtensionalProcedure::zero(IndexSet::full(3)).unwrap();
        assert!(t.set(&IndexSet::new([1, 2]), 3).is_err());
        assert!(t.set(&IndexSet::new([4]), 1).is_err());
        t.set(&IndexSet::new([1, 2]), 2).unwrap();
        assert_eq!(t.bound(&IndexSet::new([1, 2])).unwrap(), 2);
        assert_eq!(t.bound(&IndexSet::empty()).unwrap(), 0);
    }

    #[test]
    fn oracle_scale_guard() {
        assert!(matches!(
            ExtensionalProcedure::zero(IndexSet::full(ORACLE_LIMIT + 1)),
            Err(Error::OracleScale { .. })
        ));
    }

    #[test]
    fn text_format_round_trip() {
        let mut t = ExtensionalProcedure::zero(IndexSet::new([2, 5, 7])).unwrap();
        t.set(&IndexSet::new([2, 7]), 1).unwrap();
        t.set(&IndexSet::new([2, 5, 7]), 3).unwrap();
        let text = t.to_text();
        assert_eq!(text, "# family\t2 5 7\n2 7\t1\n2 5 7\t3\n");
        assert_eq!(ExtensionalProcedure::from_text(&text).unwrap(), t);
    }

    #[test]
    fn text_format_reports_line_numbers() {
        let err = ExtensionalProcedure::from_text("# family\t1 2\n1\t2\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn sparse_clamps_and_checks_family() {
        let mut d = SparseProcedure::new(IndexSet::full(4), Provenance::Jer);
        d.insert(IndexSet::new([1, 2]), 5).unwrap();
        assert_eq!(d.eval(&IndexSet::new([1, 2])), 2);
        assert!(d.insert(IndexSet::new([9]), 1).is_err());
    }
}
