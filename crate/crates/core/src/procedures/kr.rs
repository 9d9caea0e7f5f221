//! The Katsevich–Romano procedure and its three successive improvements.
//!
//! With `c = -ln(alpha) / ln(1 - ln(alpha))` and `K_i` the `i` hypotheses with
//! the smallest p-values in the family `I` (`m = |I|`), the original procedure
//! makes the nested statements
//!
//! ```text
//! d(K_i) = max(0, ceil(i - c (1 + m p_(i))))
//! ```
//!
//! and is zero elsewhere. Interpolation, closed testing, and recalibration of
//! `c` each improve it uniformly.

use std::sync::Arc;

use crate::closed_testing::ClosedShortcut;
use crate::error::{Error, Result};
use crate::local_tests::{kr_c_constant, CTable, CriticalValueFamily};
use crate::procedure::{BoxedProcedure, DiscoveryProcedure, Provenance};
use crate::pvalues::PValueVector;
use crate::scalar::{floor_i64, Real};
use crate::set::IndexSet;

/// `ceil(k - c (1 + m p))`, computed as `k - floor(c (1 + m p))`.
#[inline]
fn kr_term<T: Real>(c: T, m: usize, k: usize, p: T) -> i64 {
    k as i64 - floor_i64(c * (T::one() + T::from_count(m) * p))
}

/// Original K&R bound on `K_i`, given the `i` smallest p-values of a family of
/// size `m` in increasing order.
pub fn kr_original_sorted<T: Real>(c: T, m: usize, prefix: &[T]) -> usize {
    match prefix.last() {
        Some(&p) => kr_term(c, m, prefix.len(), p).max(0) as usize,
        None => 0,
    }
}

/// Interpolated K&R bound `max(0, max_k ceil(k - c (1 + m p_(k:S))))` given
/// the p-values of `S` in increasing order.
pub fn kr_coherent_sorted<T: Real>(c: T, m: usize, sorted: &[T]) -> usize {
    sorted
        .iter()
        .enumerate()
        .map(|(k, &p)| kr_term(c, m, k + 1, p))
        .max()
        .unwrap_or(0)
        .max(0) as usize
}

fn check_family<T: Real>(p: &PValueVector<T>, family: &IndexSet) -> Result<()> {
    match family.as_slice().last() {
        Some(&id) if id > p.len() => Err(Error::Domain(format!(
            "family refers to id {id} beyond the {} available p-values",
            p.len()
        ))),
        _ => Ok(()),
    }
}

/// The original K&R procedure, nonzero only on the nested sets `K_i`.
#[derive(Debug, Clone)]
pub struct KrOriginal<T> {
    family: IndexSet,
    p: Arc<PValueVector<T>>,
    c: T,
    /// Position of each id in the family's p-value order, `usize::MAX` for ids
    /// outside the family.
    rank: Vec<usize>,
}

impl<T: Real> KrOriginal<T> {
    pub fn new(alpha: T, p: Arc<PValueVector<T>>, family: &IndexSet) -> Result<Self> {
        Self::with_constant(kr_c_constant(alpha)?, p, family)
    }

    pub fn with_constant(c: T, p: Arc<PValueVector<T>>, family: &IndexSet) -> Result<Self> {
        check_family(&p, family)?;
        let mut rank = vec![usize::MAX; p.len() + 1];
        for (pos, id) in p.order(family).into_iter().enumerate() {
            rank[id] = pos;
        }
        Ok(Self {
            family: family.clone(),
            p,
            c,
            rank,
        })
    }

    pub fn constant(&self) -> T {
        self.c
    }

    /// The nested sets `K_1 ⊂ K_2 ⊂ ... ⊂ K_m`, as the order of entry.
    pub fn entry_order(&self) -> Vec<usize> {
        self.p.order(&self.family)
    }

    fn is_nested_set(&self, set: &IndexSet) -> bool {
        set.iter()
            .all(|id| self.rank.get(id).is_some_and(|&r| r < set.len()))
    }
}

impl<T: Real> DiscoveryProcedure for KrOriginal<T> {
    fn family(&self) -> &IndexSet {
        &self.family
    }

    fn eval(&self, set: &IndexSet) -> usize {
        if set.is_empty() || !self.is_nested_set(set) {
            return 0;
        }
        let p_max = set
            .iter()
            .map(|id| self.p.get(id))
            .fold(T::zero(), |a, b| a.max(b));
        kr_term(self.c, self.family.len(), set.len(), p_max).max(0) as usize
    }

    fn provenance(&self) -> Provenance {
        Provenance::KrOriginal
    }

    fn closed_form_interpolation(&self) -> Option<BoxedProcedure> {
        Some(Box::new(KrCoherent {
            family: self.family.clone(),
            p: Arc::clone(&self.p),
            c: self.c,
        }))
    }
}

/// The interpolated (coherent) K&R procedure.
#[derive(Debug, Clone)]
pub struct KrCoherent<T> {
    family: IndexSet,
    p: Arc<PValueVector<T>>,
    c: T,
}

impl<T: Real> KrCoherent<T> {
    pub fn new(alpha: T, p: Arc<PValueVector<T>>, family: &IndexSet) -> Result<Self> {
        Self::with_constant(kr_c_constant(alpha)?, p, family)
    }

    pub fn with_constant(c: T, p: Arc<PValueVector<T>>, family: &IndexSet) -> Result<Self> {
        check_family(&p, family)?;
        Ok(Self {
            family: family.clone(),
            p,
            c,
        })
    }
}

impl<T: Real> DiscoveryProcedure for KrCoherent<T> {
    fn family(&self) -> &IndexSet {
        &self.family
    }

    fn eval(&self, set: &IndexSet) -> usize {
        kr_coherent_sorted(self.c, self.family.len(), &self.p.sorted_within(set))
    }

    fn provenance(&self) -> Provenance {
        Provenance::KrCoherent
    }
}

/// The four stages of the K&R improvement chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KrMethod {
    Original,
    Coherent,
    Closed,
    Admissible,
}

impl KrMethod {
    pub const ALL: [KrMethod; 4] = [
        KrMethod::Original,
        KrMethod::Coherent,
        KrMethod::Closed,
        KrMethod::Admissible,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KrMethod::Original => "original",
            KrMethod::Coherent => "coherent",
            KrMethod::Closed => "closed",
            KrMethod::Admissible => "admissible",
        }
    }
}

impl std::fmt::Display for KrMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for KrMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        KrMethod::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Validation(format!("unknown K&R method '{s}'")))
    }
}

/// Builds one stage of the K&R chain on `family`. `c_table` is needed only
/// for [`KrMethod::Admissible`]; without it the shipped `alpha = 0.05` table
/// is used.
pub fn kr_procedure<T: Real>(
    method: KrMethod,
    alpha: T,
    p: Arc<PValueVector<T>>,
    family: &IndexSet,
    c_table: Option<&CTable<T>>,
) -> Result<BoxedProcedure> {
    Ok(match method {
        KrMethod::Original => Box::new(KrOriginal::new(alpha, p, family)?),
        KrMethod::Coherent => Box::new(KrCoherent::new(alpha, p, family)?),
        KrMethod::Closed => {
            Box::new(ClosedShortcut::new(&CriticalValueFamily::kr_original(alpha)?, p, family)?)
        }
        KrMethod::Admissible => {
            let fam = match c_table {
                Some(t) => CriticalValueFamily::kr_admissible(alpha, t.clone())?,
                None => CriticalValueFamily::kr_admissible_default(alpha)?,
            };
            Box::new(ClosedShortcut::new(&fam, p, family)?)
        }
    })
}
