//! Closed testing: the exhaustive oracle, the Simes-like shortcut, and the
//! familywise-error projections.

mod fwer;
mod oracle;
mod shortcut;
mod suites;

pub use fwer::{fwer_projection, fwer_rejections, is_additive, is_consonant, FwerProjection};
pub use oracle::{
    brute_force_d, brute_force_g, closed_testing, effective_local_test, ClosedTestingOracle,
};
pub use shortcut::{compute_shortcut_state, shortcut_d, ClosedShortcut, ShortcutState};
pub use suites::{
    AcceptAll, BonferroniTest, FixedSequenceTest, FnTest, LocalTest, RejectNonempty,
    SimesLikeTest,
};

pub(crate) use fwer::coherent_violation;
pub(crate) use oracle::full_mask;
