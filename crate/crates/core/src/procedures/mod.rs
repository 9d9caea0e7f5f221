//! The procedure algebra: adapters for classical guarantees, the K&R chain,
//! interpolation, and structural checks.

mod adapters;
mod checks;
mod interpolation;
mod kr;

pub use adapters::{
    adapt_fdx, adapt_intersection_fwer, adapt_jer, adapt_kfwer, adapt_partial_conjunction,
    adapt_pi0_interval,
};
pub use checks::{
    check_monotone_stack, coherence_violation, dominates, dominates_on, induce_local_test,
    is_coherent, monotone_stack_violation, Dominance, InducedSuite, TrivialEmbedding,
};
pub use interpolation::{
    interpolate, interpolate_generic, interpolate_table, make_coherent, Interpolated,
};
pub use kr::{
    kr_coherent_sorted, kr_original_sorted, kr_procedure, KrCoherent, KrMethod, KrOriginal,
};
