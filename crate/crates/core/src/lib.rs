//! Simultaneous true-discovery bounds through closed testing.
//!
//! A [`DiscoveryProcedure`] maps every subset `S` of a hypothesis family to a
//! lower confidence bound `d(S)` on the number of false hypotheses in `S`,
//! valid simultaneously over all `S`. The crate provides Simes-like local
//! tests, an exhaustive closed-testing oracle, the quadratic-time shortcut,
//! the Katsevich–Romano improvement chain, interpolation and coherence
//! checks, and Monte Carlo tooling for calibration and simulation.
//!
//! Numeric routines are generic over [`Real`]; the aliases at the crate root
//! fix the scalar to `f64` (or `f32` with an `F32` suffix).

pub mod calibration;
pub mod closed_testing;
pub mod error;
pub mod fdp;
pub mod procedure;
pub mod procedures;
pub mod pvalues;
pub mod scalar;
pub mod set;
pub mod simulation;
pub mod verify;

pub use calibration::{calibrate_cm, estimate_size, exhaustion_gap, CalibrationResult};
pub use closed_testing::{
    brute_force_d, brute_force_g, compute_shortcut_state, effective_local_test, shortcut_d,
};
pub use error::{Error, Result};
pub use fdp::{fdp_to_tdg, tdg_to_fdp, FdpBound};
pub use local_tests::{
    fixed_sequence_schedule, kr_c_constant, local_test, AlphaSchedule, CTable,
    CriticalValueFamily, CustomTable, FamilyKind,
};
pub use procedure::{
    BoxedProcedure, DiscoveryProcedure, ExtensionalProcedure, Provenance, SparseProcedure,
    ORACLE_LIMIT, PAIR_ORACLE_LIMIT,
};
pub use procedures::{interpolate, is_coherent, kr_procedure, KrMethod};
pub use pvalues::PValueVector;
pub use scalar::Real;
pub use set::IndexSet;
pub use simulation::{generate_pvalues, run_table2, SimulationConfig, Table2Result};

pub type PValues = PValueVector<f64>;
pub type Thresholds = CriticalValueFamily<f64>;
pub type Shortcut = closed_testing::ShortcutState<f64>;
pub type Schedule = AlphaSchedule<f64>;

pub type PValuesF32 = PValueVector<f32>;
pub type ThresholdsF32 = CriticalValueFamily<f32>;
pub type ShortcutF32 = closed_testing::ShortcutState<f32>;
pub type ScheduleF32 = AlphaSchedule<f32>;
