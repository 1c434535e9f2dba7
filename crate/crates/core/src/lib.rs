//! Exact witnesses for keeping runners away from a stationary runner on a
//! unit circle, and for isolating the stationary runner by repeated removal.
//!
//! All `n` moving runners have distinct positive integer speeds and start at
//! position 0 together with the stationary runner (speed 0). Times are drawn
//! from the dyadic grid `t = b_1/2 + ... + b_P/2^P`, so every position is an
//! exact dyadic rational and every separation claim carried by a report can
//! be recomputed without rounding.
//!
//! The crate has four layers:
//!
//! - [`numerics`]: dyadic positions, circular distance, sector indexing.
//! - [`pmax`]: constructive witnesses placing many runners far from the
//!   stationary one (single-runner antipode, group majority sweep, moving
//!   window sweep), with per-runner distance reports.
//! - [`isolation`]: removal schedules that delete all runners separated by a
//!   method-specific threshold each step until nobody is left, plus
//!   closed-form step bounds.
//! - [`oracle`]: exhaustive search over all time vectors at a given scale,
//!   an adversarial instance generator, and a greedy max-removal schedule,
//!   used to certify the constructive guarantees independently.

pub mod error;
pub mod isolation;
pub mod numerics;
pub mod oracle;
pub mod pmax;

pub use error::{Error, Result};
pub use isolation::{
    isolate_t5, isolate_t6, isolate_t7, isolate_t8, t7_bound, t8_bound, theorem8_params,
    IsolationStep, IsolationTrace, Method, Theorem8Params,
};
pub use numerics::{
    bit_index, circ_dist, floor_lg, max_bit_index, on_sector_boundary, position, sector_index,
    BitIndex, Dyadic, ExactPosition, SeparationDistance, SpeedSet, TimeVector, MAX_SCALE,
};
pub use oracle::{
    adversarial_config, adversarial_config_at, brute_force_pmax, greedy_isolation_oracle,
    verify_time, AdversarialConfig, OracleConfig, OracleResult,
};
pub use pmax::{
    saved_fraction_bound, theorem1_time, theorem2_save, theorem3_save, window_save,
    window_save_detailed, Fraction, Group, GroupList, SaveReport, SectorSave, WindowRun,
    WindowStep,
};
