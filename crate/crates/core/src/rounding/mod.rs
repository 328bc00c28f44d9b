//! Entropy rounding of a fractional vector to a binary one.

pub mod basic;
pub mod dyadic;
pub mod engine;
pub mod instance;
pub mod report;

pub use basic::{reduce_to_basic, reduce_to_basic_with_rng, BasicReduction};
pub use dyadic::{dyadic_snap, DyadicVector, DEFAULT_BIT_DEPTH};
pub use engine::{entropy_round, entropy_round_with_rng, goodness_check, RoundingConfig};
pub use instance::{append_objective_row, RoundingInstance};
pub use report::{tail_report, Backend, LevelRecord, RoundingReport, TailLine, TailReport};
