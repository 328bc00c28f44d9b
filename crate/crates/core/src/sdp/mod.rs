//! SDP-guided random walk producing full colorings.

pub mod solver;
pub mod walk;

pub use solver::{
    build_coloring_sdp, residuals, solve_sdp_feasibility, solve_sdp_feasibility_with,
    RowConstraint, RowKind, SdpOptions, SdpResiduals, SdpSpec, VectorAssignment,
};
pub use walk::{
    bansal_walk, bansal_walk_with_rng, freeze_is_monotone, phase_ledger_check, HalvingStats,
    PhaseCheckLine, PhaseLedger, PhaseRecord, PhaseReport, WalkConfig, WalkFailure, WalkOutcome,
    WalkSchedule,
};
