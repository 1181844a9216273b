//! Closed-loop propagation, contact detection, invariant monitoring,
//! seed sweeps and phase portraits.

mod export;
mod integrate;
mod portrait;
mod scenario;
mod sweep;

pub use export::{fmt_float, log_header, write_log_csv, write_log_csv_file, write_summary_json, write_table};
pub use integrate::{detect_contact, integrate_step, HeldInput};
pub use portrait::{
    level_set_polyline, level_speed, run_phase_portrait, state_from_phase, write_portrait, LevelSet, Portrait,
    PortraitSettings, PortraitTrajectory, StartRegion,
};
pub use scenario::{
    run_scenario, ControlLaw, LogMeta, Plant, Scenario, SimClass, SimOutcome, StepRecord, TrajectoryLog,
    ViolationEvent, ViolationKind, LAYER_EXIT_TOL, MARGIN_TOL, SAFETY_TOL,
};
pub use sweep::{run_sweep, Stats, SweepReport, SweepRun};
