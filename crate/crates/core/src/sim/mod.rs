//! Bot policies and the Monte Carlo harness that pits them against each other.

mod experiment;
mod export;
mod policy;
pub mod stats;

pub use experiment::{
    aggregate, play_game, recompute_from_replays, run_experiment, tally_log, ExperimentConfig,
    ExperimentMeta, ExperimentResult, GameRecord, GameTally, Outcome, PolicySummary, Side,
    SideRecord, SimError,
};
pub use export::{export_results, parse_results, ExportError, ExportFormat, CSV_COLUMNS};
pub use policy::{
    builtin_policies, policy_by_name, progress_probability, AlwaysIncur, Balanced, NeverIncur,
    Policy, PolicyRng, UniformRandom, POLICY_NAMES,
};
