//! Experiment orchestration: game loop, regret ledgers, configuration and persistence.

pub mod config;
pub mod experiment;
pub mod game;
pub mod regret;
pub mod report;

pub use config::{Algorithm, ExperimentConfig, ModelSpec, Prior};
pub use experiment::{run_experiment, run_seed, summarize, RunOutput, RunSummary, CSV_HEADER};
pub use game::{Game, RoundRecord, Transcript};
pub use regret::RegretMode;
pub use report::{scaling_report, ScalingReport};
