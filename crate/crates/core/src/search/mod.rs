//! Interaction channel and single-arm incentive searches.

pub mod binary;
pub mod channel;

pub use binary::{bisection_search, ceil_log2, noisy_binary_search, SearchExit, SearchOutcome, SearchState};
pub use channel::{Block, Channel, Observation, PublicStats, ScriptedChannel};
