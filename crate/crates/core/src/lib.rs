//! Simulation of repeated principal-agent bandit games.

pub mod env;
pub mod harness;
pub mod error;
pub mod explore;
pub mod geometry;
pub mod iid;
pub mod linalg;
pub mod linear;
pub mod phase;
pub mod rng;
pub mod search;

pub use error::{Error, Result};
