//! Convex bodies, Monte Carlo volumes, the cutting-plane parameter search and G-optimal designs.

pub mod body;
pub mod design;
pub mod msp;
pub mod volume;

pub use body::{ConvexBody, Halfspace};
pub use design::{approx_g_optimal_design, DesignWeights};
pub use msp::{msp_search, MspOptions, MspOutcome};
pub use volume::{steiner_halving_cut, volume_fraction_above};
