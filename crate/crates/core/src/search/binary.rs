//! Incentive searches for a single target arm.

use super::channel::{Block, Channel};
use crate::env::Incentive;
use crate::error::Result;

/// `ceil(log2 t)` for `t >= 1`.
pub fn ceil_log2(t: u64) -> u32 {
    if t <= 1 {
        0
    } else {
        64 - (t - 1).leading_zeros()
    }
}

/// Which exit a search took.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchExit {
    /// The bisection counter ran out on an accepted probe: `y_mid + 1/T`.
    Converged,
    /// Enough re-checks of the upper bound succeeded: `y_upper + 2/T`.
    Confirmed,
    /// A re-check of the upper bound failed: `y_upper + 1/T + 1/N_a + 2/min_i N_i`.
    CheckFailed,
    /// Plain bisection finished: `y_upper + 1/T`.
    Bisected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOutcome {
    pub value: f64,
    pub exit: SearchExit,
    pub rounds: u64,
}

/// Bracket state of the search with asymmetric check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchState {
    pub upper: f64,
    pub lower: f64,
    pub y_upper: f64,
    pub c1: u32,
    pub c2: u32,
    pub check: bool,
}

impl Default for SearchState {
    fn default() -> Self {
        Self { upper: 1.0, lower: 0.0, y_upper: 1.0, c1: 0, c2: 0, check: false }
    }
}

/// Noisy binary search with asymmetric check for the smallest incentive that makes the agent
/// pull `target`.
///
/// Against an agent that does not explore during the call, the returned value exceeds the
/// agent's optimal incentive for `target` at the exit round, by at most
/// `4/T + L/N_target + 2/min_i N_i` with `L = ceil(log2 T)`.
pub fn noisy_binary_search<C: Channel + ?Sized>(channel: &mut C, target: usize) -> Result<SearchOutcome> {
    noisy_binary_search_traced(channel, target, |_| {})
}

/// [`noisy_binary_search`] reporting the bracket state before each round.
pub fn noisy_binary_search_traced<C, F>(channel: &mut C, target: usize, mut trace: F) -> Result<SearchOutcome>
where
    C: Channel + ?Sized,
    F: FnMut(&SearchState),
{
    let k = channel.num_arms();
    let horizon = channel.horizon();
    let t_inv = 1.0 / horizon as f64;
    let limit = ceil_log2(horizon);
    let start = channel.round();
    let mut s = SearchState::default();
    loop {
        trace(&s);
        if !s.check {
            let mid = 0.5 * (s.upper + s.lower);
            s.c1 += 1;
            let obs = channel.propose(&Incentive::one_hot(target, mid, k)?, Block::Search)?;
            if obs.arm == target {
                if s.c1 >= limit {
                    return Ok(SearchOutcome {
                        value: mid + t_inv,
                        exit: SearchExit::Converged,
                        rounds: channel.round() - start,
                    });
                }
                s.y_upper = mid;
                s.upper = mid;
            } else {
                s.check = true;
                s.lower = mid;
            }
        } else {
            let n_target = channel.plays()[target].max(1) as f64;
            let n_min = channel.min_plays().max(1) as f64;
            let obs = channel.propose(&Incentive::one_hot(target, s.y_upper, k)?, Block::Search)?;
            if obs.arm == target {
                s.c2 += 1;
                if s.c2 == limit {
                    return Ok(SearchOutcome {
                        value: s.y_upper + 2.0 * t_inv,
                        exit: SearchExit::Confirmed,
                        rounds: channel.round() - start,
                    });
                }
                s.check = false;
            } else {
                return Ok(SearchOutcome {
                    value: s.y_upper + t_inv + 1.0 / n_target + 2.0 / n_min,
                    exit: SearchExit::CheckFailed,
                    rounds: channel.round() - start,
                });
            }
        }
    }
}

/// Plain bisection for an agent whose optimal incentive does not drift.
///
/// Runs `ceil(log2 T)` probes and returns the last accepted level plus `1/T`, which lies in
/// `(pi*, pi* + 2/T]` when the threshold is static.
pub fn bisection_search<C: Channel + ?Sized>(channel: &mut C, target: usize) -> Result<SearchOutcome> {
    let k = channel.num_arms();
    let horizon = channel.horizon();
    let start = channel.round();
    let (mut lower, mut upper) = (0.0f64, 1.0f64);
    for _ in 0..ceil_log2(horizon) {
        let mid = 0.5 * (lower + upper);
        let obs = channel.propose(&Incentive::one_hot(target, mid, k)?, Block::Search)?;
        if obs.arm == target {
            upper = mid;
        } else {
            lower = mid;
        }
    }
    Ok(SearchOutcome {
        value: upper + 1.0 / horizon as f64,
        exit: SearchExit::Bisected,
        rounds: channel.round() - start,
    })
}
