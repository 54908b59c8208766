//! The principal's only view of the game: propose an incentive, observe an arm and a reward.

use serde::{Deserialize, Serialize};

use crate::env::Incentive;
use crate::error::{Error, Result};

/// What a round was spent on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Block {
    Stabilize,
    Search,
    Explore,
    Eliminate,
}

impl Block {
    pub const ALL: [Block; 4] = [Block::Stabilize, Block::Search, Block::Explore, Block::Eliminate];

    pub fn as_str(self) -> &'static str {
        match self {
            Block::Stabilize => "stabilize",
            Block::Search => "search",
            Block::Explore => "explore",
            Block::Eliminate => "eliminate",
        }
    }
}

impl std::fmt::Display for Block {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Result of one proposal: the arm the agent pulled and the principal's reward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub arm: usize,
    pub reward: f64,
}

/// Counts and reward sums the principal keeps from its own observations.
#[derive(Debug, Clone, PartialEq)]
pub struct PublicStats {
    plays: Vec<u64>,
    sums: Vec<f64>,
}

impl PublicStats {
    pub fn new(num_arms: usize) -> Self {
        Self { plays: vec![0; num_arms], sums: vec![0.0; num_arms] }
    }

    pub fn record(&mut self, arm: usize, reward: f64) {
        self.plays[arm] += 1;
        self.sums[arm] += reward;
    }

    pub fn plays(&self) -> &[u64] {
        &self.plays
    }

    /// `theta_hat_a`, zero for arms never played.
    pub fn means(&self) -> Vec<f64> {
        self.plays
            .iter()
            .zip(&self.sums)
            .map(|(&n, &s)| if n == 0 { 0.0 } else { s / n as f64 })
            .collect()
    }
}

/// Interaction channel between a principal and the game.
///
/// Every successful [`Channel::propose`] advances the round counter by one.
pub trait Channel {
    fn num_arms(&self) -> usize;

    fn horizon(&self) -> u64;

    /// Rounds played so far.
    fn round(&self) -> u64;

    /// Public play counts `N_i(t)`.
    fn plays(&self) -> &[u64];

    /// The principal's empirical means `theta_hat_i(t)`.
    fn principal_means(&self) -> Vec<f64>;

    /// Tag subsequent rounds with phase `m`.
    fn set_phase(&mut self, _phase: u32) {}

    /// Play one round. Fails with [`Error::Exhausted`] once the horizon is reached.
    fn propose(&mut self, incentive: &Incentive, block: Block) -> Result<Observation>;

    fn remaining(&self) -> u64 {
        self.horizon().saturating_sub(self.round())
    }

    fn min_plays(&self) -> u64 {
        self.plays().iter().copied().min().unwrap_or(0)
    }
}

/// A channel whose answers come from a closure `(incentive, round) -> arm`.
///
/// Useful for driving searches against scripted or adversarial responders.
pub struct ScriptedChannel<F> {
    respond: F,
    horizon: u64,
    round: u64,
    stats: PublicStats,
    log: Vec<(Incentive, usize)>,
}

impl<F> ScriptedChannel<F>
where
    F: FnMut(&Incentive, u64) -> usize,
{
    pub fn new(num_arms: usize, horizon: u64, respond: F) -> Self {
        Self { respond, horizon, round: 0, stats: PublicStats::new(num_arms), log: Vec::new() }
    }

    /// Pretend each arm has already been played `plays[i]` times with zero reward.
    pub fn with_plays(mut self, plays: &[u64]) -> Self {
        for (arm, &n) in plays.iter().enumerate() {
            for _ in 0..n {
                self.stats.record(arm, 0.0);
            }
        }
        self
    }

    pub fn log(&self) -> &[(Incentive, usize)] {
        &self.log
    }
}

impl<F> Channel for ScriptedChannel<F>
where
    F: FnMut(&Incentive, u64) -> usize,
{
    fn num_arms(&self) -> usize {
        self.stats.plays().len()
    }

    fn horizon(&self) -> u64 {
        self.horizon
    }

    fn round(&self) -> u64 {
        self.round
    }

    fn plays(&self) -> &[u64] {
        self.stats.plays()
    }

    fn principal_means(&self) -> Vec<f64> {
        self.stats.means()
    }

    fn propose(&mut self, incentive: &Incentive, _block: Block) -> Result<Observation> {
        if self.round >= self.horizon {
            return Err(Error::Exhausted { round: self.round });
        }
        self.round += 1;
        let arm = (self.respond)(incentive, self.round);
        if arm >= self.num_arms() {
            return Err(Error::ArmOutOfRange { arm, num_arms: self.num_arms() });
        }
        self.stats.record(arm, 0.0);
        self.log.push((incentive.clone(), arm));
        Ok(Observation { arm, reward: 0.0 })
    }
}
