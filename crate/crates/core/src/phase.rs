//! Per-phase bookkeeping shared by all principals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::search::{Block, Channel, Observation, SearchOutcome};
use crate::env::Incentive;

/// What happened in one phase of an elimination principal.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub phase: u32,
    pub active: Vec<usize>,
    pub bad: Vec<usize>,
    /// Exploration budget per active arm.
    pub explore_len: u64,
    /// Stabilization budget per bad arm (or total over bad arms for the linear principal).
    pub stabilize_len: u64,
    pub start_round: u64,
    /// Arms moved to the bad set at the end of the phase.
    pub eliminated: Vec<usize>,
    /// `(arm, value, rounds)` of every search run in the phase.
    pub searches: Vec<(usize, f64, u64)>,
    /// `(arm, incentive)` actually offered during exploration.
    pub incentives: Vec<(usize, f64)>,
    /// `(arm, Y, c)`: rounds and misses of every incentive-test iteration.
    pub counters: Vec<(usize, u64, u64)>,
    /// `(arm, votes)` collected by median elimination.
    pub votes: Vec<(usize, Vec<u8>)>,
    /// Rounds spent per block, in `Block::ALL` order.
    pub block_rounds: [u64; 4],
    pub completed: bool,
}

impl PhaseRecord {
    pub fn new(phase: u32, active: &[usize], bad: &[usize], start_round: u64) -> Self {
        Self { phase, active: active.to_vec(), bad: bad.to_vec(), start_round, ..Self::default() }
    }

    pub fn rounds(&self, block: Block) -> u64 {
        self.block_rounds[Block::ALL.iter().position(|b| *b == block).unwrap_or(0)]
    }

    pub fn total_rounds(&self) -> u64 {
        self.block_rounds.iter().sum()
    }
}

/// Full history of a principal run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PrincipalLog {
    pub phases: Vec<PhaseRecord>,
}

impl PrincipalLog {
    /// Phase at the end of which `arm` was eliminated.
    pub fn elimination_phase(&self, arm: usize) -> Option<u32> {
        self.phases.iter().find(|p| p.eliminated.contains(&arm)).map(|p| p.phase)
    }

    pub fn eliminated(&self) -> Vec<(usize, u32)> {
        self.phases.iter().flat_map(|p| p.eliminated.iter().map(move |&a| (a, p.phase))).collect()
    }

    pub fn completed_phases(&self) -> u32 {
        self.phases.iter().filter(|p| p.completed).count() as u32
    }

    fn current(&mut self) -> &mut PhaseRecord {
        self.phases.last_mut().expect("phase started")
    }
}

/// A channel wrapper that attributes every round to the current phase record.
pub struct Recorder<'a, C: ?Sized> {
    pub channel: &'a mut C,
    pub log: PrincipalLog,
}

impl<'a, C: Channel + ?Sized> Recorder<'a, C> {
    pub fn new(channel: &'a mut C) -> Self {
        Self { channel, log: PrincipalLog::default() }
    }

    pub fn begin_phase(&mut self, phase: u32, active: &[usize], bad: &[usize]) -> &mut PhaseRecord {
        self.channel.set_phase(phase);
        let start = self.channel.round();
        self.log.phases.push(PhaseRecord::new(phase, active, bad, start));
        self.log.current()
    }

    pub fn record(&mut self) -> &mut PhaseRecord {
        self.log.current()
    }

    pub fn record_search(&mut self, arm: usize, outcome: &SearchOutcome) {
        self.log.current().searches.push((arm, outcome.value, outcome.rounds));
    }

    /// Propose the same incentive `rounds` times.
    pub fn repeat(&mut self, incentive: &Incentive, block: Block, rounds: u64) -> Result<()> {
        for _ in 0..rounds {
            self.propose(incentive, block)?;
        }
        Ok(())
    }
}

impl<C: Channel + ?Sized> Channel for Recorder<'_, C> {
    fn num_arms(&self) -> usize {
        self.channel.num_arms()
    }

    fn horizon(&self) -> u64 {
        self.channel.horizon()
    }

    fn round(&self) -> u64 {
        self.channel.round()
    }

    fn plays(&self) -> &[u64] {
        self.channel.plays()
    }

    fn principal_means(&self) -> Vec<f64> {
        self.channel.principal_means()
    }

    fn set_phase(&mut self, phase: u32) {
        self.channel.set_phase(phase);
    }

    fn propose(&mut self, incentive: &Incentive, block: Block) -> Result<Observation> {
        let obs = self.channel.propose(incentive, block)?;
        if let Some(rec) = self.log.phases.last_mut() {
            let i = Block::ALL.iter().position(|b| *b == block).unwrap_or(0);
            rec.block_rounds[i] += 1;
        }
        Ok(obs)
    }
}

/// Run `body` until the channel is exhausted; any other error propagates.
pub fn until_exhausted<C, F>(channel: &mut C, body: F) -> Result<PrincipalLog>
where
    C: Channel + ?Sized,
    F: FnOnce(&mut Recorder<'_, C>) -> Result<()>,
{
    let mut rec = Recorder::new(channel);
    match body(&mut rec) {
        Ok(()) | Err(Error::Exhausted { .. }) => Ok(rec.log),
        Err(e) => Err(e),
    }
}
