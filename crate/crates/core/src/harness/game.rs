//! The game loop: the only place where principal, agent and ground truth meet.

use crate::env::{Agent, Incentive, RewardModel};
use crate::error::{Error, Result};
use crate::harness::regret;
use crate::rng::StreamRng;
use crate::search::{Block, Channel, Observation, PublicStats};

/// One round of play.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    /// 1-based round index.
    pub round: u64,
    pub phase: u32,
    pub block: Block,
    pub incentive: Incentive,
    pub arm: usize,
    pub explored: bool,
    pub principal_reward: f64,
    pub agent_reward: f64,
    /// Regret under the per-round, oracle and bar benchmarks.
    pub regret: [f64; 3],
    /// The single paid arm of a one-hot incentive, if any.
    pub target: Option<usize>,
    /// `pi_target - pi*_target` at the start of the round.
    pub target_margin: Option<f64>,
}

/// Append-only record of a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Transcript {
    pub records: Vec<RoundRecord>,
}

impl Transcript {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Prefix sums of the regret under each mode.
    pub fn cumulative(&self) -> Vec<[f64; 3]> {
        let mut acc = [0.0; 3];
        self.records
            .iter()
            .map(|r| {
                for (a, x) in acc.iter_mut().zip(r.regret) {
                    *a += x;
                }
                acc
            })
            .collect()
    }

    /// Final cumulative regret under each mode.
    pub fn total_regret(&self) -> [f64; 3] {
        self.cumulative().last().copied().unwrap_or([0.0; 3])
    }

    pub fn rounds_in(&self, phase: u32, block: Block) -> u64 {
        self.records.iter().filter(|r| r.phase == phase && r.block == block).count() as u64
    }
}

/// A live game. Implements [`Channel`] for the principal.
pub struct Game {
    model: RewardModel,
    agent: Agent,
    agent_noise: StreamRng,
    principal_noise: StreamRng,
    agent_explore: StreamRng,
    horizon: u64,
    phase: u32,
    stats: PublicStats,
    theta: Vec<f64>,
    mu: Vec<f64>,
    transcript: Transcript,
}

impl Game {
    pub fn new(
        model: RewardModel,
        agent: Agent,
        horizon: u64,
        agent_noise: StreamRng,
        principal_noise: StreamRng,
        agent_explore: StreamRng,
    ) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::InvalidConfig("horizon must be positive".into()));
        }
        if agent.num_arms() != model.num_arms() {
            return Err(Error::InvalidConfig("agent and model disagree on the number of arms".into()));
        }
        let theta = model.principal_means();
        let mu = model.agent_means();
        let k = model.num_arms();
        Ok(Self {
            model,
            agent,
            agent_noise,
            principal_noise,
            agent_explore,
            horizon,
            phase: 0,
            stats: PublicStats::new(k),
            theta,
            mu,
            transcript: Transcript::default(),
        })
    }

    pub fn agent(&self) -> &Agent {
        &self.agent
    }

    pub fn model(&self) -> &RewardModel {
        &self.model
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn into_transcript(self) -> Transcript {
        self.transcript
    }
}

impl Channel for Game {
    fn num_arms(&self) -> usize {
        self.theta.len()
    }

    fn horizon(&self) -> u64 {
        self.horizon
    }

    fn round(&self) -> u64 {
        self.transcript.len() as u64
    }

    fn plays(&self) -> &[u64] {
        self.stats.plays()
    }

    fn principal_means(&self) -> Vec<f64> {
        self.stats.means()
    }

    fn set_phase(&mut self, phase: u32) {
        self.phase = phase;
    }

    fn propose(&mut self, incentive: &Incentive, block: Block) -> Result<Observation> {
        let round = self.round();
        if round >= self.horizon {
            return Err(Error::Exhausted { round });
        }
        if incentive.len() != self.num_arms() {
            return Err(Error::InvalidIncentive(format!(
                "{} entries for {} arms",
                incentive.len(),
                self.num_arms()
            )));
        }
        let t = round + 1;
        let mu_hat = self.agent.empirical_means();
        let (arm, explored) = self.agent.select(incentive, t, &mut self.agent_explore);
        let (x, r) = self.model.sample_rewards(arm, &mut self.agent_noise, &mut self.principal_noise);
        let regret = regret::all_modes(&self.theta, &mu_hat, &self.mu, incentive.values(), arm);
        let target = incentive.target();
        let target_margin = target.map(|a| {
            let best = mu_hat.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            incentive.get(a) - (best - mu_hat[a])
        });
        self.agent.update(arm, r);
        self.stats.record(arm, x);
        self.transcript.records.push(RoundRecord {
            round: t,
            phase: self.phase,
            block,
            incentive: incentive.clone(),
            arm,
            explored,
            principal_reward: x,
            agent_reward: r,
            regret,
            target,
            target_margin,
        });
        Ok(Observation { arm, reward: x })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{AgentBehavior, IidModel};
    use crate::rng::stream;

    fn game(horizon: u64) -> Game {
        let model = RewardModel::Iid(IidModel::point_mass(&[0.8, 0.1], &[0.2, 0.9]).unwrap());
        let agent = Agent::new(AgentBehavior::greedy(), &model).unwrap();
        Game::new(model, agent, horizon, stream(0, 0, "a"), stream(0, 0, "p"), stream(0, 0, "e")).unwrap()
    }

    #[test]
    fn rounds_advance_and_exhaust() {
        let mut g = game(3);
        let pi = Incentive::one_hot(0, 0.5, 2).unwrap();
        for i in 1..=3 {
            g.propose(&pi, Block::Explore).unwrap();
            assert_eq!(g.round(), i);
        }
        assert_eq!(g.propose(&pi, Block::Explore), Err(Error::Exhausted { round: 3 }));
        assert_eq!(g.transcript().len(), 3);
    }

    #[test]
    fn records_rewards_and_public_stats() {
        let mut g = game(10);
        let obs = g.propose(&Incentive::one_hot(0, 0.5, 2).unwrap(), Block::Search).unwrap();
        assert_eq!(obs, Observation { arm: 0, reward: 0.8 });
        assert_eq!(g.plays(), &[1, 0]);
        assert_eq!(g.principal_means(), vec![0.8, 0.0]);
        let rec = &g.transcript().records[0];
        assert_eq!(rec.target, Some(0));
        assert_eq!(rec.target_margin, Some(0.5));
        // The agent now believes arm 0 pays 0.2.
        assert_eq!(g.agent().empirical_means(), vec![0.2, 0.0]);
    }

    #[test]
    fn cumulative_is_prefix_sum() {
        let mut g = game(50);
        for i in 0..50 {
            let pi = Incentive::one_hot(i % 2, 0.3 * (i % 3) as f64, 2).unwrap_or_else(|_| Incentive::zeros(2));
            g.propose(&pi, Block::Explore).unwrap();
        }
        let tr = g.transcript();
        let cum = tr.cumulative();
        let mut acc = 0.0;
        for (r, c) in tr.records.iter().zip(&cum) {
            acc += r.regret[0];
            assert_eq!(acc, c[0]);
        }
    }
}
