//! Phased elimination against a greedy learning agent with i.i.d. rewards.

use incentive_bandits::env::{Agent, AgentBehavior, IidModel, RewardModel};
use incentive_bandits::harness::Game;
use incentive_bandits::iid::{Elimination, IidPrincipal};
use incentive_bandits::rng::RunStreams;

fn main() -> incentive_bandits::Result<()> {
    let horizon = 200_000;
    let model = RewardModel::Iid(IidModel::bernoulli(&[0.5, 0.3, 0.2, 0.1], &[0.3, 0.4, 0.2, 0.6])?);
    for elimination in [Elimination::Online, Elimination::Offline] {
        let agent = Agent::new(AgentBehavior::greedy(), &model)?;
        let s = RunStreams::new(1, 0);
        let mut game = Game::new(model.clone(), agent, horizon, s.agent_noise, s.principal_noise, s.agent_explore)?;
        let mut principal = IidPrincipal::new(0.01, elimination);
        principal.gamma = 0.05;
        let log = principal.run(&mut game)?;
        let [per_round, oracle, bar] = game.transcript().total_regret();
        println!("{elimination:?}: phases {}, eliminated {:?}", log.completed_phases(), log.eliminated());
        println!("  regret per-round {per_round:.1}, oracle {oracle:.1}, bar {bar:.1}");
    }
    Ok(())
}
