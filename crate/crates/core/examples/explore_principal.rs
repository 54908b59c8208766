//! Median-vote elimination against an agent that keeps exploring.

use incentive_bandits::env::{Agent, AgentBehavior, ExplorationPolicy, IidModel, RewardModel};
use incentive_bandits::explore::{ExplorePrincipal, ExploreVariant};
use incentive_bandits::harness::Game;
use incentive_bandits::rng::RunStreams;

fn main() -> incentive_bandits::Result<()> {
    let horizon = 100_000;
    let model = RewardModel::Iid(IidModel::point_mass(&[0.9, 0.5, 0.3], &[0.1, 0.1, 0.6])?);
    let cases = [
        (ExploreVariant::Learner, AgentBehavior::exploratory(1.0, ExplorationPolicy::Uniform)),
        (ExploreVariant::Oracle, AgentBehavior::exploratory_oracle(1.0, ExplorationPolicy::Uniform)),
    ];
    for (variant, behavior) in cases {
        let agent = Agent::new(behavior, &model)?;
        let s = RunStreams::new(2, 0);
        let mut game = Game::new(model.clone(), agent, horizon, s.agent_noise, s.principal_noise, s.agent_explore)?;
        let log = ExplorePrincipal::new(0.01, 1.0, variant).with_gamma(1e-4).run(&mut game)?;
        let [per_round, oracle, bar] = game.transcript().total_regret();
        println!("{variant:?}: phases {}, eliminated {:?}", log.completed_phases(), log.eliminated());
        println!("  regret per-round {per_round:.1}, oracle {oracle:.1}, bar {bar:.1}");
    }
    Ok(())
}
