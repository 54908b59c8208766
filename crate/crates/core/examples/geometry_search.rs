//! Locate a linear agent's reward vector by cutting the unit ball with observed preferences.

use incentive_bandits::env::{Agent, AgentBehavior, LinearModel, RewardModel};
use incentive_bandits::geometry::{msp_search, MspOptions};
use incentive_bandits::harness::Game;
use incentive_bandits::rng::RunStreams;

fn main() -> incentive_bandits::Result<()> {
    let features = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-0.6, 0.8], vec![0.6, -0.8]];
    let s_star = vec![0.35, -0.2];
    let model = RewardModel::Linear(LinearModel::new(features.clone(), s_star.clone(), vec![0.0, 0.0], 0.0, 0.0)?);
    let agent = Agent::new(AgentBehavior::oracle(), &model)?;
    let mut s = RunStreams::new(3, 0);
    let mut game = Game::new(model, agent, 100_000, s.agent_noise, s.principal_noise, s.agent_explore)?;
    let options = MspOptions { track_potential: true, ..MspOptions::default() };
    let out = msp_search(&mut game, &features, 0.01, 1e-5, &mut s.mc_geometry, options)?;
    for (t, it) in out.iterations.iter().enumerate() {
        println!(
            "cut {t:2}: arms {:?} width {:.4} index {} ratio {:.3}",
            it.pair,
            it.width,
            it.index,
            it.potential_ratio.unwrap_or(f64::NAN)
        );
    }
    println!("center {:.4?}, true vector {s_star:?}", out.center);
    Ok(())
}
