//! Elimination over linear arms: designs, parameter search and least-squares estimates.

use incentive_bandits::env::{Agent, AgentBehavior, LinearModel, RewardModel};
use incentive_bandits::harness::Game;
use incentive_bandits::linear::LinearPrincipal;
use incentive_bandits::rng::RunStreams;

fn main() -> incentive_bandits::Result<()> {
    let features = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]];
    let model = RewardModel::Linear(LinearModel::new(features.clone(), vec![0.3, 0.1], vec![0.5, 0.2], 0.1, 0.1)?);
    let agent = Agent::new(AgentBehavior::greedy(), &model)?;
    let mut s = RunStreams::new(4, 0);
    let mut game = Game::new(model, agent, 50_000, s.agent_noise, s.principal_noise, s.agent_explore)?;
    let mut principal = LinearPrincipal::new(0.01);
    principal.msp.n_samples = 5_000;
    let (log, estimates) = principal.run(&mut game, &features, &mut s.mc_geometry)?;
    for e in &estimates {
        println!(
            "phase {}: eps {:.4} center {:.3?} nu_hat {:.3?} search rounds {}",
            e.phase, e.eps, e.center, e.nu_hat, e.msp_rounds
        );
    }
    let [per_round, oracle, bar] = game.transcript().total_regret();
    println!("eliminated {:?}", log.eliminated());
    println!("regret per-round {per_round:.1}, oracle {oracle:.1}, bar {bar:.1}");
    Ok(())
}
