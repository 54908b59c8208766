//! Instantaneous regret under the three benchmarks.

use serde::{Deserialize, Serialize};

use crate::env::agent::optimal_incentives;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegretMode {
    /// Benchmark built from the agent's current empirical means.
    PerRound,
    /// Same benchmark with the agent's true means.
    Oracle,
    /// Best joint mean minus the agent's best mean, charged against the total payment.
    Bar,
}

/// `max_a {theta_a - pi*_a} - (theta_arm - pi_arm)` where `pi*` is computed from `agent_means`.
pub fn benchmark_regret(theta: &[f64], agent_means: &[f64], incentive: &[f64], arm: usize) -> f64 {
    let star = optimal_incentives(agent_means);
    let best = theta.iter().zip(&star).map(|(t, p)| t - p).fold(f64::NEG_INFINITY, f64::max);
    best - (theta[arm] - incentive[arm])
}

/// `max_b {theta_b + mu_b} - max_z mu_z - (theta_arm - sum_a pi_a)`.
pub fn bar_regret(theta: &[f64], mu: &[f64], incentive: &[f64], arm: usize) -> f64 {
    let best_joint = theta.iter().zip(mu).map(|(t, m)| t + m).fold(f64::NEG_INFINITY, f64::max);
    let best_mu = mu.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    best_joint - best_mu - (theta[arm] - incentive.iter().sum::<f64>())
}

/// Regrets of one round under every mode, in `(per-round, oracle, bar)` order.
pub fn all_modes(theta: &[f64], mu_hat: &[f64], mu: &[f64], incentive: &[f64], arm: usize) -> [f64; 3] {
    [
        benchmark_regret(theta, mu_hat, incentive, arm),
        benchmark_regret(theta, mu, incentive, arm),
        bar_regret(theta, mu, incentive, arm),
    ]
}
