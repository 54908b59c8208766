//! Agent behaviors: greedy and exploratory learners, and their oracle counterparts.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::incentive::Incentive;
use super::reward::RewardModel;
use crate::error::{Error, Result};
use crate::linalg;
use crate::rng::StreamRng;

/// Utilities closer than this are treated as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AgentKind {
    #[default]
    GreedyLearner,
    ExploratoryLearner,
    Oracle,
    ExploratoryOracle,
}

impl AgentKind {
    pub fn explores(self) -> bool {
        matches!(self, AgentKind::ExploratoryLearner | AgentKind::ExploratoryOracle)
    }

    pub fn is_oracle(self) -> bool {
        matches!(self, AgentKind::Oracle | AgentKind::ExploratoryOracle)
    }
}

/// Which arm an exploring agent pulls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExplorationPolicy {
    #[default]
    Uniform,
    /// Always the arm named by `AgentBehavior::explore_arm`.
    FixedArm,
    /// The arm with the lowest true `theta + mu`.
    AdversarialLowestJointMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieRule {
    #[default]
    LowestIndex,
    HighestIndex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "snake_case")]
pub struct AgentBehavior {
    pub kind: AgentKind,
    pub c0: f64,
    pub exploration_policy: ExplorationPolicy,
    pub explore_arm: usize,
    pub tie_rule: TieRule,
}

impl Default for AgentBehavior {
    fn default() -> Self {
        Self {
            kind: AgentKind::GreedyLearner,
            c0: 1.0,
            exploration_policy: ExplorationPolicy::Uniform,
            explore_arm: 0,
            tie_rule: TieRule::LowestIndex,
        }
    }
}

impl AgentBehavior {
    pub fn greedy() -> Self {
        Self::default()
    }

    pub fn oracle() -> Self {
        Self { kind: AgentKind::Oracle, ..Self::default() }
    }

    pub fn exploratory(c0: f64, policy: ExplorationPolicy) -> Self {
        Self { kind: AgentKind::ExploratoryLearner, c0, exploration_policy: policy, ..Self::default() }
    }

    pub fn exploratory_oracle(c0: f64, policy: ExplorationPolicy) -> Self {
        Self { kind: AgentKind::ExploratoryOracle, c0, exploration_policy: policy, ..Self::default() }
    }
}

/// First round `tau >= 2` with `c0 * sqrt(ln(2 tau)) < sqrt(tau)`.
pub fn exploration_start(c0: f64) -> u64 {
    let mut tau = 2u64;
    while c0 * ((2 * tau) as f64).ln().sqrt() >= (tau as f64).sqrt() {
        tau += 1;
    }
    tau
}

/// Exploration probability `c0 sqrt(ln(2t)/t)` at round `t >= tau`, zero before.
pub fn exploration_probability(c0: f64, tau: u64, t: u64) -> f64 {
    if t < tau || c0 <= 0.0 {
        return 0.0;
    }
    let t = t as f64;
    (c0 * ((2.0 * t).ln() / t).sqrt()).min(1.0)
}

/// Index maximizing `scores` under `tie`.
pub fn argmax_with_ties(scores: impl IntoIterator<Item = f64>, tie: TieRule) -> usize {
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (i, s) in scores.into_iter().enumerate() {
        let better = match tie {
            TieRule::LowestIndex => s > best_score + TIE_TOLERANCE,
            TieRule::HighestIndex => s >= best_score - TIE_TOLERANCE,
        };
        if better {
            best = i;
            best_score = s;
        }
    }
    best
}

/// The agent's private learning state.
#[derive(Debug, Clone, PartialEq)]
pub enum AgentState {
    Iid {
        counts: Vec<u64>,
        sums: Vec<f64>,
        initial: Vec<f64>,
    },
    Linear {
        features: Vec<Vec<f64>>,
        gram: DMatrix<f64>,
        response: DVector<f64>,
        estimate: Vec<f64>,
        plays: u64,
    },
}

impl AgentState {
    pub fn iid(initial: Vec<f64>) -> Self {
        let k = initial.len();
        AgentState::Iid { counts: vec![0; k], sums: vec![0.0; k], initial }
    }

    pub fn linear(features: Vec<Vec<f64>>, initial: Vec<f64>) -> Self {
        let d = initial.len();
        AgentState::Linear {
            features,
            gram: DMatrix::zeros(d, d),
            response: DVector::zeros(d),
            estimate: initial,
            plays: 0,
        }
    }

    /// `mu_hat_a(t)` for every arm; an unplayed i.i.d. arm reports its initial mean.
    pub fn empirical_means(&self) -> Vec<f64> {
        match self {
            AgentState::Iid { counts, sums, initial } => counts
                .iter()
                .zip(sums)
                .zip(initial)
                .map(|((&n, &s), &m0)| if n == 0 { m0 } else { s / n as f64 })
                .collect(),
            AgentState::Linear { features, estimate, .. } => {
                features.iter().map(|a| linalg::dot(estimate, a)).collect()
            }
        }
    }

    pub fn counts(&self) -> Option<&[u64]> {
        match self {
            AgentState::Iid { counts, .. } => Some(counts),
            AgentState::Linear { .. } => None,
        }
    }

    /// Linear parameter estimate `s_hat_t`.
    pub fn estimate(&self) -> Option<&[f64]> {
        match self {
            AgentState::Iid { .. } => None,
            AgentState::Linear { estimate, .. } => Some(estimate),
        }
    }

    pub fn update(&mut self, arm: usize, reward: f64) {
        match self {
            AgentState::Iid { counts, sums, .. } => {
                counts[arm] += 1;
                sums[arm] += reward;
            }
            AgentState::Linear { features, gram, response, estimate, plays } => {
                let a = DVector::from_column_slice(&features[arm]);
                *gram += &a * a.transpose();
                *response += &a * reward;
                *plays += 1;
                *estimate = linalg::pinv_solve(gram, response).iter().copied().collect();
            }
        }
    }
}

/// An agent: behavior, private state and, for oracle kinds, the true means it acts on.
#[derive(Debug, Clone)]
pub struct Agent {
    behavior: AgentBehavior,
    state: AgentState,
    true_means: Vec<f64>,
    joint_means: Vec<f64>,
    tau: u64,
}

impl Agent {
    /// Agent with zero initial means (or `s_hat_1 = 0` for linear models).
    pub fn new(behavior: AgentBehavior, model: &RewardModel) -> Result<Self> {
        let initial = match model {
            RewardModel::Iid(_) => vec![0.0; model.num_arms()],
            RewardModel::Linear(m) => vec![0.0; m.s_star().len()],
        };
        Self::with_initial(behavior, model, initial)
    }

    /// `initial` holds per-arm initial means (i.i.d.) or the initial parameter `s_hat_1` (linear).
    pub fn with_initial(behavior: AgentBehavior, model: &RewardModel, initial: Vec<f64>) -> Result<Self> {
        if !behavior.c0.is_finite() || behavior.c0 < 0.0 {
            return Err(Error::InvalidConfig(format!("agent c0 must be >= 0, got {}", behavior.c0)));
        }
        let k = model.num_arms();
        if behavior.exploration_policy == ExplorationPolicy::FixedArm && behavior.explore_arm >= k {
            return Err(Error::ArmOutOfRange { arm: behavior.explore_arm, num_arms: k });
        }
        let state = match model {
            RewardModel::Iid(_) => {
                if initial.len() != k || initial.iter().any(|m| !(0.0..=1.0).contains(m)) {
                    return Err(Error::InvalidConfig("initial means must be K values in [0, 1]".into()));
                }
                AgentState::iid(initial)
            }
            RewardModel::Linear(m) => {
                if initial.len() != m.s_star().len() || linalg::norm(&initial) > 1.0 + 1e-9 {
                    return Err(Error::InvalidConfig("initial estimate must lie in the unit ball of R^d".into()));
                }
                AgentState::linear(m.features().to_vec(), initial)
            }
        };
        let true_means = model.agent_means();
        let joint_means = model.principal_means().iter().zip(&true_means).map(|(t, m)| t + m).collect();
        let tau = if behavior.kind.explores() { exploration_start(behavior.c0) } else { u64::MAX };
        Ok(Self { behavior, state, true_means, joint_means, tau })
    }

    pub fn behavior(&self) -> &AgentBehavior {
        &self.behavior
    }

    pub fn state(&self) -> &AgentState {
        &self.state
    }

    pub fn num_arms(&self) -> usize {
        self.true_means.len()
    }

    /// Round from which exploration is enabled (`u64::MAX` for non-exploring kinds).
    pub fn exploration_start(&self) -> u64 {
        self.tau
    }

    pub fn exploration_probability(&self, t: u64) -> f64 {
        if self.behavior.kind.explores() {
            exploration_probability(self.behavior.c0, self.tau, t)
        } else {
            0.0
        }
    }

    /// The means the agent maximizes against: true means for oracle kinds, estimates otherwise.
    pub fn empirical_means(&self) -> Vec<f64> {
        if self.behavior.kind.is_oracle() {
            self.true_means.clone()
        } else {
            self.state.empirical_means()
        }
    }

    /// Greedy choice `argmax_a mu_hat_a + pi_a` under the tie rule.
    pub fn greedy_choice(&self, incentive: &Incentive) -> usize {
        let means = self.empirical_means();
        argmax_with_ties(means.iter().zip(incentive.values()).map(|(m, p)| m + p), self.behavior.tie_rule)
    }

    /// Choose an arm at round `t` (1-based); the flag marks exploration rounds.
    pub fn select(&self, incentive: &Incentive, t: u64, rng: &mut StreamRng) -> (usize, bool) {
        if self.behavior.kind.explores() {
            let p = self.exploration_probability(t);
            if p > 0.0 && rng.random::<f64>() < p {
                return (self.exploration_arm(rng), true);
            }
        }
        (self.greedy_choice(incentive), false)
    }

    fn exploration_arm(&self, rng: &mut StreamRng) -> usize {
        match self.behavior.exploration_policy {
            ExplorationPolicy::Uniform => rng.random_range(0..self.num_arms()),
            ExplorationPolicy::FixedArm => self.behavior.explore_arm,
            ExplorationPolicy::AdversarialLowestJointMean => {
                argmax_with_ties(self.joint_means.iter().map(|j| -j), TieRule::LowestIndex)
            }
        }
    }

    pub fn update(&mut self, arm: usize, reward: f64) {
        self.state.update(arm, reward);
    }

    /// `pi*_arm = max_b mu_hat_b - mu_hat_arm`.
    pub fn optimal_incentive(&self, arm: usize) -> f64 {
        let means = self.empirical_means();
        let best = means.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        best - means[arm]
    }

    pub fn optimal_incentives(&self) -> Vec<f64> {
        optimal_incentives(&self.empirical_means())
    }
}

/// `max_b m_b - m_a` for every arm.
pub fn optimal_incentives(means: &[f64]) -> Vec<f64> {
    let best = means.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    means.iter().map(|m| best - m).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::reward::{IidModel, LinearModel};
    use crate::rng::stream;

    fn iid(theta: &[f64], mu: &[f64]) -> RewardModel {
        RewardModel::Iid(IidModel::point_mass(theta, mu).unwrap())
    }

    #[test]
    fn greedy_choice_examples() {
        let model = iid(&[0.0, 0.0], &[0.0, 0.0]);
        let agent = Agent::with_initial(AgentBehavior::greedy(), &model, vec![0.3, 0.7]).unwrap();
        let pi = Incentive::new(vec![0.5, 0.0]).unwrap();
        assert_eq!(agent.greedy_choice(&pi), 0);

        let agent = Agent::with_initial(AgentBehavior::greedy(), &model, vec![0.2, 0.9]).unwrap();
        let pi = Incentive::new(vec![0.7, 0.0]).unwrap();
        assert_eq!(agent.greedy_choice(&pi), 0);
        let high = AgentBehavior { tie_rule: TieRule::HighestIndex, ..AgentBehavior::greedy() };
        let agent = Agent::with_initial(high, &model, vec![0.2, 0.9]).unwrap();
        assert_eq!(agent.greedy_choice(&pi), 1);
    }

    #[test]
    fn tau_scan() {
        assert_eq!(exploration_start(1.0), 2);
        assert_eq!(exploration_start(0.0), 2);
        for c0 in [0.5, 2.0, 3.0, 5.0] {
            let tau = exploration_start(c0);
            let holds = |t: u64| c0 * ((2 * t) as f64).ln().sqrt() < (t as f64).sqrt();
            assert!(holds(tau));
            assert!((2..tau).all(|t| !holds(t)));
        }
    }

    #[test]
    fn exploration_frequency_respects_bound() {
        let model = iid(&[0.5, 0.5, 0.5], &[0.1, 0.2, 0.3]);
        let agent = Agent::new(AgentBehavior::exploratory(1.0, ExplorationPolicy::Uniform), &model).unwrap();
        let mut rng = stream(11, 0, "explore");
        let pi = Incentive::zeros(3);
        let n = 100_000;
        let explored = (0..n).filter(|_| agent.select(&pi, 100, &mut rng).1).count();
        let freq = explored as f64 / n as f64;
        let bound = (200f64.ln() / 100.0).sqrt();
        assert!((bound - 0.2302).abs() < 1e-3);
        let se = (bound * (1.0 - bound) / n as f64).sqrt();
        assert!(freq <= bound + 3.0 * se, "{freq} vs {bound}");
    }

    #[test]
    fn no_exploration_before_tau() {
        let model = iid(&[0.5, 0.5], &[0.1, 0.2]);
        let agent = Agent::new(AgentBehavior::exploratory(3.0, ExplorationPolicy::FixedArm), &model).unwrap();
        let tau = agent.exploration_start();
        assert!(tau > 2);
        let mut rng = stream(1, 0, "explore");
        for t in 1..tau {
            for _ in 0..200 {
                assert!(!agent.select(&Incentive::zeros(2), t, &mut rng).1);
            }
        }
    }

    #[test]
    fn iid_update_examples() {
        let mut s = AgentState::iid(vec![0.0]);
        s.update(0, 0.0);
        s.update(0, 1.0);
        assert_eq!(s.empirical_means(), vec![0.5]);
        s.update(0, 1.0);
        assert!((s.empirical_means()[0] - 2.0 / 3.0).abs() < 1e-15);
        let s = AgentState::iid(vec![0.3]);
        assert_eq!(s.empirical_means(), vec![0.3]);
    }

    #[test]
    fn linear_update_is_minimum_norm() {
        let mut s = AgentState::linear(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.0, 0.0]);
        s.update(0, 0.4);
        s.update(0, 0.6);
        let e = s.estimate().unwrap();
        assert!((e[0] - 0.5).abs() < 1e-12 && e[1].abs() < 1e-12);
    }

    #[test]
    fn optimal_incentive_examples() {
        let model = iid(&[0.0; 3], &[0.0; 3]);
        let agent = Agent::with_initial(AgentBehavior::greedy(), &model, vec![0.3, 0.7, 0.5]).unwrap();
        assert!((agent.optimal_incentive(0) - 0.4).abs() < 1e-15);
        assert_eq!(agent.optimal_incentive(1), 0.0);

        let lin = RewardModel::Linear(
            LinearModel::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![1.0, 0.0], vec![0.0, 0.0], 0.0, 0.0)
                .unwrap(),
        );
        let agent = Agent::with_initial(AgentBehavior::greedy(), &lin, vec![1.0, 0.0]).unwrap();
        assert_eq!(agent.optimal_incentive(1), 1.0);
    }

    #[test]
    fn oracle_kind_uses_true_means() {
        let model = iid(&[0.0, 0.0], &[0.2, 0.9]);
        let mut agent = Agent::new(AgentBehavior::oracle(), &model).unwrap();
        agent.update(0, 1.0);
        assert_eq!(agent.empirical_means(), vec![0.2, 0.9]);
    }

    #[test]
    fn adversarial_policy_picks_lowest_joint_mean() {
        let model = iid(&[0.9, 0.1, 0.5], &[0.1, 0.2, 0.0]);
        let agent = Agent::new(
            AgentBehavior::exploratory(1.0, ExplorationPolicy::AdversarialLowestJointMean),
            &model,
        )
        .unwrap();
        let mut rng = stream(0, 0, "x");
        assert_eq!(agent.exploration_arm(&mut rng), 1);
    }
}
