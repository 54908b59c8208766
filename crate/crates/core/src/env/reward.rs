//! Ground-truth reward models. Only the game loop and the agent may read these.

use rand::Rng;
use rand_distr::{Distribution as _, Normal};
use serde::{Deserialize, Serialize};

use super::arms::ArmSet;
use crate::error::{Error, Result};
use crate::linalg;
use crate::rng::StreamRng;

/// A reward distribution supported on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "kebab-case")]
pub enum Distribution {
    Bernoulli { p: f64 },
    Uniform { lo: f64, hi: f64 },
    PointMass { value: f64 },
}

impl Distribution {
    pub fn mean(&self) -> f64 {
        match *self {
            Distribution::Bernoulli { p } => p,
            Distribution::Uniform { lo, hi } => 0.5 * (lo + hi),
            Distribution::PointMass { value } => value,
        }
    }

    pub fn sample(&self, rng: &mut StreamRng) -> f64 {
        match *self {
            Distribution::Bernoulli { p } => {
                if rng.random::<f64>() < p {
                    1.0
                } else {
                    0.0
                }
            }
            Distribution::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            Distribution::PointMass { value } => value,
        }
    }

    fn validate(&self) -> Result<()> {
        let in_unit = |x: f64| (0.0..=1.0).contains(&x);
        let ok = match *self {
            Distribution::Bernoulli { p } => in_unit(p),
            Distribution::Uniform { lo, hi } => in_unit(lo) && in_unit(hi) && lo <= hi,
            Distribution::PointMass { value } => in_unit(value),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidModel(format!("{self:?} is not supported on [0, 1]")))
        }
    }
}

/// Per-arm principal and agent distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct IidModel {
    principal: Vec<Distribution>,
    agent: Vec<Distribution>,
}

impl IidModel {
    pub fn new(principal: Vec<Distribution>, agent: Vec<Distribution>) -> Result<Self> {
        if principal.len() != agent.len() {
            return Err(Error::InvalidModel(format!(
                "{} principal distributions vs {} agent distributions",
                principal.len(),
                agent.len()
            )));
        }
        if principal.len() < 2 {
            return Err(Error::InvalidModel("need at least 2 arms".into()));
        }
        for d in principal.iter().chain(&agent) {
            d.validate()?;
        }
        Ok(Self { principal, agent })
    }

    /// Deterministic rewards equal to the given means.
    pub fn point_mass(theta: &[f64], mu: &[f64]) -> Result<Self> {
        let pm = |v: &[f64]| v.iter().map(|&value| Distribution::PointMass { value }).collect();
        Self::new(pm(theta), pm(mu))
    }

    pub fn bernoulli(theta: &[f64], mu: &[f64]) -> Result<Self> {
        let b = |v: &[f64]| v.iter().map(|&p| Distribution::Bernoulli { p }).collect();
        Self::new(b(theta), b(mu))
    }

    pub fn principal(&self) -> &[Distribution] {
        &self.principal
    }

    pub fn agent(&self) -> &[Distribution] {
        &self.agent
    }
}

/// Linear rewards `<s*, a> + noise` for the agent and `<nu*, a> + noise` for the principal.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    arms: ArmSet,
    s_star: Vec<f64>,
    nu_star: Vec<f64>,
    agent_noise: f64,
    principal_noise: f64,
}

impl LinearModel {
    /// Noise levels are Gaussian standard deviations in `[0, 1]`.
    pub fn new(
        features: Vec<Vec<f64>>,
        s_star: Vec<f64>,
        nu_star: Vec<f64>,
        agent_noise: f64,
        principal_noise: f64,
    ) -> Result<Self> {
        let arms = ArmSet::linear(features)?;
        let dim = arms.dim().unwrap_or(0);
        for (name, v) in [("s_star", &s_star), ("nu_star", &nu_star)] {
            if v.len() != dim {
                return Err(Error::InvalidModel(format!("{name} has dimension {}, expected {dim}", v.len())));
            }
            if linalg::norm(v) > 1.0 + 1e-9 {
                return Err(Error::InvalidModel(format!("{name} lies outside the unit ball")));
            }
        }
        for sigma in [agent_noise, principal_noise] {
            if !(0.0..=1.0).contains(&sigma) {
                return Err(Error::InvalidModel(format!("noise level {sigma} outside [0, 1]")));
            }
        }
        Ok(Self { arms, s_star, nu_star, agent_noise, principal_noise })
    }

    pub fn arms(&self) -> &ArmSet {
        &self.arms
    }

    pub fn features(&self) -> &[Vec<f64>] {
        self.arms.features().expect("linear arm set")
    }

    pub fn s_star(&self) -> &[f64] {
        &self.s_star
    }

    pub fn nu_star(&self) -> &[f64] {
        &self.nu_star
    }

    pub fn agent_noise(&self) -> f64 {
        self.agent_noise
    }

    pub fn principal_noise(&self) -> f64 {
        self.principal_noise
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RewardModel {
    Iid(IidModel),
    Linear(LinearModel),
}

fn gaussian(sigma: f64, rng: &mut StreamRng) -> f64 {
    if sigma == 0.0 {
        0.0
    } else {
        Normal::new(0.0, sigma).expect("valid sigma").sample(rng)
    }
}

impl RewardModel {
    pub fn num_arms(&self) -> usize {
        match self {
            RewardModel::Iid(m) => m.principal.len(),
            RewardModel::Linear(m) => m.arms.num_arms(),
        }
    }

    pub fn arm_set(&self) -> ArmSet {
        match self {
            RewardModel::Iid(m) => ArmSet::Iid { num_arms: m.principal.len() },
            RewardModel::Linear(m) => m.arms.clone(),
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, RewardModel::Linear(_))
    }

    /// True principal means: `theta_a` or `<nu*, a>`.
    pub fn principal_means(&self) -> Vec<f64> {
        match self {
            RewardModel::Iid(m) => m.principal.iter().map(Distribution::mean).collect(),
            RewardModel::Linear(m) => m.features().iter().map(|a| linalg::dot(&m.nu_star, a)).collect(),
        }
    }

    /// True agent means: `mu_a` or `<s*, a>`.
    pub fn agent_means(&self) -> Vec<f64> {
        match self {
            RewardModel::Iid(m) => m.agent.iter().map(Distribution::mean).collect(),
            RewardModel::Linear(m) => m.features().iter().map(|a| linalg::dot(&m.s_star, a)).collect(),
        }
    }

    /// Gap `Delta_a` of every arm with respect to the best joint mean.
    pub fn joint_gaps(&self) -> Vec<f64> {
        let joint: Vec<f64> = self
            .principal_means()
            .iter()
            .zip(self.agent_means())
            .map(|(t, m)| t + m)
            .collect();
        let best = joint.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        joint.iter().map(|j| best - j).collect()
    }

    /// Index of the best joint mean (lowest index among ties).
    pub fn best_joint_arm(&self) -> usize {
        let gaps = self.joint_gaps();
        gaps.iter().position(|g| *g == 0.0).unwrap_or(0)
    }

    /// Draw `(X, R)`: the principal's and the agent's reward for `arm`.
    pub fn sample_rewards(
        &self,
        arm: usize,
        agent_rng: &mut StreamRng,
        principal_rng: &mut StreamRng,
    ) -> (f64, f64) {
        match self {
            RewardModel::Iid(m) => {
                let r = m.agent[arm].sample(agent_rng);
                let x = m.principal[arm].sample(principal_rng);
                (x, r)
            }
            RewardModel::Linear(m) => {
                let a = &m.features()[arm];
                let r = linalg::dot(&m.s_star, a) + gaussian(m.agent_noise, agent_rng);
                let x = linalg::dot(&m.nu_star, a) + gaussian(m.principal_noise, principal_rng);
                (x, r)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn point_mass_is_deterministic() {
        let model = RewardModel::Iid(IidModel::point_mass(&[0.8, 0.1], &[0.2, 0.5]).unwrap());
        let (mut a, mut p) = (stream(0, 0, "a"), stream(0, 0, "p"));
        for _ in 0..10 {
            assert_eq!(model.sample_rewards(0, &mut a, &mut p), (0.8, 0.2));
        }
    }

    #[test]
    fn bernoulli_law_of_large_numbers() {
        let model = RewardModel::Iid(IidModel::bernoulli(&[0.3, 0.7], &[0.6, 0.1]).unwrap());
        let (mut a, mut p) = (stream(3, 0, "a"), stream(3, 0, "p"));
        let n = 100_000;
        let (mut sx, mut sr) = (0.0, 0.0);
        for _ in 0..n {
            let (x, r) = model.sample_rewards(1, &mut a, &mut p);
            sx += x;
            sr += r;
        }
        assert!((sx / n as f64 - 0.7).abs() < 0.01);
        assert!((sr / n as f64 - 0.1).abs() < 0.01);
    }

    #[test]
    fn linear_zero_noise_is_exact() {
        let model = RewardModel::Linear(
            LinearModel::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.5, 0.0], vec![0.0, 0.3], 0.0, 0.0)
                .unwrap(),
        );
        let (mut a, mut p) = (stream(0, 0, "a"), stream(0, 0, "p"));
        assert_eq!(model.sample_rewards(0, &mut a, &mut p), (0.0, 0.5));
        assert_eq!(model.sample_rewards(1, &mut a, &mut p), (0.3, 0.0));
    }

    #[test]
    fn rejects_out_of_range_supports() {
        assert!(IidModel::bernoulli(&[1.2, 0.1], &[0.0, 0.0]).is_err());
        assert!(IidModel::new(
            vec![Distribution::Uniform { lo: 0.5, hi: 0.2 }, Distribution::PointMass { value: 0.0 }],
            vec![Distribution::PointMass { value: 0.0 }; 2]
        )
        .is_err());
        assert!(LinearModel::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![1.0, 1.0], vec![0.0, 0.0], 0.0, 0.0)
            .is_err());
    }

    #[test]
    fn joint_gaps() {
        let model = RewardModel::Iid(IidModel::point_mass(&[0.5, 0.2, 0.4], &[0.5, 0.3, 0.0]).unwrap());
        let g = model.joint_gaps();
        assert!((g[0]).abs() < 1e-15 && (g[1] - 0.5).abs() < 1e-15 && (g[2] - 0.6).abs() < 1e-15);
        assert_eq!(model.best_joint_arm(), 0);
    }
}
