//! Experiment configuration, read from and written to TOML.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::env::{AgentBehavior, AgentKind, Distribution, IidModel, LinearModel, RewardModel};
use crate::error::{Error, Result};
use crate::linalg::norm;
use crate::rng::StreamRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    IidOnline,
    IidOffline,
    Explore,
    OracleExplore,
    Linear,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] =
        [Algorithm::IidOnline, Algorithm::IidOffline, Algorithm::Explore, Algorithm::OracleExplore, Algorithm::Linear];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::IidOnline => "iid-online",
            Algorithm::IidOffline => "iid-offline",
            Algorithm::Explore => "explore",
            Algorithm::OracleExplore => "oracle-explore",
            Algorithm::Linear => "linear",
        }
    }

    /// Exponent of the horizon in the regret rate the algorithm targets.
    pub fn regret_exponent(self) -> f64 {
        match self {
            Algorithm::IidOnline | Algorithm::IidOffline | Algorithm::OracleExplore => 0.5,
            Algorithm::Explore | Algorithm::Linear => 2.0 / 3.0,
        }
    }

    pub fn is_linear(self) -> bool {
        self == Algorithm::Linear
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown algorithm {s:?}")))
    }
}

/// The agent's initial estimate before any play.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Prior {
    #[default]
    Zero,
    /// Start from the true agent means.
    TrueMeans,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct AgentConfig {
    #[serde(flatten)]
    pub behavior: AgentBehavior,
    pub prior: Prior,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct PrincipalConfig {
    /// Exploration constant assumed by the exploration-robust principals. Defaults to the agent's.
    pub c0: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeometryConfig {
    pub mc_samples: usize,
    pub halving_tolerance: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self { mc_samples: 20_000, halving_tolerance: 0.05 }
    }
}

/// Ground truth of a run. The random variants are drawn per seed from the instance stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelSpec {
    Iid { principal: Vec<Distribution>, agent: Vec<Distribution> },
    Bernoulli { theta: Vec<f64>, mu: Vec<f64> },
    PointMass { theta: Vec<f64>, mu: Vec<f64> },
    /// `theta` and `mu` uniform on `[0, 1]`.
    RandomBernoulli { arms: usize },
    Linear { features: Vec<Vec<f64>>, s_star: Vec<f64>, nu_star: Vec<f64>, noise: f64 },
    /// Unit-norm features; `s*` and `nu*` uniform directions with uniform norms in `[0, 1]`.
    RandomLinear { arms: usize, dim: usize, noise: f64 },
}

impl ModelSpec {
    pub fn is_linear(&self) -> bool {
        matches!(self, ModelSpec::Linear { .. } | ModelSpec::RandomLinear { .. })
    }

    pub fn num_arms(&self) -> usize {
        match self {
            ModelSpec::Iid { principal, .. } => principal.len(),
            ModelSpec::Bernoulli { theta, .. } | ModelSpec::PointMass { theta, .. } => theta.len(),
            ModelSpec::RandomBernoulli { arms } | ModelSpec::RandomLinear { arms, .. } => *arms,
            ModelSpec::Linear { features, .. } => features.len(),
        }
    }

    /// Both reward streams are deterministic.
    pub fn is_noiseless(&self) -> bool {
        match self {
            ModelSpec::Iid { principal, agent } => principal
                .iter()
                .chain(agent)
                .all(|d| matches!(d, Distribution::PointMass { .. })),
            ModelSpec::PointMass { .. } => true,
            ModelSpec::Bernoulli { theta, mu } => theta.iter().chain(mu).all(|&p| p == 0.0 || p == 1.0),
            ModelSpec::RandomBernoulli { .. } => false,
            ModelSpec::Linear { noise, .. } | ModelSpec::RandomLinear { noise, .. } => *noise == 0.0,
        }
    }

    pub fn build(&self, instance: &mut StreamRng) -> Result<RewardModel> {
        Ok(match self {
            ModelSpec::Iid { principal, agent } => RewardModel::Iid(IidModel::new(principal.clone(), agent.clone())?),
            ModelSpec::Bernoulli { theta, mu } => RewardModel::Iid(IidModel::bernoulli(theta, mu)?),
            ModelSpec::PointMass { theta, mu } => RewardModel::Iid(IidModel::point_mass(theta, mu)?),
            ModelSpec::RandomBernoulli { arms } => {
                let theta: Vec<f64> = (0..*arms).map(|_| instance.random()).collect();
                let mu: Vec<f64> = (0..*arms).map(|_| instance.random()).collect();
                RewardModel::Iid(IidModel::bernoulli(&theta, &mu)?)
            }
            ModelSpec::Linear { features, s_star, nu_star, noise } => RewardModel::Linear(LinearModel::new(
                features.clone(),
                s_star.clone(),
                nu_star.clone(),
                *noise,
                *noise,
            )?),
            ModelSpec::RandomLinear { arms, dim, noise } => {
                let features = (0..*arms).map(|_| random_direction(instance, *dim)).collect();
                let scaled = |rng: &mut StreamRng| {
                    let r: f64 = rng.random();
                    random_direction(rng, *dim).into_iter().map(|x| x * r).collect::<Vec<_>>()
                };
                let s_star = scaled(instance);
                let nu_star = scaled(instance);
                RewardModel::Linear(LinearModel::new(features, s_star, nu_star, *noise, *noise)?)
            }
        })
    }
}

/// A uniformly random unit vector, by rejection from the cube.
pub fn random_direction(rng: &mut StreamRng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| 2.0 * rng.random::<f64>() - 1.0).collect();
        let n = norm(&v);
        if n > 1e-3 && n <= 1.0 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub horizon: u64,
    /// Failure probability; `1/T` when absent.
    #[serde(default)]
    pub delta: Option<f64>,
    /// Multiplier on the principal's phase schedule.
    #[serde(default = "one")]
    pub gamma: f64,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// Distinguishes runs that share a seed.
    #[serde(default)]
    pub run_id: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub agent: AgentConfig,
    #[serde(default)]
    pub principal: PrincipalConfig,
    pub model: ModelSpec,
    #[serde(default)]
    pub geometry: GeometryConfig,
}

fn one() -> f64 {
    1.0
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("runs")
}

impl ExperimentConfig {
    /// A default configuration for `algorithm` on a random instance.
    pub fn new(algorithm: Algorithm, horizon: u64, num_arms: usize, dim: usize) -> Self {
        let model = if algorithm.is_linear() {
            ModelSpec::RandomLinear { arms: num_arms, dim, noise: 0.1 }
        } else {
            ModelSpec::RandomBernoulli { arms: num_arms }
        };
        let behavior = match algorithm {
            Algorithm::Explore => AgentBehavior::exploratory(1.0, Default::default()),
            Algorithm::OracleExplore => AgentBehavior::exploratory_oracle(1.0, Default::default()),
            _ => AgentBehavior::greedy(),
        };
        Self {
            algorithm,
            horizon,
            delta: None,
            gamma: 1.0,
            seeds: default_seeds(),
            run_id: 0,
            out_dir: default_out_dir(),
            agent: AgentConfig { behavior, prior: Prior::Zero },
            principal: PrincipalConfig::default(),
            model,
            geometry: GeometryConfig::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn delta(&self) -> f64 {
        self.delta.unwrap_or(1.0 / self.horizon as f64)
    }

    pub fn principal_c0(&self) -> f64 {
        self.principal.c0.unwrap_or(self.agent.behavior.c0)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.horizon < 2 {
            return fail(format!("horizon must be at least 2, got {}", self.horizon));
        }
        let delta = self.delta();
        if !(delta > 0.0 && delta < 1.0) {
            return fail(format!("delta must lie in (0, 1), got {delta}"));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return fail(format!("gamma must lie in (0, 1], got {}", self.gamma));
        }
        if self.seeds.is_empty() {
            return fail("at least one seed is required".into());
        }
        if self.model.num_arms() < 2 {
            return fail("at least two arms are required".into());
        }
        if self.algorithm.is_linear() != self.model.is_linear() {
            return fail(format!(
                "algorithm {} requires a {} reward model",
                self.algorithm,
                if self.algorithm.is_linear() { "linear" } else { "non-linear" }
            ));
        }
        let kind = self.agent.behavior.kind;
        if self.algorithm.is_linear() && kind.explores() {
            return fail("the linear principal does not support exploring agents".into());
        }
        if self.algorithm == Algorithm::OracleExplore && !kind.is_oracle() {
            return fail("oracle-explore requires an oracle or exploratory-oracle agent".into());
        }
        if self.algorithm.is_linear() && self.agent.prior == Prior::TrueMeans {
            return fail("a true-means prior applies to i.i.d. models only".into());
        }
        let c0 = self.principal_c0();
        if kind.explores() && (c0.is_nan() || c0 <= 0.0) {
            return fail(format!("c0 must be positive, got {c0}"));
        }
        if self.geometry.mc_samples == 0 {
            return fail("mc_samples must be positive".into());
        }
        if !(self.geometry.halving_tolerance > 0.0 && self.geometry.halving_tolerance < 0.5) {
            return fail("halving_tolerance must lie in (0, 0.5)".into());
        }
        if kind == AgentKind::ExploratoryLearner || kind == AgentKind::ExploratoryOracle {
            let k = self.model.num_arms();
            if self.agent.behavior.explore_arm >= k {
                return fail(format!("explore_arm {} out of range", self.agent.behavior.explore_arm));
            }
        }
        Ok(())
    }
}
