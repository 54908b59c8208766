//! Ground truth and agent behavior.

pub mod agent;
pub mod arms;
pub mod incentive;
pub mod reward;

pub use agent::{Agent, AgentBehavior, AgentKind, AgentState, ExplorationPolicy, TieRule};
pub use arms::ArmSet;
pub use incentive::{one_hot_incentive, Incentive};
pub use reward::{Distribution, IidModel, LinearModel, RewardModel};
