use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The principal's per-round offer: one nonnegative payment per arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Incentive(Vec<f64>);

impl Incentive {
    /// Build from raw values; every entry must be finite and nonnegative.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidIncentive(format!("entry {i} is {v}")));
        }
        Ok(Self(values))
    }

    pub fn zeros(num_arms: usize) -> Self {
        Self(vec![0.0; num_arms])
    }

    /// Single-arm incentive: `amount` on `arm`, zero elsewhere.
    pub fn one_hot(arm: usize, amount: f64, num_arms: usize) -> Result<Self> {
        if arm >= num_arms {
            return Err(Error::ArmOutOfRange { arm, num_arms });
        }
        if !(amount.is_finite() && amount >= 0.0) {
            return Err(Error::InvalidIncentive(format!("one-hot amount {amount}")));
        }
        let mut values = vec![0.0; num_arms];
        values[arm] = amount;
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, arm: usize) -> f64 {
        self.0[arm]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// The arm receiving the payment, when exactly one entry is positive.
    pub fn target(&self) -> Option<usize> {
        let mut positive = self.0.iter().enumerate().filter(|(_, v)| **v > 0.0);
        match (positive.next(), positive.next()) {
            (Some((i, _)), None) => Some(i),
            _ => None,
        }
    }
}

/// Free-function form of [`Incentive::one_hot`].
pub fn one_hot_incentive(arm: usize, amount: f64, num_arms: usize) -> Result<Incentive> {
    Incentive::one_hot(arm, amount, num_arms)
}
