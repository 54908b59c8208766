//! Phased elimination for i.i.d. rewards and a non-exploring learning agent.
//!
//! Each phase stabilizes the estimators of eliminated arms, searches a near-optimal incentive
//! for every active arm, pays a slightly enlarged incentive for a fixed exploration budget and
//! finally removes arms whose joint mean is visibly worse.

use serde::{Deserialize, Serialize};

use crate::env::Incentive;
use crate::error::{Error, Result};
use crate::phase::{until_exhausted, PrincipalLog, Recorder};
use crate::search::{ceil_log2, noisy_binary_search, Block, Channel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Elimination {
    /// One vector-incentive probe per active arm.
    Online,
    /// A second search per active arm, then a comparison of estimated utilities.
    Offline,
}

/// `ceil(max{2^(2m+5) ln(4TK/delta), |A_m| ln T})`.
pub fn phase_length(m: u32, active: usize, horizon: u64, num_arms: usize, delta: f64) -> u64 {
    scaled_phase_length(m, active, horizon, num_arms, delta, 1.0)
}

/// [`phase_length`] with the raw value multiplied by `gamma` before rounding up.
pub fn scaled_phase_length(m: u32, active: usize, horizon: u64, num_arms: usize, delta: f64, gamma: f64) -> u64 {
    let t = horizon as f64;
    let first = 2f64.powi(2 * m as i32 + 5) * (4.0 * t * num_arms as f64 / delta).ln();
    let second = active as f64 * t.ln();
    (gamma * first.max(second)).ceil().max(1.0) as u64
}

/// `ceil(sqrt(|A_m| T_{m-1} / max{1, |B_m|}))`.
pub fn bad_arm_budget(active: usize, bad: usize, prev_len: u64) -> u64 {
    (active as f64 * prev_len as f64 / bad.max(1) as f64).sqrt().ceil() as u64
}

/// `C_m = sqrt(ln(4KT/delta) / (2 T_{m-1}))`.
pub fn confidence_radius(num_arms: usize, horizon: u64, delta: f64, prev_len: u64) -> f64 {
    ((4.0 * num_arms as f64 * horizon as f64 / delta).ln() / (2.0 * prev_len as f64)).sqrt()
}

/// `min{1 + 1/T, b + 4 C_m + 1/Z_m}`.
pub fn enlarge_incentive(b: f64, radius: f64, stabilize_len: u64, horizon: u64) -> f64 {
    let inv_z = if stabilize_len == 0 { 0.0 } else { 1.0 / stabilize_len as f64 };
    (1.0 + 1.0 / horizon as f64).min(b + 4.0 * radius + inv_z)
}

/// Slack of the offline test: `4/T + (2 + ceil(log2 T))/T_m + 2 sqrt(|B_m| / (|A_m| T_{m-1}))`.
pub fn offline_slack(horizon: u64, len: u64, active: usize, bad: usize, prev_len: u64) -> f64 {
    4.0 / horizon as f64
        + (2.0 + ceil_log2(horizon) as f64) / len as f64
        + 2.0 * (bad as f64 / (active as f64 * prev_len as f64)).sqrt()
}

/// Offline test: eliminate `a` iff `max_z (theta_z - b_z) - (theta_a - b_a) > 1.5 * 2^-m + slack`.
///
/// `snapshots[i]` holds the principal means at the end of active arm `i`'s second search,
/// `searched[i]` that search's output.
pub fn offline_eliminate(
    active: &[usize],
    searched: &[f64],
    snapshots: &[Vec<f64>],
    m: u32,
    slack: f64,
) -> Vec<usize> {
    let threshold = 1.5 * 0.5f64.powi(m as i32) + slack;
    let mut out = Vec::new();
    for (i, &a) in active.iter().enumerate() {
        let theta = &snapshots[i];
        let best = active
            .iter()
            .zip(searched)
            .map(|(&z, &b)| theta[z] - b)
            .fold(f64::NEG_INFINITY, f64::max);
        if best - (theta[a] - searched[i]) > threshold {
            out.push(a);
        }
    }
    out
}

/// Vector incentive used to test `target` during online elimination.
pub fn elimination_incentive(target: usize, active: &[usize], theta: &[f64], bonus: f64) -> Result<Incentive> {
    let mut v = vec![0.0; theta.len()];
    for &b in active {
        v[b] = 1.0 + theta[b];
    }
    v[target] += bonus;
    Incentive::new(v)
}

/// Configuration of the i.i.d. principal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IidPrincipal {
    pub delta: f64,
    /// Multiplier on the phase lengths and stabilization budgets.
    pub gamma: f64,
    pub elimination: Elimination,
}

impl IidPrincipal {
    pub fn new(delta: f64, elimination: Elimination) -> Self {
        Self { delta, gamma: 1.0, elimination }
    }

    /// Play until the channel is exhausted.
    pub fn run<C: Channel + ?Sized>(&self, channel: &mut C) -> Result<PrincipalLog> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidConfig(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::InvalidConfig(format!("gamma must lie in (0, 1], got {}", self.gamma)));
        }
        until_exhausted(channel, |rec| self.phases(rec))
    }

    fn phases<C: Channel + ?Sized>(&self, rec: &mut Recorder<'_, C>) -> Result<()> {
        let k = rec.num_arms();
        let horizon = rec.horizon();
        let mut active: Vec<usize> = (0..k).collect();
        let mut bad: Vec<usize> = Vec::new();
        let mut prev_len = 1u64;
        for m in 1u32.. {
            let len = scaled_phase_length(m, active.len(), horizon, k, self.delta, self.gamma);
            let z = ((self.gamma * (active.len() as f64 * prev_len as f64 / bad.len().max(1) as f64).sqrt()).ceil()
                as u64)
                .max(1);
            let radius = confidence_radius(k, horizon, self.delta, prev_len);
            {
                let r = rec.begin_phase(m, &active, &bad);
                r.explore_len = len;
                r.stabilize_len = z;
            }

            let cap = 1.0 + 1.0 / horizon as f64;
            for &b in &bad {
                rec.repeat(&Incentive::one_hot(b, cap, k)?, Block::Stabilize, z)?;
            }

            for &a in &active {
                let out = noisy_binary_search(rec, a)?;
                rec.record_search(a, &out);
                let bar = enlarge_incentive(out.value, radius, z, horizon);
                rec.record().incentives.push((a, bar));
                rec.repeat(&Incentive::one_hot(a, bar, k)?, Block::Explore, len)?;
            }

            let eliminated = match self.elimination {
                Elimination::Online => {
                    let bonus = 1.5 * 0.5f64.powi(m as i32);
                    let mut out = Vec::new();
                    for &a in &active {
                        let theta = rec.principal_means();
                        let obs = rec.propose(&elimination_incentive(a, &active, &theta, bonus)?, Block::Eliminate)?;
                        if obs.arm != a {
                            out.push(a);
                        }
                    }
                    out
                }
                Elimination::Offline => {
                    let mut searched = Vec::with_capacity(active.len());
                    let mut snapshots = Vec::with_capacity(active.len());
                    for &a in &active {
                        let out = noisy_binary_search(rec, a)?;
                        rec.record_search(a, &out);
                        searched.push(out.value);
                        snapshots.push(rec.principal_means());
                    }
                    let slack = offline_slack(horizon, len, active.len(), bad.len(), prev_len);
                    offline_eliminate(&active, &searched, &snapshots, m, slack)
                }
            };

            active.retain(|a| !eliminated.contains(a));
            bad.extend(&eliminated);
            bad.sort_unstable();
            let r = rec.record();
            r.eliminated = eliminated;
            r.completed = true;
            prev_len = len;
        }
        Ok(())
    }
}
