//! Phased elimination for linear rewards with a least-squares learning agent.
//!
//! Each phase schedules bad and active arms by G-optimal designs, locates the agent's reward
//! vector with the cutting-plane search to price incentives, estimates the principal's own
//! reward vector by least squares and removes arms that are clearly worse in joint reward.

use nalgebra::{DMatrix, DVector};

use crate::env::Incentive;
use crate::error::{Error, Result};
use crate::geometry::{approx_g_optimal_design, msp_search, MspOptions};
use crate::linalg::{dot, sub};
use crate::phase::{until_exhausted, PrincipalLog, Recorder};
use crate::rng::StreamRng;
use crate::search::{Block, Channel};

/// `d ln(4KT/delta)`.
fn log_term(dim: usize, num_arms: usize, horizon: u64, delta: f64) -> f64 {
    dim as f64 * (4.0 * num_arms as f64 * horizon as f64 / delta).ln()
}

/// `ceil(gamma 2^(m+4) d ln(4KT/delta))`, at least 1.
pub fn linear_phase_length(m: u32, dim: usize, num_arms: usize, horizon: u64, delta: f64, gamma: f64) -> u64 {
    (gamma * 2f64.powi(m as i32 + 4) * log_term(dim, num_arms, horizon, delta)).ceil().max(1.0) as u64
}

/// `4 sqrt(d ln(4KT/delta) / min{T_m, (d ln(4KT/delta))^(1/3) T_m^(2/3)})`.
pub fn linear_epsilon(len: u64, dim: usize, num_arms: usize, horizon: u64, delta: f64) -> f64 {
    let l = log_term(dim, num_arms, horizon, delta);
    let t = len as f64;
    4.0 * (l / t.min(l.cbrt() * t.powf(2.0 / 3.0))).sqrt()
}

/// `(T_m, eps_m)` for phase `m`.
pub fn linear_phase_params(m: u32, dim: usize, num_arms: usize, horizon: u64, delta: f64) -> (u64, f64) {
    let len = linear_phase_length(m, dim, num_arms, horizon, delta, 1.0);
    (len, linear_epsilon(len, dim, num_arms, horizon, delta))
}

/// `ceil(w (d ln(4TK/delta))^(1/3) T_m^(2/3))` for every design weight.
pub fn bad_arm_schedule(weights: &[f64], dim: usize, num_arms: usize, horizon: u64, delta: f64, len: u64) -> Vec<u64> {
    let base = log_term(dim, num_arms, horizon, delta).cbrt() * (len as f64).powf(2.0 / 3.0);
    weights.iter().map(|w| (w * base).ceil() as u64).collect()
}

/// `min{2d + 1/T, max_b <c, b - a> + (1 + 32d) eps_prev + 1/T}`.
pub fn linear_enlarged_incentive(center: &[f64], arm: usize, features: &[Vec<f64>], eps_prev: f64, horizon: u64) -> f64 {
    let d = center.len() as f64;
    let t_inv = 1.0 / horizon as f64;
    let a = &features[arm];
    let gap = features.iter().map(|b| dot(center, &sub(b, a))).fold(f64::NEG_INFINITY, f64::max);
    (2.0 * d + t_inv).min(gap + (1.0 + 32.0 * d) * eps_prev + t_inv)
}

/// Eliminate `a` iff `max_{b in active} <nu + c, b - a> > (7 + 32d) eps`.
pub fn linear_offline_eliminate(active: &[usize], features: &[Vec<f64>], nu: &[f64], center: &[f64], eps: f64) -> Vec<usize> {
    let d = nu.len() as f64;
    let joint: Vec<f64> = nu.iter().zip(center).map(|(a, b)| a + b).collect();
    let threshold = (7.0 + 32.0 * d) * eps;
    let best = active.iter().map(|&b| dot(&joint, &features[b])).fold(f64::NEG_INFINITY, f64::max);
    active
        .iter()
        .copied()
        .filter(|&a| best - dot(&joint, &features[a]) > threshold)
        .collect()
}

/// Least-squares estimate `V^-1 sum_t A_t X_t`.
pub fn ols_estimate(v: &DMatrix<f64>, response: &DVector<f64>) -> Result<Vec<f64>> {
    let chol = v.clone().cholesky().ok_or(Error::SingularDesign)?;
    Ok(chol.solve(response).iter().copied().collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearPrincipal {
    pub delta: f64,
    pub gamma: f64,
    pub msp: MspOptions,
}

/// Per-phase estimates of the linear principal.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearPhaseEstimates {
    pub phase: u32,
    pub eps: f64,
    pub center: Vec<f64>,
    pub center_again: Vec<f64>,
    pub nu_hat: Vec<f64>,
    pub msp_rounds: u64,
}

impl LinearPrincipal {
    pub fn new(delta: f64) -> Self {
        Self { delta, gamma: 1.0, msp: MspOptions::default() }
    }

    /// Play until the channel is exhausted. `features` are the public arm vectors.
    pub fn run<C: Channel + ?Sized>(
        &self,
        channel: &mut C,
        features: &[Vec<f64>],
        rng: &mut StreamRng,
    ) -> Result<(PrincipalLog, Vec<LinearPhaseEstimates>)> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidConfig(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::InvalidConfig(format!("gamma must lie in (0, 1], got {}", self.gamma)));
        }
        if features.len() != channel.num_arms() {
            return Err(Error::InvalidConfig("feature count does not match the channel".into()));
        }
        let mut estimates = Vec::new();
        let log = until_exhausted(channel, |rec| self.phases(rec, features, rng, &mut estimates))?;
        Ok((log, estimates))
    }

    fn phases<C: Channel + ?Sized>(
        &self,
        rec: &mut Recorder<'_, C>,
        features: &[Vec<f64>],
        rng: &mut StreamRng,
        estimates: &mut Vec<LinearPhaseEstimates>,
    ) -> Result<()> {
        let k = features.len();
        let d = features[0].len();
        let horizon = rec.horizon();
        let t_inv = 1.0 / horizon as f64;
        let cap = 2.0 * d as f64 + t_inv;
        let mut active: Vec<usize> = (0..k).collect();
        let mut bad: Vec<usize> = Vec::new();
        let mut eps_prev = 1.0;
        for m in 1u32.. {
            let len = linear_phase_length(m, d, k, horizon, self.delta, self.gamma);
            let eps = linear_epsilon(len, d, k, horizon, self.delta);
            rec.begin_phase(m, &active, &bad).explore_len = len;

            let mut v = DMatrix::<f64>::zeros(d, d);
            let mut response = DVector::<f64>::zeros(d);
            let mut play = |rec: &mut Recorder<'_, C>, arm: usize, amount: f64, rounds: u64, block: Block| -> Result<()> {
                let a = DVector::from_column_slice(&features[arm]);
                v += rounds as f64 * &a * a.transpose();
                let pi = Incentive::one_hot(arm, amount, k)?;
                for _ in 0..rounds {
                    let obs = rec.propose(&pi, block)?;
                    response += DVector::from_column_slice(&features[obs.arm]) * obs.reward;
                }
                Ok(())
            };

            if !bad.is_empty() {
                let zb: Vec<Vec<f64>> = bad.iter().map(|&b| features[b].clone()).collect();
                let omega = approx_g_optimal_design(&zb)?;
                let budgets = bad_arm_schedule(&omega.weights, d, k, horizon, self.delta, len);
                rec.record().stabilize_len = budgets.iter().sum();
                for (&b, &u) in bad.iter().zip(&budgets) {
                    play(rec, b, cap, u, Block::Stabilize)?;
                }
            }

            let za: Vec<Vec<f64>> = active.iter().map(|&a| features[a].clone()).collect();
            let rho = approx_g_optimal_design(&za)?;

            let before = rec.round();
            let center = msp_search(rec, features, eps_prev, t_inv, rng, self.msp)?.center;
            let mut msp_rounds = rec.round() - before;
            for (&a, &w) in active.iter().zip(&rho.weights) {
                let bar = linear_enlarged_incentive(&center, a, features, eps_prev, horizon);
                rec.record().incentives.push((a, bar));
                play(rec, a, bar, (w * len as f64).ceil() as u64, Block::Explore)?;
            }
            let nu_hat = ols_estimate(&v, &response)?;

            let before = rec.round();
            let center_again = msp_search(rec, features, eps, t_inv, rng, self.msp)?.center;
            msp_rounds += rec.round() - before;

            let eliminated = linear_offline_eliminate(&active, features, &nu_hat, &center_again, eps);
            estimates.push(LinearPhaseEstimates { phase: m, eps, center, center_again, nu_hat, msp_rounds });
            active.retain(|a| !eliminated.contains(a));
            bad.extend(&eliminated);
            bad.sort_unstable();
            let r = rec.record();
            r.eliminated = eliminated;
            r.completed = true;
            eps_prev = eps;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_one_length_example() {
        let (len, _) = linear_phase_params(1, 2, 8, 1 << 20, 2f64.powi(-10));
        // 2^5 * 2 * ln(4 * 8 * 2^20 * 2^10) = 64 * ln(2^35).
        let oracle = (64.0 * 35.0 * 2f64.ln()).ceil();
        assert_eq!(oracle, 1553.0);
        assert_eq!(len, 1553);
    }

    #[test]
    fn epsilon_decreases_and_switches_branch() {
        let (d, k, t, delta) = (2, 8, 1u64 << 20, 2f64.powi(-10));
        let eps: Vec<f64> = (1..10).map(|m| linear_phase_params(m, d, k, t, delta).1).collect();
        assert!(eps.windows(2).all(|w| w[1] < w[0]));
        let l = log_term(d, k, t, delta);
        // Below the crossover T_m = l the first branch binds, above it the second.
        let small = (l * 0.5).ceil() as u64;
        let large = (l * 4.0).ceil() as u64;
        let direct = |len: u64| 4.0 * (l / len as f64).sqrt();
        assert!((linear_epsilon(small, d, k, t, delta) - direct(small)).abs() < 1e-12);
        assert!(linear_epsilon(large, d, k, t, delta) > direct(large));
    }

    #[test]
    fn bad_arm_schedule_examples() {
        let (d, k, t, delta) = (2, 8, 1u64 << 20, 2f64.powi(-10));
        let l = 2.0 * (4.0 * 8.0 * 2f64.powi(30)).ln();
        let single = bad_arm_schedule(&[1.0], d, k, t, delta, 1553);
        assert_eq!(single[0] as f64, (l.cbrt() * 1553f64.powf(2.0 / 3.0)).ceil());
        assert_eq!(bad_arm_schedule(&[0.0], d, k, t, delta, 1553), vec![0]);
        // Independent evaluation: 0.5 * (2 ln 2^35)^(1/3) * 1553^(2/3).
        let half = 0.5 * (70.0 * 2f64.ln()).cbrt() * 1553f64.powf(2.0 / 3.0);
        assert!((half - 244.57).abs() < 0.01);
        assert_eq!(bad_arm_schedule(&[0.5], d, k, t, delta, 1553), vec![245]);
    }

    #[test]
    fn enlarged_incentive_examples() {
        let f = vec![vec![1.0, 0.0], vec![-1.0, 0.0]];
        let b = linear_enlarged_incentive(&[0.4, 0.0], 1, &f, 0.01, 1_000_000);
        assert!((b - 1.450001).abs() < 1e-12);
        let b = linear_enlarged_incentive(&[0.4, 0.0], 0, &f, 0.01, 1_000_000);
        assert!((b - (65.0 * 0.01 + 1e-6)).abs() < 1e-12);
        let b = linear_enlarged_incentive(&[0.4, 0.0], 1, &f, 10.0, 1_000_000);
        assert_eq!(b, 4.000001);
    }

    #[test]
    fn offline_elimination_examples() {
        let f = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]];
        assert!(linear_offline_eliminate(&[0, 2], &f, &[0.3, 0.1], &[0.2, 0.0], 0.001).is_empty());
        let out = linear_offline_eliminate(&[0, 1], &f, &[0.5, -0.5], &[0.5, 0.0], 0.001);
        assert_eq!(out, vec![1]);
        // Gap exactly at the threshold is retained.
        let eps = 1.0 / 71.0;
        let out = linear_offline_eliminate(&[0, 1], &f, &[0.5, -0.5], &[0.0, 0.0], eps);
        assert!(out.is_empty());
    }

    #[test]
    fn ols_recovers_exactly_without_noise() {
        let nu = [0.3, -0.4];
        let arms = [[1.0, 0.0], [0.0, 1.0], [0.6, 0.8]];
        let mut v = DMatrix::zeros(2, 2);
        let mut r = DVector::zeros(2);
        for a in arms {
            let x = DVector::from_column_slice(&a);
            v += 3.0 * &x * x.transpose();
            r += 3.0 * &x * dot(&nu, &a);
        }
        let est = ols_estimate(&v, &r).unwrap();
        assert!((est[0] - nu[0]).abs() < 1e-10 && (est[1] - nu[1]).abs() < 1e-10);
        assert!(ols_estimate(&DMatrix::zeros(2, 2), &DVector::zeros(2)).is_err());
    }
}
