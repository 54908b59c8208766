//! Phased elimination that tolerates an agent exploring with probability `O(sqrt(log t / t))`.
//!
//! Searches are repeated and their outputs tested in ascending order with failure counters;
//! eliminations are decided by the median of repeated probes.

use serde::{Deserialize, Serialize};

use crate::env::Incentive;
use crate::error::{Error, Result};
use crate::iid::elimination_incentive;
use crate::phase::{until_exhausted, PrincipalLog, Recorder};
use crate::search::{bisection_search, noisy_binary_search, Block, Channel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExploreVariant {
    /// Learning agent: stabilization, searches with asymmetric check, enlarged incentives.
    Learner,
    /// Agent acting on true means: plain bisection, `+1/T` enlargement, no stabilization.
    Oracle,
}

/// `iota = 16 K T^2 log2(T) ln(4 log2(T) / delta) / delta`.
pub fn iota(num_arms: usize, horizon: u64, delta: f64) -> f64 {
    let t = horizon as f64;
    let l2 = t.log2();
    16.0 * num_arms as f64 * t * t * l2 * (4.0 * l2 / delta).ln() / delta
}

/// Unscaled `32 max{c0,1}^3 4^m K ln(16TK/delta) ln^2(iota)`.
pub fn raw_phase_length(m: u32, num_arms: usize, horizon: u64, delta: f64, c0: f64) -> f64 {
    let k = num_arms as f64;
    let t = horizon as f64;
    32.0 * c0.max(1.0).powi(3)
        * 4f64.powi(m as i32)
        * k
        * (16.0 * t * k / delta).ln()
        * iota(num_arms, horizon, delta).ln().powi(2)
}

/// `ceil(gamma * raw_phase_length)`, at least 1.
pub fn explore_phase_length(m: u32, num_arms: usize, horizon: u64, delta: f64, c0: f64, gamma: f64) -> u64 {
    (gamma * raw_phase_length(m, num_arms, horizon, delta, c0)).ceil().max(1.0) as u64
}

/// Number of repeated searches per active arm: `ceil(2 ln(4 log2(T) / delta))`.
pub fn search_repeats(horizon: u64, delta: f64) -> usize {
    (2.0 * (4.0 * (horizon as f64).log2() / delta).ln()).ceil().max(1.0) as usize
}

/// Number of median-elimination probes: `ceil(8 ln(8 K log2(T) / delta))`.
pub fn vote_count(num_arms: usize, horizon: u64, delta: f64) -> usize {
    (8.0 * (8.0 * num_arms as f64 * (horizon as f64).log2() / delta).ln()).ceil().max(1.0) as usize
}

/// `ceil(gamma * 2 ln^(1/3)(16KT/delta) (|A| T_{m-1} / max{1,|B|})^(2/3))`.
pub fn stabilize_length(num_arms: usize, horizon: u64, delta: f64, active: usize, bad: usize, prev_len: u64, gamma: f64) -> u64 {
    let l = (16.0 * num_arms as f64 * horizon as f64 / delta).ln();
    let ratio = active as f64 * prev_len as f64 / bad.max(1) as f64;
    (gamma * 2.0 * l.cbrt() * ratio.powf(2.0 / 3.0)).ceil().max(1.0) as u64
}

/// `(ln(16KT/delta) max{1,|B|} / (T_{m-1}|A|))^(1/3) + sqrt(ln(16KT/delta) / T_{m-1})`.
pub fn epsilon(num_arms: usize, horizon: u64, delta: f64, active: usize, bad: usize, prev_len: u64) -> f64 {
    let l = (16.0 * num_arms as f64 * horizon as f64 / delta).ln();
    let share = bad.max(1) as f64 / (prev_len as f64 * active as f64);
    (l * share).cbrt() + (l / prev_len as f64).sqrt()
}

/// Enlarged test incentive for a learning agent, capped at `1 + 1/T`.
pub fn enlarge_learner(b: f64, horizon: u64, active: usize, bad: usize, prev_len: u64, eps: f64) -> f64 {
    let share = bad.max(1) as f64 / (prev_len as f64 * active as f64);
    (1.0 + 1.0 / horizon as f64).min(b + share.powf(2.0 / 3.0) + 1.0 / prev_len as f64 + 4.0 * eps)
}

/// Failure threshold `2 c0 sqrt(Y ln 2T) + sqrt(8 ln(iota) / Y)` for `Y >= 1`.
pub fn test_threshold(y: u64, c0: f64, horizon: u64, iota: f64) -> f64 {
    let y = y as f64;
    2.0 * c0 * (y * (2.0 * horizon as f64).ln()).sqrt() + (8.0 * iota.ln() / y).sqrt()
}

/// Upper median: the element at index `n/2` of the sorted votes.
pub fn median_vote(votes: &[u8]) -> u8 {
    let mut v = votes.to_vec();
    v.sort_unstable();
    v.get(v.len() / 2).copied().unwrap_or(1)
}

/// Outcome of incentive testing for one arm.
#[derive(Debug, Clone, PartialEq)]
pub struct TestOutcome {
    /// `(Y, c)` per tested incentive.
    pub counters: Vec<(u64, u64)>,
    /// Total rounds in which the target was played.
    pub target_plays: u64,
}

/// Test `incentives` (ascending) on `target` until `len` target plays have been collected.
pub fn incentive_test<C: Channel + ?Sized>(
    channel: &mut C,
    target: usize,
    incentives: &[f64],
    len: u64,
    c0: f64,
    iota: f64,
) -> Result<TestOutcome> {
    let k = channel.num_arms();
    let horizon = channel.horizon();
    let mut counters = Vec::new();
    let mut target_plays = 0u64;
    for &b in incentives {
        let pi = Incentive::one_hot(target, b, k)?;
        let (mut y, mut c) = (0u64, 0u64);
        loop {
            let obs = channel.propose(&pi, Block::Explore)?;
            y += 1;
            if obs.arm != target {
                c += 1;
            }
            if c as f64 > test_threshold(y, c0, horizon, iota) || y >= 2 * len {
                break;
            }
        }
        counters.push((y, c));
        target_plays += y - c;
        if target_plays >= len {
            break;
        }
    }
    Ok(TestOutcome { counters, target_plays })
}

/// Configuration of the exploration-robust principal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExplorePrincipal {
    pub delta: f64,
    pub gamma: f64,
    /// Upper bound on the agent's exploration constant.
    pub c0: f64,
    pub variant: ExploreVariant,
}

impl ExplorePrincipal {
    pub fn new(delta: f64, c0: f64, variant: ExploreVariant) -> Self {
        Self { delta, gamma: 1.0, c0, variant }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    /// Elimination bonus paid to the tested arm.
    pub fn vote_bonus(&self, num_arms: usize, horizon: u64, len: u64) -> f64 {
        let (k, t) = (num_arms as f64, horizon as f64);
        match self.variant {
            ExploreVariant::Learner => 5.0 * ((16.0 * k * t / self.delta).ln() / (2.0 * len as f64)).sqrt(),
            ExploreVariant::Oracle => 3.0 * ((8.0 * k * t / self.delta).ln() / (2.0 * len as f64)).sqrt(),
        }
    }

    pub fn run<C: Channel + ?Sized>(&self, channel: &mut C) -> Result<PrincipalLog> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidConfig(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::InvalidConfig(format!("gamma must lie in (0, 1], got {}", self.gamma)));
        }
        if !(self.c0 >= 0.0 && self.c0.is_finite()) {
            return Err(Error::InvalidConfig(format!("c0 must be >= 0, got {}", self.c0)));
        }
        until_exhausted(channel, |rec| self.phases(rec))
    }

    fn phases<C: Channel + ?Sized>(&self, rec: &mut Recorder<'_, C>) -> Result<()> {
        let k = rec.num_arms();
        let horizon = rec.horizon();
        let cap = 1.0 + 1.0 / horizon as f64;
        let iota = iota(k, horizon, self.delta);
        let repeats = search_repeats(horizon, self.delta);
        let n_votes = vote_count(k, horizon, self.delta);
        let mut active: Vec<usize> = (0..k).collect();
        let mut bad: Vec<usize> = Vec::new();
        let mut prev_len = 1u64;
        for m in 1u32.. {
            let len = explore_phase_length(m, k, horizon, self.delta, self.c0, self.gamma);
            let stabilize = match self.variant {
                ExploreVariant::Learner if !bad.is_empty() => {
                    stabilize_length(k, horizon, self.delta, active.len(), bad.len(), prev_len, self.gamma)
                }
                _ => 0,
            };
            {
                let r = rec.begin_phase(m, &active, &bad);
                r.explore_len = len;
                r.stabilize_len = stabilize;
            }
            for &b in &bad {
                rec.repeat(&Incentive::one_hot(b, cap, k)?, Block::Stabilize, stabilize)?;
            }

            let eps = epsilon(k, horizon, self.delta, active.len(), bad.len(), prev_len);
            let mut candidates = Vec::with_capacity(active.len());
            for &a in &active {
                let mut outs = Vec::with_capacity(repeats);
                for _ in 0..repeats {
                    let out = match self.variant {
                        ExploreVariant::Learner => noisy_binary_search(rec, a)?,
                        ExploreVariant::Oracle => bisection_search(rec, a)?,
                    };
                    rec.record_search(a, &out);
                    outs.push(out.value);
                }
                outs.sort_by(f64::total_cmp);
                let enlarged: Vec<f64> = outs
                    .iter()
                    .map(|&b| match self.variant {
                        ExploreVariant::Learner => enlarge_learner(b, horizon, active.len(), bad.len(), prev_len, eps),
                        ExploreVariant::Oracle => b + 1.0 / horizon as f64,
                    })
                    .collect();
                candidates.push(enlarged);
            }

            for (&a, cands) in active.iter().zip(&candidates) {
                let out = incentive_test(rec, a, cands, len, self.c0, iota)?;
                let r = rec.record();
                for (i, &(y, c)) in out.counters.iter().enumerate() {
                    r.counters.push((a, y, c));
                    r.incentives.push((a, cands[i]));
                }
            }

            let bonus = self.vote_bonus(k, horizon, len);
            let mut eliminated = Vec::new();
            for &a in &active {
                let theta = rec.principal_means();
                let pi = elimination_incentive(a, &active, &theta, bonus)?;
                let mut votes = Vec::with_capacity(n_votes);
                for _ in 0..n_votes {
                    let obs = rec.propose(&pi, Block::Eliminate)?;
                    votes.push(u8::from(obs.arm == a));
                }
                if median_vote(&votes) == 0 {
                    eliminated.push(a);
                }
                rec.record().votes.push((a, votes));
            }

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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::ScriptedChannel;

    #[test]
    fn phase_length_magnitude_at_small_horizon() {
        let t = 1u64 << 16;
        let delta = 1.0 / t as f64;
        // Independent evaluation: ln(16 K T / delta) = ln(2^37), iota with log2 T = 16.
        let ln_a = 37.0 * 2f64.ln();
        let iota_o = 16.0 * 2.0 * 2f64.powi(32) * 16.0 * (64.0 * t as f64).ln() * t as f64;
        let expected = 32.0 * 4.0 * 2.0 * ln_a * iota_o.ln().powi(2);
        let got = raw_phase_length(1, 2, t, delta, 1.0);
        assert!((got / expected - 1.0).abs() < 1e-12);
        assert!((ln_a - 25.65).abs() < 0.01);
        assert!((iota_o.ln() - 42.2).abs() < 0.1);
        assert!(got > 1.1e7 && got < 1.25e7, "{got}");
    }

    #[test]
    fn c0_is_clamped_and_ratio_is_four() {
        let (k, t, d) = (3, 1 << 12, 1e-3);
        assert_eq!(raw_phase_length(2, k, t, d, 0.0), raw_phase_length(2, k, t, d, 1.0));
        assert!(raw_phase_length(2, k, t, d, 0.0) > 0.0);
        let r = raw_phase_length(3, k, t, d, 2.0) / raw_phase_length(2, k, t, d, 2.0);
        assert!((r - 4.0).abs() < 1e-12);
    }

    #[test]
    fn median_examples() {
        assert_eq!(median_vote(&[1, 1, 1, 0, 0, 1, 1, 1, 1]), 1);
        assert_eq!(median_vote(&[0; 7]), 0);
        assert_eq!(median_vote(&[0, 1]), 1);
        assert_eq!(median_vote(&[0, 0, 1]), 0);
    }

    #[test]
    fn sufficient_first_incentive_runs_to_cap() {
        let mut ch = ScriptedChannel::new(2, 10_000, |_: &Incentive, _| 0);
        let out = incentive_test(&mut ch, 0, &[0.5, 0.7], 40, 1.0, 1e6).unwrap();
        assert_eq!(out.counters, vec![(80, 0)]);
        assert_eq!(out.target_plays, 80);
    }

    #[test]
    fn refused_incentive_crosses_threshold_at_first_crossing() {
        let (t, iota) = (1u64 << 12, 1e8);
        // Smallest Y with Y > 2 sqrt(Y ln 2T) + sqrt(8 ln(iota) / Y), found by scanning.
        let crossing = (1u64..).find(|&y| y as f64 > test_threshold(y, 1.0, t, iota)).unwrap();
        let mut ch = ScriptedChannel::new(2, t, |pi: &Incentive, _| usize::from(pi.get(0) < 0.6));
        let out = incentive_test(&mut ch, 0, &[0.5, 0.7], 1000, 1.0, iota).unwrap();
        assert_eq!(out.counters[0], (crossing, crossing));
        assert_eq!(out.counters[1], (2000, 0));
    }

    #[test]
    fn enlarged_incentives_stay_sorted() {
        let outs = [0.1, 0.3, 0.31, 0.9];
        let e: Vec<f64> = outs.iter().map(|&b| enlarge_learner(b, 1000, 3, 1, 50, 0.05)).collect();
        assert!(e.windows(2).all(|w| w[0] <= w[1]));
    }
}
