//! Regret scaling across a grid of horizons.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::experiment::RunSummary;

/// Normalized ratios above this are flagged as growing faster than the target rate.
pub const FLAG_THRESHOLD: f64 = 1.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub horizon: u64,
    pub seeds: usize,
    pub mean_regret: f64,
    /// `mean_regret / T^exponent`.
    pub normalized: f64,
    /// `mean_regret / T`.
    pub per_round: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub exponent: f64,
    pub points: Vec<ScalingPoint>,
    /// Largest `R(T_{i+1}) / R(T_i)` between adjacent grid points.
    pub max_adjacent_ratio: f64,
    /// Largest ratio of adjacent normalized values.
    pub max_normalized_ratio: f64,
    /// Mean regret per round strictly decreases along the grid.
    pub per_round_decreasing: bool,
    pub flagged: bool,
}

/// Fit `(horizon, mean regret)` pairs.
pub fn scaling_from_means(means: &[(u64, usize, f64)], exponent: f64) -> Result<ScalingReport> {
    let mut sorted = means.to_vec();
    sorted.sort_by_key(|p| p.0);
    sorted.dedup_by_key(|p| p.0);
    if sorted.len() < 2 {
        return Err(Error::InsufficientGrid(format!("{} distinct horizons, need at least 2", sorted.len())));
    }
    let points: Vec<ScalingPoint> = sorted
        .iter()
        .map(|&(horizon, seeds, mean_regret)| {
            let t = horizon as f64;
            ScalingPoint { horizon, seeds, mean_regret, normalized: mean_regret / t.powf(exponent), per_round: mean_regret / t }
        })
        .collect();
    let pairs = || points.windows(2);
    let max_adjacent_ratio = pairs().map(|w| w[1].mean_regret / w[0].mean_regret).fold(f64::NEG_INFINITY, f64::max);
    let max_normalized_ratio = pairs().map(|w| w[1].normalized / w[0].normalized).fold(f64::NEG_INFINITY, f64::max);
    let per_round_decreasing = pairs().all(|w| w[1].per_round < w[0].per_round);
    Ok(ScalingReport {
        exponent,
        points,
        max_adjacent_ratio,
        max_normalized_ratio,
        per_round_decreasing,
        flagged: max_normalized_ratio > FLAG_THRESHOLD,
    })
}

/// Average regret under `mode` (0 per-round, 1 oracle, 2 bar) per horizon, then fit.
pub fn scaling_report(summaries: &[RunSummary], exponent: f64, mode: usize) -> Result<ScalingReport> {
    let mut groups: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for s in summaries {
        groups.entry(s.horizon).or_default().push(s.regret(mode));
    }
    let means: Vec<(u64, usize, f64)> =
        groups.into_iter().map(|(t, v)| (t, v.len(), v.iter().sum::<f64>() / v.len() as f64)).collect();
    scaling_from_means(&means, exponent)
}

impl std::fmt::Display for ScalingReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{:>10} {:>6} {:>14} {:>14} {:>10}", "T", "seeds", "mean R_T", "R_T/T^exp", "R_T/T")?;
        for p in &self.points {
            writeln!(f, "{:>10} {:>6} {:>14.3} {:>14.6} {:>10.6}", p.horizon, p.seeds, p.mean_regret, p.normalized, p.per_round)?;
        }
        writeln!(f, "exponent {:.4}", self.exponent)?;
        writeln!(f, "max adjacent ratio {:.4}", self.max_adjacent_ratio)?;
        writeln!(f, "max normalized ratio {:.4}{}", self.max_normalized_ratio, if self.flagged { " (flagged)" } else { "" })?;
        write!(f, "per-round regret decreasing: {}", self.per_round_decreasing)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(f: impl Fn(f64) -> f64) -> Vec<(u64, usize, f64)> {
        [25_000u64, 50_000, 100_000, 200_000].iter().map(|&t| (t, 10, f(t as f64))).collect()
    }

    #[test]
    fn square_root_fixture_is_flat() {
        let r = scaling_from_means(&grid(|t| 3.0 * t.sqrt()), 0.5).unwrap();
        for p in &r.points {
            assert!((p.normalized - 3.0).abs() < 1e-12);
        }
        assert!((r.max_normalized_ratio - 1.0).abs() < 1e-12);
        assert!((r.max_adjacent_ratio - 2f64.sqrt()).abs() < 1e-12);
        assert!(r.per_round_decreasing && !r.flagged);
    }

    #[test]
    fn linear_fixture_is_flagged() {
        let r = scaling_from_means(&grid(|t| 0.2 * t), 0.5).unwrap();
        assert!((r.max_adjacent_ratio - 2.0).abs() < 1e-12);
        assert!(r.flagged);
        assert!(!r.per_round_decreasing);
    }

    #[test]
    fn single_point_is_insufficient() {
        assert!(matches!(scaling_from_means(&[(100, 10, 5.0)], 0.5), Err(Error::InsufficientGrid(_))));
    }
}
