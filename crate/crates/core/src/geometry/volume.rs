//! Monte Carlo estimates on inflated bodies `S + zB(0,1)` by rejection from a bounding box.

use rand::Rng;

use super::body::ConvexBody;
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::rng::StreamRng;

/// Proposals allowed per requested sample before the body is declared degenerate.
pub const MAX_PROPOSALS_PER_SAMPLE: usize = 10_000;

/// `n` uniform samples from `S + zB(0,1)`.
pub fn sample_inflated(body: &ConvexBody, z: f64, n: usize, rng: &mut StreamRng) -> Result<Vec<Vec<f64>>> {
    let bbox = body.bounding_box(z)?;
    let cap = n.saturating_mul(MAX_PROPOSALS_PER_SAMPLE).max(MAX_PROPOSALS_PER_SAMPLE);
    let mut out = Vec::with_capacity(n);
    let mut proposals = 0usize;
    let mut v = vec![0.0; body.dim()];
    while out.len() < n {
        if proposals >= cap {
            return Err(Error::DegenerateBody { accepted: out.len(), proposals });
        }
        proposals += 1;
        for (x, (lo, hi)) in v.iter_mut().zip(&bbox) {
            *x = lo + (hi - lo) * rng.random::<f64>();
        }
        if body.inflated_contains(&v, z) {
            out.push(v.clone());
        }
    }
    Ok(out)
}

/// Fraction of `S + zB(0,1)` with `<v, x> >= threshold`.
pub fn volume_fraction_above(
    body: &ConvexBody,
    z: f64,
    x: &[f64],
    threshold: f64,
    rng: &mut StreamRng,
    n_samples: usize,
) -> Result<f64> {
    let samples = sample_inflated(body, z, n_samples, rng)?;
    Ok(fraction_above(&samples, x, threshold))
}

pub fn fraction_above(samples: &[Vec<f64>], x: &[f64], threshold: f64) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().filter(|v| dot(v, x) >= threshold).count() as f64 / samples.len() as f64
}

/// Fraction of samples of `S_t + zB` that also lie in `next + zB`: the Steiner-potential ratio.
pub fn potential_ratio(samples: &[Vec<f64>], next: &ConvexBody, z: f64) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().filter(|v| next.inflated_contains(v, z)).count() as f64 / samples.len() as f64
}

/// `y` such that half of `S + zB` satisfies `<v, x> >= (y - eps) / scale`.
///
/// The cut level is the empirical median of `<v, x>` over `samples` drawn from `S + zB`.
pub fn halving_cut(samples: &[Vec<f64>], x: &[f64], scale: f64, eps: f64) -> Result<f64> {
    if samples.is_empty() || scale <= 0.0 {
        return Err(Error::BracketFailure);
    }
    let mut proj: Vec<f64> = samples.iter().map(|v| dot(v, x)).collect();
    proj.sort_by(f64::total_cmp);
    let median = proj[proj.len() / 2];
    Ok(scale * median + eps)
}

/// [`halving_cut`] drawing its own samples.
pub fn steiner_halving_cut(
    body: &ConvexBody,
    z: f64,
    x: &[f64],
    scale: f64,
    eps: f64,
    rng: &mut StreamRng,
    n_samples: usize,
) -> Result<f64> {
    let samples = sample_inflated(body, z, n_samples, rng)?;
    halving_cut(&samples, x, scale, eps)
}
