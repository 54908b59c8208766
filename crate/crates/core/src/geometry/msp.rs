//! Parameter search for a linear agent: cut a convex body containing the agent's reward vector
//! by observing which of two arms it prefers under a calibrated payment gap.
//!
//! Each cut halves (approximately) the Steiner potential `Vol(S + zB)` at the current scale and
//! is shifted by `eps` so that a vector within `eps/2` of the agent's estimate is never cut off.

use super::body::{ConvexBody, Halfspace};
use super::volume::{halving_cut, potential_ratio, sample_inflated};
use crate::env::Incentive;
use crate::error::{Error, Result};
use crate::linalg::{norm, sub};
use crate::rng::StreamRng;
use crate::search::{Block, Channel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MspOptions {
    /// Monte Carlo samples per volume estimate.
    pub n_samples: usize,
    /// Also estimate the potential ratio of every cut (doubles the sampling work).
    pub track_potential: bool,
}

impl Default for MspOptions {
    fn default() -> Self {
        Self { n_samples: 20_000, track_potential: false }
    }
}

/// One cut.
#[derive(Debug, Clone, PartialEq)]
pub struct MspIteration {
    pub pair: (usize, usize),
    pub width: f64,
    /// Scale index `i` with `width <= 2^-i`.
    pub index: i32,
    pub z: f64,
    pub y: f64,
    pub arm: usize,
    pub halfspace: Halfspace,
    /// Estimated `Vol(S_{t+1} + zB) / Vol(S_t + zB)`.
    pub potential_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MspOutcome {
    pub center: Vec<f64>,
    pub body: ConvexBody,
    pub iterations: Vec<MspIteration>,
}

impl MspOutcome {
    /// The body after the first `t` cuts.
    pub fn body_at(&self, t: usize) -> ConvexBody {
        let mut b = ConvexBody::ball(self.body.dim());
        for it in &self.iterations[..t] {
            b = b.cut(it.halfspace.clone());
        }
        b
    }
}

/// Largest `i` with `width <= 2^-i`.
pub fn scale_index(width: f64) -> i32 {
    (-width.log2()).floor() as i32
}

/// Pair of distinct arms maximizing `width(S, a1 - a2)` (lowest indices on ties).
pub fn widest_pair(body: &ConvexBody, features: &[Vec<f64>]) -> Result<((usize, usize), f64)> {
    let mut best = ((0, 1), f64::NEG_INFINITY);
    for i in 0..features.len() {
        for j in i + 1..features.len() {
            let u = sub(&features[i], &features[j]);
            if norm(&u) == 0.0 {
                continue;
            }
            let w = body.width(&u)?;
            if w > best.1 + 1e-12 {
                best = ((i, j), w);
            }
        }
    }
    Ok(best)
}

/// Mean of uniform samples from `body`; falls back to the projection of the origin.
pub fn body_center(body: &ConvexBody, rng: &mut StreamRng, n_samples: usize) -> Vec<f64> {
    match sample_inflated(body, 0.0, n_samples.max(1), rng) {
        Ok(samples) => {
            let mut c = vec![0.0; body.dim()];
            for s in &samples {
                for (a, b) in c.iter_mut().zip(s) {
                    *a += b / samples.len() as f64;
                }
            }
            c
        }
        Err(_) => body.project(&vec![0.0; body.dim()], 1e-9),
    }
}

/// Search the agent's reward vector to accuracy `O(d eps)` in every arm-difference direction.
pub fn msp_search<C: Channel + ?Sized>(
    channel: &mut C,
    features: &[Vec<f64>],
    eps: f64,
    xi: f64,
    rng: &mut StreamRng,
    options: MspOptions,
) -> Result<MspOutcome> {
    if !(eps > 0.0 && xi > 0.0) {
        return Err(Error::InvalidConfig(format!("search needs eps > 0 and xi > 0, got {eps}, {xi}")));
    }
    let k = features.len();
    let d = features.first().map_or(0, Vec::len);
    let mut body = ConvexBody::ball(d);
    let mut iterations = Vec::new();
    loop {
        let ((a1, a2), width) = widest_pair(&body, features)?;
        if width <= 0.0 || !width.is_finite() {
            break;
        }
        let diff = sub(&features[a1], &features[a2]);
        let scale = norm(&diff);
        let x: Vec<f64> = diff.iter().map(|v| v / scale).collect();
        let index = scale_index(width / scale);
        let z = 2f64.powi(-index) / (8.0 * d as f64);
        if z < 4.0 * eps / scale {
            break;
        }
        let samples = sample_inflated(&body, z, options.n_samples, rng)?;
        let y = halving_cut(&samples, &x, scale, eps)?;
        let base = d as f64 + xi;
        let mut pay = vec![0.0; k];
        pay[a1] = base + (-y).max(0.0);
        pay[a2] = base + y.max(0.0);
        let obs = channel.propose(&Incentive::new(pay)?, Block::Search)?;
        let halfspace = if obs.arm == a1 {
            Halfspace::new(x.iter().map(|v| -v).collect(), -(y - eps) / scale)
        } else {
            Halfspace::new(x.clone(), (y + eps) / scale)
        };
        let next = body.cut(halfspace.clone());
        let violation = next.project(&vec![0.0; d], 1e-9);
        let residual = next.max_violation(&violation);
        if residual > 1e-6 {
            return Err(Error::InfeasibleBody { violation: residual });
        }
        let ratio = options.track_potential.then(|| potential_ratio(&samples, &next, z));
        iterations.push(MspIteration {
            pair: (a1, a2),
            width,
            index,
            z,
            y,
            arm: obs.arm,
            halfspace,
            potential_ratio: ratio,
        });
        body = next;
    }
    let center = body_center(&body, rng, options.n_samples);
    Ok(MspOutcome { center, body, iterations })
}
