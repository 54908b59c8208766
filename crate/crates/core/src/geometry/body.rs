//! Unit ball intersected with halfspaces, with projection, width and bounding boxes.

use crate::error::{Error, Result};
use crate::linalg::{dot, norm};

/// Tolerance for projections used in membership tests.
pub const PROJECTION_TOL: f64 = 1e-9;
/// Tolerance for linear maximization over the body.
pub const WIDTH_TOL: f64 = 1e-8;
const MAX_SWEEPS: usize = 20_000;
const MAX_ASCENT_STEPS: usize = 2_000;

/// Halfspace `<u, v> <= c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Self {
        Self { normal, offset }
    }

    pub fn violation(&self, v: &[f64]) -> f64 {
        dot(&self.normal, v) - self.offset
    }

    fn project(&self, v: &mut [f64]) {
        let viol = self.violation(v);
        if viol > 0.0 {
            let nn = dot(&self.normal, &self.normal);
            if nn > 0.0 {
                for (x, u) in v.iter_mut().zip(&self.normal) {
                    *x -= viol / nn * u;
                }
            }
        }
    }
}

fn project_ball(v: &mut [f64]) {
    let n = norm(v);
    if n > 1.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
}

/// `B(0,1) ∩ {v : <u_j, v> <= c_j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexBody {
    dim: usize,
    halfspaces: Vec<Halfspace>,
}

impl ConvexBody {
    pub fn ball(dim: usize) -> Self {
        Self { dim, halfspaces: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    /// A new body with one more halfspace.
    pub fn cut(&self, h: Halfspace) -> Self {
        let mut next = self.clone();
        next.halfspaces.push(h);
        next
    }

    /// Add `<u, v> <= c`.
    pub fn with_upper(&self, normal: &[f64], offset: f64) -> Self {
        self.cut(Halfspace::new(normal.to_vec(), offset))
    }

    /// Add `<u, v> >= c`.
    pub fn with_lower(&self, normal: &[f64], offset: f64) -> Self {
        self.cut(Halfspace::new(normal.iter().map(|x| -x).collect(), -offset))
    }

    /// Largest constraint violation at `v` (nonpositive inside).
    pub fn max_violation(&self, v: &[f64]) -> f64 {
        self.halfspaces.iter().map(|h| h.violation(v)).fold(norm(v) - 1.0, f64::max)
    }

    pub fn contains(&self, v: &[f64], tol: f64) -> bool {
        self.max_violation(v) <= tol
    }

    /// Euclidean projection by Dykstra's alternating projections.
    pub fn project(&self, v: &[f64], tol: f64) -> Vec<f64> {
        let mut x = v.to_vec();
        if self.contains(&x, 0.0) {
            return x;
        }
        if self.halfspaces.is_empty() {
            project_ball(&mut x);
            return x;
        }
        let sets = self.halfspaces.len() + 1;
        let mut corrections = vec![vec![0.0; self.dim]; sets];
        let mut y = vec![0.0; self.dim];
        for _ in 0..MAX_SWEEPS {
            let mut moved = 0.0f64;
            for (s, corr) in corrections.iter_mut().enumerate() {
                for k in 0..self.dim {
                    y[k] = x[k] + corr[k];
                }
                let mut p = y.clone();
                if s == 0 {
                    project_ball(&mut p);
                } else {
                    self.halfspaces[s - 1].project(&mut p);
                }
                for k in 0..self.dim {
                    corr[k] = y[k] - p[k];
                    moved = moved.max((p[k] - x[k]).abs());
                    x[k] = p[k];
                }
            }
            if moved < tol && self.max_violation(&x) < tol {
                break;
            }
        }
        x
    }

    /// Distance from `v` to the body.
    pub fn distance(&self, v: &[f64]) -> f64 {
        let p = self.project(v, PROJECTION_TOL);
        norm(&crate::linalg::sub(v, &p))
    }

    /// Membership in the inflation `S + zB(0,1)`.
    pub fn inflated_contains(&self, v: &[f64], z: f64) -> bool {
        let nv = norm(v);
        if nv > 1.0 + z {
            return false;
        }
        let mut inside = nv <= 1.0;
        for h in &self.halfspaces {
            let viol = h.violation(v);
            if viol > 0.0 {
                inside = false;
                if viol > z * norm(&h.normal) {
                    return false;
                }
            }
        }
        inside || self.distance(v) <= z
    }

    /// `argmax_{v in S} <u, v>` by projected gradient ascent.
    pub fn maximize(&self, u: &[f64]) -> Result<Vec<f64>> {
        let nu = norm(u);
        if nu == 0.0 {
            return Ok(self.project(&vec![0.0; self.dim], WIDTH_TOL));
        }
        let dir: Vec<f64> = u.iter().map(|x| x / nu).collect();
        if self.halfspaces.is_empty() {
            return Ok(dir);
        }
        let mut x = self.project(&dir, WIDTH_TOL * 0.1);
        let violation = self.max_violation(&x);
        if violation > 1e-6 {
            return Err(Error::InfeasibleBody { violation });
        }
        let mut step = 1.0;
        let mut best = dot(&dir, &x);
        for _ in 0..MAX_ASCENT_STEPS {
            let trial: Vec<f64> = x.iter().zip(&dir).map(|(a, b)| a + step * b).collect();
            let next = self.project(&trial, WIDTH_TOL * 0.1);
            let value = dot(&dir, &next);
            let moved = norm(&crate::linalg::sub(&next, &x));
            if value < best - WIDTH_TOL {
                step *= 0.5;
                continue;
            }
            x = next;
            let gain = value - best;
            best = best.max(value);
            if moved < WIDTH_TOL || gain.abs() < WIDTH_TOL * 1e-2 {
                break;
            }
        }
        Ok(x)
    }

    /// `max_{x,y in S} <u, x - y>`.
    pub fn width(&self, u: &[f64]) -> Result<f64> {
        let hi = self.maximize(u)?;
        let neg: Vec<f64> = u.iter().map(|x| -x).collect();
        let lo = self.maximize(&neg)?;
        Ok((dot(u, &hi) - dot(u, &lo)).max(0.0))
    }

    /// Coordinate-wise bounds of `S + zB(0,1)`.
    pub fn bounding_box(&self, z: f64) -> Result<Vec<(f64, f64)>> {
        (0..self.dim)
            .map(|k| {
                let mut e = vec![0.0; self.dim];
                e[k] = 1.0;
                let hi = self.maximize(&e)?[k];
                e[k] = -1.0;
                let lo = self.maximize(&e)?[k];
                Ok((lo - z, hi + z))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_width() {
        let b = ConvexBody::ball(2);
        assert!((b.width(&[3.0, 4.0]).unwrap() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn half_ball_width() {
        let b = ConvexBody::ball(2).with_upper(&[1.0, 0.0], 0.0);
        assert!((b.width(&[1.0, 0.0]).unwrap() - 1.0).abs() < 1e-7);
    }

    #[test]
    fn projection_onto_half_ball() {
        let b = ConvexBody::ball(2).with_upper(&[1.0, 0.0], 0.0);
        let p = b.project(&[2.0, 0.5], PROJECTION_TOL);
        assert!(p[0].abs() < 1e-9 && (p[1] - 0.5).abs() < 1e-9);
        let p = b.project(&[1.0, 2.0], PROJECTION_TOL);
        assert!(p[0].abs() < 1e-8 && (p[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn inflated_membership() {
        let b = ConvexBody::ball(2).with_upper(&[1.0, 0.0], 0.0);
        assert!(b.inflated_contains(&[0.2, 0.0], 0.25));
        assert!(!b.inflated_contains(&[0.3, 0.0], 0.25));
        // Near the corner (0, 1): distance to the body is the distance to the corner.
        let v = [0.1, 1.1];
        let d = (0.01f64 + 0.01).sqrt();
        assert!(b.inflated_contains(&v, d + 1e-6));
        assert!(!b.inflated_contains(&v, d - 1e-6));
    }

    #[test]
    fn infeasible_body_is_reported() {
        let b = ConvexBody::ball(2).with_upper(&[1.0, 0.0], -0.6).with_lower(&[1.0, 0.0], 0.6);
        assert!(matches!(b.width(&[0.0, 1.0]), Err(Error::InfeasibleBody { .. })));
    }
}
