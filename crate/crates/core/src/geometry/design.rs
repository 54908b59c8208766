//! Approximate G-optimal designs by Frank-Wolfe on the log-determinant.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;

pub const MAX_DESIGN_ITERATIONS: usize = 10_000;
const DUPLICATE_TOL: f64 = 1e-12;

/// Weights over a list of vectors with the leverage they achieve.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignWeights {
    /// One weight per input vector; duplicates beyond the first get zero.
    pub weights: Vec<f64>,
    /// `max_z ||z||^2_{G^-1}` in the spanned subspace.
    pub max_leverage: f64,
    /// Dimension of the span of the inputs.
    pub rank: usize,
}

/// Gram matrix `sum_z w(z) z z^T`.
pub fn gram(z: &[Vec<f64>], weights: &[f64]) -> DMatrix<f64> {
    let d = z.first().map_or(0, Vec::len);
    let mut g = DMatrix::zeros(d, d);
    for (v, &w) in z.iter().zip(weights) {
        if w > 0.0 {
            let v = DVector::from_column_slice(v);
            g += w * &v * v.transpose();
        }
    }
    g
}

/// Leverages `||z||^2_{G^+}` of every vector under `weights`.
pub fn leverages(z: &[Vec<f64>], weights: &[f64]) -> Vec<f64> {
    let g = gram(z, weights);
    z.iter()
        .map(|v| {
            let v = DVector::from_column_slice(v);
            v.dot(&linalg::pinv_solve(&g, &v))
        })
        .collect()
}

/// Weights with `max_z ||z||^2_{G^-1} <= 2 r` where `r` is the dimension of `span(Z)`.
pub fn approx_g_optimal_design(z: &[Vec<f64>]) -> Result<DesignWeights> {
    if z.is_empty() {
        return Err(Error::SingularDesign);
    }
    let d = z[0].len();
    let mut unique: Vec<usize> = Vec::new();
    for (i, v) in z.iter().enumerate() {
        if !unique.iter().any(|&j| linalg::norm(&linalg::sub(v, &z[j])) <= DUPLICATE_TOL) {
            unique.push(i);
        }
    }

    // Coordinates in an orthonormal basis of the span.
    let cols = DMatrix::from_fn(d, unique.len(), |r, c| z[unique[c]][r]);
    let svd = cols.clone().svd(true, false);
    let u = svd.u.as_ref().expect("svd u");
    let sigma_max = svd.singular_values.max();
    let basis: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > linalg::PINV_RCOND * sigma_max && sigma_max > 0.0)
        .collect();
    let rank = basis.len();
    if rank == 0 {
        return Err(Error::SingularDesign);
    }
    let coords: Vec<Vec<f64>> = unique
        .iter()
        .map(|&i| basis.iter().map(|&b| linalg::dot(u.column(b).as_slice(), &z[i])).collect())
        .collect();

    let n = coords.len();
    let r = rank as f64;
    let bound = 2.0 * r;
    let mut w = vec![1.0 / n as f64; n];
    let mut lev = leverages(&coords, &w);
    for _ in 0..MAX_DESIGN_ITERATIONS {
        let (k, g) = lev
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, l)| if l > acc.1 { (i, l) } else { acc });
        if g <= bound {
            let mut weights = vec![0.0; z.len()];
            for (j, &i) in unique.iter().enumerate() {
                weights[i] = w[j];
            }
            return Ok(DesignWeights { weights, max_leverage: g, rank });
        }
        let step = (g / r - 1.0) / (g - 1.0);
        for x in w.iter_mut() {
            *x *= 1.0 - step;
        }
        w[k] += step;
        lev = leverages(&coords, &w);
    }
    let leverage = lev.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Err(Error::DesignNotConverged { leverage, bound })
}
