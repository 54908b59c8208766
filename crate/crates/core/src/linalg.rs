//! Small dense helpers. Vectors are plain `[f64]` slices; matrices go through nalgebra.

use nalgebra::{DMatrix, DVector};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// Relative singular-value cutoff for pseudo-inverses.
pub const PINV_RCOND: f64 = 1e-10;

/// Minimum-norm least-squares solution of `m x = rhs` for symmetric PSD `m`.
///
/// Singular values below `PINV_RCOND * sigma_max` are treated as zero.
pub fn pinv_solve(m: &DMatrix<f64>, rhs: &DVector<f64>) -> DVector<f64> {
    let n = m.nrows();
    if n == 0 {
        return DVector::zeros(0);
    }
    let svd = m.clone().svd(true, true);
    let sigma_max = svd.singular_values.max();
    if sigma_max <= 0.0 {
        return DVector::zeros(n);
    }
    let cutoff = PINV_RCOND * sigma_max;
    let u = svd.u.as_ref().expect("svd u");
    let v_t = svd.v_t.as_ref().expect("svd v_t");
    let ut_rhs = u.transpose() * rhs;
    let mut scaled = DVector::zeros(svd.singular_values.len());
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s > cutoff {
            scaled[i] = ut_rhs[i] / s;
        }
    }
    v_t.transpose() * scaled
}

/// Numerical rank with the same relative cutoff as [`pinv_solve`].
pub fn rank(m: &DMatrix<f64>) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let sigma_max = sv.max();
    if sigma_max <= 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > PINV_RCOND * sigma_max).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pinv_matches_inverse_when_full_rank() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let rhs = DVector::from_vec(vec![1.0, -1.0]);
        let x = pinv_solve(&m, &rhs);
        let exact = m.clone().try_inverse().unwrap() * &rhs;
        assert!((x - exact).norm() < 1e-12);
    }

    #[test]
    fn pinv_zeroes_null_directions() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.0]);
        let rhs = DVector::from_vec(vec![1.0, 0.0]);
        let x = pinv_solve(&m, &rhs);
        assert!((x[0] - 0.5).abs() < 1e-15);
        assert_eq!(x[1], 0.0);
        assert_eq!(rank(&m), 1);
    }
}
