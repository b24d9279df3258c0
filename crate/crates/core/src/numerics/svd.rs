//! Singular values by one-sided (Hestenes) Jacobi.
//!
//! Columns are rotated pairwise until mutually orthogonal; the singular
//! values are then the column norms. This converges to high relative
//! accuracy, including for the smallest singular value, which is the only
//! one the recovery diagnostic needs.

use super::matrix::{dot, Matrix};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;

/// All singular values of `b`, in descending order.
pub fn singular_values(b: &Matrix) -> Result<Vec<f64>> {
    if b.rows() == 0 || b.cols() == 0 {
        return Err(Error::EmptyMatrix);
    }
    // Work with the orientation that has at least as many rows as columns.
    let (rows, cols, mut w) = if b.rows() >= b.cols() {
        (b.rows(), b.cols(), b.as_slice().to_vec())
    } else {
        let t = Matrix::from_fn(b.cols(), b.rows(), |i, j| b.get(j, i));
        (t.rows(), t.cols(), t.as_slice().to_vec())
    };

    let eps = f64::EPSILON;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let (cp, cq) = split_cols(&mut w, rows, p, q);
                let alpha = dot(cp, cp);
                let beta = dot(cq, cq);
                let gamma = dot(cp, cq);
                if gamma == 0.0 || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
                    let (xp, yq) = (*x, *y);
                    *x = c * xp - s * yq;
                    *y = s * xp + c * yq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<f64> = (0..cols)
        .map(|j| dot(&w[j * rows..(j + 1) * rows], &w[j * rows..(j + 1) * rows]).sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

fn split_cols(w: &mut [f64], rows: usize, p: usize, q: usize) -> (&mut [f64], &mut [f64]) {
    debug_assert!(p < q);
    let (left, right) = w.split_at_mut(q * rows);
    (&mut left[p * rows..(p + 1) * rows], &mut right[..rows])
}

/// Smallest singular value of `b`.
pub fn min_singular_value(b: &Matrix) -> Result<f64> {
    let sv = singular_values(b)?;
    Ok(*sv.last().expect("non-empty matrix has singular values"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gaussian_matrix;

    #[test]
    fn identity_is_one() {
        assert!((min_singular_value(&Matrix::identity(5)).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_unit_column() {
        let b = Matrix::from_col_major(3, 1, vec![0.6, 0.0, 0.8]).unwrap();
        assert!((min_singular_value(&b).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn empty_rejected() {
        assert!(matches!(min_singular_value(&Matrix::zeros(0, 3)), Err(Error::EmptyMatrix)));
    }

    #[test]
    fn diagonal_values_recovered() {
        let b = Matrix::from_rows(&[
            vec![3.0, 0.0, 0.0],
            vec![0.0, -0.25, 0.0],
            vec![0.0, 0.0, 2.0],
            vec![0.0, 0.0, 0.0],
        ])
        .unwrap();
        let sv = singular_values(&b).unwrap();
        assert_eq!(sv, vec![3.0, 2.0, 0.25]);
    }

    #[test]
    fn wide_matrix_uses_transpose() {
        let a = gaussian_matrix(4, 9, 8).unwrap();
        let t = Matrix::from_fn(9, 4, |i, j| a.get(j, i));
        let s1 = singular_values(&a).unwrap();
        let s2 = singular_values(&t).unwrap();
        for (x, y) in s1.iter().zip(&s2) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn bounded_by_first_column_norm() {
        let b = gaussian_matrix(20, 6, 4).unwrap();
        let smin = min_singular_value(&b).unwrap();
        assert!(smin <= crate::numerics::norm2(b.col(0)));
    }
}
