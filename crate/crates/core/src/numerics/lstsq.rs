//! Least squares on a growing column subset.
//!
//! The factorisation `A_S = Q R` is kept as an explicit orthonormal `Q`
//! (classical Gram-Schmidt with one re-orthogonalisation pass) and a packed
//! upper-triangular `R`. Appending a column costs `O(m·|S|)`; nothing is
//! refactored.

use super::matrix::{dot, norm2, Matrix};
use crate::error::{Error, Result};

/// A column is rejected when its component orthogonal to the current span is
/// below this fraction of the largest column norm in the support.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquaresSolution {
    /// Support in insertion order; `coefficients[i]` belongs to `support[i]`.
    pub support: Vec<usize>,
    pub coefficients: Vec<f64>,
    pub residual: Vec<f64>,
    pub residual_norm: f64,
}

#[derive(Debug, Clone)]
pub struct IncrementalLeastSquares<'a> {
    a: &'a Matrix,
    y: &'a [f64],
    support: Vec<usize>,
    /// Orthonormal basis, column-major `m × k`.
    q: Vec<f64>,
    /// Column `j` of R stored as `j + 1` entries.
    r: Vec<f64>,
    /// `Qᵀ y`.
    qty: Vec<f64>,
    residual: Vec<f64>,
    max_col_norm: f64,
}

impl<'a> IncrementalLeastSquares<'a> {
    pub fn new(a: &'a Matrix, y: &'a [f64]) -> Result<Self> {
        if y.len() != a.rows() {
            return Err(Error::DimensionMismatch {
                what: "measurement length",
                expected: a.rows(),
                found: y.len(),
            });
        }
        Ok(IncrementalLeastSquares {
            a,
            y,
            support: Vec::new(),
            q: Vec::new(),
            r: Vec::new(),
            qty: Vec::new(),
            residual: y.to_vec(),
            max_col_norm: 0.0,
        })
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn residual(&self) -> &[f64] {
        &self.residual
    }

    pub fn residual_norm(&self) -> f64 {
        norm2(&self.residual)
    }

    fn q_col(&self, j: usize) -> &[f64] {
        let m = self.a.rows();
        &self.q[j * m..(j + 1) * m]
    }

    /// Orthogonal projection of `v` onto the complement of span(A_S).
    pub fn project_out(&self, v: &mut [f64]) {
        for _ in 0..2 {
            for j in 0..self.support.len() {
                let qj = self.q_col(j);
                let h = dot(qj, v);
                for (vi, &qi) in v.iter_mut().zip(qj) {
                    *vi -= h * qi;
                }
            }
        }
    }

    /// Appends column `index` of `A` to the support and updates the
    /// factorisation, coefficients and residual.
    pub fn push(&mut self, index: usize) -> Result<()> {
        let m = self.a.rows();
        if index >= self.a.cols() {
            return Err(Error::IndexOutOfRange {
                index,
                len: self.a.cols(),
            });
        }
        if self.support.len() >= m {
            return Err(Error::RankDeficient { index, ratio: 0.0 });
        }
        let col = self.a.col(index);
        let col_norm = norm2(col);
        let max_norm = self.max_col_norm.max(col_norm);

        let k = self.support.len();
        let mut v = col.to_vec();
        let mut rcol = vec![0.0; k + 1];
        // Two CGS passes keep Q orthonormal to working precision.
        for _ in 0..2 {
            for j in 0..k {
                let qj = self.q_col(j);
                let h = dot(qj, &v);
                rcol[j] += h;
                for (vi, &qi) in v.iter_mut().zip(qj) {
                    *vi -= h * qi;
                }
            }
        }
        let diag = norm2(&v);
        if !(max_norm > 0.0) || diag <= RANK_TOLERANCE * max_norm {
            let ratio = if max_norm > 0.0 { diag / max_norm } else { 0.0 };
            return Err(Error::RankDeficient { index, ratio });
        }
        rcol[k] = diag;
        for vi in &mut v {
            *vi /= diag;
        }

        let qty_new = dot(&v, self.y);
        let along = dot(&v, &self.residual);
        for (ri, &qi) in self.residual.iter_mut().zip(&v) {
            *ri -= along * qi;
        }

        self.q.extend_from_slice(&v);
        self.r.extend_from_slice(&rcol);
        self.qty.push(qty_new);
        self.support.push(index);
        self.max_col_norm = max_norm;
        Ok(())
    }

    /// Solves `R c = Qᵀ y` by back substitution.
    pub fn coefficients(&self) -> Vec<f64> {
        let k = self.support.len();
        let mut c = self.qty.clone();
        for i in (0..k).rev() {
            let mut s = c[i];
            for j in i + 1..k {
                s -= self.r_entry(i, j) * c[j];
            }
            c[i] = s / self.r_entry(i, i);
        }
        c
    }

    #[inline]
    fn r_entry(&self, i: usize, j: usize) -> f64 {
        // Column j starts at j(j+1)/2.
        self.r[j * (j + 1) / 2 + i]
    }

    pub fn solution(&self) -> LeastSquaresSolution {
        LeastSquaresSolution {
            support: self.support.clone(),
            coefficients: self.coefficients(),
            residual: self.residual.clone(),
            residual_norm: self.residual_norm(),
        }
    }
}

/// Solves `min_c ‖y − A_S c‖₂` for the listed support.
pub fn least_squares(a: &Matrix, y: &[f64], support: &[usize]) -> Result<LeastSquaresSolution> {
    if support.len() > a.rows() {
        return Err(Error::DimensionMismatch {
            what: "support size (at most rows)",
            expected: a.rows(),
            found: support.len(),
        });
    }
    let mut ls = IncrementalLeastSquares::new(a, y)?;
    for &j in support {
        ls.push(j)?;
    }
    Ok(ls.solution())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gaussian_matrix;

    #[test]
    fn empty_support_returns_y() {
        let a = gaussian_matrix(6, 9, 3).unwrap();
        let y = vec![1.0, -2.0, 0.5, 0.0, 3.0, 1.0];
        let sol = least_squares(&a, &y, &[]).unwrap();
        assert!(sol.coefficients.is_empty());
        assert_eq!(sol.residual, y);
        assert_eq!(sol.residual_norm, norm2(&y));
    }

    #[test]
    fn square_system_interpolates() {
        let a = gaussian_matrix(8, 8, 11).unwrap();
        let x: Vec<f64> = (0..8).map(|i| (i as f64) - 3.5).collect();
        let y = a.mul_vec(&x).unwrap();
        let all: Vec<usize> = (0..8).collect();
        let sol = least_squares(&a, &y, &all).unwrap();
        assert!(sol.residual_norm <= 1e-10 * norm2(&y));
        for (c, t) in sol.coefficients.iter().zip(&x) {
            assert!((c - t).abs() < 1e-9);
        }
    }

    #[test]
    fn dependent_column_rejected() {
        let mut a = Matrix::zeros(4, 3);
        for i in 0..4 {
            a.set(i, 0, 1.0 + i as f64);
            a.set(i, 1, 2.0 * (1.0 + i as f64));
            a.set(i, 2, if i == 0 { 1.0 } else { 0.0 });
        }
        let y = [1.0, 0.0, 0.0, 0.0];
        assert!(matches!(
            least_squares(&a, &y, &[0, 1]),
            Err(Error::RankDeficient { index: 1, .. })
        ));
        assert!(matches!(
            least_squares(&a, &y, &[0, 0]),
            Err(Error::RankDeficient { index: 0, .. })
        ));
    }

    #[test]
    fn dimension_errors() {
        let a = gaussian_matrix(3, 5, 1).unwrap();
        assert!(matches!(
            least_squares(&a, &[1.0, 2.0], &[0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            least_squares(&a, &[1.0, 2.0, 3.0], &[0, 1, 2, 3]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            least_squares(&a, &[1.0, 2.0, 3.0], &[5]),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn residual_orthogonal_to_support() {
        let a = gaussian_matrix(30, 60, 5).unwrap();
        let y: Vec<f64> = (0..30).map(|i| ((i * 7) % 11) as f64 - 5.0).collect();
        let s = [3, 17, 42, 8, 55];
        let sol = least_squares(&a, &y, &s).unwrap();
        let tol = 1e-9 * norm2(&y);
        for &j in &s {
            assert!(dot(&sol.residual, a.col(j)).abs() <= tol);
        }
    }
}
