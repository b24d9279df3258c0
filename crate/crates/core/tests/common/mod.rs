//! Reference implementations shared by integration tests.

use nalgebra::{DMatrix, DVector};
use sparse_omp::Matrix;

pub fn to_na(a: &Matrix) -> DMatrix<f64> {
    DMatrix::from_column_slice(a.rows(), a.cols(), a.as_slice())
}

/// Least squares on the columns in `support` via a fresh SVD solve.
pub fn reference_lstsq(a: &DMatrix<f64>, y: &DVector<f64>, support: &[usize]) -> DVector<f64> {
    let sub = a.select_columns(support);
    sub.svd(true, true).solve(y, 1e-14).expect("svd solve")
}

/// OMP with every iteration solved from scratch.
pub fn reference_omp(a: &Matrix, y: &[f64], k: usize) -> (Vec<usize>, Vec<f64>) {
    let na = to_na(a);
    let ny = DVector::from_column_slice(y);
    let mut support: Vec<usize> = Vec::new();
    let mut residual = ny.clone();
    let mut coef = DVector::zeros(0);
    for _ in 0..k {
        let mut best = (f64::NEG_INFINITY, 0);
        for j in (0..a.cols()).filter(|j| !support.contains(j)) {
            let c = na.column(j).dot(&residual).abs();
            if c > best.0 {
                best = (c, j);
            }
        }
        support.push(best.1);
        coef = reference_lstsq(&na, &ny, &support);
        residual = &ny - na.select_columns(&support) * &coef;
    }
    let mut est = vec![0.0; a.cols()];
    for (i, &j) in support.iter().enumerate() {
        est[j] = coef[i];
    }
    (support, est)
}
