//! Seeded random generation and the dense kernels the rest of the crate
//! builds on.

mod lstsq;
mod matrix;
mod rng;
mod svd;

pub use lstsq::{least_squares, IncrementalLeastSquares, LeastSquaresSolution, RANK_TOLERANCE};
pub use matrix::{dot, norm2, Matrix};
pub use rng::{derive_seed, gaussian_matrix, seeded_rng, SensingMatrix, SeededRng};
pub use svd::{min_singular_value, singular_values};
