//! Orthogonal matching pursuit for exact sparse recovery, together with the
//! signal-dependent probability and measurement-count lower bounds that
//! describe when it succeeds on Gaussian sensing matrices.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`] - seeded Gaussian matrices, incremental least squares,
//!   smallest singular values.
//! * [`signals`] - the sparse test-signal families and their
//!   ℓ₁²/ℓ₂² disparity statistics.
//! * [`phi`] - the φ(t) families and the probabilities attached to them.
//! * [`recovery`] - OMP itself, exact-recovery adjudication and the
//!   per-iteration success-condition diagnostic.
//! * [`bounds`] - closed-form recovery-probability and measurement bounds.
//! * [`experiments`] - Monte Carlo drivers and the figure/table presets.
//! * [`io`] - CSV tables and dense matrix/vector file parsing.

pub mod bounds;
pub mod error;
pub mod experiments;
pub mod io;
pub mod numerics;
pub mod phi;
pub mod recovery;
pub mod signals;

pub use error::{Error, Result};
pub use numerics::{Matrix, SensingMatrix};
pub use phi::PhiFunction;
pub use recovery::RecoveryResult;
pub use signals::{SignalCase, SparseSignal};
