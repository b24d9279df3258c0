//! Closed-form lower bounds on the probability that K iterations of OMP
//! recover a K-sparse signal, and on the number of measurements needed to
//! reach a target probability.
//!
//! `ln` is the natural logarithm throughout; `log_n(v) = ln v / ln n`.
//! Suprema over ε are taken on a uniform grid whose right end is the
//! interval's right endpoint, with the products evaluated in log space.

use std::f64::consts::{FRAC_2_SQRT_PI, PI};

use crate::error::{Error, Result};
use crate::phi::PhiFunction;

pub const DEFAULT_GRID_SIZE: usize = 4096;

/// Tropp's measurement bound is only stated for δ in (0, 0.36).
pub const TROPP_DELTA_LIMIT: f64 = 0.36;

/// Largest admissible target failure probability, 1/√π.
pub const ZETA_MAX: f64 = FRAC_2_SQRT_PI / 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryBoundQuery {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub phi: PhiFunction,
    pub grid_size: usize,
}

impl RecoveryBoundQuery {
    pub fn new(m: usize, n: usize, k: usize, phi: PhiFunction) -> Self {
        RecoveryBoundQuery {
            m,
            n,
            k,
            phi,
            grid_size: DEFAULT_GRID_SIZE,
        }
    }

    pub fn with_grid(mut self, grid_size: usize) -> Self {
        self.grid_size = grid_size;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.m == 0 || self.k == 0 {
            return Err(Error::domain(format!(
                "m and K must be positive (got m={}, K={})",
                self.m, self.k
            )));
        }
        if self.n <= self.k {
            return Err(Error::domain(format!("need n > K (got n={}, K={})", self.n, self.k)));
        }
        if self.grid_size == 0 {
            return Err(Error::domain("ε grid needs at least one point"));
        }
        Ok(())
    }

    /// Right end of the admissible ε interval; nonpositive means empty.
    pub fn epsilon_max(&self) -> Result<f64> {
        self.validate()?;
        let (m, k) = (self.m as f64, self.k as f64);
        let phi_k = self.phi.eval(k)?;
        Ok(1.0 - (k / m).sqrt() - (2.0 * phi_k / (m * PI)).sqrt())
    }

    /// ln of the objective at ε, or −∞ where a factor is nonpositive.
    pub fn theorem1_log_objective(&self, eps: f64) -> Result<f64> {
        self.validate()?;
        let phis: Vec<f64> = (1..=self.k)
            .map(|i| self.phi.eval(i as f64))
            .collect::<Result<_>>()?;
        Ok(theorem1_log_objective(self.m, self.n, self.k, &phis, eps))
    }
}

fn theorem1_log_objective(m: usize, n: usize, k: usize, phis: &[f64], eps: f64) -> f64 {
    let mf = m as f64;
    let eta = 1.0 - (k as f64 / mf).sqrt() - eps;
    if !(eps > 0.0) || !(eta > 0.0) {
        return f64::NEG_INFINITY;
    }
    let first = -(-eps * eps * mf / 2.0).exp_m1();
    if !(first > 0.0) {
        return f64::NEG_INFINITY;
    }
    let mut sum = 0.0;
    for &phi in phis {
        let tail = (-eta * eta * mf / (2.0 * phi)).exp() / ((PI * mf / (2.0 * phi)).sqrt() * eta);
        if tail >= 1.0 {
            return f64::NEG_INFINITY;
        }
        sum += (-tail).ln_1p();
    }
    first.ln() + (n - k) as f64 * sum
}

fn grid_max(eps_max: f64, grid: usize, mut log_f: impl FnMut(f64) -> f64) -> f64 {
    (1..=grid)
        .map(|j| log_f(eps_max * j as f64 / grid as f64))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Unclamped grid maximum of the objective (as a probability, not a log).
pub fn theorem1_bound_raw(q: &RecoveryBoundQuery) -> Result<f64> {
    let eps_max = q.epsilon_max()?;
    if !(eps_max > 0.0) {
        return Ok(0.0);
    }
    let phis: Vec<f64> = (1..=q.k)
        .map(|i| q.phi.eval(i as f64))
        .collect::<Result<_>>()?;
    let best = grid_max(eps_max, q.grid_size, |e| {
        theorem1_log_objective(q.m, q.n, q.k, &phis, e)
    });
    Ok(best.exp())
}

/// Lower bound on P(K-iteration OMP recovers x exactly) for signals obeying φ.
pub fn theorem1_bound(q: &RecoveryBoundQuery) -> Result<f64> {
    Ok(theorem1_bound_raw(q)?.clamp(0.0, 1.0))
}

/// ln of Tropp's objective at ε.
pub fn tropp_log_objective(m: usize, n: usize, k: usize, eps: f64) -> f64 {
    let s = (m as f64 / k as f64).sqrt();
    let gap = s - 1.0 - eps;
    if !(eps > 0.0) || !(gap > 0.0) {
        return f64::NEG_INFINITY;
    }
    let first = -(-eps * eps * k as f64 / 2.0).exp_m1();
    let second = -(-gap * gap / 2.0).exp_m1();
    if !(first > 0.0 && second > 0.0) {
        return f64::NEG_INFINITY;
    }
    first.ln() + (k * (n - k)) as f64 * second.ln()
}

pub fn tropp_bound_with_grid(m: usize, n: usize, k: usize, grid: usize) -> Result<f64> {
    if m == 0 || k == 0 || n <= k {
        return Err(Error::domain(format!(
            "need m, K ≥ 1 and n > K (got m={m}, n={n}, K={k})"
        )));
    }
    if grid == 0 {
        return Err(Error::domain("ε grid needs at least one point"));
    }
    if m <= k {
        return Ok(0.0);
    }
    let eps_max = (m as f64 / k as f64).sqrt() - 1.0;
    let best = grid_max(eps_max, grid, |e| tropp_log_objective(m, n, k, e));
    Ok(best.exp().clamp(0.0, 1.0))
}

/// The sparsity-only baseline bound of Tropp and Gilbert.
pub fn tropp_bound(m: usize, n: usize, k: usize) -> Result<f64> {
    tropp_bound_with_grid(m, n, k, DEFAULT_GRID_SIZE)
}

fn check_zeta(zeta: f64) -> Result<()> {
    if !(zeta > 0.0 && zeta <= ZETA_MAX) {
        return Err(Error::domain(format!("ζ must lie in (0, 1/√π] (got {zeta})")));
    }
    Ok(())
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if n < 2 || k == 0 || k >= n {
        return Err(Error::domain(format!("need n ≥ 2 and 1 ≤ K < n (got n={n}, K={k})")));
    }
    Ok(())
}

/// δ = n√π ζ / (n + √π).
pub fn delta_from_zeta(n: usize, zeta: f64) -> Result<f64> {
    check_zeta(zeta)?;
    let (n, sp) = (n as f64, PI.sqrt());
    Ok(n * sp * zeta / (n + sp))
}

/// β = max{1, log_n((n−K) Σφ(k) / (φ(K) √ln(n/δ)))}.
pub fn beta_param(n: usize, k: usize, delta: f64, phi: &PhiFunction) -> Result<f64> {
    check_nk(n, k)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!("δ must lie in (0, 1) (got {delta})")));
    }
    let nf = n as f64;
    let arg = (n - k) as f64 * phi.partial_sum(k)? / (phi.eval(k as f64)? * (nf / delta).ln().sqrt());
    Ok((arg.ln() / nf.ln()).max(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementBoundQuery {
    pub n: usize,
    pub k: usize,
    pub zeta: f64,
    pub phi: PhiFunction,
}

/// Measurements sufficient for recovery probability ≥ 1 − ζ under φ.
pub fn theorem2_measurements(q: &MeasurementBoundQuery) -> Result<f64> {
    check_nk(q.n, q.k)?;
    let delta = delta_from_zeta(q.n, q.zeta)?;
    let beta = beta_param(q.n, q.k, delta, &q.phi)?;
    let kf = q.k as f64;
    let l = (q.n as f64 / delta).ln();
    let phi_k = q.phi.eval(kf)?;
    let s = (2.0 * beta * phi_k / kf).sqrt() + (1.0 / l).sqrt() + (2.0 / kf).sqrt();
    Ok(s * s * kf * l)
}

/// (√K + 4√((α+1)/(α−1)·ln(n/ζ)))², for α-strongly-decaying signals.
pub fn corollary6_measurements(n: usize, k: usize, zeta: f64, alpha: f64) -> Result<f64> {
    check_nk(n, k)?;
    check_zeta(zeta)?;
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::domain(format!("α must exceed 1 (got {alpha})")));
    }
    let c = (alpha + 1.0) / (alpha - 1.0);
    let s = (k as f64).sqrt() + 4.0 * (c * (n as f64 / zeta).ln()).sqrt();
    Ok(s * s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsymptoticKind {
    /// 2K ln(n/ζ), any K-sparse signal.
    General2K,
    /// 1.9K ln(n/ζ), K-sparse Gaussian signals.
    Gaussian1p9K,
}

pub fn asymptotic_measurements(kind: AsymptoticKind, n: usize, k: usize, zeta: f64) -> Result<f64> {
    check_nk(n, k)?;
    check_zeta(zeta)?;
    let c = match kind {
        AsymptoticKind::General2K => 2.0,
        AsymptoticKind::Gaussian1p9K => 1.9,
    };
    Ok(c * k as f64 * (n as f64 / zeta).ln())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TroppMeasurements {
    pub m: f64,
    pub delta: f64,
    /// δ ≥ 0.36, outside the range the baseline is stated for.
    pub delta_out_of_range: bool,
}

/// δ = 2(√(1 + n²ζ) − 1)/n.
pub fn tropp_delta(n: usize, zeta: f64) -> Result<f64> {
    check_zeta(zeta)?;
    let nf = n as f64;
    Ok(2.0 * ((1.0 + nf * nf * zeta).sqrt() - 1.0) / nf)
}

/// Tropp and Gilbert's measurement count, (2 + √(1/L) + √(2/K))² K L with
/// L = ln(n/δ).
pub fn tropp_measurements(n: usize, k: usize, zeta: f64) -> Result<TroppMeasurements> {
    check_nk(n, k)?;
    let delta = tropp_delta(n, zeta)?;
    let kf = k as f64;
    let l = (n as f64 / delta).ln();
    let s = 2.0 + (1.0 / l).sqrt() + (2.0 / kf).sqrt();
    Ok(TroppMeasurements {
        m: s * s * kf * l,
        delta,
        delta_out_of_range: delta >= TROPP_DELTA_LIMIT,
    })
}

/// The same count written directly in ζ:
/// ((2√K + √2)·√ln((√(1+n²ζ)+1)/(2ζ)) + √K)².
pub fn tropp_measurements_in_zeta(n: usize, k: usize, zeta: f64) -> Result<f64> {
    check_nk(n, k)?;
    check_zeta(zeta)?;
    let (nf, kf) = (n as f64, k as f64);
    let l = (((1.0 + nf * nf * zeta).sqrt() + 1.0) / (2.0 * zeta)).ln();
    let s = (2.0 * kf.sqrt() + 2f64.sqrt()) * l.sqrt() + kf.sqrt();
    Ok(s * s)
}
