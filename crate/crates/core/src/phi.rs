//! The φ(t) families bounding ‖x_S‖₁² / ‖x_S‖₂² over support subsets of
//! size t, and the probabilities that come attached to the Gaussian one.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest integer not below `0.95 k`, in exact integer arithmetic.
pub fn ceil_95_percent(k: usize) -> usize {
    (95 * k).div_ceil(100)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum PhiFunction {
    /// φ(t) = t, valid for every sparse signal.
    CauchySchwarz,
    /// Closed form for α-strongly-decaying signals, α > 1.
    StronglyDecaying { alpha: f64 },
    /// φ(t) = t below ⌈0.95K⌉ and 0.95K from there up to K.
    GaussianPiecewise { sparsity: usize },
}

impl PhiFunction {
    pub fn strongly_decaying(alpha: f64) -> Result<Self> {
        if !(alpha > 1.0) || !alpha.is_finite() {
            return Err(Error::domain(format!(
                "strongly-decaying φ needs a finite α > 1 (got {alpha}); α → 1 is φ(t) = t"
            )));
        }
        Ok(PhiFunction::StronglyDecaying { alpha })
    }

    pub fn gaussian_piecewise(sparsity: usize) -> Result<Self> {
        if sparsity == 0 {
            return Err(Error::domain("Gaussian piecewise φ needs K ≥ 1"));
        }
        Ok(PhiFunction::GaussianPiecewise { sparsity })
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::domain(format!("φ(t) needs t > 0 (got {t})")));
        }
        match *self {
            PhiFunction::CauchySchwarz => Ok(t),
            PhiFunction::StronglyDecaying { alpha } => {
                // (αᵗ − 1)/(αᵗ + 1) = tanh(t ln α / 2); avoids overflow in αᵗ
                // and cancellation for α close to 1.
                let ln_alpha = (alpha - 1.0).ln_1p();
                let ratio = (0.5 * t * ln_alpha).tanh();
                let v = ratio * (alpha + 1.0) / (alpha - 1.0);
                // φ(t) ≤ t for t ≥ 1; keep rounding from crossing it.
                Ok(if t >= 1.0 { v.min(t) } else { v })
            }
            PhiFunction::GaussianPiecewise { sparsity } => {
                let k = sparsity as f64;
                if t > k {
                    return Err(Error::domain(format!(
                        "Gaussian piecewise φ is defined for t ≤ K = {sparsity} (got {t})"
                    )));
                }
                if t >= ceil_95_percent(sparsity) as f64 {
                    Ok(0.95 * k)
                } else {
                    Ok(t)
                }
            }
        }
    }

    /// Σ_{k=1}^{K} φ(k).
    pub fn partial_sum(&self, k: usize) -> Result<f64> {
        if k == 0 {
            return Err(Error::domain("partial sum needs K ≥ 1"));
        }
        (1..=k).map(|i| self.eval(i as f64)).sum()
    }

    /// Strict upper limit of the family over all t, where one exists.
    pub fn supremum(&self) -> Option<f64> {
        match *self {
            PhiFunction::StronglyDecaying { alpha } => Some((alpha + 1.0) / (alpha - 1.0)),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for PhiFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhiFunction::CauchySchwarz => write!(f, "cs"),
            PhiFunction::StronglyDecaying { alpha } => write!(f, "decaying:{alpha}"),
            PhiFunction::GaussianPiecewise { sparsity } => write!(f, "gaussian:{sparsity}"),
        }
    }
}

/// Parses `cs`, `decaying:<alpha>` or `gaussian:<K>`.
impl FromStr for PhiFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h.trim(), Some(a.trim())),
            None => (s, None),
        };
        let bad = |msg: String| Error::Parse {
            line: 1,
            column: 1,
            message: msg,
        };
        match (head.to_ascii_lowercase().as_str(), arg) {
            ("cs" | "cauchy-schwarz" | "flat", None) => Ok(PhiFunction::CauchySchwarz),
            ("decaying" | "strongly-decaying", Some(a)) => {
                let alpha: f64 = a
                    .parse()
                    .map_err(|_| bad(format!("invalid α `{a}` in φ spec")))?;
                PhiFunction::strongly_decaying(alpha)
            }
            ("gaussian", Some(a)) => {
                let k: usize = a
                    .parse()
                    .map_err(|_| bad(format!("invalid K `{a}` in φ spec")))?;
                PhiFunction::gaussian_piecewise(k)
            }
            _ => Err(bad(format!(
                "unknown φ spec `{s}` (expected cs, decaying:<alpha> or gaussian:<K>)"
            ))),
        }
    }
}

/// Lower bound on P(‖u‖₁² ≤ μ p ‖u‖₂²) for u ~ N(0, I_p), for any γ > 0.
///
/// Returned raw: for small p the value is negative and carries no
/// information, callers clamp for display.
pub fn ratio_probability_bound(mu: f64, gamma: f64, p: usize) -> Result<f64> {
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::domain(format!("μ must lie in (0, 1] (got {mu})")));
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::domain(format!("γ must be positive (got {gamma})")));
    }
    if p == 0 {
        return Err(Error::domain("p must be at least 1"));
    }
    let ln_base = 2.775f64.ln() + gamma * gamma.ln()
        - 0.5 * gamma
        - 0.5 * (1.0 + gamma) * (1.0 + gamma).ln()
        - 0.5 * gamma * mu.ln();
    let prefactor = (1.0 + gamma).sqrt() * (1.0f64 / 6.0).exp();
    Ok(1.0 - prefactor * (p as f64 * ln_base).exp())
}

/// The rounded μ = 0.95 specialisation, 1 − 1.87·0.796ᵖ.
pub fn ratio_probability_bound_095(p: usize) -> f64 {
    1.0 - 1.87 * 0.796f64.powi(p as i32)
}

/// The γ at which the μ = 0.95 specialisation is taken.
pub const RATIO_BOUND_GAMMA: f64 = 1.505;

/// Raw lower bound on the probability that a K-sparse Gaussian signal obeys
/// the piecewise φ: 1 − (3.614/√K)·0.981^⌈0.95K⌉.
pub fn gaussian_phi_probability_raw(k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::domain("K must be at least 1"));
    }
    let c = ceil_95_percent(k) as i32;
    Ok(1.0 - 3.614 / (k as f64).sqrt() * 0.981f64.powi(c))
}

/// [`gaussian_phi_probability_raw`] clamped at zero.
pub fn gaussian_phi_probability(k: usize) -> Result<f64> {
    Ok(gaussian_phi_probability_raw(k)?.max(0.0))
}
