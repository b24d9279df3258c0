//! Sparse test signals and their ℓ₁²/ℓ₂² disparity.

use std::fmt;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index;
use rand::Rng;
use rand_distr::{Exp, Normal, Poisson, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{derive_seed, seeded_rng};
use crate::phi::{ceil_95_percent, PhiFunction};

pub const POISSON_LAMBDA_RANGE: std::ops::RangeInclusive<f64> = 1e-3..=1e12;

/// The distribution of the nonzero entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum SignalCase {
    /// Every nonzero equals 1.
    Flat,
    /// The i-th smallest support index carries α^(K−i).
    Decaying { alpha: f64 },
    /// i.i.d. N(0, σ²).
    Gaussian { sigma: f64 },
    /// i.i.d. uniform on [−√3, √3] (unit variance).
    Uniform,
    /// i.i.d. exponential with rate λ.
    Exponential { lambda: f64 },
    /// i.i.d. Poisson(λ). With `redraw_zeros` every draw of 0 is repeated so
    /// the signal has exactly K nonzeros; otherwise zero draws stay in place
    /// and the true support is smaller than K.
    Poisson { lambda: f64, redraw_zeros: bool },
}

impl SignalCase {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SignalCase::Decaying { alpha } if !(alpha > 1.0) || !alpha.is_finite() => {
                Err(Error::domain(format!("decaying signals need α > 1 (got {alpha})")))
            }
            SignalCase::Gaussian { sigma } if !(sigma > 0.0) || !sigma.is_finite() => {
                Err(Error::domain(format!("σ must be positive (got {sigma})")))
            }
            SignalCase::Exponential { lambda } if !(lambda > 0.0) || !lambda.is_finite() => {
                Err(Error::domain(format!("λ must be positive (got {lambda})")))
            }
            // Small λ makes nonzero draws rare enough that generation stalls.
            SignalCase::Poisson { lambda, .. } if !(POISSON_LAMBDA_RANGE.contains(&lambda)) => {
                Err(Error::domain(format!(
                    "Poisson λ must lie in [{}, {}] (got {lambda})",
                    POISSON_LAMBDA_RANGE.start(),
                    POISSON_LAMBDA_RANGE.end()
                )))
            }
            _ => Ok(()),
        }
    }

    /// Stable stream identifier used when deriving per-signal seeds.
    pub fn stream_id(&self) -> u64 {
        match *self {
            SignalCase::Flat => 1,
            SignalCase::Decaying { alpha } => derive_seed(2, &[alpha.to_bits()]),
            SignalCase::Gaussian { sigma } => derive_seed(3, &[sigma.to_bits()]),
            SignalCase::Uniform => 4,
            SignalCase::Exponential { lambda } => derive_seed(5, &[lambda.to_bits()]),
            SignalCase::Poisson {
                lambda,
                redraw_zeros,
            } => derive_seed(6, &[lambda.to_bits(), redraw_zeros as u64]),
        }
    }

    /// The φ the bounds pair with this family, where the family has one.
    pub fn paired_phi(&self, k: usize) -> Option<PhiFunction> {
        match *self {
            SignalCase::Flat => Some(PhiFunction::CauchySchwarz),
            SignalCase::Decaying { alpha } => PhiFunction::strongly_decaying(alpha).ok(),
            SignalCase::Gaussian { .. } => PhiFunction::gaussian_piecewise(k).ok(),
            _ => None,
        }
    }
}

impl fmt::Display for SignalCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignalCase::Flat => write!(f, "flat"),
            SignalCase::Decaying { alpha } => write!(f, "decaying:{alpha}"),
            SignalCase::Gaussian { sigma } => write!(f, "gaussian:{sigma}"),
            SignalCase::Uniform => write!(f, "uniform"),
            SignalCase::Exponential { lambda } => write!(f, "exponential:{lambda}"),
            SignalCase::Poisson {
                lambda,
                redraw_zeros: false,
            } => write!(f, "poisson:{lambda}"),
            SignalCase::Poisson {
                lambda,
                redraw_zeros: true,
            } => write!(f, "poisson-nonzero:{lambda}"),
        }
    }
}

/// Parses `flat`, `decaying:<α>`, `gaussian[:<σ>]`, `uniform`,
/// `exponential[:<λ>]`, `poisson[:<λ>]` or `poisson-nonzero[:<λ>]`.
impl FromStr for SignalCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h.trim(), Some(a.trim())),
            None => (s, None),
        };
        let num = |default: Option<f64>| -> Result<f64> {
            match (arg, default) {
                (Some(a), _) => a.parse().map_err(|_| Error::Parse {
                    line: 1,
                    column: head.len() + 2,
                    message: format!("invalid parameter `{a}` for signal case `{head}`"),
                }),
                (None, Some(d)) => Ok(d),
                (None, None) => Err(Error::Parse {
                    line: 1,
                    column: head.len() + 1,
                    message: format!("signal case `{head}` needs a parameter"),
                }),
            }
        };
        let case = match head.to_ascii_lowercase().as_str() {
            "flat" if arg.is_none() => SignalCase::Flat,
            "uniform" if arg.is_none() => SignalCase::Uniform,
            "decaying" => SignalCase::Decaying { alpha: num(None)? },
            "gaussian" => SignalCase::Gaussian {
                sigma: num(Some(1.0))?,
            },
            "exponential" => SignalCase::Exponential {
                lambda: num(Some(1.0))?,
            },
            "poisson" => SignalCase::Poisson {
                lambda: num(Some(1.0))?,
                redraw_zeros: false,
            },
            "poisson-nonzero" => SignalCase::Poisson {
                lambda: num(Some(1.0))?,
                redraw_zeros: true,
            },
            _ => {
                return Err(Error::Parse {
                    line: 1,
                    column: 1,
                    message: format!("unknown signal case `{s}`"),
                })
            }
        };
        case.validate()?;
        Ok(case)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseSignal {
    pub values: Vec<f64>,
    /// Indices of the nonzero entries, ascending.
    pub support: Vec<usize>,
    /// The configured sparsity K.
    pub sparsity: usize,
    pub case: SignalCase,
    pub seed: u64,
}

impl SparseSignal {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Builds a signal from explicit values; the support is read off the
    /// nonzero entries.
    pub fn from_values(values: Vec<f64>, case: SignalCase) -> Self {
        let support: Vec<usize> = values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, _)| i)
            .collect();
        let sparsity = support.len();
        SparseSignal {
            values,
            support,
            sparsity,
            case,
            seed: 0,
        }
    }

    /// ‖x‖₁² / ‖x‖₂² over the whole support.
    pub fn l1l2_ratio(&self) -> Result<f64> {
        l1l2_ratio(self, &self.support)
    }
}

/// Draws a K-sparse signal of length `n`: the support is a uniformly random
/// K-subset and the nonzeros follow `case`.
pub fn generate_signal(case: SignalCase, k: usize, n: usize, seed: u64) -> Result<SparseSignal> {
    case.validate()?;
    if k == 0 || k > n {
        return Err(Error::domain(format!("need 1 ≤ K ≤ n (got K={k}, n={n})")));
    }
    let mut rng = seeded_rng(seed);
    let mut positions = index::sample(&mut rng, n, k).into_vec();
    positions.sort_unstable();

    let draws: Vec<f64> = match case {
        SignalCase::Flat => vec![1.0; k],
        SignalCase::Decaying { alpha } => (1..=k).map(|i| alpha.powi((k - i) as i32)).collect(),
        SignalCase::Gaussian { sigma } => {
            let dist = Normal::new(0.0, sigma).map_err(|e| Error::domain(e.to_string()))?;
            (0..k).map(|_| dist.sample(&mut rng)).collect()
        }
        SignalCase::Uniform => {
            let h = 3f64.sqrt();
            let dist = Uniform::new_inclusive(-h, h).map_err(|e| Error::domain(e.to_string()))?;
            (0..k).map(|_| dist.sample(&mut rng)).collect()
        }
        SignalCase::Exponential { lambda } => {
            let dist = Exp::new(lambda).map_err(|e| Error::domain(e.to_string()))?;
            (0..k).map(|_| dist.sample(&mut rng)).collect()
        }
        SignalCase::Poisson {
            lambda,
            redraw_zeros,
        } => {
            let dist = Poisson::new(lambda).map_err(|e| Error::domain(e.to_string()))?;
            loop {
                let v: Vec<f64> = (0..k)
                    .map(|_| loop {
                        let d: f64 = dist.sample(&mut rng);
                        if d != 0.0 || !redraw_zeros {
                            break d;
                        }
                    })
                    .collect();
                // An all-zero draw has no support at all; draw again.
                if v.iter().any(|&d| d != 0.0) {
                    break v;
                }
            }
        }
    };

    if draws.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain(format!("{case} produced a non-finite entry")));
    }
    let mut values = vec![0.0; n];
    let mut support = Vec::with_capacity(k);
    for (&pos, &v) in positions.iter().zip(&draws) {
        if v != 0.0 {
            values[pos] = v;
            support.push(pos);
        }
    }
    Ok(SparseSignal {
        values,
        support,
        sparsity: k,
        case,
        seed,
    })
}

/// ‖x_S‖₁² / ‖x_S‖₂² for a nonempty subset of the support.
pub fn l1l2_ratio(x: &SparseSignal, subset: &[usize]) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::domain("ℓ₁²/ℓ₂² ratio needs a nonempty subset"));
    }
    let mut l1 = 0.0;
    let mut l2 = 0.0;
    for &i in subset {
        let v = *x.values.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: x.values.len(),
        })?;
        l1 += v.abs();
        l2 += v * v;
    }
    if l2 == 0.0 {
        return Err(Error::domain("ℓ₁²/ℓ₂² ratio of a zero subvector"));
    }
    Ok(l1 * l1 / l2)
}

/// Subsets beyond this count are sampled rather than enumerated.
pub const MAX_ENUMERATED_SUBSETS: u64 = 1_000_000;

/// Relative slack allowed on ‖x_S‖₁² ≤ φ(|S|)‖x_S‖₂² for rounding.
pub const PHI_CHECK_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PhiCheck {
    pub holds: bool,
    pub worst_subset: Vec<usize>,
    /// min over checked S of φ(|S|) − ‖x_S‖₁²/‖x_S‖₂².
    pub worst_margin: f64,
    pub subsets_checked: u64,
    /// True when the subsets were sampled instead of enumerated.
    pub sampled: bool,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    c
}

struct Tracker<'a> {
    x: &'a SparseSignal,
    phi_by_size: Vec<f64>,
    worst_margin: f64,
    worst: Vec<usize>,
    holds: bool,
    count: u64,
}

impl Tracker<'_> {
    fn visit(&mut self, subset: &[usize]) {
        let (mut l1, mut l2) = (0.0, 0.0);
        for &i in subset {
            let v = self.x.values[i];
            l1 += v.abs();
            l2 += v * v;
        }
        let phi = self.phi_by_size[subset.len()];
        let ratio = l1 * l1 / l2;
        let margin = phi - ratio;
        if ratio > phi * (1.0 + PHI_CHECK_RTOL) {
            self.holds = false;
        }
        if margin < self.worst_margin {
            self.worst_margin = margin;
            self.worst = subset.to_vec();
        }
        self.count += 1;
    }
}

/// Checks ‖x_S‖₁² ≤ φ(|S|)‖x_S‖₂² over subsets S of the support.
///
/// For the Gaussian piecewise φ only |S| ≥ ⌈0.95K⌉ is examined; smaller
/// sizes hold by Cauchy-Schwarz. When more than
/// [`MAX_ENUMERATED_SUBSETS`] subsets are in range, that many are drawn
/// uniformly at random instead and the result is flagged as sampled.
pub fn check_phi_inequality(x: &SparseSignal, phi: &PhiFunction) -> Result<PhiCheck> {
    let omega: Vec<usize> = x.support.clone();
    let k = omega.len();
    if k == 0 {
        return Err(Error::domain("φ inequality check on a zero signal"));
    }
    let lo = match *phi {
        PhiFunction::GaussianPiecewise { sparsity } => ceil_95_percent(sparsity).max(1),
        _ => 1,
    };
    let mut phi_by_size = vec![0.0; k + 1];
    for (s, slot) in phi_by_size.iter_mut().enumerate().skip(lo) {
        *slot = phi.eval(s as f64)?;
    }
    let mut tracker = Tracker {
        x,
        phi_by_size,
        worst_margin: f64::INFINITY,
        worst: Vec::new(),
        holds: true,
        count: 0,
    };
    if lo > k {
        return Ok(PhiCheck {
            holds: true,
            worst_subset: Vec::new(),
            worst_margin: f64::INFINITY,
            subsets_checked: 0,
            sampled: false,
        });
    }

    let total: u128 = (lo..=k).map(|s| binomial(k, s)).sum();
    let sampled = total > MAX_ENUMERATED_SUBSETS as u128;
    if !sampled {
        let mut subset = Vec::with_capacity(k);
        for s in lo..=k {
            let mut idx: Vec<usize> = (0..s).collect();
            loop {
                subset.clear();
                subset.extend(idx.iter().map(|&i| omega[i]));
                tracker.visit(&subset);
                if !next_combination(&mut idx, k) {
                    break;
                }
            }
        }
    } else {
        let mut rng = seeded_rng(derive_seed(x.seed, &[0x7068_6963_6865_636b]));
        let weights: Vec<f64> = (lo..=k).map(|s| binomial(k, s) as f64).collect();
        let sizes = WeightedIndex::new(&weights).map_err(|e| Error::domain(e.to_string()))?;
        let mut subset = Vec::with_capacity(k);
        for _ in 0..MAX_ENUMERATED_SUBSETS {
            let s = lo + sizes.sample(&mut rng);
            subset.clear();
            subset.extend(index::sample(&mut rng, k, s).iter().map(|i| omega[i]));
            subset.sort_unstable();
            tracker.visit(&subset);
        }
    }

    Ok(PhiCheck {
        holds: tracker.holds,
        worst_subset: tracker.worst,
        worst_margin: tracker.worst_margin,
        subsets_checked: tracker.count,
        sampled,
    })
}

/// Advances `idx` to the next s-combination of 0..n in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let s = idx.len();
    let mut i = s;
    while i > 0 {
        i -= 1;
        if idx[i] < n - s + i {
            idx[i] += 1;
            for j in i + 1..s {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Draws `count` standard normal vectors of length `p` and reports how
/// many satisfy ‖u‖₁² ≤ μ·p·‖u‖₂².
pub fn count_ratio_events(p: usize, count: usize, mu: f64, rng: &mut impl Rng) -> usize {
    let mut hits = 0;
    for _ in 0..count {
        let (mut l1, mut l2) = (0.0f64, 0.0f64);
        for _ in 0..p {
            let u: f64 = rng.sample(StandardNormal);
            l1 += u.abs();
            l2 += u * u;
        }
        if l1 * l1 <= mu * p as f64 * l2 {
            hits += 1;
        }
    }
    hits
}
