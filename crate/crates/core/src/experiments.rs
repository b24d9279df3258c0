//! Monte Carlo recovery experiments, the ratio experiment and the
//! deterministic curve sweeps that back each figure and table.
//!
//! Seed splitting: trial `t` of grid point `(m, K)` uses
//! `derive_seed(seed, [m, K, t])`. Its sensing matrix is seeded with
//! `derive_seed(trial, [MATRIX_STREAM])` and shared by every configured
//! signal case; each case's signal uses
//! `derive_seed(trial, [SIGNAL_STREAM, case.stream_id()])`. Results
//! therefore do not depend on scheduling, on which other cases are
//! configured, or on how the trial range is split into runs.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Deserialize;

use crate::bounds::{
    theorem1_bound, theorem2_measurements, tropp_bound_with_grid, tropp_measurements,
    MeasurementBoundQuery, RecoveryBoundQuery, DEFAULT_GRID_SIZE,
};
use crate::error::{Error, Result};
use crate::numerics::{derive_seed, gaussian_matrix, seeded_rng, Matrix};
use crate::phi::{
    gaussian_phi_probability, gaussian_phi_probability_raw, ratio_probability_bound,
    ratio_probability_bound_095, PhiFunction, RATIO_BOUND_GAMMA,
};
use crate::recovery::{adjudicate, lemma4_diagnostic, omp_run};
use crate::signals::{check_phi_inequality, count_ratio_events, generate_signal, SignalCase};

pub const MATRIX_STREAM: u64 = 0x4d41_5452;
pub const SIGNAL_STREAM: u64 = 0x5349_474e;

pub const DEFAULT_SEED: u64 = 20_190_417;

/// Two-sided 95% standard normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Fig1,
    Fig2,
    Fig3,
    FigPhiLbd,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    Fig10,
    Fig11,
    Table1,
    Table2,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetKind {
    /// φ(t) against t or α.
    PhiCurve,
    /// Empirical ratio probability against its bound.
    Ratio,
    /// Probability that the Gaussian piecewise φ holds.
    PhiLbd,
    /// Monte Carlo recovery with attached probability bounds.
    Recovery,
    /// Measurement-count formulas against ζ.
    Measurement,
}

impl Preset {
    pub const ALL: [Preset; 15] = [
        Preset::Fig1,
        Preset::Fig2,
        Preset::Fig3,
        Preset::FigPhiLbd,
        Preset::Fig4,
        Preset::Fig5,
        Preset::Fig6,
        Preset::Fig7,
        Preset::Fig8,
        Preset::Fig9,
        Preset::Fig10,
        Preset::Fig11,
        Preset::Table1,
        Preset::Table2,
        Preset::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::FigPhiLbd => "fig_phi_lbd",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
            Preset::Fig7 => "fig7",
            Preset::Fig8 => "fig8",
            Preset::Fig9 => "fig9",
            Preset::Fig10 => "fig10",
            Preset::Fig11 => "fig11",
            Preset::Table1 => "table1",
            Preset::Table2 => "table2",
            Preset::Custom => "custom",
        }
    }

    pub fn kind(self) -> PresetKind {
        match self {
            Preset::Fig1 | Preset::Fig2 => PresetKind::PhiCurve,
            Preset::Fig3 => PresetKind::Ratio,
            Preset::FigPhiLbd => PresetKind::PhiLbd,
            Preset::Fig8 | Preset::Fig9 | Preset::Fig10 | Preset::Fig11 => PresetKind::Measurement,
            _ => PresetKind::Recovery,
        }
    }

    /// Trial count the preset runs by default, for stochastic presets.
    pub fn default_trials(self) -> Option<usize> {
        match self {
            Preset::Fig3 => Some(FIG3_TRIALS),
            Preset::Fig4 | Preset::Fig5 | Preset::Fig6 | Preset::Fig7 | Preset::Custom => Some(1000),
            Preset::Table1 | Preset::Table2 => Some(10_000),
            _ => None,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == norm)
            .ok_or_else(|| Error::Parse {
                line: 1,
                column: 1,
                message: format!("unknown preset `{}`", s.trim()),
            })
    }
}

impl<'de> Deserialize<'de> for Preset {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The six signal families compared in the ratio tables, in table order.
pub fn table_cases() -> Vec<SignalCase> {
    vec![
        SignalCase::Flat,
        SignalCase::Uniform,
        SignalCase::Gaussian { sigma: 1.0 },
        SignalCase::Decaying { alpha: 1.2 },
        SignalCase::Exponential { lambda: 1.0 },
        SignalCase::Poisson {
            lambda: 1.0,
            redraw_zeros: false,
        },
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub preset: Preset,
    pub m_values: Vec<usize>,
    pub n: usize,
    pub k_values: Vec<usize>,
    pub cases: Vec<SignalCase>,
    pub trials: usize,
    /// Index of the first trial; lets a long run be split into pieces
    /// that pool to the same counts.
    pub trial_offset: usize,
    pub seed: u64,
    pub grid_size: usize,
}

impl ExperimentConfig {
    /// Defaults for a Monte Carlo preset.
    pub fn preset(preset: Preset) -> Result<Self> {
        let fig_m: Vec<usize> = (100..=1000).step_by(50).collect();
        let (m_values, k_values, cases) = match preset {
            Preset::Fig4 => (fig_m, vec![15, 30], vec![SignalCase::Flat]),
            Preset::Fig5 => (fig_m, vec![15, 30], vec![SignalCase::Decaying { alpha: 1.1 }]),
            Preset::Fig6 => (fig_m, vec![15, 30], vec![SignalCase::Decaying { alpha: 1.2 }]),
            Preset::Fig7 => (fig_m, vec![15, 30], vec![SignalCase::Gaussian { sigma: 1.0 }]),
            Preset::Table1 => (vec![60, 80, 100], vec![15], table_cases()),
            Preset::Table2 => (vec![120, 140, 160], vec![30], table_cases()),
            Preset::Custom => (vec![100], vec![15], vec![SignalCase::Flat]),
            other => {
                return Err(Error::Config(format!(
                    "preset `{other}` is not a Monte Carlo recovery experiment"
                )))
            }
        };
        Ok(ExperimentConfig {
            preset,
            m_values,
            n: 1024,
            k_values,
            cases,
            trials: preset.default_trials().expect("recovery presets have trial counts"),
            trial_offset: 0,
            seed: DEFAULT_SEED,
            grid_size: DEFAULT_GRID_SIZE,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.grid_size == 0 {
            return bad("ε grid size must be at least 1".into());
        }
        if self.m_values.is_empty() || self.k_values.is_empty() || self.cases.is_empty() {
            return bad("m values, K values and signal cases must be nonempty".into());
        }
        for &k in &self.k_values {
            for &m in &self.m_values {
                if k == 0 || k > m || m > self.n {
                    return bad(format!("need 1 ≤ K ≤ m ≤ n (got K={k}, m={m}, n={})", self.n));
                }
            }
        }
        for c in &self.cases {
            c.validate()?;
        }
        Ok(())
    }

    /// Grid points in output order: K outer, m inner.
    pub fn grid(&self) -> Vec<(usize, usize)> {
        self.k_values
            .iter()
            .flat_map(|&k| self.m_values.iter().map(move |&m| (m, k)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub exact: bool,
    /// ‖x‖₁²/‖x‖₂² of the trial's signal.
    pub ratio: f64,
}

pub fn trial_seed(seed: u64, m: usize, k: usize, trial: usize) -> u64 {
    derive_seed(seed, &[m as u64, k as u64, trial as u64])
}

fn signal_seed(trial_seed: u64, case: &SignalCase) -> u64 {
    derive_seed(trial_seed, &[SIGNAL_STREAM, case.stream_id()])
}

fn recover(a: &Matrix, case: SignalCase, k: usize, seed: u64) -> Result<TrialOutcome> {
    let x = generate_signal(case, k, a.cols(), seed)?;
    let y = a.mul_vec(&x.values)?;
    let res = omp_run(a, &y, k)?;
    Ok(TrialOutcome {
        exact: adjudicate(&res, &x)?,
        ratio: x.l1l2_ratio()?,
    })
}

/// One trial: one sensing matrix, one signal per case, K OMP iterations each.
pub fn run_trial_cases(
    m: usize,
    n: usize,
    k: usize,
    cases: &[SignalCase],
    seed: u64,
) -> Result<Vec<TrialOutcome>> {
    if k == 0 || k > m || m > n {
        return Err(Error::domain(format!("need 1 ≤ K ≤ m ≤ n (got K={k}, m={m}, n={n})")));
    }
    let a = gaussian_matrix(m, n, derive_seed(seed, &[MATRIX_STREAM]))?;
    cases
        .iter()
        .map(|&c| recover(&a, c, k, signal_seed(seed, &c)))
        .collect()
}

pub fn run_trial(m: usize, n: usize, k: usize, case: SignalCase, seed: u64) -> Result<TrialOutcome> {
    Ok(run_trial_cases(m, n, k, &[case], seed)?[0])
}

/// Half-width of the 95% Wilson score interval.
pub fn wilson_half_width(successes: usize, trials: usize) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    Z95 / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub m: usize,
    pub k: usize,
    pub case: SignalCase,
    /// The φ behind `new_bound`: the case's own family, or Cauchy–Schwarz
    /// for families without a closed form.
    pub phi: PhiFunction,
    pub trials: usize,
    pub successes: usize,
    pub empirical: f64,
    pub half_width: f64,
    pub mean_ratio: f64,
    pub new_bound: f64,
    pub tropp_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSummary {
    pub config: ExperimentConfig,
    pub rows: Vec<SummaryRow>,
}

fn bound_phi(case: &SignalCase, k: usize) -> PhiFunction {
    case.paired_phi(k).unwrap_or(PhiFunction::CauchySchwarz)
}

fn run_grid_point(cfg: &ExperimentConfig, m: usize, k: usize) -> Result<Vec<SummaryRow>> {
    let point_error = |case: String, e: Error| Error::Experiment {
        m,
        k,
        case,
        source: Box::new(e),
    };
    let outcomes: Vec<Vec<TrialOutcome>> = (cfg.trial_offset..cfg.trial_offset + cfg.trials)
        .into_par_iter()
        .map(|t| run_trial_cases(m, cfg.n, k, &cfg.cases, trial_seed(cfg.seed, m, k, t)))
        .collect::<Result<_>>()
        .map_err(|e| point_error(cases_label(&cfg.cases), e))?;

    let tropp = tropp_bound_with_grid(m, cfg.n, k, cfg.grid_size)
        .map_err(|e| point_error("tropp bound".into(), e))?;
    cfg.cases
        .iter()
        .enumerate()
        .map(|(ci, &case)| {
            let successes = outcomes.iter().filter(|o| o[ci].exact).count();
            let ratio_sum: f64 = outcomes.iter().map(|o| o[ci].ratio).sum();
            let phi = bound_phi(&case, k);
            let q = RecoveryBoundQuery::new(m, cfg.n, k, phi).with_grid(cfg.grid_size);
            let new_bound = theorem1_bound(&q).map_err(|e| point_error(case.to_string(), e))?;
            Ok(SummaryRow {
                m,
                k,
                case,
                phi,
                trials: cfg.trials,
                successes,
                empirical: successes as f64 / cfg.trials as f64,
                half_width: wilson_half_width(successes, cfg.trials),
                mean_ratio: ratio_sum / cfg.trials as f64,
                new_bound,
                tropp_bound: tropp,
            })
        })
        .collect()
}

fn cases_label(cases: &[SignalCase]) -> String {
    cases.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

/// Runs every grid point of `config`, stopping at the first failure.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentSummary> {
    config.validate()?;
    let mut rows = Vec::new();
    for (m, k) in config.grid() {
        rows.extend(run_grid_point(config, m, k)?);
    }
    Ok(ExperimentSummary {
        config: config.clone(),
        rows,
    })
}

pub const FIG3_TRIALS: usize = 50_000;
pub const FIG3_MU: f64 = 0.95;

#[derive(Debug, Clone, PartialEq)]
pub struct RatioRow {
    pub p: usize,
    pub trials: usize,
    pub hits: usize,
    pub empirical: f64,
    pub half_width: f64,
    /// The γ = 1.505 bound, clamped at 0.
    pub bound: f64,
    /// The rounded closed form, clamped at 0; only defined for μ = 0.95.
    pub closed_form: Option<f64>,
}

/// Fraction of standard normal u ∈ ℝᵖ with ‖u‖₁² ≤ μ p ‖u‖₂², per p.
pub fn ratio_experiment(
    p_values: &[usize],
    trials: usize,
    mu: f64,
    seed: u64,
) -> Result<Vec<RatioRow>> {
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::domain(format!("μ must lie in (0, 1] (got {mu})")));
    }
    if trials == 0 {
        return Err(Error::domain("trials must be at least 1"));
    }
    if p_values.contains(&0) {
        return Err(Error::domain("p must be at least 1"));
    }
    p_values
        .par_iter()
        .map(|&p| {
            let mut rng = seeded_rng(derive_seed(seed, &[p as u64]));
            let hits = count_ratio_events(p, trials, mu, &mut rng);
            Ok(RatioRow {
                p,
                trials,
                hits,
                empirical: hits as f64 / trials as f64,
                half_width: wilson_half_width(hits, trials),
                bound: ratio_probability_bound(mu, RATIO_BOUND_GAMMA, p)?.max(0.0),
                closed_form: (mu == FIG3_MU).then(|| ratio_probability_bound_095(p).max(0.0)),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiLbdPoint {
    pub k: usize,
    pub raw: f64,
    pub clamped: f64,
}

pub fn phi_lbd_curve(k_values: &[usize]) -> Result<Vec<PhiLbdPoint>> {
    k_values
        .iter()
        .map(|&k| {
            Ok(PhiLbdPoint {
                k,
                raw: gaussian_phi_probability_raw(k)?,
                clamped: gaussian_phi_probability(k)?,
            })
        })
        .collect()
}

/// φ(t) for the strongly-decaying family, with α = 1 read as its limit t.
pub fn decaying_phi_or_limit(alpha: f64, t: f64) -> Result<f64> {
    if alpha == 1.0 {
        PhiFunction::CauchySchwarz.eval(t)
    } else {
        PhiFunction::strongly_decaying(alpha)?.eval(t)
    }
}

pub const FIG1_ALPHAS: [f64; 4] = [1.0, 1.5, 2.0, 2.5];
pub const FIG2_TS: [f64; 4] = [5.0, 10.0, 15.0, 20.0];

/// t = 1, 1.5, …, 20.
pub fn fig1_t_values() -> Vec<f64> {
    (2..=40).map(|i| i as f64 / 2.0).collect()
}

/// α = 1, 1.05, …, 3.
pub fn fig2_alpha_values() -> Vec<f64> {
    (100..=300).step_by(5).map(|i| i as f64 / 100.0).collect()
}

/// One row per abscissa, one column per curve.
pub fn phi_curves(preset: Preset) -> Result<Vec<Vec<f64>>> {
    match preset {
        Preset::Fig1 => fig1_t_values()
            .into_iter()
            .map(|t| {
                let mut row = vec![t];
                for a in FIG1_ALPHAS {
                    row.push(decaying_phi_or_limit(a, t)?);
                }
                Ok(row)
            })
            .collect(),
        Preset::Fig2 => fig2_alpha_values()
            .into_iter()
            .map(|a| {
                let mut row = vec![a];
                for t in FIG2_TS {
                    row.push(decaying_phi_or_limit(a, t)?);
                }
                Ok(row)
            })
            .collect(),
        other => Err(Error::Config(format!("preset `{other}` is not a φ curve"))),
    }
}

/// ζ = 0.10, 0.09, …, 0.01.
pub fn zeta_grid() -> Vec<f64> {
    (1..=10).rev().map(|i| i as f64 / 100.0).collect()
}

pub const MEASUREMENT_KS: [usize; 2] = [15, 30];

/// The φ family a measurement preset evaluates at sparsity K.
pub fn measurement_phi(preset: Preset, k: usize) -> Result<PhiFunction> {
    match preset {
        Preset::Fig8 => Ok(PhiFunction::CauchySchwarz),
        Preset::Fig9 => PhiFunction::strongly_decaying(1.1),
        Preset::Fig10 => PhiFunction::strongly_decaying(1.2),
        Preset::Fig11 => PhiFunction::gaussian_piecewise(k),
        other => Err(Error::Config(format!(
            "preset `{other}` is not a measurement sweep"
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementRow {
    pub zeta: f64,
    pub k: usize,
    pub new_nn: f64,
    pub existing_nn: f64,
    pub existing_delta_out_of_range: bool,
}

pub fn measurement_curve(
    phi_for_k: impl Fn(usize) -> Result<PhiFunction>,
    n: usize,
    k_values: &[usize],
    zetas: &[f64],
) -> Result<Vec<MeasurementRow>> {
    let mut rows = Vec::with_capacity(zetas.len() * k_values.len());
    for &zeta in zetas {
        for &k in k_values {
            let q = MeasurementBoundQuery {
                n,
                k,
                zeta,
                phi: phi_for_k(k)?,
            };
            let tropp = tropp_measurements(n, k, zeta)?;
            rows.push(MeasurementRow {
                zeta,
                k,
                new_nn: theorem2_measurements(&q)?,
                existing_nn: tropp.m,
                existing_delta_out_of_range: tropp.delta_out_of_range,
            });
        }
    }
    Ok(rows)
}

pub fn measurement_preset(preset: Preset) -> Result<Vec<MeasurementRow>> {
    measurement_phi(preset, MEASUREMENT_KS[0])?;
    measurement_curve(|k| measurement_phi(preset, k), 1024, &MEASUREMENT_KS, &zeta_grid())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticOutcome {
    pub case: SignalCase,
    pub phi: PhiFunction,
    pub iterations: usize,
    pub conditions_held: usize,
    pub violations: usize,
}

/// Traces the per-iteration sufficient condition on fresh trials.
///
/// Each trace pairs the signal with its family's φ when the signal actually
/// satisfies it, and with Cauchy–Schwarz otherwise, so the condition is only
/// ever evaluated under a valid premise.
pub fn run_diagnostics(
    m: usize,
    n: usize,
    k: usize,
    cases: &[SignalCase],
    traces_per_case: usize,
    seed: u64,
) -> Result<Vec<DiagnosticOutcome>> {
    if k == 0 || k > m || m > n {
        return Err(Error::domain(format!("need 1 ≤ K ≤ m ≤ n (got K={k}, m={m}, n={n})")));
    }
    let per_trial: Vec<Vec<DiagnosticOutcome>> = (0..traces_per_case)
        .into_par_iter()
        .map(|t| {
            let ts = trial_seed(seed, m, k, t);
            let a = gaussian_matrix(m, n, derive_seed(ts, &[MATRIX_STREAM]))?;
            cases
                .iter()
                .map(|&case| {
                    let x = generate_signal(case, k, n, signal_seed(ts, &case))?;
                    let mut phi = PhiFunction::CauchySchwarz;
                    if let Some(p) = case.paired_phi(x.support.len()) {
                        if check_phi_inequality(&x, &p)?.holds {
                            phi = p;
                        }
                    }
                    let trace = lemma4_diagnostic(&a, &x, &phi)?;
                    Ok(DiagnosticOutcome {
                        case,
                        phi,
                        iterations: trace.records.len(),
                        conditions_held: trace.records.iter().filter(|r| r.condition_held).count(),
                        violations: trace.violations(),
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(per_trial.into_iter().flatten().collect())
}

/// Optional overrides read from a TOML file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub preset: Option<Preset>,
    pub m: Option<Vec<usize>>,
    pub n: Option<usize>,
    pub k: Option<Vec<usize>>,
    pub cases: Option<Vec<String>>,
    pub trials: Option<usize>,
    pub trial_offset: Option<usize>,
    pub seed: Option<u64>,
    pub grid: Option<usize>,
}

impl ConfigFile {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let (line, column) = e
                .span()
                .map(|s| line_col(text, s.start))
                .unwrap_or((1, 1));
            Error::Parse {
                line,
                column,
                message: e.message().to_string(),
            }
        })
    }

    /// Layers the file's fields over `base`.
    pub fn apply(&self, base: &mut ExperimentConfig) -> Result<()> {
        if let Some(m) = &self.m {
            base.m_values = m.clone();
        }
        if let Some(n) = self.n {
            base.n = n;
        }
        if let Some(k) = &self.k {
            base.k_values = k.clone();
        }
        if let Some(cases) = &self.cases {
            base.cases = cases.iter().map(|c| c.parse()).collect::<Result<_>>()?;
        }
        if let Some(t) = self.trials {
            base.trials = t;
        }
        if let Some(o) = self.trial_offset {
            base.trial_offset = o;
        }
        if let Some(s) = self.seed {
            base.seed = s;
        }
        if let Some(g) = self.grid {
            base.grid_size = g;
        }
        Ok(())
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert_eq!("FIG-PHI-LBD".parse::<Preset>().unwrap(), Preset::FigPhiLbd);
        assert!("fig12".parse::<Preset>().is_err());
    }

    #[test]
    fn preset_grids() {
        let f4 = ExperimentConfig::preset(Preset::Fig4).unwrap();
        assert_eq!(f4.m_values.len(), 19);
        assert_eq!((f4.m_values[0], f4.m_values[18]), (100, 1000));
        assert_eq!(f4.k_values, vec![15, 30]);
        assert_eq!(f4.trials, 1000);
        let t2 = ExperimentConfig::preset(Preset::Table2).unwrap();
        assert_eq!(t2.m_values, vec![120, 140, 160]);
        assert_eq!(t2.cases.len(), 6);
        assert_eq!(t2.trials, 10_000);
        assert!(ExperimentConfig::preset(Preset::Fig8).is_err());
        let z = zeta_grid();
        assert_eq!(z.len(), 10);
        assert_eq!((z[0], z[9]), (0.1, 0.01));
    }

    #[test]
    fn invalid_config_rejected() {
        let mut c = ExperimentConfig::preset(Preset::Custom).unwrap();
        c.trials = 0;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::preset(Preset::Custom).unwrap();
        c.m_values = vec![10];
        assert!(c.validate().is_err());
    }

    #[test]
    fn wilson_values() {
        assert_eq!(wilson_half_width(0, 0), 0.0);
        // p = 1/2, N = 100: z/(1+z²/N)·√(1/(4N) + z²/(4N²)).
        let h = wilson_half_width(50, 100);
        assert!((h - 0.096_168_469_634_004_37).abs() < 1e-15, "{h}");
        assert!(wilson_half_width(0, 1000) > 0.0);
    }

    #[test]
    fn flat_ratio_is_k() {
        let o = run_trial(40, 80, 5, SignalCase::Flat, 3).unwrap();
        assert_eq!(o.ratio, 5.0);
        assert_eq!(run_trial(40, 80, 5, SignalCase::Flat, 3).unwrap(), o);
    }

    #[test]
    fn single_atom_recovers() {
        let hits = (0..1000)
            .filter(|&s| run_trial(50, 64, 1, SignalCase::Gaussian { sigma: 1.0 }, s).unwrap().exact)
            .count();
        assert!(hits >= 990, "{hits}");
    }

    #[test]
    fn trial_independent_of_other_cases() {
        let cases = table_cases();
        let all = run_trial_cases(60, 200, 5, &cases, 11).unwrap();
        for (i, &c) in cases.iter().enumerate() {
            assert_eq!(run_trial(60, 200, 5, c, 11).unwrap(), all[i]);
        }
    }

    #[test]
    fn ratio_experiment_trivial_p1() {
        let rows = ratio_experiment(&[1], 100, 1.0, 0).unwrap();
        assert_eq!(rows[0].hits, 100);
        assert!(rows[0].closed_form.is_none());
        assert!(ratio_experiment(&[3], 10, 0.0, 0).is_err());
    }

    #[test]
    fn phi_lbd_shape() {
        let ks: Vec<usize> = (10..=200).step_by(10).collect();
        let c = phi_lbd_curve(&ks).unwrap();
        assert!(c.windows(2).all(|w| w[1].raw > w[0].raw));
        assert!((c[0].raw - 0.056).abs() < 1e-3);
        assert!((c[19].raw - 0.9933).abs() < 1e-4);
    }

    #[test]
    fn fig1_first_column_is_identity() {
        for row in phi_curves(Preset::Fig1).unwrap() {
            assert_eq!(row[1], row[0]);
            assert!(row[2] <= row[0] * (1.0 + 1e-12) && row[4] <= row[3] * (1.0 + 1e-12));
        }
        let f2 = phi_curves(Preset::Fig2).unwrap();
        assert_eq!(f2[0][1..], [5.0, 10.0, 15.0, 20.0]);
    }

    #[test]
    fn config_file_parsing() {
        let f = ConfigFile::from_toml_str(
            "preset = \"table1\"\nm = [60]\ncases = [\"flat\", \"decaying:1.2\"]\ntrials = 20\n",
        )
        .unwrap();
        assert_eq!(f.preset, Some(Preset::Table1));
        let mut c = ExperimentConfig::preset(Preset::Table1).unwrap();
        f.apply(&mut c).unwrap();
        assert_eq!(c.m_values, vec![60]);
        assert_eq!(c.cases[1], SignalCase::Decaying { alpha: 1.2 });
        assert_eq!(c.trials, 20);

        let err = ConfigFile::from_toml_str("trials = 5\nbogus = 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
        let bad_case = ConfigFile::from_toml_str("cases = [\"triangle\"]").unwrap();
        assert!(bad_case.apply(&mut c).is_err());
    }

    #[test]
    fn experiment_failure_names_grid_point() {
        let cfg = ExperimentConfig {
            preset: Preset::Custom,
            m_values: vec![20],
            n: 40,
            k_values: vec![3],
            cases: vec![SignalCase::Flat],
            trials: 3,
            trial_offset: 0,
            seed: 0,
            grid_size: 16,
        };
        let s = run_experiment(&cfg).unwrap();
        assert_eq!(s.rows.len(), 1);
        assert!(s.rows[0].empirical >= 0.0 && s.rows[0].empirical <= 1.0);
        // Bypassing validation, m > n fails inside the trial loop.
        let err = run_grid_point(&ExperimentConfig { n: 10, ..cfg }, 20, 3).unwrap_err();
        match err {
            Error::Experiment { m, k, case, .. } => {
                assert_eq!((m, k), (20, 3));
                assert_eq!(case, "flat");
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
