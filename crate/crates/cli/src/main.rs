//! Command-line driver: figure/table reproduction, bound evaluation,
//! custom sweeps and OMP on matrix files.
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use sparse_omp::bounds::{
    asymptotic_measurements, corollary6_measurements, theorem1_bound, theorem2_measurements,
    tropp_bound_with_grid, tropp_measurements, AsymptoticKind, MeasurementBoundQuery,
    RecoveryBoundQuery, DEFAULT_GRID_SIZE,
};
use sparse_omp::experiments::{
    measurement_preset, phi_curves, phi_lbd_curve, ratio_experiment, run_experiment, ConfigFile,
    ExperimentConfig, Preset, PresetKind, DEFAULT_SEED, FIG3_MU, FIG3_TRIALS, MATRIX_STREAM,
    SIGNAL_STREAM,
};
use sparse_omp::io::{
    self, curve_table, format_float, format_matrix_csv, format_vector, measurement_table,
    phi_lbd_table, ratio_table, recovery_table, Cell, OutputTable, Precision, BOUND_SCHEMA,
    FIG1_SCHEMA, FIG2_SCHEMA, PHI_SCHEMA,
};
use sparse_omp::numerics::{derive_seed, gaussian_matrix};
use sparse_omp::recovery::omp_run;
use sparse_omp::signals::generate_signal;
use sparse_omp::{Error, PhiFunction, SignalCase};

// stdout may be a closed pipe (`| head`); that ends the run quietly.
macro_rules! outln {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        if let Err(e) = writeln!(std::io::stdout().lock(), $($arg)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
            panic!("failed writing to stdout: {e}");
        }
    }};
}

/// Default directory for CSV output.
const OUT_DIR_ENV: &str = "SPARSE_OMP_OUT_DIR";

#[derive(Parser)]
#[command(name = "sparse-omp", version, about = "OMP recovery bounds and experiments")]
struct Cli {
    /// Directory for CSV output.
    #[arg(long, global = true, env = OUT_DIR_ENV, default_value = "results")]
    out_dir: PathBuf,

    /// Print values with 17 significant digits as bare CSV.
    #[arg(long, global = true)]
    machine: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Regenerate the data behind a figure or table (or `all`).
    Reproduce(ReproduceArgs),
    /// Evaluate one bound.
    Bound(BoundArgs),
    /// Tabulate φ(t).
    Phi(PhiArgs),
    /// Empirical probability that ‖u‖₁² ≤ μ p ‖u‖₂² for Gaussian u.
    Ratio(RatioArgs),
    /// Run OMP on a matrix file and a measurement file.
    Omp(OmpArgs),
    /// Custom Monte Carlo recovery sweep.
    Simulate(SimulateArgs),
    /// Write a synthetic A, x, y = A x fixture.
    Fixture(FixtureArgs),
}

#[derive(Args, Clone)]
struct StochasticArgs {
    /// Base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Trials per grid point.
    #[arg(long)]
    trials: Option<usize>,
    /// Points in the ε grid used for the probability bounds.
    #[arg(long)]
    grid: Option<usize>,
    /// TOML file with overrides; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ReproduceArgs {
    /// fig1..fig11, fig_phi_lbd, table1, table2 or all.
    preset: String,
    #[command(flatten)]
    common: StochasticArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundKind {
    /// Recovery probability for signals obeying φ.
    Theorem1,
    /// Sparsity-only recovery probability.
    Tropp,
    /// Measurements for probability 1 − ζ under φ.
    Theorem2,
    /// Closed-form measurements for α-strongly-decaying signals.
    Corollary6,
    /// 2K ln(n/ζ).
    #[value(name = "asym-2k")]
    Asym2K,
    /// 1.9K ln(n/ζ).
    #[value(name = "asym-1.9k")]
    Asym19K,
    /// Sparsity-only measurement count.
    TroppM,
}

#[derive(Args)]
struct BoundArgs {
    kind: BoundKind,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: usize,
    #[arg(long = "K", alias = "k")]
    k: usize,
    #[arg(long)]
    zeta: Option<f64>,
    /// cs, decaying:<α> or gaussian:<K>.
    #[arg(long, default_value = "cs")]
    phi: PhiFunction,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
    grid: usize,
}

#[derive(Args)]
struct PhiArgs {
    /// cs, decaying:<α> or gaussian:<K>.
    #[arg(long, default_value = "cs")]
    phi: PhiFunction,
    /// Points to evaluate; defaults to 1..=--t-max.
    #[arg(long, value_delimiter = ',')]
    t: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    t_max: usize,
    /// Write the table under the output directory with this file name.
    #[arg(long)]
    output: Option<String>,
}

#[derive(Args)]
struct RatioArgs {
    #[arg(long, default_value_t = FIG3_MU)]
    mu: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = FIG3_TRIALS)]
    trials: usize,
    /// Values of p as `start:end` (inclusive).
    #[arg(long, default_value = "3:50")]
    grid: String,
    #[arg(long)]
    output: Option<String>,
}

#[derive(Args)]
struct OmpArgs {
    /// Dense row-major CSV matrix.
    #[arg(long)]
    matrix: PathBuf,
    /// Measurement vector, one value per line.
    #[arg(long)]
    y: PathBuf,
    #[arg(long)]
    iterations: usize,
    /// Write the estimate as a vector file.
    #[arg(long)]
    estimate_out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Measurement counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    m: Vec<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Sparsity levels, comma separated.
    #[arg(long = "K", alias = "k", value_delimiter = ',')]
    k: Vec<usize>,
    /// Signal case; repeat for several.
    #[arg(long = "case")]
    cases: Vec<SignalCase>,
    #[arg(long)]
    trial_offset: Option<usize>,
    #[arg(long, default_value = "simulate.csv")]
    output: String,
    #[command(flatten)]
    common: StochasticArgs,
}

#[derive(Args)]
struct FixtureArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long = "K", alias = "k")]
    k: usize,
    #[arg(long = "case", default_value = "gaussian")]
    case: SignalCase,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Directory receiving A.csv, x.csv and y.csv.
    #[arg(long)]
    dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 2 for malformed input or arguments outside a formula's domain.
fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<Error>() {
            return match err {
                Error::Parse { .. }
                | Error::Domain(_)
                | Error::Config(_)
                | Error::DimensionMismatch { .. }
                | Error::EmptyMatrix
                | Error::ZeroDimension { .. } => 2,
                _ => 1,
            };
        }
    }
    1
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let precision = if cli.machine {
        Precision::Machine
    } else {
        Precision::Human
    };
    match cli.command {
        Command::Reproduce(a) => reproduce(&cli.out_dir, &a),
        Command::Bound(a) => bound(&a, precision),
        Command::Phi(a) => phi(&cli.out_dir, &a, precision),
        Command::Ratio(a) => ratio(&cli.out_dir, &a, precision),
        Command::Omp(a) => omp(&a, precision),
        Command::Simulate(a) => simulate(&cli.out_dir, &a),
        Command::Fixture(a) => fixture(&a),
    }
}

fn load_config(path: &Option<PathBuf>) -> anyhow::Result<ConfigFile> {
    match path {
        Some(p) => {
            let text = io::read_to_string(p)?;
            ConfigFile::from_toml_str(&text).with_context(|| format!("reading {}", p.display()))
        }
        None => Ok(ConfigFile::default()),
    }
}

/// Preset defaults, then the config file, then flags.
fn resolve(
    preset: Preset,
    file: &ConfigFile,
    flags: &StochasticArgs,
) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::preset(preset)?;
    file.apply(&mut cfg)?;
    if let Some(s) = flags.seed {
        cfg.seed = s;
    }
    if let Some(t) = flags.trials {
        cfg.trials = t;
    }
    if let Some(g) = flags.grid {
        cfg.grid_size = g;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn annotate_trials(t: &mut OutputTable, preset: Preset, trials: usize) {
    if let Some(default) = preset.default_trials() {
        if trials != default {
            t.meta("trials_override", format!("{trials} (preset default {default})"))
                .meta("trial_scale", format_float(trials as f64 / default as f64, 6));
        }
    }
}

fn write_table(t: &OutputTable, path: &Path) -> anyhow::Result<()> {
    t.write(path, Precision::Machine)?;
    outln!("wrote {} ({} rows)", path.display(), t.rows.len());
    Ok(())
}

fn reproduce(out_dir: &Path, a: &ReproduceArgs) -> anyhow::Result<()> {
    let file = load_config(&a.common.config)?;
    let presets: Vec<Preset> = if a.preset.trim().eq_ignore_ascii_case("all") {
        Preset::ALL.into_iter().filter(|p| *p != Preset::Custom).collect()
    } else {
        let p: Preset = a.preset.parse()?;
        if p == Preset::Custom {
            bail!(Error::Config("use `simulate` for custom sweeps".into()));
        }
        vec![p]
    };
    if let Some(fp) = file.preset {
        if presets != [fp] {
            bail!(Error::Config(format!(
                "config file names preset `{fp}` but `{}` was requested",
                a.preset
            )));
        }
    }
    for p in presets {
        let table = reproduce_one(p, &file, &a.common)?;
        write_table(&table, &out_dir.join(format!("{p}.csv")))?;
    }
    Ok(())
}

fn reproduce_one(p: Preset, file: &ConfigFile, flags: &StochasticArgs) -> anyhow::Result<OutputTable> {
    let mut table = match p.kind() {
        PresetKind::PhiCurve => {
            let schema = if p == Preset::Fig1 { FIG1_SCHEMA } else { FIG2_SCHEMA };
            curve_table(schema, &phi_curves(p)?)?
        }
        PresetKind::PhiLbd => {
            let ks: Vec<usize> = (10..=200).step_by(10).collect();
            phi_lbd_table(&phi_lbd_curve(&ks)?)?
        }
        PresetKind::Measurement => {
            let rows = measurement_preset(p)?;
            if rows.iter().any(|r| r.existing_delta_out_of_range) {
                eprintln!("warning: {p}: existing_nn uses δ ≥ 0.36, outside the baseline's stated range");
            }
            measurement_table(&rows)?
        }
        PresetKind::Ratio => {
            let trials = flags.trials.or(file.trials).unwrap_or(FIG3_TRIALS);
            let seed = flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED);
            let ps: Vec<usize> = (3..=50).collect();
            let rows = ratio_experiment(&ps, trials, FIG3_MU, seed)?;
            let mut t = ratio_table(&rows, FIG3_MU)?;
            t.meta("seed", seed).meta("trials", trials);
            annotate_trials(&mut t, p, trials);
            t
        }
        PresetKind::Recovery => {
            let cfg = resolve(p, file, flags)?;
            let summary = run_experiment(&cfg)?;
            let mut t = recovery_table(&summary)?;
            annotate_trials(&mut t, p, cfg.trials);
            for r in &summary.rows {
                outln!(
                    "  m={:<5} K={:<3} {:<16} empirical={} ±{}",
                    r.m,
                    r.k,
                    r.case.to_string(),
                    format_float(r.empirical, 6),
                    format_float(r.half_width, 3)
                );
            }
            t
        }
    };
    table.metadata.insert(2, ("preset".into(), p.to_string()));
    dedup_meta(&mut table);
    Ok(table)
}

/// Keeps the first occurrence of each metadata key.
fn dedup_meta(t: &mut OutputTable) {
    let mut seen = std::collections::HashSet::new();
    t.metadata.retain(|(k, _)| seen.insert(k.clone()));
}

fn need<T>(v: Option<T>, flag: &str, kind: &str) -> anyhow::Result<T> {
    v.ok_or_else(|| Error::Domain(format!("`bound {kind}` requires --{flag}")).into())
}

fn bound(a: &BoundArgs, precision: Precision) -> anyhow::Result<()> {
    let name = a.kind.to_possible_value().expect("no skipped variants");
    let name = name.get_name();
    let mut phi_label = String::new();
    let mut zeta_used = None;
    let mut m_used = None;
    let value = match a.kind {
        BoundKind::Theorem1 => {
            let m = need(a.m, "m", name)?;
            m_used = Some(m);
            phi_label = a.phi.to_string();
            theorem1_bound(&RecoveryBoundQuery::new(m, a.n, a.k, a.phi).with_grid(a.grid))?
        }
        BoundKind::Tropp => {
            let m = need(a.m, "m", name)?;
            m_used = Some(m);
            tropp_bound_with_grid(m, a.n, a.k, a.grid)?
        }
        BoundKind::Theorem2 => {
            let zeta = need(a.zeta, "zeta", name)?;
            zeta_used = Some(zeta);
            phi_label = a.phi.to_string();
            theorem2_measurements(&MeasurementBoundQuery {
                n: a.n,
                k: a.k,
                zeta,
                phi: a.phi,
            })?
        }
        BoundKind::Corollary6 => {
            let zeta = need(a.zeta, "zeta", name)?;
            let alpha = need(a.alpha, "alpha", name)?;
            zeta_used = Some(zeta);
            phi_label = format!("decaying:{alpha}");
            corollary6_measurements(a.n, a.k, zeta, alpha)?
        }
        BoundKind::Asym2K | BoundKind::Asym19K => {
            let zeta = need(a.zeta, "zeta", name)?;
            zeta_used = Some(zeta);
            let kind = if matches!(a.kind, BoundKind::Asym2K) {
                AsymptoticKind::General2K
            } else {
                AsymptoticKind::Gaussian1p9K
            };
            asymptotic_measurements(kind, a.n, a.k, zeta)?
        }
        BoundKind::TroppM => {
            let zeta = need(a.zeta, "zeta", name)?;
            zeta_used = Some(zeta);
            let t = tropp_measurements(a.n, a.k, zeta)?;
            if t.delta_out_of_range {
                eprintln!(
                    "warning: δ = {} ≥ 0.36 is outside the range the baseline is stated for",
                    format_float(t.delta, 6)
                );
            }
            t.m
        }
    };
    match precision {
        Precision::Human => outln!("{name} = {}", format_float(value, 6)),
        Precision::Machine => {
            let opt = |v: Option<Cell>| v.unwrap_or_else(|| Cell::Text(String::new()));
            let mut t = OutputTable::new(BOUND_SCHEMA);
            t.push(vec![
                name.into(),
                opt(m_used.map(Cell::from)),
                a.n.into(),
                a.k.into(),
                opt(zeta_used.map(Cell::from)),
                phi_label.into(),
                value.into(),
            ])?;
            outln!("{}", OutputTable::format_row(&t.rows[0], precision));
        }
    }
    Ok(())
}

fn print_table(t: &OutputTable, precision: Precision) {
    outln!("{}", t.header());
    for row in &t.rows {
        outln!("{}", OutputTable::format_row(row, precision));
    }
}

fn phi(out_dir: &Path, a: &PhiArgs, precision: Precision) -> anyhow::Result<()> {
    let ts: Vec<f64> = if a.t.is_empty() {
        (1..=a.t_max).map(|t| t as f64).collect()
    } else {
        a.t.clone()
    };
    let mut t = OutputTable::new(PHI_SCHEMA);
    t.meta("phi", a.phi);
    for &x in &ts {
        t.push(vec![x.into(), a.phi.eval(x)?.into()])?;
    }
    print_table(&t, precision);
    if let Some(name) = &a.output {
        write_table(&t, &out_dir.join(name))?;
    }
    Ok(())
}

fn parse_range(s: &str) -> anyhow::Result<Vec<usize>> {
    let bad = || Error::Parse {
        line: 1,
        column: 1,
        message: format!("expected `start:end`, got `{s}`"),
    };
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a == 0 || b < a {
        bail!(Error::Domain(format!("p range `{s}` must satisfy 1 ≤ start ≤ end")));
    }
    Ok((a..=b).collect())
}

fn ratio(out_dir: &Path, a: &RatioArgs, precision: Precision) -> anyhow::Result<()> {
    let ps = parse_range(&a.grid)?;
    let seed = a.seed.unwrap_or(DEFAULT_SEED);
    let rows = ratio_experiment(&ps, a.trials, a.mu, seed)?;
    let mut t = ratio_table(&rows, a.mu)?;
    t.meta("seed", seed).meta("trials", a.trials);
    print_table(&t, precision);
    if let Some(name) = &a.output {
        write_table(&t, &out_dir.join(name))?;
    }
    Ok(())
}

fn omp(a: &OmpArgs, precision: Precision) -> anyhow::Result<()> {
    let matrix = io::parse_matrix_csv(&io::read_to_string(&a.matrix)?)
        .with_context(|| format!("in {}", a.matrix.display()))?;
    let y = io::parse_vector(&io::read_to_string(&a.y)?).with_context(|| format!("in {}", a.y.display()))?;
    let res = omp_run(&matrix, &y, a.iterations)?;
    let fmt = |v: &[f64]| {
        v.iter()
            .map(|x| format_float(*x, precision.digits()))
            .collect::<Vec<_>>()
            .join(",")
    };
    let selected: Vec<String> = res.selected.iter().map(|j| j.to_string()).collect();
    outln!("selected: {}", selected.join(","));
    outln!("residual_norms: {}", fmt(&res.residual_norms));
    let nz: Vec<String> = res
        .estimate
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(j, v)| format!("{j}:{}", format_float(*v, precision.digits())))
        .collect();
    outln!("estimate: {}", nz.join(","));
    if let Some(p) = &a.estimate_out {
        io::write_atomic(p, &format_vector(&res.estimate))?;
        outln!("wrote {}", p.display());
    }
    Ok(())
}

fn simulate(out_dir: &Path, a: &SimulateArgs) -> anyhow::Result<()> {
    let file = load_config(&a.common.config)?;
    let base = file.preset.unwrap_or(Preset::Custom);
    let mut cfg = ExperimentConfig::preset(base)?;
    file.apply(&mut cfg)?;
    if !a.m.is_empty() {
        cfg.m_values = a.m.clone();
    }
    if let Some(n) = a.n {
        cfg.n = n;
    }
    if !a.k.is_empty() {
        cfg.k_values = a.k.clone();
    }
    if !a.cases.is_empty() {
        cfg.cases = a.cases.clone();
    }
    if let Some(o) = a.trial_offset {
        cfg.trial_offset = o;
    }
    if let Some(s) = a.common.seed {
        cfg.seed = s;
    }
    if let Some(t) = a.common.trials {
        cfg.trials = t;
    }
    if let Some(g) = a.common.grid {
        cfg.grid_size = g;
    }
    cfg.validate()?;
    let summary = run_experiment(&cfg)?;
    let mut t = recovery_table(&summary)?;
    let ms: Vec<String> = cfg.m_values.iter().map(|m| m.to_string()).collect();
    let ks: Vec<String> = cfg.k_values.iter().map(|k| k.to_string()).collect();
    let cases: Vec<String> = cfg.cases.iter().map(|c| c.to_string()).collect();
    t.meta("m_values", ms.join(" "))
        .meta("k_values", ks.join(" "))
        .meta("cases", cases.join(" "));
    for r in &summary.rows {
        outln!(
            "  m={:<5} K={:<3} {:<16} empirical={} ±{} new_bd={}",
            r.m,
            r.k,
            r.case.to_string(),
            format_float(r.empirical, 6),
            format_float(r.half_width, 3),
            format_float(r.new_bound, 6)
        );
    }
    write_table(&t, &out_dir.join(&a.output))
}

fn fixture(a: &FixtureArgs) -> anyhow::Result<()> {
    if a.k == 0 || a.k > a.m || a.m > a.n {
        bail!(Error::Domain(format!(
            "need 1 ≤ K ≤ m ≤ n (got K={}, m={}, n={})",
            a.k, a.m, a.n
        )));
    }
    let matrix = gaussian_matrix(a.m, a.n, derive_seed(a.seed, &[MATRIX_STREAM]))?;
    let x = generate_signal(a.case, a.k, a.n, derive_seed(a.seed, &[SIGNAL_STREAM, a.case.stream_id()]))?;
    let y = matrix.mul_vec(&x.values)?;
    io::write_atomic(&a.dir.join("A.csv"), &format_matrix_csv(&matrix))?;
    io::write_atomic(&a.dir.join("x.csv"), &format_vector(&x.values))?;
    io::write_atomic(&a.dir.join("y.csv"), &format_vector(&y))?;
    let support: Vec<String> = x.support.iter().map(|j| j.to_string()).collect();
    outln!("wrote A.csv, x.csv, y.csv to {}", a.dir.display());
    outln!("support: {}", support.join(","));
    Ok(())
}
