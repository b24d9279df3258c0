//! Dense CSV matrix/vector files and the CSV result tables.
//!
//! Matrix files are row-major, comma separated, with no header. Vector
//! files hold one value per line. Blank lines are ignored in both.
//!
//! Result tables start with `# key: value` metadata lines, then a header
//! row, then one row per record.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiments::{ExperimentSummary, MeasurementRow, PhiLbdPoint, RatioRow};
use crate::numerics::Matrix;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

fn parse_cell(cell: &str, line: usize, column: usize) -> Result<f64> {
    let t = cell.trim();
    let v: f64 = t.parse().map_err(|_| Error::Parse {
        line,
        column,
        message: format!("`{t}` is not a number"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            column,
            message: format!("`{t}` is not finite"),
        });
    }
    Ok(v)
}

/// Parses a row-major dense matrix. Columns in errors are 1-based cell
/// positions within the row.
pub fn parse_matrix_csv(text: &str) -> Result<Matrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .enumerate()
            .map(|(j, c)| parse_cell(c, i + 1, j + 1))
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Parse {
                    line: i + 1,
                    column: row.len().min(first.len()) + 1,
                    message: format!("row has {} cells, expected {}", row.len(), first.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    Matrix::from_rows(&rows)
}

/// Parses one value per line.
pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        if line.contains(',') {
            return Err(Error::Parse {
                line: i + 1,
                column: line.find(',').map_or(1, |p| p + 1),
                message: "vector files hold one value per line".into(),
            });
        }
        out.push(parse_cell(line, i + 1, 1)?);
    }
    if out.is_empty() {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "vector file is empty".into(),
        });
    }
    Ok(out)
}

/// Row-major CSV using shortest round-trip formatting.
pub fn format_matrix_csv(a: &Matrix) -> String {
    let mut s = String::new();
    for i in 0..a.rows() {
        let row: Vec<String> = a.row(i).iter().map(|v| format!("{v:?}")).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

pub fn format_vector(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}\n")).collect()
}

pub fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(io_err)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents.as_bytes()).map_err(io_err)?;
    tmp.flush().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    /// 17 significant digits, lossless.
    Machine,
    /// 6 significant digits.
    Human,
}

impl Precision {
    pub fn digits(self) -> usize {
        match self {
            Precision::Machine => 17,
            Precision::Human => 6,
        }
    }
}

/// `%g`-style formatting with `digits` significant digits.
pub fn format_float(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Int(v as i64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Schema {
    pub id: &'static str,
    pub columns: &'static [&'static str],
}

pub const FIG1_SCHEMA: Schema = Schema {
    id: "phi_vs_t",
    columns: &["t", "phi_alpha_1.0", "phi_alpha_1.5", "phi_alpha_2.0", "phi_alpha_2.5"],
};

pub const FIG2_SCHEMA: Schema = Schema {
    id: "phi_vs_alpha",
    columns: &["alpha", "phi_t_5", "phi_t_10", "phi_t_15", "phi_t_20"],
};

pub const FIG3_SCHEMA: Schema = Schema {
    id: "ratio_probability",
    columns: &[
        "p",
        "trials",
        "hits",
        "empirical",
        "wilson_half_width",
        "bound",
        "bound_closed_form",
    ],
};

pub const RATIO_SCHEMA: Schema = Schema {
    id: "ratio_probability_mu",
    columns: &["p", "trials", "hits", "empirical", "wilson_half_width", "bound"],
};

pub const PHI_LBD_SCHEMA: Schema = Schema {
    id: "gaussian_phi_probability",
    columns: &["K", "nu_lower_bound_raw", "nu_lower_bound"],
};

pub const RECOVERY_SCHEMA: Schema = Schema {
    id: "recovery",
    columns: &[
        "m",
        "K",
        "case",
        "phi",
        "trials",
        "successes",
        "empirical",
        "wilson_half_width",
        "mean_ratio",
        "new_bd",
        "existing_bd",
    ],
};

pub const MEASUREMENT_SCHEMA: Schema = Schema {
    id: "measurements",
    columns: &["zeta", "new_nn_K15", "existing_nn_K15", "new_nn_K30", "existing_nn_K30"],
};

pub const PHI_SCHEMA: Schema = Schema {
    id: "phi",
    columns: &["t", "phi"],
};

pub const BOUND_SCHEMA: Schema = Schema {
    id: "bound",
    columns: &["bound", "m", "n", "K", "zeta", "phi", "value"],
};

pub const SCHEMAS: [Schema; 9] = [
    FIG1_SCHEMA,
    FIG2_SCHEMA,
    FIG3_SCHEMA,
    RATIO_SCHEMA,
    PHI_LBD_SCHEMA,
    RECOVERY_SCHEMA,
    MEASUREMENT_SCHEMA,
    PHI_SCHEMA,
    BOUND_SCHEMA,
];

pub fn schema(id: &str) -> Option<Schema> {
    SCHEMAS.into_iter().find(|s| s.id == id)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputTable {
    pub schema: Schema,
    pub metadata: Vec<(String, String)>,
    pub rows: Vec<Vec<Cell>>,
}

fn quote(text: &str) -> String {
    if text.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

impl OutputTable {
    pub fn new(schema: Schema) -> Self {
        OutputTable {
            schema,
            metadata: vec![
                ("schema".into(), schema.id.into()),
                ("artifact_version".into(), ARTIFACT_VERSION.into()),
            ],
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.metadata.push((key.into(), value.to_string()));
        self
    }

    /// Appends a row after checking arity and finiteness.
    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.schema.columns.len() {
            return Err(Error::RowArity {
                schema: self.schema.id.into(),
                expected: self.schema.columns.len(),
                found: row.len(),
            });
        }
        for (cell, col) in row.iter().zip(self.schema.columns) {
            if let Cell::Float(v) = cell {
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        column: col.to_string(),
                    });
                }
            }
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn header(&self) -> String {
        self.schema.columns.join(",")
    }

    pub fn format_row(row: &[Cell], precision: Precision) -> String {
        row.iter()
            .map(|c| match c {
                Cell::Int(v) => v.to_string(),
                Cell::Float(v) => format_float(*v, precision.digits()),
                Cell::Text(t) => quote(t),
            })
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn to_csv(&self, precision: Precision) -> String {
        let mut s = String::new();
        for (k, v) in &self.metadata {
            let v = v.replace(['\n', '\r'], " ");
            let _ = writeln!(s, "# {k}: {v}");
        }
        let _ = writeln!(s, "{}", self.header());
        for row in &self.rows {
            let _ = writeln!(s, "{}", Self::format_row(row, precision));
        }
        s
    }

    pub fn write(&self, path: &Path, precision: Precision) -> Result<()> {
        write_atomic(path, &self.to_csv(precision))
    }
}

/// Schema `recovery`: one row per (K, m, case).
pub fn recovery_table(summary: &ExperimentSummary) -> Result<OutputTable> {
    let cfg = &summary.config;
    let mut t = OutputTable::new(RECOVERY_SCHEMA);
    t.meta("preset", cfg.preset)
        .meta("seed", cfg.seed)
        .meta("trials", cfg.trials)
        .meta("trial_offset", cfg.trial_offset)
        .meta("n", cfg.n)
        .meta("epsilon_grid", cfg.grid_size);
    for r in &summary.rows {
        t.push(vec![
            r.m.into(),
            r.k.into(),
            r.case.to_string().into(),
            r.phi.to_string().into(),
            r.trials.into(),
            r.successes.into(),
            r.empirical.into(),
            r.half_width.into(),
            r.mean_ratio.into(),
            r.new_bound.into(),
            r.tropp_bound.into(),
        ])?;
    }
    Ok(t)
}

/// Schema `ratio_probability` when every row has the closed form,
/// `ratio_probability_mu` otherwise.
pub fn ratio_table(rows: &[RatioRow], mu: f64) -> Result<OutputTable> {
    let closed = !rows.is_empty() && rows.iter().all(|r| r.closed_form.is_some());
    let mut t = OutputTable::new(if closed { FIG3_SCHEMA } else { RATIO_SCHEMA });
    t.meta("mu", mu);
    for r in rows {
        let mut row: Vec<Cell> = vec![
            r.p.into(),
            r.trials.into(),
            r.hits.into(),
            r.empirical.into(),
            r.half_width.into(),
            r.bound.into(),
        ];
        if closed {
            row.push(r.closed_form.expect("checked above").into());
        }
        t.push(row)?;
    }
    Ok(t)
}

pub fn phi_lbd_table(points: &[PhiLbdPoint]) -> Result<OutputTable> {
    let mut t = OutputTable::new(PHI_LBD_SCHEMA);
    for p in points {
        t.push(vec![p.k.into(), p.raw.into(), p.clamped.into()])?;
    }
    Ok(t)
}

/// Pivots measurement rows for K = 15 and K = 30 into one row per ζ.
pub fn measurement_table(rows: &[MeasurementRow]) -> Result<OutputTable> {
    let mut t = OutputTable::new(MEASUREMENT_SCHEMA);
    let mut any_out_of_range = false;
    let mut zetas: Vec<f64> = Vec::new();
    for r in rows {
        if !zetas.contains(&r.zeta) {
            zetas.push(r.zeta);
        }
        any_out_of_range |= r.existing_delta_out_of_range;
    }
    for z in zetas {
        let pick = |k: usize| {
            rows.iter()
                .find(|r| r.zeta == z && r.k == k)
                .ok_or_else(|| Error::Config(format!("no measurement row for ζ={z}, K={k}")))
        };
        let (a, b) = (pick(15)?, pick(30)?);
        t.push(vec![
            z.into(),
            a.new_nn.into(),
            a.existing_nn.into(),
            b.new_nn.into(),
            b.existing_nn.into(),
        ])?;
    }
    t.meta("n", 1024);
    if any_out_of_range {
        t.meta(
            "warning",
            "existing_nn uses delta >= 0.36, outside the baseline's stated range",
        );
    }
    Ok(t)
}

/// Curve tables whose first column is the abscissa.
pub fn curve_table(schema: Schema, rows: &[Vec<f64>]) -> Result<OutputTable> {
    let mut t = OutputTable::new(schema);
    for r in rows {
        t.push(r.iter().map(|&v| Cell::Float(v)).collect())?;
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        let a = Matrix::from_rows(&[vec![1.0, -2.5, 0.1], vec![1e-300, 3.0, 7.0]]).unwrap();
        let text = format_matrix_csv(&a);
        assert_eq!(parse_matrix_csv(&text).unwrap(), a);
        let v = vec![0.1, -1.0 / 3.0, 5e20];
        assert_eq!(parse_vector(&format_vector(&v)).unwrap(), v);
    }

    #[test]
    fn matrix_errors_name_cells() {
        match parse_matrix_csv("1,2\n3,x\n") {
            Err(Error::Parse { line: 2, column: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_matrix_csv("1,2\n\n3\n") {
            Err(Error::Parse { line: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_matrix_csv("1,NaN"), Err(Error::Parse { column: 2, .. })));
        assert!(matches!(parse_matrix_csv(" \n"), Err(Error::EmptyMatrix)));
        assert!(matches!(parse_vector("1\n2,3\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_vector("1\ninf\n"), Err(Error::Parse { line: 2, .. })));
        assert!(parse_vector("").is_err());
    }

    #[test]
    fn float_formatting() {
        assert_eq!(format_float(0.225, 6), "0.225");
        assert_eq!(format_float(1952.4625537928546, 6), "1952.46");
        assert_eq!(format_float(1e-7, 6), "1e-07");
        assert_eq!(format_float(1234567.0, 6), "1.23457e+06");
        assert_eq!(format_float(-0.5, 17), "-0.5");
        for v in [0.1, 1.0 / 3.0, 2.168e-170, 638.300_662_020_209_2, f64::MAX] {
            assert_eq!(format_float(v, 17).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn table_checks() {
        let mut t = OutputTable::new(PHI_SCHEMA);
        assert!(matches!(t.push(vec![1.0.into()]), Err(Error::RowArity { expected: 2, found: 1, .. })));
        assert!(matches!(t.push(vec![1.0.into(), f64::NAN.into()]), Err(Error::NonFinite { .. })));
        t.push(vec![2.0.into(), 1.5.into()]).unwrap();
        t.meta("note", "a\nb");
        let csv = t.to_csv(Precision::Human);
        assert_eq!(
            csv,
            format!("# schema: phi\n# artifact_version: {ARTIFACT_VERSION}\n# note: a b\nt,phi\n2,1.5\n")
        );
        assert_eq!(quote("a,b"), "\"a,b\"");
    }

    #[test]
    fn schema_registry() {
        for s in SCHEMAS {
            assert_eq!(schema(s.id), Some(s));
        }
        assert!(schema("nope").is_none());
    }

    #[test]
    fn atomic_write() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/out.csv");
        write_atomic(&p, "a\n").unwrap();
        write_atomic(&p, "b\n").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "b\n");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
