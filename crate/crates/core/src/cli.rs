//! The `qdicke` command-line front end.
//!
//! Every subcommand produces a [`Report`]: a header, rows of cells and
//! optional trailer records. Reports render as CSV (trailers become `#`
//! comment lines after the rows) or as one JSON object with `meta`, `rows`
//! and the trailer keys. Numbers are printed with 12 significant digits in
//! the style of C's `%.12g`, independent of locale.
//!
//! Exit codes: 0 success, 1 computation failure, 2 usage or input failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::oracle::{self, SuiteReport, MAX_QUBITS};
use crate::qlmg::{self, LmgModel, SweepConfig};
use crate::qmath::QParams;
use crate::qstate::{state_entropy, QuasiSymmetricState};
use crate::schmidt::{entropy_curve, Bipartition, DickeState};

/// Amplitude files within this distance of unit norm are renormalized.
pub const FILE_NORM_TOLERANCE: f64 = 1e-6;
/// Smallest `--steps` accepted by `lmg-sweep` and `hc-scan`.
pub const MIN_STEPS: usize = 5;

#[derive(Debug, Parser)]
#[command(name = "qdicke", version, about = "Entanglement of q-deformed Dicke states and the q-LMG model")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,

    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for sweeps (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Entropy of |N,k>_q at every cut L = 0..N, one block per k.
    EntropyCurve {
        #[arg(long)]
        n: usize,
        /// Comma-separated excitation numbers.
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<usize>,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
    },
    /// Entropy of a superposition read from an amplitude file.
    StateEntropy {
        /// N+1 reals, whitespace or comma separated, `#` starts a comment line.
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
    },
    /// Ground-state entropy of the q-LMG model over a field grid.
    LmgSweep {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Entanglement and mean-field critical fields for a list of q.
    HcScan {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
        /// Comma-separated deformation parameters; may be empty.
        #[arg(long, default_value = "")]
        q: String,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Brute-force validation suites on the full 2^N space.
    OracleCheck {
        #[arg(long, default_value_t = 10)]
        max_n: usize,
        /// Comma-separated deformation parameters.
        #[arg(long, default_value = "0.5,1,2")]
        q: String,
        /// Also compare the analytic and brute-force entropy of this amplitude file.
        #[arg(long, requires = "l")]
        cross: Option<PathBuf>,
        /// Cut used with `--cross`.
        #[arg(long)]
        l: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 0.0)]
    h_min: f64,
    #[arg(long, default_value_t = 2.0)]
    h_max: f64,
    #[arg(long, default_value_t = 201)]
    steps: usize,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
}

impl SweepArgs {
    fn validate(&self) -> Result<SweepConfig, Failure> {
        if self.steps < MIN_STEPS {
            return Err(usage(format!("--steps must be at least {MIN_STEPS}, got {}", self.steps)));
        }
        if !self.h_min.is_finite() || !self.h_max.is_finite() || !(self.h_max > self.h_min) {
            return Err(usage(format!("need finite --h-min < --h-max, got {} and {}", self.h_min, self.h_max)));
        }
        if !self.lambda.is_finite() {
            return Err(usage(format!("--lambda must be finite, got {}", self.lambda)));
        }
        Ok(SweepConfig { h_min: self.h_min, h_max: self.h_max, steps: self.steps, lambda: self.lambda })
    }
}

/// A failed run: message for standard error and the exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn compute(e: impl std::fmt::Display) -> Failure {
    Failure { code: 1, message: e.to_string() }
}

/// Domain errors raised while validating input are usage errors.
fn classify(e: Error) -> Failure {
    match e {
        Error::Domain(_) | Error::Size { .. } => usage(e.to_string()),
        other => compute(other),
    }
}

fn check_q(q: f64) -> Result<QParams, Failure> {
    QParams::new(q).map_err(|e| usage(format!("--q: {e}")))
}

fn parse_q_list(raw: &str) -> Result<Vec<f64>, Failure> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            let q: f64 = s.parse().map_err(|_| usage(format!("--q: cannot parse {s:?} as a number")))?;
            check_q(q)?;
            Ok(q)
        })
        .collect()
}

fn check_cut(l: usize, n: usize) -> Result<Bipartition, Failure> {
    if l > n {
        return Err(usage(format!("--l = {l} exceeds N = {n}")));
    }
    Ok(Bipartition::new(l))
}

/// `%.12g`: 12 significant digits, trailing zeros dropped.
pub fn format_g(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }
    // Round once in scientific form, then read the decimal exponent from it.
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        trim_zeros(&format!("{:.*}", (DIGITS - 1 - exp) as usize, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_g(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // Round through the printed form so both formats carry the same digits.
            Cell::Num(x) if x.is_finite() => json!(format_g(*x).parse::<f64>().expect("formatted float")),
            Cell::Num(_) => Value::Null,
            Cell::Int(i) => json!(i),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) if s.is_empty() => Value::Null,
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<Option<String>> for Cell {
    fn from(s: Option<String>) -> Self {
        Cell::Text(s.unwrap_or_default())
    }
}

/// A named record printed after the rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Trailer {
    pub name: &'static str,
    pub fields: Vec<(&'static str, Cell)>,
}

/// Output of one subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub meta: Map<String, Value>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub trailers: Vec<Trailer>,
}

impl Report {
    fn new(command: &str, columns: Vec<&'static str>) -> Self {
        let mut meta = Map::new();
        meta.insert("command".into(), json!(command));
        meta.insert("version".into(), json!(crate::VERSION));
        Report { meta, columns, rows: Vec::new(), trailers: Vec::new() }
    }

    fn config(&mut self, key: &str, value: Value) {
        self.meta.insert(key.into(), value);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Json => self.json(),
        }
    }

    fn csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        for t in &self.trailers {
            let fields: Vec<String> = t.fields.iter().map(|(k, v)| format!("{k}={}", v.csv())).collect();
            out.push_str(&format!("# {} {}\n", t.name, fields.join(" ")));
        }
        out
    }

    fn json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> =
                    self.columns.iter().zip(row).map(|(c, v)| (c.to_string(), v.json())).collect();
                Value::Object(obj)
            })
            .collect();
        let mut top = Map::new();
        top.insert("meta".into(), Value::Object(self.meta.clone()));
        top.insert("rows".into(), Value::Array(rows));
        for t in &self.trailers {
            let obj: Map<String, Value> = t.fields.iter().map(|(k, v)| (k.to_string(), v.json())).collect();
            top.insert(t.name.into(), Value::Object(obj));
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("JSON of plain values");
        s.push('\n');
        s
    }
}

/// Reads `N+1` amplitudes, renormalizing within [`FILE_NORM_TOLERANCE`].
///
/// Returns the state and an optional warning for standard error.
pub fn read_amplitudes(path: &Path) -> Result<(QuasiSymmetricState, Option<String>), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let mut alphas = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim_start().starts_with('#') {
            continue;
        }
        for token in line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            let v: f64 = token
                .parse()
                .map_err(|_| usage(format!("{}:{}: cannot parse {token:?} as a number", path.display(), lineno + 1)))?;
            if !v.is_finite() {
                return Err(usage(format!("{}:{}: amplitude {token} is not finite", path.display(), lineno + 1)));
            }
            alphas.push(v);
        }
    }
    if alphas.len() < 2 {
        return Err(usage(format!("{}: need at least 2 amplitudes, found {}", path.display(), alphas.len())));
    }
    let norm2: f64 = alphas.iter().map(|a| a * a).sum();
    if !((norm2 - 1.0).abs() <= FILE_NORM_TOLERANCE) {
        return Err(usage(format!(
            "{}: sum of squared amplitudes is {norm2}, not within {FILE_NORM_TOLERANCE:e} of 1",
            path.display()
        )));
    }
    let warning = (norm2 != 1.0).then(|| format!("warning: renormalized amplitudes (sum of squares was {norm2})"));
    let norm = norm2.sqrt();
    alphas.iter_mut().for_each(|a| *a /= norm);
    let state = QuasiSymmetricState::new(alphas).map_err(classify)?;
    Ok((state, warning.filter(|_| (norm2 - 1.0).abs() > 1e-15)))
}

fn cmd_entropy_curve(n: usize, ks: &[usize], q: f64) -> Result<Report, Failure> {
    let params = check_q(q)?;
    let states: Vec<DickeState> =
        ks.iter().map(|&k| DickeState::new(n, k)).collect::<Result<_, _>>().map_err(classify)?;
    let mut report = Report::new("entropy-curve", vec!["N", "k", "q", "L", "entropy_bits"]);
    report.config("N", json!(n));
    report.config("k", json!(ks));
    report.config("q", json!(q));
    for state in states {
        for (cut, s) in entropy_curve(state, params).map_err(compute)? {
            report.rows.push(vec![n.into(), state.k().into(), q.into(), cut.into(), s.into()]);
        }
    }
    Ok(report)
}

fn cmd_state_entropy(file: &Path, l: usize, q: f64, warnings: &mut Vec<String>) -> Result<Report, Failure> {
    let params = check_q(q)?;
    let (state, warning) = read_amplitudes(file)?;
    warnings.extend(warning);
    let n = state.n();
    let part = check_cut(l, n)?;
    let s = state_entropy(&state, part, params).map_err(compute)?;
    let mut report = Report::new("state-entropy", vec!["N", "L", "q", "entropy_bits"]);
    report.config("file", json!(file.display().to_string()));
    report.config("L", json!(l));
    report.config("q", json!(q));
    report.rows.push(vec![n.into(), l.into(), q.into(), s.into()]);
    Ok(report)
}

fn lmg_template(n: usize, lambda: f64, params: QParams) -> Result<LmgModel, Failure> {
    let template = LmgModel::new(n, 0.0, lambda, params).map_err(classify)?;
    // Surface the representable-region diagnostic once instead of per point.
    qlmg::build_sector_hamiltonian(&template.with_field(1.0).map_err(compute)?).map_err(compute)?;
    Ok(template)
}

fn cmd_lmg_sweep(n: usize, l: usize, q: f64, sweep: SweepArgs) -> Result<Report, Failure> {
    let params = check_q(q)?;
    let config = sweep.validate()?;
    if n < 2 {
        return Err(usage(format!("--n must be at least 2, got {n}")));
    }
    let part = check_cut(l, n)?;
    let template = lmg_template(n, config.lambda, params)?;
    let grid = qlmg::uniform_grid(config.h_min, config.h_max, config.steps).map_err(classify)?;
    let (result, cusp) = qlmg::locate_cusp(&template, part, &grid).map_err(compute)?;

    let mut report =
        Report::new("lmg-sweep", vec!["q", "h", "ground_energy", "entropy_bits", "degenerate", "gap", "error"]);
    report.config("N", json!(n));
    report.config("L", json!(l));
    report.config("q", json!(q));
    report.config("sweep", json!(config));
    for row in result.rows {
        report.rows.push(vec![
            q.into(),
            row.h.into(),
            row.ground_energy.into(),
            row.entropy.into(),
            row.degenerate.into(),
            row.gap.into(),
            row.error.into(),
        ]);
    }
    let fields = match cusp {
        Ok(c) => vec![
            ("h_c", c.h_c.into()),
            ("confidence", c.confidence.into()),
            ("step", c.step.into()),
            ("error", Cell::Text(String::new())),
        ],
        Err(e) => vec![
            ("h_c", f64::NAN.into()),
            ("confidence", f64::NAN.into()),
            ("step", f64::NAN.into()),
            ("error", e.to_string().into()),
        ],
    };
    report.trailers.push(Trailer { name: "cusp", fields });
    Ok(report)
}

fn cmd_hc_scan(n: usize, l: usize, q_raw: &str, sweep: SweepArgs) -> Result<Report, Failure> {
    let q_list = parse_q_list(q_raw)?;
    let config = sweep.validate()?;
    if n < 2 {
        return Err(usage(format!("--n must be at least 2, got {n}")));
    }
    let part = check_cut(l, n)?;
    for &q in &q_list {
        lmg_template(n, config.lambda, check_q(q)?)?;
    }
    let rows = qlmg::hc_scan(n, part, &q_list, config).map_err(compute)?;
    let mut report =
        Report::new("hc-scan", vec!["q", "hc_entanglement", "hc_meanfield", "abs_diff", "confidence", "step", "error"]);
    report.config("N", json!(n));
    report.config("L", json!(l));
    report.config("q", json!(q_list));
    report.config("sweep", json!(config));
    for row in rows {
        report.rows.push(vec![
            row.q.into(),
            row.hc_entanglement.into(),
            row.hc_meanfield.into(),
            row.abs_diff().into(),
            row.confidence.into(),
            row.step.into(),
            row.error.clone().into(),
        ]);
    }
    Ok(report)
}

/// Tolerances of the oracle suites.
pub const ROUTE_TOLERANCE: f64 = 1e-12;
pub const ALGEBRA_TOLERANCE: f64 = 1e-11;
pub const SCHMIDT_TOLERANCE: f64 = 1e-10;
pub const CASIMIR_TOLERANCE: f64 = 1e-10;
/// Largest `N` of the algebra and Casimir suites.
pub const ALGEBRA_MAX_N: usize = 8;

fn cmd_oracle_check(
    max_n: usize,
    q_raw: &str,
    cross: Option<&Path>,
    l: Option<usize>,
) -> Result<(Report, Option<Failure>), Failure> {
    if max_n == 0 || max_n > MAX_QUBITS {
        return Err(usage(format!("--max-n must lie in 1..={MAX_QUBITS}, got {max_n}")));
    }
    let q_list = parse_q_list(q_raw)?;
    let cross_state = match cross {
        Some(path) => {
            let (state, _) = read_amplitudes(path)?;
            if state.n() > MAX_QUBITS {
                return Err(usage(format!("--cross state has N = {} > {MAX_QUBITS}", state.n())));
            }
            let cut = check_cut(l.expect("clap requires --l"), state.n())?;
            Some((state, cut))
        }
        None => None,
    };

    let small = max_n.min(ALGEBRA_MAX_N);
    let suites: Vec<SuiteReport> = vec![
        oracle::route_suite(max_n, &q_list, ROUTE_TOLERANCE),
        oracle::algebra_suite(small, &q_list, ALGEBRA_TOLERANCE),
        oracle::schmidt_suite(max_n, &q_list, SCHMIDT_TOLERANCE),
        oracle::casimir_suite(small, &[0.0, 0.7, 1.5], &[0.0, 1.0, 2.5], &q_list, CASIMIR_TOLERANCE),
    ];

    let mut report = Report::new("oracle-check", vec!["suite", "passed", "total", "first_failure"]);
    report.config("max_n", json!(max_n));
    report.config("q", json!(q_list));
    for s in &suites {
        report.rows.push(vec![
            s.name.to_string().into(),
            s.passed.into(),
            s.total.into(),
            s.first_failure.clone().into(),
        ]);
    }

    let bell = oracle::build_state_direct(DickeState::new(2, 1).map_err(compute)?, QParams::CLASSICAL)
        .and_then(|s| oracle::partial_trace_spectrum(&s, 1))
        .map_err(compute)?;
    report
        .trailers
        .push(Trailer { name: "bell_spectrum", fields: vec![("p0", bell[0].into()), ("p1", bell[1].into())] });

    let mut failure = suites
        .iter()
        .find_map(|s| s.first_failure.as_ref().map(|f| compute(format!("{} suite failed at {f}", s.name))));
    if let Some((state, cut)) = cross_state {
        for &q in &q_list {
            let params = check_q(q)?;
            let analytic = state_entropy(&state, cut, params).map_err(compute)?;
            let brute = oracle::build_superposition(state.alphas(), params)
                .and_then(|full| oracle::full_entropy(&full, cut.l()))
                .map_err(compute)?;
            let diff = (analytic - brute).abs();
            if diff > SCHMIDT_TOLERANCE && failure.is_none() {
                failure = Some(compute(format!(
                    "cross check failed at q={q} L={}: |{analytic} - {brute}| = {diff:e}",
                    cut.l()
                )));
            }
            report.trailers.push(Trailer {
                name: "cross",
                fields: vec![
                    ("q", q.into()),
                    ("L", cut.l().into()),
                    ("oracle_entropy_bits", brute.into()),
                    ("analytic_entropy_bits", analytic.into()),
                    ("abs_diff", diff.into()),
                ],
            });
        }
    }
    Ok((report, failure))
}

fn dispatch(command: &Command, warnings: &mut Vec<String>) -> Result<(Report, Option<Failure>), Failure> {
    let plain = |r: Result<Report, Failure>| r.map(|r| (r, None));
    match command {
        Command::EntropyCurve { n, k, q } => plain(cmd_entropy_curve(*n, k, *q)),
        Command::StateEntropy { file, l, q } => plain(cmd_state_entropy(file, *l, *q, warnings)),
        Command::LmgSweep { n, l, q, sweep } => plain(cmd_lmg_sweep(*n, *l, *q, *sweep)),
        Command::HcScan { n, l, q, sweep } => plain(cmd_hc_scan(*n, *l, q, *sweep)),
        Command::OracleCheck { max_n, q, cross, l } => cmd_oracle_check(*max_n, q, cross.as_deref(), *l),
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Output goes to standard output or `--out`, diagnostics to
/// standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if cli.threads == Some(0) {
        eprintln!("error: --threads must be at least 1");
        return 2;
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.unwrap_or(0)).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return 1;
        }
    };

    let mut warnings = Vec::new();
    let outcome = pool.install(|| dispatch(&cli.command, &mut warnings));
    for w in &warnings {
        eprintln!("{w}");
    }
    let (report, failure) = match outcome {
        Ok(pair) => pair,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return f.code;
        }
    };
    let text = report.render(cli.format);
    let written = match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return 1;
    }
    match failure {
        Some(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
        None => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_formatting() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (0.1, "0.1"),
            (1.0 / 3.0, "0.333333333333"),
            (2.0 / 3.0, "0.666666666667"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (1e-5, "1e-05"),
            (0.0001234, "0.0001234"),
            (999999999999.5, "1e+12"),
            (1e100, "1e+100"),
            (f64::NAN, "nan"),
            (f64::NEG_INFINITY, "-inf"),
        ];
        for (x, s) in cases {
            assert_eq!(format_g(x), s, "{x}");
        }
    }

    #[test]
    fn q_lists() {
        assert_eq!(parse_q_list("").unwrap(), Vec::<f64>::new());
        assert_eq!(parse_q_list("1, 1.5,2").unwrap(), vec![1.0, 1.5, 2.0]);
        assert_eq!(parse_q_list("1,x").unwrap_err().code, 2);
        assert_eq!(parse_q_list("1,-2").unwrap_err().code, 2);
    }

    #[test]
    fn csv_quoting_and_trailers() {
        let mut r = Report::new("t", vec!["a", "b"]);
        r.rows.push(vec![Cell::Num(0.5), Cell::Text("x,y".into())]);
        r.trailers.push(Trailer { name: "cusp", fields: vec![("h_c", Cell::Num(1.0))] });
        assert_eq!(r.render(Format::Csv), "a,b\n0.5,\"x,y\"\n# cusp h_c=1\n");
        let v: Value = serde_json::from_str(&r.render(Format::Json)).unwrap();
        assert_eq!(v["rows"][0]["a"], json!(0.5));
        assert_eq!(v["cusp"]["h_c"], json!(1.0));
        assert_eq!(v["meta"]["command"], json!("t"));
    }
}
