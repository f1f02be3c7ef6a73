//! Command-line front end. Every command produces a [`Report`]; `run` prints it
//! to stdout and maps failures to exit codes:
//! 0 success, 1 verdict or self-test failure, 2 input error, 3 numerical error.

pub mod io;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::complexmat::{c64, Matrix, Scalar, DEFAULT_RANK_TOL};
use crate::decompose::{certify, spectral_decomposition, Settings, Verdict, DEFAULT_TOL};
use crate::error::Error;
use crate::powerbound::{
    defective_from_basis, diagnose, gen_defective, gen_power_bounded, power_profile, GrowthClass,
    DEFAULT_COND_CAP, DEFAULT_GROWTH_TOL, DEFAULT_HORIZON,
};
use crate::report::{canonical_json, digest, to_value, Report};
use crate::riesz::{eigenspace, riesz_projection, verify_kr, Contour, DEFAULT_NODES};
use crate::spectrum::{default_gap, SpectrumReport};

use io::{read_matrix, render, MatrixFormat, MatrixInput, ParseError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FINDING: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

const INVOLUTION_FILE: &str = "involution.json";
const INVOLUTION_EXPECTED_FILE: &str = "involution.expected.json";
const JORDAN_FILE: &str = "jordan.mtx";
const JORDAN_EXPECTED_FILE: &str = "jordan.expected.json";

const GOLDEN: [(&str, &str); 4] = [
    (INVOLUTION_FILE, include_str!("../../golden/involution.json")),
    (INVOLUTION_EXPECTED_FILE, include_str!("../../golden/involution.expected.json")),
    (JORDAN_FILE, include_str!("../../golden/jordan.mtx")),
    (JORDAN_EXPECTED_FILE, include_str!("../../golden/jordan.expected.json")),
];

#[derive(Debug, Parser)]
#[command(name = "riesz", version, about = "Riesz projections and power-bounded operator diagnostics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct SpectralArgs {
    /// Matrix file (JSON or Matrix Market array).
    pub file: PathBuf,
    /// Clustering gap [default: 1e-6 * max(1, ||A||_F)].
    #[arg(long)]
    pub gap: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_NODES)]
    pub nodes: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
}

impl SpectralArgs {
    fn settings(&self) -> Settings {
        Settings {
            gap: self.gap,
            nodes: self.nodes,
            tol: self.tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenerateKind {
    PowerBounded,
    Defective,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues, clusters and the unimodularity check.
    Spectrum {
        file: PathBuf,
        #[arg(long)]
        gap: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Riesz projection for every spectral cluster.
    Decompose(SpectralArgs),
    /// Decomposition plus every cross-check; exits 1 when not decomposable.
    Certify(SpectralArgs),
    /// Norms of powers and growth classification; exits 1 when not bounded.
    Powerbound {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_HORIZON)]
        horizon: usize,
        #[arg(long, default_value_t = DEFAULT_GROWTH_TOL)]
        growth_tol: f64,
    },
    /// Riesz projection for an explicit circle.
    Project {
        file: PathBuf,
        /// Circle center, e.g. `1`, `-0.5+2i`, `i`.
        #[arg(long, value_parser = parse_scalar, allow_hyphen_values = true)]
        center: Scalar,
        #[arg(long)]
        radius: f64,
        #[arg(long, default_value_t = DEFAULT_NODES)]
        nodes: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Writes a generated test operator and a `.truth.json` sidecar.
    Generate {
        #[arg(long, value_enum)]
        kind: GenerateKind,
        #[arg(long)]
        n: usize,
        /// Comma-separated `value[:multiplicity]` list, e.g. `1,-1` or `i:2,-1`.
        #[arg(long, allow_hyphen_values = true)]
        values: Option<String>,
        #[arg(long, default_value_t = DEFAULT_COND_CAP)]
        cond_cap: f64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduces the golden examples end to end through file I/O.
    Selftest {
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Read golden files from this directory instead of the built-in copies.
        #[arg(long)]
        golden_dir: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Input(ParseError),
    Usage(String),
    Io(String),
    Numerical(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Usage(_) | CliError::Io(_) => EXIT_INPUT,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    pub fn to_json(&self) -> String {
        let body = match self {
            CliError::Input(e) => json!({
                "kind": "input",
                "message": e.message,
                "path": e.path,
                "line": e.line,
                "field": e.field,
            }),
            CliError::Usage(m) => json!({"kind": "usage", "message": m}),
            CliError::Io(m) => json!({"kind": "io", "message": m}),
            CliError::Numerical(e) => json!({"kind": "numerical", "message": e.to_string()}),
        };
        canonical_json(&json!({ "error": body }))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(e) => write!(f, "{e}"),
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Numerical(e) => write!(f, "{e}"),
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Input(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Numerical(e)
    }
}

/// A report and the exit code it implies.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub exit: i32,
    /// Named failures, echoed to stderr when `exit` is nonzero.
    pub failures: Vec<String>,
}

impl Outcome {
    fn ok(report: Report) -> Self {
        Self {
            report,
            exit: EXIT_OK,
            failures: Vec::new(),
        }
    }

    fn judged(report: Report, failures: Vec<String>) -> Self {
        let exit = if failures.is_empty() { EXIT_OK } else { EXIT_FINDING };
        Self {
            report,
            exit,
            failures,
        }
    }
}

/// Parses `args`, runs the command, prints the report or error, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(outcome) => {
            print!("{}", outcome.report.to_json());
            if outcome.exit != EXIT_OK {
                let failure = json!({"failure": {
                    "command": outcome.report.command,
                    "verdict": outcome.report.verdict,
                    "failed": outcome.failures,
                }});
                eprint!("{}", canonical_json(&failure));
            }
            outcome.exit
        }
        Err(e) => {
            eprint!("{}", e.to_json());
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Spectrum { file, gap, tol } => {
            let input = read_matrix(file)?;
            Ok(Outcome::ok(cmd_spectrum(&input, *gap, *tol)?))
        }
        Command::Decompose(args) => {
            let input = read_matrix(&args.file)?;
            Ok(Outcome::ok(cmd_decompose(&input, &args.settings())?))
        }
        Command::Certify(args) => {
            let input = read_matrix(&args.file)?;
            let report = cmd_certify(&input, &args.settings())?;
            let failures = match report.verdict.as_deref() {
                Some("decomposable") => Vec::new(),
                _ => failed_residuals(&report),
            };
            Ok(Outcome::judged(report, failures))
        }
        Command::Powerbound {
            file,
            horizon,
            growth_tol,
        } => {
            let input = read_matrix(file)?;
            let report = cmd_powerbound(&input, *horizon, *growth_tol)?;
            let failures = match report.verdict.as_deref() {
                Some("bounded") => Vec::new(),
                _ => vec!["bounded".to_string()],
            };
            Ok(Outcome::judged(report, failures))
        }
        Command::Project {
            file,
            center,
            radius,
            nodes,
            tol,
        } => {
            let input = read_matrix(file)?;
            Ok(Outcome::ok(cmd_project(&input, *center, *radius, *nodes, *tol)?))
        }
        Command::Generate {
            kind,
            n,
            values,
            cond_cap,
            seed,
            out,
        } => Ok(Outcome::ok(cmd_generate(
            *kind,
            *n,
            values.as_deref(),
            *cond_cap,
            *seed,
            out.as_deref(),
        )?)),
        Command::Selftest { tol, golden_dir } => cmd_selftest(*tol, golden_dir.as_deref()),
    }
}

fn failed_residuals(report: &Report) -> Vec<String> {
    let threshold = report
        .results
        .get("threshold")
        .and_then(Value::as_f64)
        .unwrap_or(0.0);
    report
        .residuals
        .iter()
        .filter(|(_, v)| !(**v <= threshold))
        .map(|(k, _)| k.clone())
        .collect()
}

fn new_report(command: &str, input: &MatrixInput) -> Report {
    Report::new(command, digest(&input.bytes)).param("input_format", input.format)
}

fn effective_gap(t: &Matrix, gap: Option<f64>) -> f64 {
    gap.unwrap_or_else(|| default_gap(t))
}

fn spectral_params(report: Report, t: &Matrix, settings: &Settings) -> Report {
    report
        .param("gap", effective_gap(t, settings.gap))
        .param("nodes", settings.nodes)
        .param("tol", settings.tol)
}

pub fn cmd_spectrum(input: &MatrixInput, gap: Option<f64>, tol: f64) -> Result<Report, CliError> {
    let t = &input.matrix;
    let spectrum = SpectrumReport::analyze(t, gap)?;
    let unimodularity = spectrum.unimodularity(tol);
    let mut report = new_report("spectrum", input)
        .param("gap", spectrum.gap)
        .param("tol", tol);
    report
        .residuals
        .insert("unimodular_deviation".into(), unimodularity.max_deviation);
    report.results = json!({
        "spectrum": to_value(&spectrum),
        "unimodularity": to_value(unimodularity),
    });
    Ok(report)
}

pub fn cmd_decompose(input: &MatrixInput, settings: &Settings) -> Result<Report, CliError> {
    let t = &input.matrix;
    let bundle = spectral_decomposition(t, settings)?;
    let kr = bundle.kr_reports(t, settings.tol)?;
    let mut report = spectral_params(new_report("decompose", input), t, settings);
    let r = &mut report.residuals;
    r.insert("resolution".into(), bundle.resolution_residual);
    r.insert("orthogonality".into(), bundle.orthogonality_residual);
    r.insert("reconstruction".into(), bundle.reconstruction_residual);
    r.insert("commutation".into(), bundle.commutation_residual);
    r.insert(
        "kr_max".into(),
        kr.iter().map(|k| k.max_residual()).fold(0.0, f64::max),
    );
    report.results = json!({
        "bundle": to_value(&bundle),
        "kr": to_value(&kr),
    });
    Ok(report)
}

pub fn cmd_certify(input: &MatrixInput, settings: &Settings) -> Result<Report, CliError> {
    let t = &input.matrix;
    let cert = certify(t, settings)?;
    let mut report = spectral_params(new_report("certify", input), t, settings);
    report.residuals = cert
        .residuals()
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    report.verdict = Some(cert.verdict.as_str().to_string());
    report.results = to_value(&cert);
    Ok(report)
}

pub fn cmd_powerbound(input: &MatrixInput, horizon: usize, growth_tol: f64) -> Result<Report, CliError> {
    let profile = power_profile(&input.matrix, horizon)?;
    let verdict = diagnose(&profile, growth_tol)?;
    let mut report = new_report("powerbound", input)
        .param("horizon", horizon)
        .param("growth_tol", growth_tol);
    let ev = &verdict.evidence;
    let r = &mut report.residuals;
    r.insert("sup_observed".into(), profile.sup_observed);
    r.insert("quartile_max".into(), ev.quartile_max);
    r.insert("forward_loglog_slope".into(), ev.forward.loglog.slope);
    r.insert("forward_semilog_slope".into(), ev.forward.semilog.slope);
    r.insert("backward_loglog_slope".into(), ev.backward.loglog.slope);
    r.insert("backward_semilog_slope".into(), ev.backward.semilog.slope);
    report.verdict = Some(if verdict.bounded { "bounded" } else { "not-bounded" }.to_string());
    report.results = json!({
        "profile": to_value(&profile),
        "diagnosis": to_value(&verdict),
    });
    Ok(report)
}

/// Projection for an explicit circle. Eigenspace residuals are measured
/// against the mean enclosed eigenvalue `tr(T·P)/tr(P)`, or the center when
/// nothing is enclosed.
pub fn cmd_project(
    input: &MatrixInput,
    center: Scalar,
    radius: f64,
    nodes: usize,
    tol: f64,
) -> Result<Report, CliError> {
    let t = &input.matrix;
    let contour = Contour::new(center, radius, nodes)?;
    let p = riesz_projection(t, &contour)?;
    let sub = eigenspace(&p, DEFAULT_RANK_TOL);
    let trace = p.trace();
    let lambda = if sub.dim() > 0 && trace.norm() > 0.5 {
        (t * &p.matrix).trace() / trace
    } else {
        center
    };
    let kr = verify_kr(t, lambda, &p, tol)?;
    let mut report = new_report("project", input)
        .param("center", [center.re, center.im])
        .param("radius", radius)
        .param("nodes", nodes)
        .param("tol", tol);
    let r = &mut report.residuals;
    r.insert("idempotence".into(), p.idem_residual);
    r.insert("eigen".into(), kr.eigen_residual);
    r.insert("range_invariance".into(), kr.range_invariance_residual);
    r.insert("kernel_invariance".into(), kr.kernel_invariance_residual);
    report.results = json!({
        "projection": to_value(&p),
        "trace": [trace.re, trace.im],
        "rank": sub.dim(),
        "rank_ambiguous": sub.ambiguous,
        "eigenvalue": [lambda.re, lambda.im],
        "kr": to_value(&kr),
    });
    Ok(report)
}

/// `foo.json` → `foo.truth.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_os_string()).unwrap_or_default();
    let mut name = stem;
    name.push(".truth.json");
    out.with_file_name(name)
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn cmd_generate(
    kind: GenerateKind,
    n: usize,
    values: Option<&str>,
    cond_cap: f64,
    seed: Option<u64>,
    out: Option<&Path>,
) -> Result<Report, CliError> {
    let (matrix, truth, values) = match kind {
        GenerateKind::PowerBounded => {
            let list = values.ok_or_else(|| CliError::Usage("--values is required for power-bounded".into()))?;
            let values = parse_values(list, n).map_err(CliError::Usage)?;
            let (t, truth) = gen_power_bounded(n, &values, cond_cap, seed.unwrap_or(0))?;
            (t, to_value(&truth), values)
        }
        GenerateKind::Defective => {
            let value = match values {
                Some(s) => parse_scalar(s).map_err(CliError::Usage)?,
                None => c64(1.0, 0.0),
            };
            let (t, truth) = match seed {
                Some(s) => gen_defective(n, value, s)?,
                None => defective_from_basis(&Matrix::identity(n), value)?,
            };
            (t, to_value(&truth), vec![(value, n)])
        }
    };
    let value_list: Vec<Value> = values
        .iter()
        .map(|(z, m)| json!({"value": [z.re, z.im], "multiplicity": m}))
        .collect();
    let mut report = Report::new("generate", String::new())
        .param("kind", kind)
        .param("n", n)
        .param("values", value_list)
        .param("cond_cap", cond_cap)
        .param("seed", seed)
        .param("out", out.map(|p| p.display().to_string()));

    let truth_doc = json!({ "kind": kind, "seed": seed, "truth": truth });
    let mut results = BTreeMap::new();
    results.insert("matrix".to_string(), to_value(crate::report::MatrixJson(&matrix)));
    match out {
        Some(path) => {
            let text = render(&matrix, MatrixFormat::from_path(path));
            write_file(path, &text)?;
            let side = sidecar_path(path);
            write_file(&side, &canonical_json(&truth_doc))?;
            report.input_digest = digest(text.as_bytes());
            results.insert("out".into(), json!(path.display().to_string()));
            results.insert("truth_path".into(), json!(side.display().to_string()));
        }
        None => {
            results.insert("truth".into(), truth_doc);
        }
    }
    report.results = to_value(results);
    Ok(report)
}

/// Parses `1`, `-2.5`, `3-4i`, `i`, `-i`, `1e-3+2j`.
pub fn parse_scalar(s: &str) -> Result<Scalar, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse `{s}` as a complex number");
    let num = |x: &str| -> Result<f64, String> {
        x.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(bad)
    };
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return Ok(c64(num(&t)?, 0.0));
    };
    let coef = |x: &str| match x {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        x => num(x),
    };
    let b = body.as_bytes();
    let split = (1..b.len())
        .rev()
        .find(|&k| matches!(b[k], b'+' | b'-') && !matches!(b[k - 1], b'e' | b'E'));
    match split {
        Some(k) => Ok(c64(num(&body[..k])?, coef(&body[k..])?)),
        None => Ok(c64(0.0, coef(body)?)),
    }
}

/// Parses `v[:m],...`. Multiplicities default to 1, except that a trailing
/// value without one absorbs whatever dimension is left.
pub fn parse_values(s: &str, n: usize) -> Result<Vec<(Scalar, usize)>, String> {
    let mut out = Vec::new();
    let mut explicit = Vec::new();
    for item in s.split(',').map(str::trim) {
        let (v, m) = match item.split_once(':') {
            Some((v, m)) => {
                let m: usize = m
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad multiplicity in `{item}`"))?;
                (v, Some(m))
            }
            None => (item, None),
        };
        out.push((parse_scalar(v)?, m.unwrap_or(1)));
        explicit.push(m.is_some());
    }
    let total: usize = out.iter().map(|(_, m)| m).sum();
    if total < n && explicit.last() == Some(&false) {
        if let Some(last) = out.last_mut() {
            last.1 += n - total;
        }
    }
    Ok(out)
}

/// One self-test comparison.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

impl Check {
    fn within(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound,
            pass: value <= bound,
        }
    }

    fn matches(name: impl Into<String>, ok: bool) -> Self {
        Self::within(name, if ok { 0.0 } else { 1.0 }, 0.0)
    }
}

#[derive(Deserialize)]
struct InvolutionExpected {
    eigenvalues: Vec<[f64; 2]>,
    projections: Vec<Value>,
    eigenvectors: Vec<Vec<[f64; 2]>>,
    verdict: String,
}

#[derive(Deserialize)]
struct JordanExpected {
    horizon: usize,
    degree: f64,
    degree_tol: f64,
    gelfand_residual: f64,
    verdict: String,
}

fn read_expected<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::Input(ParseError {
            path: Some(path.display().to_string()),
            line: Some(e.line()),
            field: None,
            message: e.to_string(),
        })
    })
}

fn pair(p: [f64; 2]) -> Scalar {
    c64(p[0], p[1])
}

/// Distance from the unit vector along `e` to the span of orthonormal `cols`.
fn angular_distance(cols: &Matrix, e: &[Scalar]) -> f64 {
    let nrm = e.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let u: Vec<Scalar> = e.iter().map(|z| z / nrm).collect();
    let mut resid = u.clone();
    for j in 0..cols.cols() {
        let b = cols.column(j);
        let coef: Scalar = b.iter().zip(&u).map(|(bi, ui)| bi.conj() * ui).sum();
        for (r, bi) in resid.iter_mut().zip(&b) {
            *r -= coef * bi;
        }
    }
    resid.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn involution_checks(dir: &Path, tol: f64) -> Result<Vec<Check>, CliError> {
    let input = read_matrix(&dir.join(INVOLUTION_FILE))?;
    let expected: InvolutionExpected = read_expected(&dir.join(INVOLUTION_EXPECTED_FILE))?;
    let t = &input.matrix;
    let settings = Settings::default().with_tol(tol);
    let bundle = spectral_decomposition(t, &settings)?;
    let mut checks = Vec::new();

    checks.push(Check::matches(
        "involution.cluster_count",
        bundle.projections.len() == expected.eigenvalues.len(),
    ));
    for (j, ev) in expected.eigenvalues.iter().enumerate() {
        let lam = pair(*ev);
        let Some(p) = bundle
            .projections
            .iter()
            .min_by(|a, b| (a.value - lam).norm().total_cmp(&(b.value - lam).norm()))
        else {
            continue;
        };
        checks.push(Check::within(format!("involution.eigenvalue[{j}]"), (p.value - lam).norm(), tol));
        if let Some(pm) = expected.projections.get(j) {
            let want = io::matrix_from_value(pm).map_err(|mut e| {
                e.path = Some(dir.join(INVOLUTION_EXPECTED_FILE).display().to_string());
                e.field = Some(format!("projections[{j}]"));
                e
            })?;
            let diff = if want.shape() == p.matrix.shape() {
                p.matrix.max_abs_diff(&want)
            } else {
                f64::INFINITY
            };
            checks.push(Check::within(format!("involution.projection[{j}]"), diff, tol));
        }
        if let Some(v) = expected.eigenvectors.get(j) {
            let e: Vec<Scalar> = v.iter().map(|z| pair(*z)).collect();
            let sub = eigenspace(p, DEFAULT_RANK_TOL);
            let angle = if e.len() == t.rows() {
                angular_distance(&sub.basis.columns, &e)
            } else {
                f64::INFINITY
            };
            checks.push(Check::within(format!("involution.eigenvector[{j}]"), angle, tol));
        }
    }

    let cert = certify(t, &settings)?;
    checks.push(Check::matches(
        "involution.verdict",
        cert.verdict.as_str() == expected.verdict,
    ));
    checks.push(Check::within(
        "involution.lagrange_agreement",
        cert.lagrange_agreement,
        tol * 1e-2,
    ));
    checks.push(Check::within(
        "involution.algebraic",
        cert.algebraic_residual,
        tol * 1e-4,
    ));
    Ok(checks)
}

fn jordan_checks(dir: &Path, tol: f64) -> Result<Vec<Check>, CliError> {
    let input = read_matrix(&dir.join(JORDAN_FILE))?;
    let expected: JordanExpected = read_expected(&dir.join(JORDAN_EXPECTED_FILE))?;
    let t = &input.matrix;
    let mut checks = Vec::new();

    let verdict = diagnose(&power_profile(t, expected.horizon)?, DEFAULT_GROWTH_TOL)?;
    checks.push(Check::matches("jordan.not_bounded", !verdict.bounded));
    let degree_error = match verdict.growth_class {
        GrowthClass::Polynomial { degree } => (degree - expected.degree).abs(),
        _ => f64::INFINITY,
    };
    checks.push(Check::within("jordan.growth_degree", degree_error, expected.degree_tol));

    let settings = Settings::default().with_tol(tol);
    let cert = certify(t, &settings)?;
    checks.push(Check::matches("jordan.verdict", cert.verdict.as_str() == expected.verdict));
    checks.push(Check::matches(
        "jordan.refused",
        cert.verdict == Verdict::NotDecomposable,
    ));
    let gelfand = crate::decompose::gelfand_check(t, &settings)?;
    checks.push(Check::within(
        "jordan.gelfand_residual",
        (gelfand.gelfand_residual - expected.gelfand_residual).abs(),
        tol,
    ));
    Ok(checks)
}

/// Runs the golden examples from `golden_dir`, or from the built-in copies
/// written to a scratch directory.
pub fn cmd_selftest(tol: f64, golden_dir: Option<&Path>) -> Result<Outcome, CliError> {
    let scratch;
    let dir = match golden_dir {
        Some(d) => d.to_path_buf(),
        None => {
            scratch = tempfile::tempdir().map_err(|e| CliError::Io(e.to_string()))?;
            for (name, text) in GOLDEN {
                write_file(&scratch.path().join(name), text)?;
            }
            scratch.path().to_path_buf()
        }
    };
    let mut checks = involution_checks(&dir, tol)?;
    checks.extend(jordan_checks(&dir, tol)?);

    let failures: Vec<String> = checks.iter().filter(|c| !c.pass).map(|c| c.name.clone()).collect();
    let mut report = Report::new("selftest", String::new())
        .param("tol", tol)
        .param("golden_dir", golden_dir.map(|p| p.display().to_string()));
    report.residuals = checks.iter().map(|c| (c.name.clone(), c.value)).collect();
    report.verdict = Some(if failures.is_empty() { "pass" } else { "fail" }.to_string());
    report.results = json!({ "checks": to_value(&checks) });
    Ok(Outcome::judged(report, failures))
}
