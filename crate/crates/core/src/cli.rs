//! Command-line surface. Every command reads a matrix file, runs one
//! library operation and writes a JSON or CSV report.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Error;
use crate::fcalc::{functional_calculus_side, ContourSpec, IntrinsicFunction};
use crate::fixtures::{generate, FixtureKind};
use crate::powan::{gelfand_rigidity_check, kreiss_scan, kt_scan, power_norms, ritt_scan, GelfandConfig, KtConfig, RittConfig, RittGrid};
use crate::qop::QMatrix;
use crate::quat::{Quaternion, UnitImaginary};
use crate::sspec::{in_s_resolvent_set, s_resolvent_pow, s_spectrum, Side};
use crate::yosida::{uniform_angles, yosida_bound_scan, yosida_pow, ScanGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// S-spectrum as spheres; CSV gives the pencil margin on a slice grid.
    Spectrum,
    /// S-resolvent power at `--s`.
    Resolvent,
    /// Yosida bound scan, or the Yosida power at `--s`.
    Yosida,
    /// Contour functional calculus `f(T)`.
    Calculus,
    /// Power norms and classification.
    Powers,
    /// Measured Kreiss constant.
    Kreiss,
    /// Katznelson-Tzafriri sequence and verdict.
    Kt,
    /// Ritt-type resolvent scan.
    Ritt,
    /// Gelfand rigidity probe.
    Gelfand,
    /// Deterministic test matrices.
    Fixtures,
}

/// Parsed command line.
#[derive(Debug, Clone, Parser)]
#[command(name = "quatop", version, about = "S-spectrum and power-boundedness diagnostics for quaternion matrices")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Matrix file `{"n": .., "entries": [[[w,x,y,z], ..], ..]}`.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Output path; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Command tolerance: quadrature (calculus), convergence (kt), `‖T-I‖` (gelfand).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Library-wide equality and invertibility tolerance.
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Contour radius (calculus) or slice-grid half width (spectrum).
    #[arg(long, global = true)]
    pub radius: Option<f64>,
    /// Scan radii, comma separated (yosida, kreiss).
    #[arg(long, global = true, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    /// Number of uniform scan angles (yosida, kreiss).
    #[arg(long, global = true)]
    pub angles: Option<usize>,
    /// Contour node count.
    #[arg(long, global = true)]
    pub nodes: Option<usize>,
    /// Slice axis `x,y,z`, normalized.
    #[arg(long, global = true, value_parser = parse_axis, allow_hyphen_values = true)]
    pub axis: Option<UnitImaginary>,
    /// Power count: scan depth (yosida), N (powers, kt, gelfand, ritt).
    #[arg(long = "n-max", global = true)]
    pub n_max: Option<usize>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Quaternion `w,x,y,z`.
    #[arg(long, global = true, value_parser = parse_quaternion, allow_hyphen_values = true)]
    pub s: Option<Quaternion>,
    #[arg(long, global = true, value_enum, default_value = "left")]
    pub side: SideArg,
    #[arg(long, global = true, default_value_t = 1)]
    pub power: usize,
    /// `identity`, `q-1`, `exp-N` or coefficients `a0,a1,..`.
    #[arg(long, global = true, default_value = "identity")]
    pub func: String,
    #[arg(long, global = true, default_value = "random")]
    pub kind: String,
    /// Fixture dimension.
    #[arg(long, global = true, default_value_t = 2)]
    pub n: usize,
    /// Target constant for the Yosida verdict; defaults to `p_200(T)(1 + 1e-6)`.
    #[arg(long, global = true)]
    pub c: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Left,
    Right,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Self {
        match s {
            SideArg::Left => Side::Left,
            SideArg::Right => Side::Right,
        }
    }
}

fn parse_floats(s: &str, count: usize) -> std::result::Result<Vec<f64>, String> {
    let v = s
        .split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|e| format!("`{c}`: {e}")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if v.len() != count {
        return Err(format!("expected {count} comma-separated numbers, got {}", v.len()));
    }
    Ok(v)
}

fn parse_axis(s: &str) -> std::result::Result<UnitImaginary, String> {
    let v = parse_floats(s, 3)?;
    UnitImaginary::new(v[0], v[1], v[2]).map_err(|e| e.to_string())
}

fn parse_quaternion(s: &str) -> std::result::Result<Quaternion, String> {
    let v = parse_floats(s, 4)?;
    Ok(Quaternion::new(v[0], v[1], v[2], v[3]))
}

/// Failure of a command, carrying its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Lib(#[from] Error),
}

impl CliError {
    /// `1` for IO and parse failures, `2` for mathematical domain errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) | CliError::Parse(_) => 1,
            CliError::Lib(_) => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CliError::Io(_) => "IoError",
            CliError::Parse(_) => "ParseError",
            CliError::Lib(e) => e.name(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

impl RunConfig {
    fn matrix(&self) -> CliResult<QMatrix> {
        let path = self.input.as_ref().ok_or_else(|| CliError::Parse("--input is required".into()))?;
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
    }

    fn scan_grid(&self) -> ScanGrid {
        let mut g = ScanGrid::default();
        if let Some(r) = &self.radii {
            g.radii = r.clone();
        }
        if let Some(a) = self.angles {
            g.angles = uniform_angles(a);
        }
        if let Some(axis) = self.axis {
            g.axes = vec![axis];
        }
        g
    }
}

/// Rendered report, ready to be written.
pub type Report = String;

fn json<T: Serialize>(v: &T) -> CliResult<Report> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn sequence_csv(values: &[f64]) -> Report {
    let mut s = String::from("n,value\n");
    for (n, v) in values.iter().enumerate() {
        let _ = writeln!(s, "{n},{}", num(*v));
    }
    s
}

fn matrix_csv(m: &QMatrix) -> Report {
    let mut s = String::from("row,col,w,x,y,z\n");
    for i in 0..m.dim() {
        for j in 0..m.dim() {
            let q = m.get(i, j);
            let _ = writeln!(s, "{i},{j},{},{},{},{}", num(q.w), num(q.x), num(q.y), num(q.z));
        }
    }
    s
}

fn matrix_report(cfg: &RunConfig, m: &QMatrix) -> CliResult<Report> {
    match cfg.format {
        Format::Json => json(m),
        Format::Csv => Ok(matrix_csv(m)),
    }
}

pub fn cmd_spectrum(cfg: &RunConfig) -> CliResult<Report> {
    let t = cfg.matrix()?;
    let spec = s_spectrum(&t);
    if cfg.format == Format::Json {
        return json(&spec);
    }
    let half = cfg.radius.unwrap_or_else(|| 1.25 * t.op_norm().max(spec.radius()).max(0.8));
    let axis = cfg.axis.unwrap_or_else(UnitImaginary::i);
    const STEPS: usize = 41;
    let points: Vec<(f64, f64)> = (0..STEPS)
        .flat_map(|a| {
            (0..STEPS).map(move |b| (-half + 2.0 * half * a as f64 / (STEPS - 1) as f64, half * b as f64 / (STEPS - 1) as f64))
        })
        .collect();
    let margins: Vec<f64> = points.par_iter().map(|&(x, y)| in_s_resolvent_set(&t, axis.point(x, y)).margin).collect();
    let mut s = String::from("re,im_modulus,axis,margin\n");
    for ((x, y), m) in points.iter().zip(margins) {
        let _ = writeln!(s, "{},{},{axis},{}", num(*x), num(*y), num(m));
    }
    Ok(s)
}

pub fn cmd_resolvent(cfg: &RunConfig) -> CliResult<Report> {
    let t = cfg.matrix()?;
    let s = cfg.s.ok_or_else(|| CliError::Parse("--s is required".into()))?;
    let r = s_resolvent_pow(cfg.side.into(), &t, s, cfg.power)?;
    matrix_report(cfg, &r)
}

pub fn cmd_yosida(cfg: &RunConfig) -> CliResult<Report> {
    let t = cfg.matrix()?;
    if let Some(s) = cfg.s {
        let y = yosida_pow(cfg.side.into(), &t, s, cfg.power)?;
        return matrix_report(cfg, &y);
    }
    let c = match cfg.c {
        Some(c) => c,
        None => power_norms(&t, 200)?.p_n * (1.0 + 1e-6),
    };
    let report = yosida_bound_scan(&t, &cfg.scan_grid(), cfg.n_max.unwrap_or(12), c)?;
    match cfg.format {
        Format::Json => json(&report),
        Format::Csv => {
            let mut s = String::from("radius,angle,axis,side,n,value\n");
            for r in &report.table {
                let _ = writeln!(s, "{},{},{},{},{},{}", num(r.radius), num(r.angle), r.axis, r.side, r.n, num(r.value));
            }
            Ok(s)
        }
    }
}

pub fn cmd_calculus(cfg: &RunConfig) -> CliResult<Report> {
    let t = cfg.matrix()?;
    let f: IntrinsicFunction = cfg.func.parse()?;
    let radius = cfg.radius.unwrap_or_else(|| 1.0 + t.op_norm());
    let spec = ContourSpec::new(cfg.axis.unwrap_or_else(UnitImaginary::i), radius, cfg.nodes.unwrap_or(1024))?
        .with_tol(Some(cfg.tol.unwrap_or(ContourSpec::DEFAULT_TOL)))?;
    let ft = functional_calculus_side(cfg.side.into(), &t, &f, &spec)?;
    matrix_report(cfg, &ft)
}

pub fn cmd_powers(cfg: &RunConfig) -> CliResult<Report> {
    let t = cfg.matrix()?;
    let report = power_norms(&t, cfg.n_max.unwrap_or(200))?;
    match cfg.format {
        Format::Json => json(&report),
        Format::Csv => Ok(sequence_csv(&report.norms)),
    }
}

pub fn cmd_kreiss(cfg: &RunConfig) -> CliResult<Report> {
    let t = cfg.matrix()?;
    let report = kreiss_scan(&t, &cfg.scan_grid())?;
    match cfg.format {
        Format::Json => json(&report),
        Format::Csv => {
            let w = report.witness;
            Ok(format!("c_est,radius,angle,axis\n{},{},{},{}\n", num(report.c_est), num(w.radius), num(w.angle), w.axis))
        }
    }
}

pub fn cmd_kt(cfg: &RunConfig) -> CliResult<Report> {
    let t = cfg.matrix()?;
    let d = KtConfig::default();
    let kc = KtConfig { n: cfg.n_max.unwrap_or(d.n), tol: cfg.tol.unwrap_or(d.tol), ..d };
    let report = kt_scan(&t, &kc)?;
    match cfg.format {
        Format::Json => json(&report),
        Format::Csv => Ok(sequence_csv(&report.d)),
    }
}

pub fn cmd_ritt(cfg: &RunConfig) -> CliResult<Report> {
    let t = cfg.matrix()?;
    let d = RittConfig::default();
    let mut grid = RittGrid::default();
    if let Some(axis) = cfg.axis {
        grid.axes = vec![axis];
    }
    let rc = RittConfig { alpha: cfg.alpha.unwrap_or(d.alpha), grid, n: cfg.n_max.unwrap_or(d.n), ..d };
    let report = ritt_scan(&t, &rc)?;
    match cfg.format {
        Format::Json => json(&report),
        Format::Csv => {
            let mut s = String::from("radius,angle,axis,value\n");
            for r in &report.table {
                let _ = writeln!(s, "{},{},{},{}", num(r.radius), num(r.angle), r.axis, num(r.value));
            }
            Ok(s)
        }
    }
}

pub fn cmd_gelfand(cfg: &RunConfig) -> CliResult<Report> {
    let t = cfg.matrix()?;
    let d = GelfandConfig::default();
    let gc = GelfandConfig { n: cfg.n_max.unwrap_or(d.n), identity_tol: cfg.tol.unwrap_or(d.identity_tol), ..d };
    let report = gelfand_rigidity_check(&t, &gc)?;
    match cfg.format {
        Format::Json => json(&report),
        Format::Csv => {
            let held = |b: Option<bool>| b.map_or("none".to_string(), |v| v.to_string());
            Ok(format!(
                "sup_norm,spectrum_at_one,distance_to_identity,hypotheses_hold,rigidity_holds\n{},{},{},{},{}\n",
                num(report.sup_norm),
                report.spectrum_at_one,
                num(report.distance_to_identity),
                report.hypotheses_hold,
                held(report.rigidity_holds)
            ))
        }
    }
}

pub fn cmd_fixtures(cfg: &RunConfig) -> CliResult<Report> {
    let kind: FixtureKind = cfg.kind.parse()?;
    let m = generate(kind, cfg.seed, cfg.n)?;
    matrix_report(cfg, &m)
}

/// Runs the configured command and returns the rendered report.
pub fn execute(cfg: &RunConfig) -> CliResult<Report> {
    if let Some(eps) = cfg.eps {
        crate::set_epsilon(eps)?;
    }
    match cfg.command {
        Command::Spectrum => cmd_spectrum(cfg),
        Command::Resolvent => cmd_resolvent(cfg),
        Command::Yosida => cmd_yosida(cfg),
        Command::Calculus => cmd_calculus(cfg),
        Command::Powers => cmd_powers(cfg),
        Command::Kreiss => cmd_kreiss(cfg),
        Command::Kt => cmd_kt(cfg),
        Command::Ritt => cmd_ritt(cfg),
        Command::Gelfand => cmd_gelfand(cfg),
        Command::Fixtures => cmd_fixtures(cfg),
    }
}

/// Executes and writes the report to `--out` or stdout.
pub fn run(cfg: &RunConfig) -> CliResult<()> {
    let report = execute(cfg)?;
    match &cfg.out {
        Some(path) => fs::write(path, report).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(report.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    }
}

/// Process entry point: parses `args`, runs, reports errors on stderr and
/// returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cfg) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            e.exit_code()
        }
    }
}
