//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure (or an obstructed
//! extension), 2 usage error including restriction violations.

use std::io::Write;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::algebra::Rational;
use crate::ambient::{harmonic_extension, GjmsOptions, GjmsPolynomial, Route};
use crate::background::{verify_spaceform_conditions, Background, BackgroundKind};
use crate::error::Error;
use crate::factorization::{build_table, kind_name, run_route, Grid, RouteReport};
use crate::verify::{self, Suite, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable overriding the truncation order.
pub const ORDER_ENV: &str = "GJMS_ORDER";

#[derive(Debug, Parser)]
#[command(name = "gjms", version, about = "Weighted GJMS operators on model backgrounds, in exact arithmetic")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the operator polynomial on one background.
    Compute(ComputeArgs),
    /// Run verification suites; exits 1 if any check fails.
    Verify(VerifyArgs),
    /// Cross-route table over a parameter grid.
    Table(TableArgs),
    /// Curvature scalars and classification of a spaceform with constant weight.
    Spaceform(SpaceformArgs),
    /// Formal harmonic extension at an arbitrary weight.
    Extend(ExtendArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Qe,
    Gl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    All,
    Sl2,
    Ambient,
    Scattering,
    Green,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    All,
    Factorization,
    Iterated,
    Recursion,
    Obstruction,
    Scattering,
}

#[derive(Debug, Args)]
pub struct BackgroundArgs {
    pub model: Model,
    #[arg(long)]
    pub d: u32,
    #[arg(long, allow_hyphen_values = true)]
    pub m: Rational,
    /// Quasi-Einstein constant; defaults to 0.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<Rational>,
    /// Fiber curvature of a quasi-Einstein background; defaults to 1.
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<Rational>,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub background: BackgroundArgs,
    #[arg(long, conflicts_with = "kmax", required_unless_present = "kmax")]
    pub k: Option<u32>,
    /// Compute every k from 1 through kmax.
    #[arg(long)]
    pub kmax: Option<u32>,
    #[arg(long, value_enum, default_value = "factorization")]
    pub route: RouteArg,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[arg(long)]
    pub allow_unrestricted: bool,
    #[arg(long)]
    pub order: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum, default_value = "all")]
    pub suite: SuiteArg,
    #[arg(long, default_value_t = 3)]
    pub kmax: u32,
    #[arg(long, default_value_t = VerifyOptions::default().seed)]
    pub seed: u64,
    /// Corrupt one case per suite to exercise the failure path.
    #[arg(long)]
    pub inject_fault: bool,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[arg(long)]
    pub order: Option<usize>,
}

/// Comma-separated list; the empty string is the empty list.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct List<T>(pub Vec<T>);

impl<T: FromStr> FromStr for List<T>
where
    T::Err: std::fmt::Display,
{
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(|p| p.parse().map_err(|e| format!("{p:?}: {e}")))
            .collect::<std::result::Result<_, _>>()
            .map(List)
    }
}

#[derive(Debug, Args)]
pub struct TableArgs {
    pub model: Model,
    #[arg(long, default_value = "")]
    pub d: List<u32>,
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub m: List<Rational>,
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub lambda: List<Rational>,
    #[arg(long, default_value = "")]
    pub k: List<u32>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// One CSV row per (background, k, route) instead of per (background, k).
    #[arg(long)]
    pub long: bool,
    #[arg(long)]
    pub allow_unrestricted: bool,
    #[arg(long)]
    pub order: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SpaceformArgs {
    #[arg(long)]
    pub d: u32,
    #[arg(long, allow_hyphen_values = true)]
    pub m: Rational,
    #[arg(long, allow_hyphen_values = true, default_value = "1")]
    pub mu: Rational,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Rational,
    #[arg(long, allow_hyphen_values = true, default_value = "1")]
    pub f0: Rational,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ExtendArgs {
    #[command(flatten)]
    pub background: BackgroundArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub w: Rational,
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

/// Failure of a command, mapped onto an exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Failure(_) => EXIT_FAILURE,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Restricted { .. }
            | Error::ZeroK
            | Error::InvalidBackground(_)
            | Error::Degenerate(_)
            | Error::Parse(_)
            | Error::PerturbationConstantTerm
            | Error::OrderShortfall { .. } => CliError::Usage(e.to_string()),
            other => CliError::Failure(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

type CliResult<T = ()> = std::result::Result<T, CliError>;

/// Truncation order: the flag wins over the environment variable.
fn resolve_order(flag: Option<usize>) -> CliResult<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(ORDER_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("{ORDER_ENV} must be a non-negative integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

fn build_background(args: &BackgroundArgs) -> CliResult<Background> {
    let bg = match args.model {
        Model::Qe => Background::quasi_einstein_with_mu(
            args.d,
            args.m.clone(),
            args.lambda.clone().unwrap_or_else(Rational::zero),
            args.mu.clone().unwrap_or_else(Rational::one),
        )?,
        Model::Gl => {
            if args.lambda.is_some() || args.mu.is_some() {
                return Err(CliError::Usage("gl backgrounds take no --lambda or --mu".into()));
            }
            Background::gover_leitner(args.d, args.m.clone())?
        }
    };
    Ok(bg)
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

/// Runs a parsed command, writing its output to `out`; returns the exit code.
pub fn execute(cli: Cli, out: &mut impl Write) -> CliResult<i32> {
    match cli.command {
        Command::Compute(a) => compute(a, out),
        Command::Verify(a) => verify_cmd(a, out),
        Command::Table(a) => table(a, out),
        Command::Spaceform(a) => spaceform(a, out),
        Command::Extend(a) => extend(a, out),
    }
}

/// Parses `args` (including the program name) and executes, writing the
/// command output to `out` and diagnostics to `err`.
pub fn run_with<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ =
                if code == EXIT_OK { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.exit_code()
        }
    }
}

fn routes_for(arg: RouteArg) -> Vec<Route> {
    let mut routes = match arg {
        RouteArg::All => Route::ALL.to_vec(),
        RouteArg::Factorization => vec![Route::Factorization],
        RouteArg::Iterated => vec![Route::Iterated],
        RouteArg::Recursion => vec![Route::Recursion],
        RouteArg::Obstruction => vec![Route::Obstruction],
        RouteArg::Scattering => vec![Route::Scattering],
    };
    routes.sort_by_key(|r| r.name());
    routes
}

fn compute(a: ComputeArgs, out: &mut impl Write) -> CliResult<i32> {
    let bg = build_background(&a.background)?;
    let opts = GjmsOptions { allow_unrestricted: a.allow_unrestricted, order: resolve_order(a.order)? };
    let ks: Vec<u32> = match (a.k, a.kmax) {
        (Some(k), _) => vec![k],
        (None, Some(kmax)) => (1..=kmax).collect(),
        (None, None) => unreachable!("clap requires one of --k, --kmax"),
    };
    if ks.is_empty() {
        return Err(CliError::Usage("--kmax must be at least 1".into()));
    }
    for &k in &ks {
        opts.admit(&bg, k)?;
    }
    let routes = routes_for(a.route);
    let mut results = Vec::new();
    for &k in &ks {
        for &route in &routes {
            results.push(run_route(&bg, k, route, &opts)?);
        }
    }
    let single = results.len() == 1;
    match a.format {
        Format::Text if single => writeln!(out, "{}", results[0].poly)?,
        Format::Text => {
            for r in &results {
                writeln!(out, "k={} {}: {}", r.k, r.route, r.poly)?;
            }
        }
        Format::Json if single => writeln!(out, "{}", to_json(&results[0]))?,
        Format::Json => writeln!(out, "{}", to_json(&results))?,
        Format::Csv => {
            writeln!(out, "kind,d,m,lambda,mu,k,route,poly_sigma")?;
            for r in &results {
                writeln!(out, "{}", compute_csv_row(r))?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn compute_csv_row(p: &GjmsPolynomial) -> String {
    let bg = &p.background;
    format!(
        "{},{},{},{},{},{},{},{}",
        kind_name(bg.kind()),
        bg.d(),
        bg.m(),
        bg.lambda().map(ToString::to_string).unwrap_or_default(),
        bg.mu(),
        p.k,
        p.route,
        p.poly
    )
}

fn verify_cmd(a: VerifyArgs, out: &mut impl Write) -> CliResult<i32> {
    let suites: Vec<Suite> = match a.suite {
        SuiteArg::All => Suite::ALL.to_vec(),
        SuiteArg::Sl2 => vec![Suite::Sl2],
        SuiteArg::Ambient => vec![Suite::Ambient],
        SuiteArg::Scattering => vec![Suite::Scattering],
        SuiteArg::Green => vec![Suite::Green],
    };
    if a.kmax == 0 {
        return Err(CliError::Usage("--kmax must be at least 1".into()));
    }
    let opts =
        VerifyOptions { kmax: a.kmax, seed: a.seed, inject_fault: a.inject_fault, order: resolve_order(a.order)? };
    let report = verify::run(&suites, &opts);
    match a.format {
        Format::Json => writeln!(out, "{}", to_json(&report))?,
        Format::Csv => {
            writeln!(out, "suite,identity,cases,failures,passed")?;
            for c in &report.checks {
                writeln!(out, "{},\"{}\",{},{},{}", c.suite, c.identity, c.cases, c.failures.len(), c.passed())?;
            }
        }
        Format::Text => write!(out, "{}", report.render_text())?,
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_FAILURE })
}

fn table(a: TableArgs, out: &mut impl Write) -> CliResult<i32> {
    let kind = match a.model {
        Model::Qe => BackgroundKind::QuasiEinstein,
        Model::Gl => {
            if !a.lambda.0.is_empty() {
                return Err(CliError::Usage("gl grids take no --lambda".into()));
            }
            BackgroundKind::GoverLeitner
        }
    };
    let opts = GjmsOptions { allow_unrestricted: a.allow_unrestricted, order: resolve_order(a.order)? };
    let grid = Grid { kind, ds: a.d.0, ms: a.m.0, lambdas: a.lambda.0, ks: a.k.0 };
    let reports = build_table(&grid, &opts);
    match a.format {
        Format::Json => writeln!(out, "{}", to_json(&reports))?,
        Format::Csv | Format::Text if a.long => {
            writeln!(out, "kind,d,m,lambda,k,route,poly_sigma,agrees_with_all")?;
            for r in &reports {
                for row in r.long_csv_rows() {
                    writeln!(out, "{row}")?;
                }
            }
        }
        Format::Csv | Format::Text => {
            writeln!(out, "{}", RouteReport::csv_header())?;
            for r in &reports {
                writeln!(out, "{}", r.csv_row())?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn spaceform(a: SpaceformArgs, out: &mut impl Write) -> CliResult<i32> {
    let r = verify_spaceform_conditions(a.d, &a.m, &a.mu, &a.kappa, &a.f0)?;
    match a.format {
        Format::Json => writeln!(out, "{}", to_json(&r))?,
        Format::Csv => {
            writeln!(out, "r_phi,j_phi,p_coeff,is_quasi_einstein,is_gover_leitner")?;
            writeln!(out, "{},{},{},{},{}", r.r_phi, r.j_phi, r.p_coeff, r.is_quasi_einstein, r.is_gover_leitner)?;
        }
        Format::Text => {
            writeln!(out, "R_phi = {}", r.r_phi)?;
            writeln!(out, "J_phi = {}", r.j_phi)?;
            writeln!(out, "P_phi = {} g", r.p_coeff)?;
            writeln!(out, "quasi-Einstein: {}", r.is_quasi_einstein)?;
            writeln!(out, "Gover-Leitner: {}", r.is_gover_leitner)?;
        }
    }
    Ok(EXIT_OK)
}

fn extend(a: ExtendArgs, out: &mut impl Write) -> CliResult<i32> {
    let bg = build_background(&a.background)?;
    let order = resolve_order(a.order)?.unwrap_or(8);
    let f = harmonic_extension(&bg, &a.w, order)?;
    let coeffs = f.profile.coeffs();
    match a.format {
        Format::Json => writeln!(out, "{}", to_json(coeffs))?,
        Format::Csv => {
            writeln!(out, "power,coefficient")?;
            for (l, c) in coeffs.iter().enumerate() {
                writeln!(out, "{l},{c}")?;
            }
        }
        Format::Text => {
            for (l, c) in coeffs.iter().enumerate() {
                writeln!(out, "rho^{l}: {c}")?;
            }
        }
    }
    Ok(EXIT_OK)
}
