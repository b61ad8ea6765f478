//! Command-line surface.
//!
//! Exit codes: 0 success, 1 verification or numerical failure, 2 usage or
//! configuration error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{
    fit_log, fit_power, format_sig17, log_grid, norm_series_with, solution_l2_sq_estimate, NormSeries,
    Quantity, DEFAULT_DELTA0,
};
use crate::error::{Error, Result};
use crate::model::Problem;
use crate::quadrature::{QuadConfig, Strategy};
use crate::scenarios::{catalog, run_scenarios, sigma_sweep, ScenarioId, VerificationReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "DRL_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "platelab",
    version,
    about = "Exact Fourier-space evaluation of u_tt + (−Δ)^σ u = 0 and measured L² growth laws",
    after_help = "Problem files are JSON, e.g.\n  {\"n\": 1, \"sigma\": 2, \"u0\": {\"terms\": []},\n   \"u1\": {\"terms\": [{\"coeff\": 1.0, \"prim\": {\"kind\": \"gaussian\", \"a\": 0.5}}]}}\nPrimitive kinds: gaussian, dipole (with 1-based \"axis\"), tensor_dipole (n = 2), lap_gaussian.\nSet DRL_THREADS to cap internal parallelism."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// ‖u(t)‖² and ‖u(t)‖ at one time, with the quadrature error estimate.
    Norm(NormArgs),
    /// A functional sampled on a time grid, written as CSV `t,value,err`.
    Series(SeriesArgs),
    /// Power or log fit of a `t,value[,err]` CSV series, written as JSON.
    Fit(FitArgs),
    /// Runs verification scenarios and writes a JSON report bundle.
    Verify(VerifyArgs),
    /// Classifies norm² growth over a (σ, n) grid, written as CSV `sigma,n,class,alpha`.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Auto,
    Direct,
    Accelerated,
}

/// Quadrature overrides shared by the numerical commands.
#[derive(Debug, Clone, Args)]
pub struct QuadArgs {
    /// JSON file with QuadConfig fields; flags below override it.
    #[arg(long, value_name = "FILE")]
    pub quad_config: Option<PathBuf>,
    /// Relative tolerance [default: 1e-10].
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Absolute tolerance [default: 1e-14].
    #[arg(long)]
    pub abs_tol: Option<f64>,
    /// Half-period guard for node lists and tail sums [default: 10000000].
    #[arg(long)]
    pub max_halfperiods: Option<usize>,
    /// Gauss–Legendre points per panel [default: 16].
    #[arg(long)]
    pub panel_order: Option<usize>,
    /// Multiplier on the automatic tail cutoff [default: 1].
    #[arg(long)]
    pub tail_sigma_mult: Option<f64>,
    /// Oscillatory integration path [default: auto].
    #[arg(long, value_enum)]
    pub strategy: Option<StrategyArg>,
}

impl QuadArgs {
    pub fn resolve(&self) -> Result<QuadConfig> {
        let mut cfg = match &self.quad_config {
            Some(path) => serde_json::from_str(&read_text(path)?)?,
            None => QuadConfig::default(),
        };
        if let Some(v) = self.rel_tol {
            cfg.rel_tol = v;
        }
        if let Some(v) = self.abs_tol {
            cfg.abs_tol = v;
        }
        if let Some(v) = self.max_halfperiods {
            cfg.max_halfperiods = v;
        }
        if let Some(v) = self.panel_order {
            cfg.panel_order = v;
        }
        if let Some(v) = self.tail_sigma_mult {
            cfg.tail_sigma_mult = v;
        }
        if let Some(s) = self.strategy {
            cfg.strategy = match s {
                StrategyArg::Auto => Strategy::Auto,
                StrategyArg::Direct => Strategy::Direct,
                StrategyArg::Accelerated => Strategy::Accelerated,
            };
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct NormArgs {
    /// Problem JSON file.
    #[arg(long, value_name = "FILE")]
    pub problem: PathBuf,
    /// Time t ≥ 0.
    #[arg(long)]
    pub t: f64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Explicit increasing times, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["t_min", "t_max", "count"])]
    pub times: Option<Vec<f64>>,
    /// Start of a log-spaced grid.
    #[arg(long, default_value_t = 1e2)]
    pub t_min: f64,
    /// End of a log-spaced grid.
    #[arg(long, default_value_t = 1e6)]
    pub t_max: f64,
    /// Points of the log-spaced grid.
    #[arg(long, default_value_t = 13)]
    pub count: usize,
}

impl GridArgs {
    pub fn resolve(&self) -> Result<Vec<f64>> {
        match &self.times {
            Some(t) if t.is_empty() => Err(Error::Precondition("time grid is empty".into())),
            Some(t) => Ok(t.clone()),
            None => log_grid(self.t_min, self.t_max, self.count),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QuantityArg {
    NormSq,
    Norm,
    Energy,
    ILow,
    IHigh,
}

impl From<QuantityArg> for Quantity {
    fn from(q: QuantityArg) -> Self {
        match q {
            QuantityArg::NormSq => Quantity::NormSq,
            QuantityArg::Norm => Quantity::Norm,
            QuantityArg::Energy => Quantity::Energy,
            QuantityArg::ILow => Quantity::ILow,
            QuantityArg::IHigh => Quantity::IHigh,
        }
    }
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    /// Problem JSON file.
    #[arg(long, value_name = "FILE")]
    pub problem: PathBuf,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum, default_value = "norm-sq")]
    pub quantity: QuantityArg,
    /// Split parameter δ₀ ∈ (0, 1) for i-low / i-high.
    #[arg(long, default_value_t = DEFAULT_DELTA0)]
    pub delta0: f64,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output file; stdout when absent.
    #[arg(long, short, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Power,
    Log,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV with header and columns t,value[,err].
    #[arg(long, short, value_name = "FILE")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "power")]
    pub model: ModelArg,
    /// Restrict the fit to t ≥ this.
    #[arg(long)]
    pub t_min: Option<f64>,
    /// Restrict the fit to t ≤ this.
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long, short, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Scenario ids (THM_1_1, THM_1_2, THM_1_3, THM_1_4, THM_1_5_N1, THM_1_5_N2,
    /// PROP_4_1, ENERGY, LEMMA_3_1) or `all`.
    #[arg(required = true, value_name = "ID")]
    pub ids: Vec<String>,
    /// Dimension for THM_1_1, THM_1_3 and THM_1_4; all supported ones when absent.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, short, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',', default_value = "1,1.5,2,3")]
    pub sigmas: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7")]
    pub ns: Vec<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long, short, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub quad: QuadArgs,
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn load_problem(path: &Path) -> Result<Problem> {
    Problem::from_json(&read_text(path)?)
}

/// Exit code for a module error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Quadrature { .. }
        | Error::NodeOverflow { .. }
        | Error::GridTooLarge { .. }
        | Error::Ambiguous(_) => EXIT_FAILED,
        _ => EXIT_USAGE,
    }
}

fn with_output<F>(out: &Option<PathBuf>, stdout: &mut dyn Write, body: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            body(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => body(stdout),
    }
}

fn write_json<T: Serialize>(w: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}

#[derive(Serialize)]
struct NormOutput {
    t: f64,
    norm_sq: f64,
    norm_sq_err: f64,
    norm: f64,
}

fn cmd_norm(a: &NormArgs, out: &mut dyn Write) -> Result<i32> {
    let p = load_problem(&a.problem)?;
    let cfg = a.quad.resolve()?;
    let est = solution_l2_sq_estimate(&p, a.t, &cfg)?;
    let res = NormOutput {
        t: a.t,
        norm_sq: est.value,
        norm_sq_err: est.error,
        norm: est.value.max(0.0).sqrt(),
    };
    match a.format {
        Format::Json => write_json(out, &res)?,
        Format::Csv => {
            writeln!(out, "t,norm_sq,err,norm")?;
            writeln!(
                out,
                "{},{},{},{}",
                format_sig17(res.t),
                format_sig17(res.norm_sq),
                format_sig17(res.norm_sq_err),
                format_sig17(res.norm)
            )?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_series(a: &SeriesArgs, out: &mut dyn Write) -> Result<i32> {
    let p = load_problem(&a.problem)?;
    let cfg = a.quad.resolve()?;
    let grid = a.grid.resolve()?;
    let s = norm_series_with(&p, &grid, a.quantity.into(), a.delta0, &cfg)?;
    with_output(&a.out, out, |w| match a.format {
        Format::Csv => s.write_csv(w),
        Format::Json => write_json(w, &s),
    })?;
    Ok(EXIT_OK)
}

fn cmd_fit(a: &FitArgs, out: &mut dyn Write) -> Result<i32> {
    let file = File::open(&a.input)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", a.input.display()))))?;
    let mut s = NormSeries::read_csv(file, Quantity::NormSq)?;
    if a.t_min.is_some() || a.t_max.is_some() {
        s = s.window(a.t_min.unwrap_or(0.0), a.t_max.unwrap_or(f64::INFINITY))?;
    }
    let fit = match a.model {
        ModelArg::Power => fit_power(&s)?,
        ModelArg::Log => fit_log(&s)?,
    };
    with_output(&a.out, out, |w| write_json(w, &fit))?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct VerifyBundle {
    passed: bool,
    reports: Vec<VerificationReport>,
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let cfg = a.quad.resolve()?;
    let mut ids = Vec::new();
    for raw in &a.ids {
        if raw.eq_ignore_ascii_case("all") {
            if a.n.is_some() {
                return Err(Error::Precondition("`all` takes no dimension".into()));
            }
            ids.extend(catalog());
        } else {
            ids.extend(ScenarioId::resolve(raw, a.n)?);
        }
    }
    let reports = run_scenarios(&ids, &cfg);
    let passed = reports.iter().all(|r| r.passed);
    for r in &reports {
        writeln!(
            err,
            "{} {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.scenario_id
        )?;
    }
    with_output(&a.out, out, |w| write_json(w, &VerifyBundle { passed, reports }))?;
    Ok(if passed { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> Result<i32> {
    let cfg = a.quad.resolve()?;
    let rows = sigma_sweep(&a.sigmas, &a.ns, &cfg)?;
    with_output(&a.out, out, |w| match a.format {
        Format::Json => write_json(w, &rows),
        Format::Csv => {
            writeln!(w, "sigma,n,class,alpha")?;
            for r in &rows {
                writeln!(w, "{},{},{},{}", r.sigma, r.n, r.class, format_sig17(r.alpha))?;
            }
            Ok(())
        }
    })?;
    Ok(EXIT_OK)
}

/// Applies [`THREADS_ENV`] to the global worker pool.
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&v| v > 0).ok_or_else(|| {
        Error::Precondition(format!("{THREADS_ENV} must be a positive integer, got `{raw}`"))
    })?;
    // a pool built earlier in the process keeps its size
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        let _ = writeln!(err, "error: {e}");
        return EXIT_USAGE;
    }
    let result = match &cli.command {
        Command::Norm(a) => cmd_norm(a, out),
        Command::Series(a) => cmd_series(a, out),
        Command::Fit(a) => cmd_fit(a, out),
        Command::Verify(a) => cmd_verify(a, out, err),
        Command::Sweep(a) => cmd_sweep(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
