//! Command-line front end.
//!
//! Settings come from an optional `--config` document with flags layered on
//! top. Every subcommand writes its main table as CSV, a JSON report that
//! embeds the resolved configuration, and for sweeps an SVG line chart.
//! Exit status: 0 on success, 2 on configuration errors, 3 when a
//! computation fails.

mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::figures::FigureId;
use crate::signals::Signal;
use config::{
    AlternativeChoice, ConfigError, KSpec, LambdaSpec, MiddleChoice, ModelChoice, RunConfig, Span,
    TargetKind,
};
use output::Format;

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "saddlenode",
    version,
    about = "Saddle-node bifurcations and critical transitions of scalar nonautonomous ODEs"
)]
pub struct Cli {
    #[command(flatten)]
    pub flags: Flags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignalAction {
    /// Sample the signal on the window (CSV t,value).
    Eval,
    /// Sampled membership test of the bounded Lipschitz space.
    Check,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate or check a signal (`--signal JSON`, or the forcing of the model).
    Signal {
        #[arg(value_enum, default_value = "eval")]
        action: SignalAction,
    },
    /// Integrate one solution (`--lambda X --x0 X --window S:T --stride H`).
    Solve,
    /// Bounded solutions with certificates on a window (`--lambda X`).
    Bounded,
    /// Locate a single (`--lambda LO:HI`) or double (`--lambda-seed`) saddle-node.
    Bifurcate,
    /// Bifurcation values along a preset family (`--preset NAME --k LO:HI:STEP`).
    Curve,
    /// Tracking or tipping verdict at one parameter value (`--lambda X`).
    Classify,
    /// Locate the tipping value in a bracket (`--lambda LO:HI`).
    Tip,
    /// Rerun a bundled figure: fig1, fig2, fig3, fig5, fig6 or sec42.
    Reproduce { figure: Option<FigureId> },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Signal { .. } => "signal",
            Command::Solve => "solve",
            Command::Bounded => "bounded",
            Command::Bifurcate => "bifurcate",
            Command::Curve => "curve",
            Command::Classify => "classify",
            Command::Tip => "tip",
            Command::Reproduce { .. } => "reproduce",
        }
    }
}

fn parse_signal(s: &str) -> Result<Signal, String> {
    serde_json::from_str(s).map_err(|e| format!("invalid signal JSON: {e}"))
}

/// Flags shared by all subcommands; each overrides the config key of the
/// same name (dashes become underscores).
#[derive(Debug, Default, Args)]
pub struct Flags {
    /// TOML config file (or the JSON report of an earlier run).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Directory for CSV/JSON/SVG files; stdout when absent.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads [env: SADDLENODE_JOBS].
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Main tolerance: parameter tolerance for searches, integrator
    /// tolerance for `solve`, approach tolerance for `classify`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true, value_name = "A:B")]
    pub window: Option<Span>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub dt: Option<f64>,
    #[arg(
        long,
        global = true,
        allow_hyphen_values = true,
        value_name = "LO:HI|X"
    )]
    pub lambda: Option<LambdaSpec>,
    #[arg(
        long,
        global = true,
        allow_hyphen_values = true,
        value_name = "LO:HI:STEP|K"
    )]
    pub k: Option<KSpec>,
    #[arg(long, global = true)]
    pub preset: Option<String>,
    #[arg(long, global = true)]
    pub model: Option<ModelChoice>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub shift: Option<f64>,
    #[arg(long, global = true)]
    pub future_preset: Option<String>,
    #[arg(long, global = true)]
    pub future_model: Option<ModelChoice>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub future_k: Option<f64>,
    #[arg(long, global = true, value_parser = parse_signal, value_name = "JSON")]
    pub signal: Option<Signal>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda_seed: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub radius: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub target: Option<TargetKind>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tail_reach: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub bounded_tol: Option<f64>,
    #[arg(long, global = true)]
    pub max_doublings: Option<u32>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub gamma_min: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub x_lo: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub x_hi: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub x0: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub horizon: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub stride: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub method: Option<MiddleChoice>,
    #[arg(long, global = true, value_enum)]
    pub alternative: Option<AlternativeChoice>,
    #[arg(long, global = true)]
    pub warm_start: Option<bool>,
    #[arg(long, global = true)]
    pub cross_checks: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

impl Flags {
    fn to_config(&self) -> RunConfig {
        RunConfig {
            model: self.model.clone(),
            preset: self.preset.clone(),
            k: self.k,
            shift: self.shift,
            future_model: self.future_model.clone(),
            future_preset: self.future_preset.clone(),
            future_k: self.future_k,
            signal: self.signal.clone(),
            p_space: None,
            figure: None,
            lambda: self.lambda,
            lambda_seed: self.lambda_seed,
            radius: self.radius,
            target: self.target,
            window: self.window.map(|s| s.0),
            dt: self.dt,
            tail_reach: self.tail_reach,
            tol: self.tol,
            bounded_tol: self.bounded_tol,
            max_doublings: self.max_doublings,
            gamma_min: self.gamma_min,
            x_lo: self.x_lo,
            x_hi: self.x_hi,
            x0: self.x0,
            horizon: self.horizon,
            stride: self.stride,
            method: self.method,
            alternative: self.alternative,
            warm_start: self.warm_start,
            cross_checks: self.cross_checks,
            seed: self.seed,
            out: self.out.clone(),
            format: self.format,
            jobs: self.jobs,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

/// The config file (if any) with the flags layered on top; `jobs` falls
/// back to `SADDLENODE_JOBS`.
pub fn resolve_config(flags: &Flags) -> Result<RunConfig, CliError> {
    let base = match &flags.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let mut cfg = base.overlay(flags.to_config());
    if cfg.jobs.is_none() {
        if let Ok(v) = std::env::var("SADDLENODE_JOBS") {
            let n = v.trim().parse().map_err(|_| {
                CliError::Config(format!(
                    "SADDLENODE_JOBS must be a positive integer, got {v:?}"
                ))
            })?;
            cfg.jobs = Some(n);
        }
    }
    if cfg.jobs == Some(0) {
        return Err(CliError::Config("jobs must be at least 1".into()));
    }
    Ok(cfg)
}

fn init_pool(jobs: Option<usize>) {
    if let Some(n) = jobs {
        // Only the first call configures the global pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

/// Runs one invocation and returns the process exit status. Diagnostics go
/// to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(paths) => {
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("saddlenode: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command line and returns the files written.
pub fn execute(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let mut cfg = resolve_config(&cli.flags)?;
    init_pool(cfg.jobs);
    let report = commands::dispatch(&cli.command, &mut cfg)?;
    let format = cfg.format.unwrap_or_default();
    let written = report
        .emit(cfg.out.as_deref(), format)
        .map_err(|e| CliError::Config(format!("cannot write output: {e}")))?;
    match report.failure {
        Some(msg) => {
            for p in written {
                eprintln!("wrote {}", p.display());
            }
            Err(CliError::Numerical(msg))
        }
        None => Ok(written),
    }
}
