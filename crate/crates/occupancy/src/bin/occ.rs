//! Command-line front end: `fit`, `simulate`, `study`, and `sensitivity`
//! subcommands over the library.
//!
//! Exit codes: 0 on success, 2 for input or usage problems (unreadable or
//! malformed files, invalid configuration, bad flag values), 3 when the
//! numerics cannot deliver (degenerate data, non-identifiable designs,
//! optimizer failure).
//!
//! Optimizer tolerances resolve in increasing precedence: built-in
//! defaults, then the environment (`OCC_TOL_X`, `OCC_TOL_F`,
//! `OCC_MAX_ITER`, `OCC_FD_STEP`), then command-line flags, then a
//! `--settings` JSON file, which wins outright.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use occupancy::io::{self, Format, IoError};
use occupancy::{
    fit_full, fit_partial, fit_two_stage, sensitivity_profile, simulate_history, FitResult,
    OptimSettings, SimError, SuffStats,
};

#[derive(Parser)]
#[command(
    name = "occ",
    version,
    about = "Site-occupancy estimation: joint, two-stage, and closed-form partial fits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit occupancy and detection probabilities to one dataset
    Fit(FitArgs),
    /// Draw one synthetic detection history
    Simulate(SimulateArgs),
    /// Run a Monte-Carlo study comparing the estimators over a design grid
    Study(StudyArgs),
    /// Profile the occupancy implied by each assumed detection probability
    Sensitivity(SensitivityArgs),
}

#[derive(Args)]
struct FitArgs {
    /// Detection-history CSV or sufficient-statistics JSON
    input: PathBuf,
    /// Estimator to run
    #[arg(long, value_enum, default_value = "all")]
    method: MethodArg,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Write here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    opt: OptArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Full,
    #[value(name = "two_stage", alias = "two-stage")]
    TwoStage,
    Partial,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

/// Optimizer tuning shared by `fit` and `study`.
#[derive(Args)]
struct OptArgs {
    /// Parameter-scale convergence tolerance
    #[arg(long)]
    tol_x: Option<f64>,
    /// Objective-scale convergence tolerance
    #[arg(long)]
    tol_f: Option<f64>,
    /// Iteration cap for the optimizer
    #[arg(long)]
    max_iter: Option<usize>,
    /// Step scale for finite-difference standard errors
    #[arg(long)]
    fd_step: Option<f64>,
    /// JSON file of settings overriding everything else
    #[arg(long)]
    settings: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    sites: usize,
    #[arg(long)]
    occasions: usize,
    /// True occupancy probability
    #[arg(long)]
    psi: f64,
    /// True per-occasion detection probability
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the history CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StudyArgs {
    /// JSON array of study cells
    config: PathBuf,
    /// Base seed for cells that do not pin their own
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Drop replicates whose fitted probabilities sit at a boundary
    #[arg(long)]
    drop_boundary: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    opt: OptArgs,
}

#[derive(Args)]
struct SensitivityArgs {
    /// Detection-history CSV or sufficient-statistics JSON
    input: PathBuf,
    /// Number of interior grid points
    #[arg(long, default_value_t = 99)]
    grid: usize,
    /// Insert a marker row at this detection probability
    #[arg(long)]
    mark_p: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

struct CliError {
    code: u8,
    message: String,
}

fn input_err(message: impl Into<String>) -> CliError {
    CliError {
        code: 2,
        message: message.into(),
    }
}

fn numeric_err(message: impl Into<String>) -> CliError {
    CliError {
        code: 3,
        message: message.into(),
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> CliError {
        input_err(e.to_string())
    }
}

impl From<occupancy::FitError> for CliError {
    fn from(e: occupancy::FitError) -> CliError {
        numeric_err(e.to_string())
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> CliError {
        match e {
            SimError::InvalidCell(_) => input_err(e.to_string()),
            _ => numeric_err(e.to_string()),
        }
    }
}

/// Partial overrides loaded from a `--settings` file.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SettingsFile {
    tol_x: Option<f64>,
    tol_f: Option<f64>,
    max_iter: Option<usize>,
    fd_step: Option<f64>,
}

fn env_parsed<T: std::str::FromStr>(name: &str) -> Result<Option<T>, CliError> {
    match std::env::var(name) {
        Ok(raw) => raw
            .trim()
            .parse::<T>()
            .map(Some)
            .map_err(|_| input_err(format!("{name} is set to unparsable value {raw:?}"))),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(input_err(format!("{name}: {e}"))),
    }
}

fn resolve_settings(opt: &OptArgs) -> Result<OptimSettings, CliError> {
    let mut s = OptimSettings::default();
    if let Some(v) = env_parsed::<f64>("OCC_TOL_X")? {
        s.tol_x = v;
    }
    if let Some(v) = env_parsed::<f64>("OCC_TOL_F")? {
        s.tol_f = v;
    }
    if let Some(v) = env_parsed::<usize>("OCC_MAX_ITER")? {
        s.max_iter = v;
    }
    if let Some(v) = env_parsed::<f64>("OCC_FD_STEP")? {
        s.fd_step = v;
    }
    if let Some(v) = opt.tol_x {
        s.tol_x = v;
    }
    if let Some(v) = opt.tol_f {
        s.tol_f = v;
    }
    if let Some(v) = opt.max_iter {
        s.max_iter = v;
    }
    if let Some(v) = opt.fd_step {
        s.fd_step = v;
    }
    if let Some(path) = &opt.settings {
        let text = fs::read_to_string(path)
            .map_err(|e| input_err(format!("cannot read {}: {e}", path.display())))?;
        let file: SettingsFile = serde_json::from_str(&text)
            .map_err(|e| input_err(format!("cannot parse {}: {e}", path.display())))?;
        if let Some(v) = file.tol_x {
            s.tol_x = v;
        }
        if let Some(v) = file.tol_f {
            s.tol_f = v;
        }
        if let Some(v) = file.max_iter {
            s.max_iter = v;
        }
        if let Some(v) = file.fd_step {
            s.fd_step = v;
        }
    }
    for (name, value) in [("tol_x", s.tol_x), ("tol_f", s.tol_f), ("fd_step", s.fd_step)] {
        if !(value.is_finite() && value > 0.0) {
            return Err(input_err(format!("{name} must be positive, got {value}")));
        }
    }
    if s.max_iter == 0 {
        return Err(input_err("max_iter must be at least 1"));
    }
    Ok(s)
}

/// Reads either input flavor, deciding by extension and falling back to a
/// content sniff (JSON starts with `{`).
fn load_stats(path: &Path) -> Result<SuffStats, CliError> {
    let as_json = match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("json") => true,
        Some(ext) if ext.eq_ignore_ascii_case("csv") => false,
        _ => {
            let text = fs::read_to_string(path)
                .map_err(|e| input_err(format!("cannot read {}: {e}", path.display())))?;
            text.trim_start().starts_with('{')
        }
    };
    if as_json {
        Ok(io::parse_suffstats_json(path)?)
    } else {
        Ok(io::parse_history_csv(path)?.stats())
    }
}

fn write_out(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| input_err(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_fit(args: &FitArgs) -> Result<(), CliError> {
    let stats = load_stats(&args.input)?;
    let settings = resolve_settings(&args.opt)?;
    let mut results: Vec<FitResult> = Vec::new();
    match args.method {
        MethodArg::Full => results.push(fit_full(&stats, &settings)?),
        MethodArg::TwoStage => results.push(fit_two_stage(&stats, &settings)?),
        MethodArg::Partial => results.push(fit_partial(&stats)?),
        MethodArg::All => {
            results.push(fit_full(&stats, &settings)?);
            results.push(fit_two_stage(&stats, &settings)?);
            if stats.b().is_some() {
                results.push(fit_partial(&stats)?);
            } else {
                eprintln!(
                    "note: partial fit skipped — statistics lack the post-first-detection count b"
                );
            }
        }
    }
    write_out(args.out.as_deref(), &io::emit_fit(&results, args.format.into()))
}

fn run_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    if args.sites == 0 || args.occasions == 0 {
        return Err(input_err("sites and occasions must be at least 1"));
    }
    for (name, value) in [("psi", args.psi), ("p", args.p)] {
        if !(0.0..=1.0).contains(&value) {
            return Err(input_err(format!("{name} = {value} must lie in [0, 1]")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let history = simulate_history(args.sites, args.occasions, args.psi, args.p, &mut rng);
    write_out(args.out.as_deref(), &io::emit_history_csv(&history))
}

fn run_study(args: &StudyArgs) -> Result<(), CliError> {
    let settings = resolve_settings(&args.opt)?;
    let cells = io::parse_study_config(&args.config, args.seed)?;
    let mut summaries = Vec::with_capacity(cells.len());
    for cell in &cells {
        summaries.push(occupancy::run_study(cell, args.drop_boundary, &settings)?);
    }
    write_out(
        args.out.as_deref(),
        &io::emit_study(&summaries, args.format.into()),
    )
}

fn run_sensitivity(args: &SensitivityArgs) -> Result<(), CliError> {
    if args.grid == 0 {
        return Err(input_err("grid must be at least 1"));
    }
    if let Some(mp) = args.mark_p {
        if !(mp > 0.0 && mp < 1.0) {
            return Err(input_err(format!(
                "mark_p = {mp} must lie strictly inside (0, 1)"
            )));
        }
    }
    let stats = load_stats(&args.input)?;
    let profile = sensitivity_profile(&stats, args.grid)?;
    write_out(
        args.out.as_deref(),
        &io::emit_sensitivity(&profile, args.mark_p),
    )
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Fit(args) => run_fit(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Study(args) => run_study(args),
        Command::Sensitivity(args) => run_sensitivity(args),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
