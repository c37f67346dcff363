//! Command-line surface and exit codes.

use crate::config::{Experiment, SweepConfig};
use crate::error::CliError;
use crate::output::{read_csv, write_csv};
use crate::plot::write_plot_script;
use crate::sweep::{evaluate_point, prepare, run_sweep};
use causalthermo_core::processes::{parse_process, validate_sampled};
use causalthermo_core::{ParamVector, ProcessKind, Superchannel};
use clap::{Args, Parser, Subcommand};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "causalthermo", version, about = "Thermodynamic sweeps over quantum processes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// TOML configuration file; defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Optimizer seed, overriding the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads.
    #[arg(long, env = "CAUSALTHERMO_JOBS")]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Average free energy over the r grid.
    SweepFreeEnergy(RunArgs),
    /// Daemonic ergotropy over the r grid, optimized by default.
    SweepErgotropy(RunArgs),
    /// One grid point, printed as a CSV row.
    Eval {
        #[command(flatten)]
        run: RunArgs,
        /// Figure to evaluate; falls back to `experiment` in the config.
        #[arg(long, value_enum)]
        experiment: Option<Experiment>,
        #[arg(long)]
        process: String,
        #[arg(long)]
        r: f64,
        /// Fixed protocol point `m,phi,x,chi`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        params: Option<Vec<f64>>,
    },
    /// Sampled validity check of a built-in process or a process file.
    Validate {
        /// Process file.
        #[arg(required_unless_present = "builtin", conflicts_with = "builtin")]
        path: Option<PathBuf>,
        /// Built-in process name, e.g. `switch2` or `lugano`.
        #[arg(long)]
        builtin: Option<String>,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Plotting script for a sweep CSV.
    EmitPlot {
        /// CSV written by a sweep.
        input: PathBuf,
        /// Script path; `<input>.py` when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn load_config(run: &RunArgs, experiment: Option<Experiment>) -> Result<SweepConfig, CliError> {
    let text = match &run.config {
        Some(p) => read_text(p)?,
        None => String::new(),
    };
    let mut cfg = SweepConfig::from_toml(&text, experiment).map_err(|e| match (&run.config, e) {
        (Some(p), CliError::Config(msg)) => CliError::Config(format!("{}: {msg}", p.display())),
        (_, e) => e,
    })?;
    if let Some(seed) = run.seed {
        cfg.optimizer.seed = seed;
    }
    if run.out.is_some() {
        cfg.out = run.out.clone();
    }
    Ok(cfg)
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    if jobs == Some(0) {
        return Err(CliError::Config("--jobs must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn emit(rows: &[crate::sweep::SweepRow], out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let f = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
            write_csv(rows, std::io::BufWriter::new(f))
        }
        None => write_csv(rows, std::io::stdout().lock()),
    }
}

fn sweep(experiment: Experiment, run: &RunArgs) -> Result<u8, CliError> {
    let cfg = load_config(run, Some(experiment))?;
    let rows = pool(run.jobs)?.install(|| run_sweep(&cfg))?;
    emit(&rows, cfg.out.as_deref())?;
    Ok(EXIT_OK)
}

fn eval(
    run: &RunArgs,
    experiment: Option<Experiment>,
    process: &str,
    r: f64,
    params: Option<&[f64]>,
) -> Result<u8, CliError> {
    let cfg = load_config(run, experiment)?;
    let params = match params {
        Some(&[m, phi, x, chi]) => Some(ParamVector::new(m, phi, x, chi)?),
        Some(_) => return Err(CliError::Config("--params takes four values".into())),
        None => None,
    };
    let spec = cfg.spec_for(process)?;
    let row = pool(run.jobs)?.install(|| {
        let prep = prepare(&cfg, &spec)?;
        evaluate_point(&cfg, &prep, r, params)
    })?;
    emit(&[row], cfg.out.as_deref())?;
    Ok(EXIT_OK)
}

fn validate(
    path: Option<&Path>,
    builtin: Option<&str>,
    samples: usize,
    seed: u64,
) -> Result<u8, CliError> {
    let (name, process) = match (builtin, path) {
        (Some(b), _) => {
            let kind = ProcessKind::from_str(b)?;
            (b.to_string(), Superchannel::build(kind)?.process().clone())
        }
        (None, Some(p)) => {
            let process = parse_process(&read_text(p)?)
                .map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
            (p.display().to_string(), process)
        }
        (None, None) => return Err(CliError::Config("give a process file or --builtin".into())),
    };
    let report = validate_sampled(&process, samples, seed)?;
    let mut out = std::io::stdout().lock();
    let verdict = if report.valid() { "PASS" } else { "FAIL" };
    let _ = writeln!(out, "{verdict} {name}");
    let _ = writeln!(
        out,
        "  positive semidefinite: {} (min eigenvalue {:.3e})",
        report.psd, report.min_eigenvalue
    );
    let _ = writeln!(
        out,
        "  sampled channels: {} of {} failed",
        report.failures, report.samples
    );
    for d in &report.diagnostics {
        let _ = writeln!(out, "  {d}");
    }
    let _ = write!(out, "{}", report.to_key_values());
    Ok(if report.valid() { EXIT_OK } else { EXIT_INVALID })
}

fn emit_plot(input: &Path, out: Option<&Path>) -> Result<u8, CliError> {
    let f = std::fs::File::open(input).map_err(|e| CliError::io(input, e))?;
    let rows = read_csv(f)?;
    let out = out.map(Path::to_path_buf).unwrap_or_else(|| input.with_extension("py"));
    write_plot_script(&rows, &out)?;
    eprintln!("wrote {}", out.display());
    Ok(EXIT_OK)
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli) -> u8 {
    let result = match &cli.command {
        Command::SweepFreeEnergy(run) => sweep(Experiment::FreeEnergy, run),
        Command::SweepErgotropy(run) => sweep(Experiment::Ergotropy, run),
        Command::Eval {
            run,
            experiment,
            process,
            r,
            params,
        } => eval(run, *experiment, process, *r, params.as_deref()),
        Command::Validate {
            path,
            builtin,
            samples,
            seed,
        } => validate(path.as_deref(), builtin.as_deref(), *samples, *seed),
        Command::EmitPlot { input, out } => emit_plot(input, out.as_deref()),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
