//! Command-line experiment runner: evaluates coverage, association and ASE
//! analytically, runs the Monte Carlo simulator, and cross-validates the
//! two, emitting plot-ready CSV.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 validation
//! failure (a validate row exceeded its tolerance), 3 numerical failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

mod config;
mod experiment;
mod presets;

use config::{parse_config, ExperimentSpec, Mode};
use experiment::{run, RunStatus};

#[derive(Parser)]
#[command(name = "uavnet", version, about = "UAV-assisted cellular downlink coverage toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Default)]
struct RunArgs {
    /// TOML configuration; every key defaults to the Table-I parameter point.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override sim.seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override sim.realizations.
    #[arg(long)]
    realizations: Option<usize>,
    /// Override analysis.tol_rel.
    #[arg(long)]
    tol_rel: Option<f64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Analytic SINR coverage (single point or sweep).
    Coverage(RunArgs),
    /// Analytic association probabilities.
    Association(RunArgs),
    /// Analytic area spectral efficiency.
    Ase(RunArgs),
    /// Monte Carlo estimates only.
    Simulate(RunArgs),
    /// Analytic vs Monte Carlo cross-validation; exits 2 on a failed row.
    Validate(RunArgs),
    /// Sweep with the coverage schema (requires a [sweep] section).
    Sweep(RunArgs),
    /// Run a built-in figure preset (fig2..fig7).
    Preset {
        /// Preset name.
        name: String,
        #[command(flatten)]
        args: RunArgs,
    },
}

fn load_spec(args: &RunArgs, mode: Option<Mode>) -> Result<ExperimentSpec> {
    let text = match &args.config {
        Some(path) => fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?,
        None => String::new(),
    };
    let mut spec = parse_config(&text)?;
    if let Some(m) = mode {
        spec.mode = m;
    }
    apply_overrides(&mut spec, args)?;
    Ok(spec)
}

fn apply_overrides(spec: &mut ExperimentSpec, args: &RunArgs) -> Result<()> {
    if let Some(seed) = args.seed {
        spec.sim.seed = seed;
    }
    if let Some(n) = args.realizations {
        anyhow::ensure!(n >= 1, "--realizations must be at least 1");
        spec.sim.n_realizations = n;
    }
    if let Some(rel) = args.tol_rel {
        spec.opts.tol_outer = uavnet::Tolerance::new(
            rel,
            spec.opts.tol_outer.abs,
            spec.opts.tol_outer.max_evals,
        )?;
        spec.opts.tol_inner = uavnet::Tolerance::new(
            rel * 0.01,
            spec.opts.tol_inner.abs,
            spec.opts.tol_inner.max_evals,
        )?;
    }
    Ok(())
}

fn emit(out: Option<&Path>, csv: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent() {
                if !dir.as_os_str().is_empty() {
                    fs::create_dir_all(dir)?;
                }
            }
            fs::write(path, csv).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

/// Output path of one preset curve: `<stem>_<label>.csv` next to `out`.
fn curve_path(out: &Path, label: &str) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("preset");
    let ext = out.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    out.with_file_name(format!("{stem}_{label}.{ext}"))
}

fn execute(cmd: &Cmd) -> Result<RunStatus> {
    let (spec, args) = match cmd {
        Cmd::Coverage(a) => (load_spec(a, Some(Mode::Coverage))?, a),
        Cmd::Association(a) => (load_spec(a, Some(Mode::Association))?, a),
        Cmd::Ase(a) => (load_spec(a, Some(Mode::Ase))?, a),
        Cmd::Simulate(a) => (load_spec(a, Some(Mode::Simulate))?, a),
        Cmd::Validate(a) => (load_spec(a, Some(Mode::Validate))?, a),
        Cmd::Sweep(a) => {
            let spec = load_spec(a, Some(Mode::Sweep))?;
            anyhow::ensure!(spec.sweep.is_some(), "mode `sweep` requires a [sweep] section");
            (spec, a)
        }
        Cmd::Preset { name, args } => {
            let mut status = RunStatus::Ok;
            for (label, mut spec) in presets::preset(name)? {
                apply_overrides(&mut spec, args)?;
                let result = run(&spec)?;
                for line in &result.log {
                    eprintln!("{line}");
                }
                match &args.out {
                    Some(out) => emit(Some(&curve_path(out, &label)), &result.csv)?,
                    None => {
                        println!("# {label}");
                        print!("{}", result.csv);
                    }
                }
                if result.status == RunStatus::ValidationFailed {
                    status = RunStatus::ValidationFailed;
                }
            }
            return Ok(status);
        }
    };
    let result = run(&spec)?;
    for line in &result.log {
        eprintln!("{line}");
    }
    emit(args.out.as_deref(), &result.csv)?;
    Ok(result.status)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's help/version go to stdout with success; usage errors exit 1
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match execute(&cli.cmd) {
        Ok(RunStatus::Ok) => ExitCode::SUCCESS,
        Ok(RunStatus::ValidationFailed) => ExitCode::from(2),
        Err(err) => {
            // numerical failures carry an analytic-term context
            let numerical = err.downcast_ref::<uavnet::EvalError>().is_some();
            eprintln!("error: {err:#}");
            if numerical {
                ExitCode::from(3)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
