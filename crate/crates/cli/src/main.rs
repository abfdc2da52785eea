use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;
use qsteer_cli::check::run_check;
use qsteer_cli::config::{PointParams, RunConfig};
use qsteer_cli::emit::{emit, Format};
use qsteer_cli::error::ConfigError;
use qsteer_cli::oracle::{run_oracle, OracleName};
use qsteer_cli::presets::{preset, preset_text};
use qsteer_cli::sweep::run_sweep;

/// Quantum-steering simulations of a Cooper-pair sluice.
#[derive(Debug, Parser)]
#[command(name = "qsteer", version)]
struct Cli {
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true, env = "QSTEER_WORKERS")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Directory for tables and manifest.json.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every series of a TOML run file (or a previous manifest.json).
    Sweep {
        config: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run one of the bundled figure presets.
    Preset {
        /// fig2a, fig2b, fig3, fig4, fig5 or fig6.
        name: String,
        /// Print the preset's run file instead of running it.
        #[arg(long)]
        print_config: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Print an analytic prediction as JSON.
    Oracle {
        #[arg(value_enum)]
        name: OracleName,
        /// Run file to take parameters from.
        #[arg(long, conflicts_with = "preset")]
        config: Option<PathBuf>,
        /// Preset to take parameters from.
        #[arg(long)]
        preset: Option<String>,
        /// Use this series' snapshot instead of `fixed`.
        #[arg(long)]
        series: Option<String>,
        /// Axis value within the series.
        #[arg(long, requires = "series")]
        at: Option<f64>,
    },
    /// Check the reductions between master-equation variants.
    Check {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        cases: usize,
    },
}

fn run_all(run: &RunConfig, out: &OutputArgs) -> Result<ExitCode> {
    let specs = run.resolve()?;
    let mut results = Vec::with_capacity(specs.len());
    for spec in &specs {
        results.push(run_sweep(spec)?);
    }
    let manifest = emit(run, &results, &out.out_dir, out.format)?;
    let failed: usize = results.iter().map(|r| r.failed_rows()).sum();
    info!("wrote {}", manifest.display());
    if failed > 0 {
        eprintln!("{failed} grid point(s) failed; see the error column");
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn oracle_params(
    config: Option<&Path>,
    preset_name: Option<&str>,
    series: Option<&str>,
    at: Option<f64>,
) -> Result<PointParams, ConfigError> {
    let run = match (config, preset_name) {
        (Some(p), _) => RunConfig::load(p)?,
        (None, Some(n)) => preset(n)?,
        (None, None) => RunConfig::from_toml_str("name = \"defaults\"\nseries = []\n", "defaults")?,
    };
    let Some(label) = series else { return run.snapshot() };
    let spec = run
        .resolve()?
        .into_iter()
        .find(|s| s.label == label)
        .ok_or_else(|| ConfigError::Invalid(format!("no series `{label}`")))?;
    match at {
        Some(v) => spec.point(v),
        None => spec.base(),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(n) = cli.workers {
        if n == 0 {
            bail!("--workers must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the worker pool")?;
    }
    match cli.command {
        Command::Sweep { config, out } => run_all(&RunConfig::load(&config)?, &out),
        Command::Preset { name, print_config, out } => {
            if print_config {
                print!("{}", preset_text(&name)?);
                return Ok(ExitCode::SUCCESS);
            }
            run_all(&preset(&name)?, &out)
        }
        Command::Oracle {
            name,
            config,
            preset,
            series,
            at,
        } => {
            let p = oracle_params(config.as_deref(), preset.as_deref(), series.as_deref(), at)?;
            let v = run_oracle(name, &p)?;
            println!("{}", serde_json::to_string_pretty(&v)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { seed, cases } => {
            let reports = run_check(seed, cases);
            let mut ok = true;
            for r in &reports {
                let tag = match (r.required, r.passed) {
                    (true, true) => "ok",
                    (true, false) => "FAILED",
                    (false, true) => "equal (info)",
                    (false, false) => "differs (info)",
                };
                println!("{:<48} max rel diff {:.3e}  {tag}", r.name, r.max_rel_diff);
                ok &= !r.required || r.passed;
            }
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
