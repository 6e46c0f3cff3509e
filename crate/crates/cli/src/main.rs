use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fridge_cli::config::{parse_config, parse_config_over, Format, RunConfig};
use fridge_cli::output::write_table;
use fridge_cli::{presets, run, run_point, CliError, Mode, Table};
use fridge_core::Regime;

#[derive(Parser)]
#[command(
    name = "fridge-qpc",
    version,
    about = "Measurement-driven double-dot refrigerator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a single parameter point.
    Point(Common),
    /// Evaluate the grid given by [sweep].
    Sweep(Common),
    /// Cooling sweep over the ideal measurement rate.
    Fig2(Common),
    /// Temperature/bias map with a tunnel-junction detector.
    Fig3(Common),
    /// Flows plus detector noise (requires model = "qpc").
    Noise(Common),
    /// Closed-form local flows against the numeric local model.
    LocalCheck(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    Global,
    Local,
}

#[derive(Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (overrides FRIDGE_QPC_THREADS).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, value_enum)]
    regime: Option<RegimeArg>,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load(common: &Common, preset: Option<RunConfig>) -> Result<RunConfig, CliError> {
    let mut cfg = match (preset, &common.config) {
        (Some(base), Some(path)) => parse_config_over(&read(path)?, base)?,
        (Some(base), None) => base,
        (None, Some(path)) => parse_config(&read(path)?)?,
        (None, None) => {
            return Err(CliError::Config {
                field: "--config".into(),
                reason: "required for this subcommand".into(),
            })
        }
    };
    if let Some(r) = common.regime {
        cfg.regime = match r {
            RegimeArg::Global => Regime::Global,
            RegimeArg::Local => Regime::Local,
        };
        if cfg.regime == Regime::Local && cfg.base.measurement.is_qpc() {
            return Err(CliError::Config {
                field: "regime".into(),
                reason: "the local regime supports only model = \"ideal\"".into(),
            });
        }
    }
    if let Some(f) = common.format {
        cfg.format = f;
    }
    if let Some(out) = &common.out {
        cfg.output_path = Some(out.clone());
    }
    Ok(cfg)
}

fn threads(common: &Common) -> Result<Option<usize>, CliError> {
    if let Some(n) = common.threads {
        return Ok(Some(n));
    }
    match std::env::var("FRIDGE_QPC_THREADS") {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| CliError::Config {
            field: "FRIDGE_QPC_THREADS".into(),
            reason: format!("not an integer: `{v}`"),
        }),
        Err(_) => Ok(None),
    }
}

fn emit(table: &Table, cfg: &RunConfig) -> Result<(), CliError> {
    let io_err = |path: &str| {
        let path = path.to_string();
        move |source| CliError::Io { path, source }
    };
    match &cfg.output_path {
        Some(path) => {
            let name = path.display().to_string();
            let file = File::create(path).map_err(io_err(&name))?;
            let mut w = BufWriter::new(file);
            write_table(table, cfg.format, &mut w).map_err(io_err(&name))?;
            w.flush().map_err(io_err(&name))
        }
        None => {
            let stdout = std::io::stdout();
            write_table(table, cfg.format, stdout.lock()).map_err(io_err("<stdout>"))
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (common, preset, mode, single) = match &cli.command {
        Command::Point(c) => (c, None, Mode::Flows, Some(true)),
        Command::Sweep(c) => (c, None, Mode::Flows, Some(false)),
        Command::Fig2(c) => (c, Some(presets::fig2()), Mode::Flows, Some(false)),
        Command::Fig3(c) => (c, Some(presets::fig3()), Mode::Flows, Some(false)),
        Command::Noise(c) => (c, None, Mode::Noise, None),
        Command::LocalCheck(c) => (c, None, Mode::LocalCheck, None),
    };
    let cfg = load(common, preset)?;
    let n = threads(common)?;
    let single = single.unwrap_or(cfg.sweep.is_none());
    if !single && cfg.sweep.is_none() {
        return Err(CliError::Config {
            field: "sweep.axis1".into(),
            reason: "missing".into(),
        });
    }
    let table = if single {
        run_point(&cfg, mode)?
    } else {
        run(&cfg, mode, n)?
    };
    emit(&table, &cfg)?;
    if !table.acceptable() {
        return Err(CliError::TooManyFailures {
            failed: table.failures(),
            total: table.rows.len(),
        });
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fridge-qpc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
