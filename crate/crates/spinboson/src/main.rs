use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use spinboson::config::{Command, ConfigError, ExperimentConfig, Format, OUT_DIR_ENV};
use spinboson::RunError;

const AFTER_HELP: &str = "\
Config files hold key=value lines (bath.s=3, sweep.s=0.5:4:0.1, ...); flags override them.
Exit codes: 0 success, 1 config error, 2 numerical failure with no output, 3 I/O error.

Environment:
  SPINBOSON_OUT_DIR  default output directory when neither --out nor output.dir is given
  RUST_LOG           log filter (default: warn)";

#[derive(Parser)]
#[command(name = "spinboson", version, about = "QFI dynamics of qubits in a spin-boson bath", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Flow of the averaged QFI over (s, ω_c t)
    FlowMap(RunArgs),
    /// Markovian / non-Markovian diagram over s and the critical s_c
    Crossover(RunArgs),
    /// Phase-estimation variance of GHZ and product inputs
    PhaseVariance(RunArgs),
    /// t_c, t_s and their gap against N
    Scaling(RunArgs),
    /// Variance trajectories and t_s across bath exponents
    SuddenChange(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Config file (key=value lines)
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Output format: csv or json
    #[arg(long)]
    format: Option<String>,
    /// Worker threads
    #[arg(long, value_name = "K")]
    workers: Option<usize>,
    /// Bath exponent: a value, a list a,b,c or a range start:stop:step
    #[arg(long, value_name = "SPEC")]
    s: Option<String>,
    /// Qubit number: a value, a list or a range
    #[arg(long, value_name = "SPEC")]
    n_qubits: Option<String>,
    /// Temperature: a value, a list or a range
    #[arg(long, value_name = "SPEC")]
    temperature: Option<String>,
    /// Coupling prefactor α
    #[arg(long)]
    alpha: Option<f64>,
    /// End of the analysis window, ω_c t
    #[arg(long)]
    t_max: Option<f64>,
    /// Number of time-grid intervals
    #[arg(long)]
    grid_points: Option<usize>,
}

fn resolve(command: Command, args: &RunArgs) -> Result<ExperimentConfig, RunError> {
    let mut config = ExperimentConfig::defaults(command);
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::new(format!("cannot read {}: {e}", path.display())))?;
        config.apply_text(&text)?;
    }
    if let Some(dir) = &args.out {
        config.output_dir = dir.clone();
    }
    if let Some(f) = &args.format {
        config.format = Format::parse(f)?;
    }
    if let Some(k) = args.workers {
        config.workers = k;
    }
    if let Some(s) = &args.s {
        config.override_s(s)?;
    }
    if let Some(n) = &args.n_qubits {
        config.override_n(n)?;
    }
    if let Some(t) = &args.temperature {
        config.override_temperature(t)?;
    }
    if let Some(a) = args.alpha {
        config.bath.alpha = a;
    }
    if let Some(t) = args.t_max {
        config.window_end = t;
    }
    if let Some(g) = args.grid_points {
        config.grid_points = g;
    }
    config.validate()?;
    Ok(config)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (command, args) = match &cli.command {
        Sub::FlowMap(a) => (Command::FlowMap, a),
        Sub::Crossover(a) => (Command::Crossover, a),
        Sub::PhaseVariance(a) => (Command::PhaseVariance, a),
        Sub::Scaling(a) => (Command::Scaling, a),
        Sub::SuddenChange(a) => (Command::SuddenChange, a),
    };
    let outcome = resolve(command, args).and_then(|config| {
        if config.output_dir.as_os_str().is_empty() {
            warn!("empty output directory, {OUT_DIR_ENV} ignored");
        }
        info!("running {} on {} workers", command.as_str(), config.workers);
        let report = spinboson::run(&config)?;
        for w in &report.warnings {
            warn!("{w}");
        }
        Ok(report.write(&config.output_dir, config.format)?)
    });
    match outcome {
        Ok(path) => {
            println!("{}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("spinboson: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
