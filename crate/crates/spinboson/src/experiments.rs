//! Sweep runners behind the CLI subcommands.
//!
//! Each runner resolves its cells, evaluates them on a rayon pool of
//! `config.workers` threads and assembles the rows in sweep order, so the
//! output never depends on completion order. A failed cell becomes a row
//! with empty values and the error text in the `status` column.

use std::fmt;
use std::io;
use std::path::PathBuf;

use rayon::prelude::*;
use spinboson_core::analysis::{
    branch_flip_time, critical_bath_parameter, critical_time, crossover_time, fit_inverse_n, qfi_flow, sudden_change_time, timing_report,
    variance_trajectories, Window, ROOT_RESOLUTION,
};
use spinboson_core::bath::{rate_sample, uniform_grid, OMEGA_MAX_OVER_CUTOFF, RATE_TOLERANCE};
use spinboson_core::channel::{accumulate_kernels, ChannelCoefficients, ChannelTable, Warning, KERNEL_TOLERANCE, POSITIVITY_TOLERANCE};
use spinboson_core::multiqubit::collective_qfi_fast;
use spinboson_core::qfi::{phase_variance, BRANCH_TOLERANCE, EPS_PAIR};
use spinboson_core::{BathParams, InputFamily, RateTable};

use crate::config::{format_number, Command, ConfigError, ExperimentConfig};
use crate::output::{Report, Value, OK};

type CoreResult<T> = spinboson_core::Result<T>;

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    /// Nothing could be computed.
    Numerical(String),
    Io(io::Error),
}

impl RunError {
    /// Process exit code: 1 config, 2 numerical, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 1,
            RunError::Numerical(_) => 2,
            RunError::Io(_) => 3,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "config error: {e}"),
            RunError::Numerical(m) => write!(f, "numerical failure: {m}"),
            RunError::Io(e) => write!(f, "I/O error: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<io::Error> for RunError {
    fn from(e: io::Error) -> Self {
        RunError::Io(e)
    }
}

/// Channel table on [0, t_max] with `intervals` steps, rate samples taken
/// in parallel on the current pool.
pub fn build_channel(params: &BathParams, t_max: f64, intervals: usize) -> CoreResult<ChannelTable> {
    params.validate()?;
    let grid = uniform_grid(t_max, intervals + 1)?;
    let samples = grid.par_iter().map(|&t| rate_sample(t, params)).collect::<CoreResult<Vec<_>>>()?;
    accumulate_kernels(&RateTable::from_samples(*params, grid, samples)?)
}

fn channel_for_config(config: &ExperimentConfig, params: &BathParams) -> CoreResult<ChannelTable> {
    build_channel(params, config.t_max(), config.grid_points)
}

fn window(config: &ExperimentConfig, params: &BathParams) -> CoreResult<Window> {
    Window::scaled(config.window_start, config.window_end, params.omega_c)
}

fn describe_warnings(label: &str, channel: &ChannelTable) -> Vec<String> {
    channel
        .warnings()
        .iter()
        .map(|w| match w {
            Warning::CoarseGrid { kernel, estimate } => {
                format!("{label}: kernel {kernel} Richardson estimate {} above tolerance", format_number(*estimate))
            }
            Warning::Positivity { t, min_eigenvalue } => format!(
                "{label}: map not completely positive from t={} (min Choi eigenvalue {})",
                format_number(*t),
                format_number(*min_eigenvalue)
            ),
        })
        .collect()
}

fn tolerances() -> Vec<(&'static str, f64)> {
    vec![
        ("rate_quadrature_abs", RATE_TOLERANCE),
        ("omega_max_over_omega_c", OMEGA_MAX_OVER_CUTOFF),
        ("kernel_richardson", KERNEL_TOLERANCE),
        ("positivity", POSITIVITY_TOLERANCE),
        ("qfi_pair_cutoff", EPS_PAIR),
        ("branch_relative", BRANCH_TOLERANCE),
        ("root_resolution_omega_c_t", ROOT_RESOLUTION),
    ]
}

fn status(e: &spinboson_core::Error) -> Value {
    Value::Text(e.to_string())
}

fn ok() -> Value {
    Value::Text(OK.into())
}

fn report(config: &ExperimentConfig, columns: Vec<&'static str>) -> Report {
    Report {
        command: config.command,
        config: config.resolved_lines(),
        tolerances: tolerances(),
        summary: Vec::new(),
        warnings: Vec::new(),
        columns,
        rows: Vec::new(),
    }
}

fn finish(report: Report) -> Result<Report, RunError> {
    if report.ok_rows() == 0 {
        let first = report
            .column("status")
            .and_then(|i| report.rows.first().map(|r| r[i].clone()))
            .map(|v| match v {
                Value::Text(s) => s,
                _ => String::new(),
            })
            .unwrap_or_else(|| "no rows".into());
        return Err(RunError::Numerical(first));
    }
    Ok(report)
}

/// Runs the configured command on a dedicated pool.
pub fn run(config: &ExperimentConfig) -> Result<Report, RunError> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(config.workers).build().map_err(|e| RunError::Io(io::Error::other(e)))?;
    pool.install(|| match config.command {
        Command::FlowMap => run_flow_map(config),
        Command::Crossover => run_crossover_diagram(config),
        Command::PhaseVariance => run_phase_variance(config),
        Command::Scaling => run_scaling(config),
        Command::SuddenChange => run_sudden_change_sweep(config),
    })
}

/// Runs the command and writes the report into the configured directory.
pub fn execute(config: &ExperimentConfig) -> Result<PathBuf, RunError> {
    let report = run(config)?;
    Ok(report.write(&config.output_dir, config.format)?)
}

/// ∂F^A/∂t on the (s, ω_c t) grid.
pub fn run_flow_map(config: &ExperimentConfig) -> Result<Report, RunError> {
    let mut out = report(config, vec!["s", "omega_c_t", "t", "flow", "status"]);
    let cells: Vec<(Vec<Vec<Value>>, Vec<String>)> = config
        .s_sweep
        .values
        .par_iter()
        .map(|&s| {
            let params = config.bath.with_s(s);
            let channel = channel_for_config(config, &params);
            let rows = config
                .t_sweep
                .values
                .iter()
                .map(|&wt| {
                    let t = wt / params.omega_c;
                    let head = [Value::Num(s), Value::Num(wt), Value::Num(t)];
                    let tail = match channel.as_ref().map_err(Clone::clone).and_then(|ch| qfi_flow(ch, t)) {
                        Ok(f) => [Value::Num(f.flow), ok()],
                        Err(e) => [Value::Missing, status(&e)],
                    };
                    head.into_iter().chain(tail).collect()
                })
                .collect();
            let warnings = channel.map(|ch| describe_warnings(&format!("s={}", format_number(s)), &ch));
            (rows, warnings.unwrap_or_default())
        })
        .collect();
    for (rows, warnings) in cells {
        out.rows.extend(rows);
        out.warnings.extend(warnings);
    }
    finish(out)
}

fn non_markovian(config: &ExperimentConfig, params: &BathParams) -> CoreResult<bool> {
    let channel = channel_for_config(config, params)?;
    Ok(!crossover_time(&channel, &window(config, params)?)?.markovian)
}

/// Markovian / non-Markovian verdict and τ for every (T, s), plus s_c per T.
pub fn run_crossover_diagram(config: &ExperimentConfig) -> Result<Report, RunError> {
    let mut out = report(config, vec!["temperature", "s", "omega_c_tau", "tau", "markovian", "status"]);
    let cells: Vec<(f64, f64)> =
        config.temperature_sweep.values.iter().flat_map(|&temp| config.s_sweep.values.iter().map(move |&s| (temp, s))).collect();
    let results: Vec<(Vec<Value>, Vec<String>)> = cells
        .par_iter()
        .map(|&(temp, s)| {
            let params = config.bath.with_s(s).with_temperature(temp);
            let head = [Value::Num(temp), Value::Num(s)];
            let outcome = channel_for_config(config, &params).and_then(|ch| Ok((crossover_time(&ch, &window(config, &params)?)?, ch)));
            match outcome {
                Ok((r, ch)) => (
                    head.into_iter().chain([Value::opt(r.omega_c_tau), Value::opt(r.tau), Value::Bool(r.markovian), ok()]).collect(),
                    describe_warnings(&format!("T={} s={}", format_number(temp), format_number(s)), &ch),
                ),
                Err(e) => (head.into_iter().chain([Value::Missing, Value::Missing, Value::Missing, status(&e)]).collect(), Vec::new()),
            }
        })
        .collect();
    for (row, warnings) in results {
        out.rows.push(row);
        out.warnings.extend(warnings);
    }
    for &temp in &config.temperature_sweep.values {
        let base = config.bath.with_temperature(temp);
        let s_c =
            critical_bath_parameter(|s| non_markovian(config, &base.with_s(s)), config.scan_min, config.scan_max, config.scan_resolution);
        let key = format!("s_c[T={}]", format_number(temp));
        out.summary.push(match s_c {
            Ok(v) => (key, Value::Num(v)),
            Err(e) => (key, status(&e)),
        });
    }
    finish(out)
}

/// (Δφ)² of both inputs and the GHZ branch values at one grid node.
fn variance_values(n: usize, co: &ChannelCoefficients) -> CoreResult<[f64; 4]> {
    let ghz = collective_qfi_fast(InputFamily::Ghz, n, co)?;
    let product = collective_qfi_fast(InputFamily::Product, n, co)?;
    Ok([
        phase_variance(ghz.f_max, 1, n)?.delta_phi_sq,
        phase_variance(product.f_max, 1, n)?.delta_phi_sq,
        ghz.planar_value,
        ghz.axial_value,
    ])
}

fn variance_rows(n: usize, channel: &ChannelTable, window: &Window, lead: &[Value]) -> Vec<Vec<Value>> {
    let omega_c = channel.params().omega_c;
    channel
        .coeffs()
        .iter()
        .filter(|co| co.t >= window.start && co.t <= window.end)
        .map(|co| {
            let mut row = lead.to_vec();
            row.extend([Value::Num(co.t * omega_c), Value::Num(co.t)]);
            match variance_values(n, co) {
                Ok(v) => {
                    row.extend(v.into_iter().map(Value::Num));
                    row.push(ok());
                }
                Err(e) => {
                    row.extend([Value::Missing, Value::Missing, Value::Missing, Value::Missing]);
                    row.push(status(&e));
                }
            }
            row
        })
        .collect()
}

fn scaled_time(key: &str, r: CoreResult<Option<f64>>, omega_c: f64) -> (String, Value) {
    match r {
        Ok(t) => (key.to_string(), Value::opt(t.map(|t| t * omega_c))),
        Err(e) => (key.to_string(), status(&e)),
    }
}

/// Variance trajectories of GHZ and product inputs, with t_c, t_s and τ.
pub fn run_phase_variance(config: &ExperimentConfig) -> Result<Report, RunError> {
    let mut out = report(config, vec!["omega_c_t", "t", "var_ghz", "var_product", "branch_planar", "branch_axial", "status"]);
    let params = config.bath;
    let n = config.n_qubits;
    let channel = channel_for_config(config, &params).map_err(|e| RunError::Numerical(e.to_string()))?;
    let win = window(config, &params).map_err(|e| RunError::Numerical(e.to_string()))?;
    let wc = params.omega_c;
    out.warnings = describe_warnings(&format!("s={}", format_number(params.s)), &channel);
    out.rows = variance_rows(n, &channel, &win, &[]);
    out.summary.push(scaled_time("omega_c_t_c", critical_time(InputFamily::Ghz, n, &channel, &win), wc));
    out.summary.push(scaled_time("omega_c_t_s", sudden_change_time(InputFamily::Ghz, n, &channel, &win), wc));
    match branch_flip_time(InputFamily::Ghz, n, &channel, &win) {
        Ok(Some(f)) => out.summary.push(("ghz_branch_flip".into(), Value::Text(format!("{}->{}", f.from.as_str(), f.to.as_str())))),
        Ok(None) => out.summary.push(("ghz_branch_flip".into(), Value::Missing)),
        Err(e) => out.summary.push(("ghz_branch_flip".into(), status(&e))),
    }
    match branch_flip_time(InputFamily::Product, n, &channel, &win) {
        Ok(f) => out.summary.push(("product_branch_flip".into(), Value::Bool(f.is_some()))),
        Err(e) => out.summary.push(("product_branch_flip".into(), status(&e))),
    }
    match variance_trajectories(n, &channel, &win) {
        Ok(v) => {
            out.summary.push(("omega_c_tau".into(), Value::opt(v.tau.map(|t| t * wc))));
            out.summary.push(("omega_c_t_max_variance".into(), Value::Num(v.max_variance_time * wc)));
            out.summary.push(("max_variance_at_tau".into(), Value::Bool(v.coincides_with_tau)));
        }
        Err(e) => out.summary.push(("omega_c_tau".into(), status(&e))),
    }
    finish(out)
}

/// t_c, t_s and their gap for every N, with the gap-vs-1/N fit.
pub fn run_scaling(config: &ExperimentConfig) -> Result<Report, RunError> {
    let mut out = report(config, vec!["n", "omega_c_t_c", "omega_c_t_s", "gap", "status"]);
    let params = config.bath;
    let wc = params.omega_c;
    let channel = channel_for_config(config, &params).map_err(|e| RunError::Numerical(e.to_string()))?;
    let win = window(config, &params).map_err(|e| RunError::Numerical(e.to_string()))?;
    out.warnings = describe_warnings(&format!("s={}", format_number(params.s)), &channel);
    let n_values = config.n_values()?;
    let reports: Vec<CoreResult<_>> = n_values.par_iter().map(|&n| timing_report(n, &channel, &win)).collect();
    let mut points = Vec::new();
    for (&n, r) in n_values.iter().zip(&reports) {
        match r {
            Ok(r) => {
                if let Some(g) = r.gap {
                    points.push((n, g));
                }
                out.rows.push(vec![
                    Value::Int(n as i64),
                    Value::opt(r.t_c.map(|t| t * wc)),
                    Value::opt(r.t_s.map(|t| t * wc)),
                    Value::opt(r.gap),
                    ok(),
                ]);
            }
            Err(e) => out.rows.push(vec![Value::Int(n as i64), Value::Missing, Value::Missing, Value::Missing, status(e)]),
        }
    }
    match fit_inverse_n(&points) {
        Ok(fit) => {
            out.summary.push(("slope".into(), Value::Num(fit.slope)));
            out.summary.push(("intercept".into(), Value::Num(fit.intercept)));
            out.summary.push(("r_squared".into(), Value::Num(fit.r_squared)));
            out.summary.push(("fit_points".into(), Value::Int(fit.points as i64)));
        }
        Err(e) => out.summary.push(("slope".into(), status(&e))),
    }
    let decreasing = points.windows(2).all(|w| w[1].1 < w[0].1);
    out.summary.push(("gap_decreasing".into(), Value::Bool(decreasing)));
    finish(out)
}

/// Variance trajectories and t_s for each s at fixed N.
pub fn run_sudden_change_sweep(config: &ExperimentConfig) -> Result<Report, RunError> {
    let mut out = report(config, vec!["s", "omega_c_t", "t", "var_ghz", "var_product", "branch_planar", "branch_axial", "status"]);
    let n = config.n_qubits;
    type Cell = (Vec<Vec<Value>>, Vec<(String, Value)>, Vec<String>);
    let cells: Vec<Cell> = config
        .s_sweep
        .values
        .par_iter()
        .map(|&s| {
            let params = config.bath.with_s(s);
            let label = format_number(s);
            let key_s = format!("omega_c_t_s[s={label}]");
            let key_c = format!("omega_c_t_c[s={label}]");
            let built = channel_for_config(config, &params).and_then(|ch| Ok((window(config, &params)?, ch)));
            match built {
                Ok((win, ch)) => {
                    let rows = variance_rows(n, &ch, &win, &[Value::Num(s)]);
                    let summary = vec![
                        scaled_time(&key_c, critical_time(InputFamily::Ghz, n, &ch, &win), params.omega_c),
                        scaled_time(&key_s, sudden_change_time(InputFamily::Ghz, n, &ch, &win), params.omega_c),
                    ];
                    (rows, summary, describe_warnings(&format!("s={label}"), &ch))
                }
                Err(e) => {
                    let mut row = vec![Value::Num(s)];
                    row.extend(std::iter::repeat_n(Value::Missing, 6));
                    row.push(status(&e));
                    (vec![row], vec![(key_c, status(&e)), (key_s, status(&e))], Vec::new())
                }
            }
        })
        .collect();
    for (rows, summary, warnings) in cells {
        out.rows.extend(rows);
        out.summary.extend(summary);
        out.warnings.extend(warnings);
    }
    finish(out)
}
