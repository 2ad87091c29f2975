//! Experiment configuration.
//!
//! A config file is a list of `key=value` lines with section prefixes
//! (`bath.s=3`). Blank lines and `#` comments are ignored. Sweep keys take
//! either a comma-separated list (`2.6,3.0,3.4`) or an inclusive range
//! `start:stop:step` (`0.5:4:0.1`). Times are given as ω_c·t.
//!
//! Resolution order: command defaults, then the file, then CLI flags.

use std::fmt;
use std::path::PathBuf;

use spinboson_core::BathParams;

/// Smallest accepted number of grid intervals.
pub const MIN_GRID_POINTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Command {
    FlowMap,
    Crossover,
    PhaseVariance,
    Scaling,
    SuddenChange,
}

impl Command {
    pub const ALL: [Command; 5] = [Command::FlowMap, Command::Crossover, Command::PhaseVariance, Command::Scaling, Command::SuddenChange];

    pub fn as_str(&self) -> &'static str {
        match self {
            Command::FlowMap => "flow-map",
            Command::Crossover => "crossover",
            Command::PhaseVariance => "phase-variance",
            Command::Scaling => "scaling",
            Command::SuddenChange => "sudden-change",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        match text.trim() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(ConfigError::new(format!("unknown output format `{other}` (expected csv or json)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub message: String,
}

impl ConfigError {
    pub fn new(message: impl Into<String>) -> Self {
        ConfigError { message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for ConfigError {}

/// A list of sweep values together with the text it was parsed from, so the
/// header can echo exactly what was asked for.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub text: String,
    pub values: Vec<f64>,
}

impl Sweep {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let text = text.trim();
        let bad = |what: &str| ConfigError::new(format!("invalid sweep `{text}`: {what}"));
        let number = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
        let mut values = if text.contains(':') {
            let parts: Vec<&str> = text.split(':').collect();
            if parts.len() != 3 {
                return Err(bad("a range is start:stop:step"));
            }
            let (start, stop, step) = (number(parts[0])?, number(parts[1])?, number(parts[2])?);
            if !(step > 0.0 && step.is_finite() && start.is_finite() && stop.is_finite()) {
                return Err(bad("step must be positive and bounds finite"));
            }
            if stop < start {
                return Err(bad("range is empty"));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            if count > 1_000_000 {
                return Err(bad("range has too many points"));
            }
            (0..count).map(|i| round12(start + i as f64 * step)).collect()
        } else {
            text.split(',').map(number).collect::<Result<Vec<_>, _>>()?
        };
        if values.is_empty() {
            return Err(bad("no values"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(bad("values must be finite"));
        }
        values.sort_by(f64::total_cmp);
        values.dedup();
        Ok(Sweep { text: text.to_string(), values })
    }

    pub fn single(value: f64) -> Self {
        Sweep { text: format_number(value), values: vec![value] }
    }

    fn as_counts(&self, key: &str) -> Result<Vec<usize>, ConfigError> {
        self.values
            .iter()
            .map(|&v| {
                if v >= 1.0 && v.fract() == 0.0 && v < 1e6 {
                    Ok(v as usize)
                } else {
                    Err(ConfigError::new(format!("{key}: `{v}` is not a positive integer")))
                }
            })
            .collect()
    }
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Shortest text for a value rounded to 12 significant digits.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let r = round12(x);
    let a = r.abs();
    if r == 0.0 || (1e-4..1e12).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub bath: BathParams,
    pub n_qubits: usize,
    /// Analysis window, ω_c·t.
    pub window_start: f64,
    pub window_end: f64,
    /// Number of grid intervals over [0, window_end].
    pub grid_points: usize,
    pub s_sweep: Sweep,
    pub n_sweep: Sweep,
    pub temperature_sweep: Sweep,
    /// Sample times of the flow map, ω_c·t.
    pub t_sweep: Sweep,
    /// Bracket and resolution of the s_c bisection. The bracket starts at the
    /// Ohmic point: sub-Ohmic baths at stronger coupling show a separate late
    /// backflow near the window end.
    pub scan_min: f64,
    pub scan_max: f64,
    pub scan_resolution: f64,
    pub output_dir: PathBuf,
    pub format: Format,
    pub workers: usize,
}

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "SPINBOSON_OUT_DIR";

fn sweep(text: &str) -> Sweep {
    Sweep::parse(text).expect("built-in sweep")
}

impl ExperimentConfig {
    /// Built-in defaults of a command. The metrology commands use α = 0.5 and
    /// the crossover diagram uses the window ω_c t ∈ [0, 10].
    pub fn defaults(command: Command) -> Self {
        let bath = BathParams::default();
        let metrology = matches!(command, Command::PhaseVariance | Command::Scaling | Command::SuddenChange);
        let window_end = if command == Command::Crossover { 10.0 } else { 20.0 };
        ExperimentConfig {
            command,
            bath: if metrology { bath.with_alpha(0.5) } else { bath },
            n_qubits: 5,
            window_start: 0.0,
            window_end,
            grid_points: 2000,
            s_sweep: match command {
                Command::SuddenChange => sweep("2.6,3.0,3.4"),
                Command::FlowMap | Command::Crossover => sweep("0.5:4:0.1"),
                _ => Sweep::single(bath.s),
            },
            n_sweep: if command == Command::Scaling { sweep("2:8:1") } else { Sweep::single(5.0) },
            temperature_sweep: Sweep::single(bath.temperature),
            t_sweep: if command == Command::FlowMap { sweep("0:20:0.1") } else { Sweep::single(0.0) },
            scan_min: 1.0,
            scan_max: 4.0,
            scan_resolution: 1e-3,
            output_dir: std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(".")),
            format: Format::Csv,
            workers: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        }
    }

    /// Applies a config file body on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::new(format!("line {}: expected key=value", lineno + 1)))?;
            self.set(key.trim(), value.trim()).map_err(|e| ConfigError::new(format!("line {}: {}", lineno + 1, e.message)))?;
        }
        Ok(())
    }

    /// Sets one key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let float = || value.parse::<f64>().map_err(|_| ConfigError::new(format!("{key}: `{value}` is not a number")));
        let count = || value.parse::<usize>().map_err(|_| ConfigError::new(format!("{key}: `{value}` is not a non-negative integer")));
        match key {
            "bath.s" => self.bath.s = float()?,
            "bath.omega_c" => self.bath.omega_c = float()?,
            "bath.omega_0" => self.bath.omega_0 = float()?,
            "bath.temperature" => self.bath.temperature = float()?,
            "bath.alpha" => self.bath.alpha = float()?,
            "system.n_qubits" => self.n_qubits = count()?,
            "window.start" => self.window_start = float()?,
            "window.end" => self.window_end = float()?,
            "grid.points" => self.grid_points = count()?,
            "sweep.s" => self.s_sweep = Sweep::parse(value)?,
            "sweep.n" => self.n_sweep = Sweep::parse(value)?,
            "sweep.temperature" => self.temperature_sweep = Sweep::parse(value)?,
            "sweep.t" => self.t_sweep = Sweep::parse(value)?,
            "crossover.s_min" => self.scan_min = float()?,
            "crossover.s_max" => self.scan_max = float()?,
            "crossover.resolution" => self.scan_resolution = float()?,
            "output.dir" => self.output_dir = PathBuf::from(value),
            "output.format" => self.format = Format::parse(value)?,
            "run.workers" => self.workers = count()?,
            _ => return Err(ConfigError::new(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// A single-valued sweep also sets the matching scalar.
    pub fn override_s(&mut self, text: &str) -> Result<(), ConfigError> {
        self.s_sweep = Sweep::parse(text)?;
        if let [s] = self.s_sweep.values[..] {
            self.bath.s = s;
        }
        Ok(())
    }

    pub fn override_n(&mut self, text: &str) -> Result<(), ConfigError> {
        self.n_sweep = Sweep::parse(text)?;
        let counts = self.n_sweep.as_counts("--n-qubits")?;
        if let [n] = counts[..] {
            self.n_qubits = n;
        }
        Ok(())
    }

    pub fn override_temperature(&mut self, text: &str) -> Result<(), ConfigError> {
        self.temperature_sweep = Sweep::parse(text)?;
        if let [t] = self.temperature_sweep.values[..] {
            self.bath.temperature = t;
        }
        Ok(())
    }

    pub fn n_values(&self) -> Result<Vec<usize>, ConfigError> {
        self.n_sweep.as_counts("sweep.n")
    }

    /// End of the channel table in units of 1/ω₀.
    pub fn t_max(&self) -> f64 {
        self.window_end / self.bath.omega_c
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let err = |m: String| Err(ConfigError::new(m));
        if let Err(e) = self.bath.validate() {
            return err(format!("bath: {e}"));
        }
        if self.grid_points < MIN_GRID_POINTS {
            return err(format!("grid.points must be at least {MIN_GRID_POINTS} (got {})", self.grid_points));
        }
        if !(self.window_start >= 0.0 && self.window_end > self.window_start && self.window_end.is_finite()) {
            return err(format!("window must satisfy 0 <= start < end (got {} to {})", self.window_start, self.window_end));
        }
        if self.n_qubits == 0 {
            return err("system.n_qubits must be positive".into());
        }
        self.n_values()?;
        if self.s_sweep.values.iter().any(|s| *s <= 0.0) {
            return err("sweep.s values must be positive".into());
        }
        if self.temperature_sweep.values.iter().any(|t| *t < 0.0) {
            return err("sweep.temperature values must be non-negative".into());
        }
        if self.command == Command::FlowMap && self.t_sweep.values.iter().any(|t| *t < 0.0 || *t > self.window_end) {
            return err(format!("sweep.t values must lie in [0, {}]", self.window_end));
        }
        if !(self.scan_min > 0.0 && self.scan_max > self.scan_min && self.scan_resolution > 0.0) {
            return err("crossover scan needs 0 < s_min < s_max and a positive resolution".into());
        }
        if self.workers == 0 {
            return err("run.workers must be positive".into());
        }
        Ok(())
    }

    /// Every key that affects results, in config-file syntax. Output
    /// location and worker count are left out because they do not change
    /// any number.
    pub fn resolved_lines(&self) -> Vec<(String, String)> {
        let f = format_number;
        [
            ("bath.s", f(self.bath.s)),
            ("bath.omega_c", f(self.bath.omega_c)),
            ("bath.omega_0", f(self.bath.omega_0)),
            ("bath.temperature", f(self.bath.temperature)),
            ("bath.alpha", f(self.bath.alpha)),
            ("system.n_qubits", self.n_qubits.to_string()),
            ("window.start", f(self.window_start)),
            ("window.end", f(self.window_end)),
            ("grid.points", self.grid_points.to_string()),
            ("sweep.s", self.s_sweep.text.clone()),
            ("sweep.n", self.n_sweep.text.clone()),
            ("sweep.temperature", self.temperature_sweep.text.clone()),
            ("sweep.t", self.t_sweep.text.clone()),
            ("crossover.s_min", f(self.scan_min)),
            ("crossover.s_max", f(self.scan_max)),
            ("crossover.resolution", f(self.scan_resolution)),
            ("output.format", self.format.extension().to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_are_inclusive_and_clean() {
        let s = Sweep::parse("0.5:4:0.1").unwrap();
        assert_eq!(s.values.len(), 36);
        assert_eq!(s.values[2], 0.7);
        assert_eq!(*s.values.last().unwrap(), 4.0);
        assert_eq!(Sweep::parse("3.4, 2.6,3.0").unwrap().values, vec![2.6, 3.0, 3.4]);
    }

    #[test]
    fn bad_sweeps_rejected() {
        for text in ["", "1:0:0.1", "0:1:0", "a,b", "1:2"] {
            assert!(Sweep::parse(text).is_err(), "{text}");
        }
    }

    #[test]
    fn file_then_validate() {
        let mut c = ExperimentConfig::defaults(Command::Scaling);
        c.apply_text("# comment\nbath.s = 2.5\n\nsweep.n=2,4\ngrid.points=400\n").unwrap();
        assert_eq!(c.bath.s, 2.5);
        assert_eq!(c.n_values().unwrap(), vec![2, 4]);
        c.validate().unwrap();
        assert!(c.apply_text("bath.x=1").unwrap_err().message.contains("line 1"));
    }

    #[test]
    fn invariants_enforced() {
        let mut c = ExperimentConfig::defaults(Command::FlowMap);
        c.grid_points = 99;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::defaults(Command::FlowMap);
        c.set("sweep.t", "0:30:1").unwrap();
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::defaults(Command::Scaling);
        c.set("sweep.n", "2.5").unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn header_round_trips() {
        let mut c = ExperimentConfig::defaults(Command::Crossover);
        c.override_temperature("0,0.01").unwrap();
        let text: String = c.resolved_lines().iter().map(|(k, v)| format!("{k}={v}\n")).collect();
        let mut d = ExperimentConfig::defaults(Command::Crossover);
        d.apply_text(&text).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn numbers_print_with_twelve_digits() {
        assert_eq!(format_number(0.1 + 0.2), "0.3");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(2.5e-7), "2.5e-7");
        assert_eq!(format_number(0.0), "0");
    }
}
