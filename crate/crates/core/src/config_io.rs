//! Experiment configuration files and result tables.
//!
//! Config files are `key = value` lines, optionally grouped under
//! `[section]` headers; `#` and `;` start comments. Sections only group keys,
//! each key may appear once per file. Missing keys take the default
//! refrigerator parameters; unknown keys are rejected.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::channels::max_delay_ms;
use crate::otto::CycleConfig;

/// Environment variable naming the default config path.
pub const CONFIG_ENV: &str = "MPEMBA_CONFIG";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {col}: {message}")]
    Parse { line: usize, col: usize, message: String },
    #[error("invalid value for `{key}`: {constraint}")]
    Validation { key: String, constraint: String },
    #[error("unknown key `{key}` at line {line}")]
    UnknownKey { key: String, line: usize },
    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for ConfigError {
    fn from(e: std::io::Error) -> Self {
        ConfigError::Io(e.to_string())
    }
}

/// Every tunable of a run, in the units used by the config file.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub nu0_khz: f64,
    pub nu1_khz: f64,
    pub j_hz: f64,
    pub t_hot_khz: f64,
    pub t_cold_khz: f64,
    /// Ramp duration, also used for compression.
    pub tau1_us: f64,
    pub tau_bar_ms: f64,
    /// Populations on `(|x₊⟩, |x₋⟩)` of the initial cooling state.
    pub populations: (f64, f64),
    pub theta_steps: usize,
    pub tau_steps: usize,
    pub epsilon_equilibrium_khz: f64,
    pub use_mpemba: bool,
    /// Significant digits in written tables.
    pub output_precision: usize,
    pub mpemba_duration_us: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            nu0_khz: 1.0,
            nu1_khz: 2.0,
            j_hz: 215.1,
            t_hot_khz: 4.77,
            t_cold_khz: 2.38,
            tau1_us: 100.0,
            tau_bar_ms: 4.65,
            populations: (0.3, 0.7),
            theta_steps: 73,
            tau_steps: 64,
            epsilon_equilibrium_khz: 0.01,
            use_mpemba: true,
            output_precision: 12,
            mpemba_duration_us: 0.0,
        }
    }
}

const SECTIONS: &[(&str, &[&str])] = &[
    (
        "cycle",
        &[
            "nu0_khz",
            "nu1_khz",
            "j_hz",
            "t_hot_khz",
            "t_cold_khz",
            "tau1_us",
            "tau_bar_ms",
            "use_mpemba",
            "mpemba_duration_us",
        ],
    ),
    ("state", &["populations"]),
    ("grid", &["theta_steps", "tau_steps", "epsilon_equilibrium_khz"]),
    ("output", &["output_precision"]),
];

fn known_key(key: &str) -> bool {
    SECTIONS.iter().any(|(_, keys)| keys.contains(&key))
}

impl ExperimentConfig {
    pub fn cycle_config(&self) -> CycleConfig<f64> {
        CycleConfig {
            nu0: self.nu0_khz,
            nu1: self.nu1_khz,
            j_coupling: self.j_hz,
            t_hot: self.t_hot_khz,
            t_cold: self.t_cold_khz,
            tau1: self.tau1_us / 1000.0,
            tau3: self.tau1_us / 1000.0,
            tau4: max_delay_ms(self.j_hz),
            tau_bar: self.tau_bar_ms,
            use_mpemba: self.use_mpemba,
            mpemba_duration: self.mpemba_duration_us / 1000.0,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        fn fail(key: &str, constraint: &str) -> Result<(), ConfigError> {
            Err(ConfigError::Validation {
                key: key.into(),
                constraint: constraint.into(),
            })
        }
        let positive = [
            ("nu0_khz", self.nu0_khz),
            ("nu1_khz", self.nu1_khz),
            ("j_hz", self.j_hz),
            ("t_hot_khz", self.t_hot_khz),
            ("t_cold_khz", self.t_cold_khz),
            ("tau1_us", self.tau1_us),
            ("tau_bar_ms", self.tau_bar_ms),
            ("epsilon_equilibrium_khz", self.epsilon_equilibrium_khz),
        ];
        for (key, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return fail(key, "must be a finite positive number");
            }
        }
        if self.nu1_khz <= self.nu0_khz {
            return fail("nu1_khz", "must exceed nu0_khz");
        }
        if !(self.mpemba_duration_us.is_finite() && self.mpemba_duration_us >= 0.0) {
            return fail("mpemba_duration_us", "must be finite and non-negative");
        }
        let (a, b) = self.populations;
        if !(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0) {
            return fail("populations", "each population must lie in (0, 1)");
        }
        if (a + b - 1.0).abs() > 1e-12 {
            return fail("populations", "must sum to 1 within 1e-12");
        }
        if self.theta_steps < 2 {
            return fail("theta_steps", "must be at least 2");
        }
        if self.tau_steps < 2 {
            return fail("tau_steps", "must be at least 2");
        }
        if !(1..=17).contains(&self.output_precision) {
            return fail("output_precision", "must be between 1 and 17");
        }
        Ok(())
    }

    /// Config file text that parses back to `self`.
    pub fn to_config_string(&self) -> String {
        let values: Vec<(&str, String)> = vec![
            ("nu0_khz", self.nu0_khz.to_string()),
            ("nu1_khz", self.nu1_khz.to_string()),
            ("j_hz", self.j_hz.to_string()),
            ("t_hot_khz", self.t_hot_khz.to_string()),
            ("t_cold_khz", self.t_cold_khz.to_string()),
            ("tau1_us", self.tau1_us.to_string()),
            ("tau_bar_ms", self.tau_bar_ms.to_string()),
            ("use_mpemba", self.use_mpemba.to_string()),
            ("mpemba_duration_us", self.mpemba_duration_us.to_string()),
            ("populations", format!("{}, {}", self.populations.0, self.populations.1)),
            ("theta_steps", self.theta_steps.to_string()),
            ("tau_steps", self.tau_steps.to_string()),
            ("epsilon_equilibrium_khz", self.epsilon_equilibrium_khz.to_string()),
            ("output_precision", self.output_precision.to_string()),
        ];
        let mut s = String::new();
        for (section, keys) in SECTIONS {
            let _ = writeln!(s, "[{section}]");
            for key in keys.iter() {
                if let Some((_, v)) = values.iter().find(|(k, _)| k == key) {
                    let _ = writeln!(s, "{key} = {v}");
                }
            }
        }
        s
    }
}

/// Parses config text without range validation.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = ExperimentConfig::default();
    let mut seen: Vec<String> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = match raw.find(['#', ';']) {
            Some(i) => &raw[..i],
            None => raw,
        };
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        let col = indent + 1;
        if let Some(rest) = trimmed.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| ConfigError::Parse {
                line: line_no,
                col,
                message: "unterminated section header".into(),
            })?;
            let name = name.trim();
            if !SECTIONS.iter().any(|(s, _)| *s == name) {
                return Err(ConfigError::Parse {
                    line: line_no,
                    col: col + 1,
                    message: format!("unknown section `{name}`"),
                });
            }
            continue;
        }
        let eq = content.find('=').ok_or_else(|| ConfigError::Parse {
            line: line_no,
            col: content.len() + 1,
            message: "expected `key = value`".into(),
        })?;
        let key = content[..eq].trim();
        let value = content[eq + 1..].trim();
        let value_col = eq + 2 + (content[eq + 1..].len() - content[eq + 1..].trim_start().len());
        if key.is_empty() {
            return Err(ConfigError::Parse {
                line: line_no,
                col,
                message: "missing key".into(),
            });
        }
        if !known_key(key) {
            return Err(ConfigError::UnknownKey {
                key: key.into(),
                line: line_no,
            });
        }
        if seen.iter().any(|k| k == key) {
            return Err(ConfigError::Parse {
                line: line_no,
                col,
                message: format!("duplicate key `{key}`"),
            });
        }
        seen.push(key.to_string());
        let perr = |message: String| ConfigError::Parse {
            line: line_no,
            col: value_col,
            message,
        };
        let float = |v: &str| -> Result<f64, ConfigError> {
            v.parse::<f64>().map_err(|_| perr(format!("`{v}` is not a number")))
        };
        let int = |v: &str| -> Result<usize, ConfigError> {
            v.parse::<usize>()
                .map_err(|_| perr(format!("`{v}` is not a non-negative integer")))
        };
        match key {
            "nu0_khz" => cfg.nu0_khz = float(value)?,
            "nu1_khz" => cfg.nu1_khz = float(value)?,
            "j_hz" => cfg.j_hz = float(value)?,
            "t_hot_khz" => cfg.t_hot_khz = float(value)?,
            "t_cold_khz" => cfg.t_cold_khz = float(value)?,
            "tau1_us" => cfg.tau1_us = float(value)?,
            "tau_bar_ms" => cfg.tau_bar_ms = float(value)?,
            "mpemba_duration_us" => cfg.mpemba_duration_us = float(value)?,
            "epsilon_equilibrium_khz" => cfg.epsilon_equilibrium_khz = float(value)?,
            "theta_steps" => cfg.theta_steps = int(value)?,
            "tau_steps" => cfg.tau_steps = int(value)?,
            "output_precision" => cfg.output_precision = int(value)?,
            "use_mpemba" => {
                cfg.use_mpemba = match value {
                    "true" | "yes" | "1" => true,
                    "false" | "no" | "0" => false,
                    _ => return Err(perr(format!("`{value}` is not a boolean"))),
                }
            }
            "populations" => cfg.populations = parse_pair(value).map_err(perr)?,
            _ => unreachable!("key list and match arms disagree"),
        }
    }
    Ok(cfg)
}

/// `"a, b"` as two floats.
pub fn parse_pair(value: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => {
            let a = a.parse::<f64>().map_err(|_| format!("`{a}` is not a number"))?;
            let b = b.parse::<f64>().map_err(|_| format!("`{b}` is not a number"))?;
            Ok((a, b))
        }
        _ => Err(format!("expected two comma-separated numbers, got `{value}`")),
    }
}

/// Reads and parses a config file without range validation.
pub fn load_config_unvalidated(path: impl AsRef<Path>) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig, ConfigError> {
    let cfg = load_config_unvalidated(path)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn write_config(cfg: &ExperimentConfig, path: impl AsRef<Path>) -> Result<(), ConfigError> {
    write_atomic(path.as_ref(), cfg.to_config_string().as_bytes())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

/// `x` rounded to `digits` significant digits.
pub fn round_significant(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    let digits = digits.clamp(1, 17);
    format!("{:.*e}", digits - 1, x).parse().unwrap_or(x)
}

/// Shortest decimal that round-trips the value rounded to `digits`.
pub fn format_number(x: f64, digits: usize) -> String {
    let r = round_significant(x, digits);
    if r == 0.0 {
        // drop the sign of negative zero
        return "0".into();
    }
    r.to_string()
}

fn cell_text(c: &Cell, digits: usize) -> String {
    match c {
        Cell::Num(x) => format_number(*x, digits),
        Cell::Int(i) => i.to_string(),
        Cell::Text(s) => s.clone(),
        Cell::Bool(b) => b.to_string(),
    }
}

fn cell_json(c: &Cell, digits: usize) -> serde_json::Value {
    match c {
        Cell::Num(x) => {
            let r = round_significant(*x, digits);
            let r = if r == 0.0 { 0.0 } else { r };
            serde_json::Number::from_f64(r).map_or(serde_json::Value::Null, serde_json::Value::Number)
        }
        Cell::Int(i) => serde_json::Value::from(*i),
        Cell::Text(s) => serde_json::Value::from(s.as_str()),
        Cell::Bool(b) => serde_json::Value::from(*b),
    }
}

/// Writes `rows` under the column names in `schema`, atomically.
pub fn write_table(
    rows: &[Vec<Cell>],
    schema: &[&str],
    path: impl AsRef<Path>,
    format: TableFormat,
    precision: usize,
) -> Result<(), ConfigError> {
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != schema.len()) {
        return Err(ConfigError::Validation {
            key: format!("row {i}"),
            constraint: format!("has {} cells for {} columns", r.len(), schema.len()),
        });
    }
    let bytes = match format {
        TableFormat::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            let io = |e: csv::Error| ConfigError::Io(e.to_string());
            w.write_record(schema).map_err(io)?;
            for r in rows {
                w.write_record(r.iter().map(|c| cell_text(c, precision))).map_err(io)?;
            }
            w.into_inner().map_err(|e| ConfigError::Io(e.to_string()))?
        }
        TableFormat::Json => {
            let arr: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    let obj: serde_json::Map<String, serde_json::Value> = schema
                        .iter()
                        .zip(r)
                        .map(|(k, c)| (k.to_string(), cell_json(c, precision)))
                        .collect();
                    serde_json::Value::Object(obj)
                })
                .collect();
            let mut out = serde_json::to_vec_pretty(&arr).map_err(|e| ConfigError::Io(e.to_string()))?;
            out.push(b'\n');
            out
        }
    };
    write_atomic(path.as_ref(), &bytes)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), ConfigError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| ConfigError::Io(e.error.to_string()))?;
    Ok(())
}
