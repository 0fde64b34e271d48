//! Flat key-value experiment configs.
//!
//! Grammar: one `key = value` pair per line; blank lines and `#` comments are
//! ignored. Keys may not repeat. Unknown keys are rejected so typos cannot
//! silently fall back to defaults. List values are comma separated.

use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, &self.field) {
            (Some(line), Some(field)) => write!(f, "line {line}, field `{field}`: {}", self.message),
            (Some(line), None) => write!(f, "line {line}: {}", self.message),
            (None, Some(field)) => write!(f, "field `{field}`: {}", self.message),
            (None, None) => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn field_err(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line: None,
        field: Some(field.to_string()),
        message: message.into(),
    }
}

/// Parsed but untyped config: key -> (value, line number).
#[derive(Debug, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, (String, usize)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError {
                    line: Some(line_no),
                    field: None,
                    message: format!("expected `key = value`, got `{line}`"),
                });
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() {
                return Err(ConfigError {
                    line: Some(line_no),
                    field: None,
                    message: "empty key".into(),
                });
            }
            if let Some((_, first_line)) = entries.get(&key) {
                return Err(ConfigError {
                    line: Some(line_no),
                    field: Some(key.clone()),
                    message: format!("duplicate key (first defined on line {first_line})"),
                });
            }
            entries.insert(key, (value, line_no));
        }
        Ok(RawConfig { entries })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    /// Every key must be consumed by the experiment's allowed set.
    pub fn reject_unknown(&self, allowed: &[&str]) -> Result<(), ConfigError> {
        for (key, (_, line)) in &self.entries {
            if !allowed.contains(&key.as_str()) {
                return Err(ConfigError {
                    line: Some(*line),
                    field: Some(key.clone()),
                    message: format!("unknown key (allowed: {})", allowed.join(", ")),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Sample,
    BenchTable,
    KsExperiment,
    ScalingCurves,
    DriftCheck,
    MomentsCheck,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Sample => "sample",
            ExperimentKind::BenchTable => "bench-table",
            ExperimentKind::KsExperiment => "ks-experiment",
            ExperimentKind::ScalingCurves => "scaling-curves",
            ExperimentKind::DriftCheck => "drift-check",
            ExperimentKind::MomentsCheck => "moments-check",
        }
    }

    fn allowed_keys(&self) -> &'static [&'static str] {
        match self {
            ExperimentKind::Sample => {
                &["experiment", "seed", "component", "variance", "d", "kernel", "l", "c", "n_iter", "thin"]
            }
            ExperimentKind::BenchTable => {
                &["experiment", "seed", "component", "variance", "dims", "scalings", "n_iter"]
            }
            ExperimentKind::KsExperiment => &[
                "experiment", "seed", "component", "variance", "d", "l", "chains", "horizon", "x0",
                "coordinate",
            ],
            ExperimentKind::ScalingCurves => {
                &["experiment", "seed", "fisher_info", "grid_points"]
            }
            ExperimentKind::DriftCheck => &[
                "experiment", "seed", "component", "variance", "d", "kernel", "l", "c", "drift_s",
                "probe", "mc_size",
            ],
            ExperimentKind::MomentsCheck => &["experiment", "seed", "component", "variance", "mc_size"],
        }
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "sample" => Ok(ExperimentKind::Sample),
            "bench-table" => Ok(ExperimentKind::BenchTable),
            "ks-experiment" => Ok(ExperimentKind::KsExperiment),
            "scaling-curves" => Ok(ExperimentKind::ScalingCurves),
            "drift-check" => Ok(ExperimentKind::DriftCheck),
            "moments-check" => Ok(ExperimentKind::MomentsCheck),
            other => Err(field_err("experiment", format!("unknown experiment kind `{other}`"))),
        }
    }
}

/// Fully resolved, validated experiment parameters.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub component: String,
    pub variance: f64,
    pub d: usize,
    pub kernel: String,
    pub l: f64,
    pub c: Option<Vec<f64>>,
    pub n_iter: u64,
    pub thin: u64,
    pub chains: usize,
    pub horizon: u64,
    pub x0: f64,
    pub coordinate: usize,
    pub dims: Vec<usize>,
    pub scalings: Vec<f64>,
    pub fisher_info: f64,
    pub grid_points: usize,
    pub drift_s: f64,
    pub probe: f64,
    pub mc_size: usize,
}

fn parse_scalar<T: std::str::FromStr>(raw: &RawConfig, key: &str, default: T) -> Result<T, ConfigError> {
    match raw.get(key) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|_| field_err(key, format!("cannot parse `{v}`"))),
    }
}

fn parse_list<T: std::str::FromStr>(raw: &RawConfig, key: &str, default: Vec<T>) -> Result<Vec<T>, ConfigError> {
    match raw.get(key) {
        None => Ok(default),
        Some(v) => v
            .split(',')
            .map(|item| {
                item.trim()
                    .parse()
                    .map_err(|_| field_err(key, format!("cannot parse list item `{}`", item.trim())))
            })
            .collect(),
    }
}

fn positive(field: &str, value: f64) -> Result<f64, ConfigError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(field_err(field, format!("must be finite and > 0, got {value}")))
    }
}

impl ExperimentConfig {
    /// Parse and validate the text of a config file for the given experiment.
    /// `seed_override` comes from the CLI flag and wins over the config key.
    pub fn from_text(kind: ExperimentKind, text: &str, seed_override: Option<u64>) -> Result<Self, ConfigError> {
        let raw = RawConfig::parse(text)?;
        raw.reject_unknown(kind.allowed_keys())?;
        if let Some(declared) = raw.get("experiment") {
            let declared_kind: ExperimentKind = declared.parse()?;
            if declared_kind != kind {
                return Err(field_err(
                    "experiment",
                    format!("config declares `{declared}` but the `{}` subcommand was invoked", kind.as_str()),
                ));
            }
        }

        let seed = match (seed_override, raw.get("seed")) {
            (Some(s), _) => s,
            (None, Some(v)) => v.parse().map_err(|_| field_err("seed", format!("cannot parse `{v}`")))?,
            (None, None) => {
                return Err(field_err(
                    "seed",
                    "required (no silent nondeterminism); set it in the config or pass --seed",
                ))
            }
        };

        let component = parse_scalar(&raw, "component", "gaussian".to_string())?;
        if component != "gaussian" {
            return Err(field_err("component", format!("unsupported component `{component}`")));
        }
        let variance = positive("variance", parse_scalar(&raw, "variance", 1.0)?)?;

        let d: usize = parse_scalar(&raw, "d", 10)?;
        if d == 0 {
            return Err(field_err("d", "must satisfy d >= 1"));
        }

        let kernel: String = parse_scalar(&raw, "kernel", "atmcmc".to_string())?;
        if !["atmcmc", "rwmh", "atmcmc_scaled"].contains(&kernel.as_str()) {
            return Err(field_err("kernel", format!("unknown kernel `{kernel}`")));
        }
        let l = positive("l", parse_scalar(&raw, "l", 2.4)?)?;
        let c: Option<Vec<f64>> = match raw.get("c") {
            None => None,
            Some(_) => Some(parse_list(&raw, "c", Vec::new())?),
        };

        let n_iter: u64 = parse_scalar(&raw, "n_iter", 100_000)?;
        if n_iter == 0 {
            return Err(field_err("n_iter", "must be >= 1"));
        }
        let thin: u64 = parse_scalar(&raw, "thin", 1)?;
        if thin == 0 {
            return Err(field_err("thin", "must be >= 1"));
        }

        let chains: usize = parse_scalar(&raw, "chains", 500)?;
        if kind == ExperimentKind::KsExperiment && chains < 2 {
            return Err(field_err("chains", "need at least 2 chains"));
        }
        let horizon: u64 = parse_scalar(&raw, "horizon", 5000)?;
        if horizon == 0 {
            return Err(field_err("horizon", "must be >= 1"));
        }
        let x0 = parse_scalar(&raw, "x0", 3.0)?;
        let coordinate: usize = parse_scalar(&raw, "coordinate", 0)?;
        if coordinate >= d {
            return Err(field_err("coordinate", format!("index {coordinate} out of range for d = {d}")));
        }

        let dims: Vec<usize> = parse_list(&raw, "dims", vec![2, 5, 10, 100, 200])?;
        if dims.iter().any(|&dd| dd == 0) {
            return Err(field_err("dims", "all dimensions must be >= 1"));
        }
        let scalings: Vec<f64> = parse_list(&raw, "scalings", vec![2.4, 6.0, 10.0])?;
        for &s in &scalings {
            positive("scalings", s)?;
        }

        let fisher_info = positive("fisher_info", parse_scalar(&raw, "fisher_info", 1.0)?)?;
        let grid_points: usize = parse_scalar(&raw, "grid_points", 200)?;
        if grid_points < 2 {
            return Err(field_err("grid_points", "need at least 2 grid points"));
        }

        let drift_s = parse_scalar(&raw, "drift_s", 0.5)?;
        if !(drift_s > 0.0 && drift_s <= 1.0) {
            return Err(field_err("drift_s", format!("must be in (0, 1], got {drift_s}")));
        }
        let probe: f64 = parse_scalar(&raw, "probe", 10.0)?;
        if !probe.is_finite() {
            return Err(field_err("probe", "must be finite"));
        }
        let mc_size: usize = parse_scalar(&raw, "mc_size", 100_000)?;
        if mc_size < 1000 {
            return Err(field_err("mc_size", "must be >= 1000"));
        }

        Ok(ExperimentConfig {
            kind,
            seed,
            component,
            variance,
            d,
            kernel,
            l,
            c,
            n_iter,
            thin,
            chains,
            horizon,
            x0,
            coordinate,
            dims,
            scalings,
            fisher_info,
            grid_points,
            drift_s,
            probe,
            mc_size,
        })
    }
}
