//! Scenario files: one `key = value` pair per line, dotted keys, `#` comments.
//!
//! ```text
//! # perturbed sphere
//! initial.kind = fourier
//! initial.coefficients = 2:0.1, 4:-0.02
//! grid.n = 128
//! flow.t_end = 3
//! flow.output_times = 0, 0.5, 1, 2, 3
//! output.dir = runs/fourier
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::FlowParams;
use crate::metric::{AxisymMetric, ColatitudeGrid, MIN_INTERVALS};
use crate::rosenau::RosenauState;

/// Largest admissible `max |u₀|` of an initial metric.
pub const MAX_INITIAL_U: f64 = 2.0;

/// Snapshot count used when `flow.output_times` is absent.
pub const DEFAULT_OUTPUT_INTERVALS: usize = 10;

const KEYS: &[&str] = &[
    "initial.kind",
    "initial.s",
    "initial.coefficients",
    "grid.n",
    "flow.t_end",
    "flow.safety",
    "flow.output_times",
    "flow.renormalize",
    "comparison.enabled",
    "profile.xi_samples",
    "output.dir",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InitialData {
    Round,
    /// Rosenau solution at time `s`.
    Rosenau {
        s: f64,
    },
    /// `u₀ = Σ a_k cos(kψ)` with even `k`, normalized to area `4π`.
    Fourier {
        coefficients: Vec<(u32, f64)>,
    },
}

impl fmt::Display for InitialData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialData::Round => write!(f, "round"),
            InitialData::Rosenau { s } => write!(f, "rosenau(s = {s})"),
            InitialData::Fourier { coefficients } => {
                write!(f, "fourier{{")?;
                for (i, (k, a)) in coefficients.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "({k}, {a})")?;
                }
                write!(f, "}}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub initial: InitialData,
    pub grid_n: usize,
    pub t_end: f64,
    pub safety: f64,
    /// Explicit snapshot times; `None` means evenly spaced.
    pub output_times: Option<Vec<f64>>,
    pub renormalize: bool,
    pub comparison_enabled: bool,
    /// Number of area fractions in the snapshot profile files.
    pub xi_samples: usize,
    pub output_dir: PathBuf,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            initial: InitialData::Round,
            grid_n: 128,
            t_end: 1.0,
            safety: 0.5,
            output_times: None,
            renormalize: true,
            comparison_enabled: true,
            xi_samples: 99,
            output_dir: PathBuf::from("out"),
        }
    }
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Parses and validates a scenario file.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(
                    format!("line {}", lineno + 1),
                    format!("expected `key = value`, got `{line}`"),
                )
            })?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(Error::config(key, "unknown key"));
            }
            if entries.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(Error::config(key, "given more than once"));
            }
        }

        let mut cfg = ScenarioConfig::default();
        let get = |k: &str| entries.get(k).map(String::as_str);
        if let Some(v) = get("grid.n") {
            cfg.grid_n = parse_num(v, "grid.n")?;
        }
        if let Some(v) = get("flow.t_end") {
            cfg.t_end = parse_num(v, "flow.t_end")?;
        }
        if let Some(v) = get("flow.safety") {
            cfg.safety = parse_num(v, "flow.safety")?;
        }
        if let Some(v) = get("flow.output_times") {
            cfg.output_times = Some(parse_list(v, "flow.output_times")?);
        }
        if let Some(v) = get("flow.renormalize") {
            cfg.renormalize = parse_bool(v, "flow.renormalize")?;
        }
        if let Some(v) = get("comparison.enabled") {
            cfg.comparison_enabled = parse_bool(v, "comparison.enabled")?;
        }
        if let Some(v) = get("profile.xi_samples") {
            cfg.xi_samples = parse_num(v, "profile.xi_samples")?;
        }
        if let Some(v) = get("output.dir") {
            cfg.output_dir = PathBuf::from(v);
        }
        cfg.initial = match get("initial.kind").unwrap_or("round") {
            "round" => InitialData::Round,
            "rosenau" => InitialData::Rosenau {
                s: get("initial.s").map_or(Ok(0.0), |v| parse_num(v, "initial.s"))?,
            },
            "fourier" => {
                let v = get("initial.coefficients")
                    .ok_or_else(|| Error::config("initial.coefficients", "required for initial.kind = fourier"))?;
                InitialData::Fourier {
                    coefficients: parse_modes(v)?,
                }
            }
            other => {
                return Err(Error::config(
                    "initial.kind",
                    format!("`{other}` is not one of round, rosenau, fourier"),
                ))
            }
        };
        let kind_only = |key: &str, kind: &str| -> Result<()> {
            if get(key).is_some() && get("initial.kind") != Some(kind) {
                Err(Error::config(key, format!("only valid with initial.kind = {kind}")))
            } else {
                Ok(())
            }
        };
        kind_only("initial.s", "rosenau")?;
        kind_only("initial.coefficients", "fourier")?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks the invariants that do not need the grid.
    pub fn validate(&self) -> Result<()> {
        if self.grid_n < MIN_INTERVALS || self.grid_n % 2 != 0 {
            return Err(Error::config(
                "grid.n",
                format!("{} must be even and at least {MIN_INTERVALS}", self.grid_n),
            ));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::config(
                "flow.t_end",
                format!("{} must be finite and >= 0", self.t_end),
            ));
        }
        if !(self.safety > 0.0 && self.safety <= 1.0) {
            return Err(Error::config("flow.safety", format!("{} outside (0, 1]", self.safety)));
        }
        if let Some(times) = &self.output_times {
            if times.is_empty() {
                return Err(Error::config("flow.output_times", "empty list"));
            }
            if times.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::config("flow.output_times", "must be strictly increasing"));
            }
            if let Some(t) = times.iter().find(|t| !(**t >= 0.0 && **t <= self.t_end)) {
                return Err(Error::config(
                    "flow.output_times",
                    format!("{t} outside [0, {}]", self.t_end),
                ));
            }
        }
        if self.xi_samples == 0 {
            return Err(Error::config("profile.xi_samples", "must be positive"));
        }
        match &self.initial {
            InitialData::Rosenau { s } if !s.is_finite() => {
                Err(Error::config("initial.s", format!("{s} is not finite")))
            }
            InitialData::Fourier { coefficients } => {
                if let Some((k, _)) = coefficients.iter().find(|(k, _)| k % 2 != 0) {
                    return Err(Error::config("initial.coefficients", format!("mode {k} is odd")));
                }
                if let Some((_, a)) = coefficients.iter().find(|(_, a)| !a.is_finite()) {
                    return Err(Error::config(
                        "initial.coefficients",
                        format!("amplitude {a} is not finite"),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Normalized initial metric on a grid of `n` intervals.
    pub fn initial_metric(&self, n: usize) -> Result<AxisymMetric> {
        let grid = ColatitudeGrid::new(n).map_err(|e| Error::config("grid.n", e.to_string()))?;
        let (field, m) = match &self.initial {
            InitialData::Round => ("initial.kind", AxisymMetric::round(grid)),
            InitialData::Rosenau { s } => ("initial.s", RosenauState::at_time(*s).as_axisym(grid)?),
            InitialData::Fourier { coefficients } => {
                ("initial.coefficients", AxisymMetric::fourier(grid, coefficients)?)
            }
        };
        let max_u = m.max_abs_u();
        if !(max_u <= MAX_INITIAL_U) {
            return Err(Error::config(
                field,
                format!("max |u0| = {max_u} exceeds {MAX_INITIAL_U}"),
            ));
        }
        Ok(m.normalize())
    }

    pub fn flow_params(&self) -> FlowParams {
        let mut p = match &self.output_times {
            Some(times) => FlowParams::new(self.t_end, times.clone()),
            None => FlowParams::uniform(self.t_end, DEFAULT_OUTPUT_INTERVALS),
        };
        if self.t_end == 0.0 {
            p.output_times = vec![0.0];
        }
        p.safety = self.safety;
        p.renormalize_each_step = self.renormalize;
        p
    }

    /// Area fractions `i/(N+1)`, `i = 1..=N`, for the snapshot profile files.
    pub fn profile_xi(&self) -> Vec<f64> {
        let n = self.xi_samples;
        (1..=n).map(|i| i as f64 / (n + 1) as f64).collect()
    }
}

fn parse_num<T: std::str::FromStr>(v: &str, field: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    v.parse::<T>().map_err(|e| Error::config(field, format!("`{v}`: {e}")))
}

fn parse_bool(v: &str, field: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::config(field, format!("`{v}` is not a boolean"))),
    }
}

fn parse_list(v: &str, field: &str) -> Result<Vec<f64>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_num(s, field))
        .collect()
}

/// `mode:amplitude` pairs separated by commas.
fn parse_modes(v: &str) -> Result<Vec<(u32, f64)>> {
    const FIELD: &str = "initial.coefficients";
    let modes: Vec<(u32, f64)> = v
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|pair| {
            let (k, a) = pair
                .split_once(':')
                .ok_or_else(|| Error::config(FIELD, format!("`{pair}` is not `mode:amplitude`")))?;
            Ok((parse_num(k.trim(), FIELD)?, parse_num(a.trim(), FIELD)?))
        })
        .collect::<Result<_>>()?;
    if modes.is_empty() {
        return Err(Error::config(FIELD, "no modes given"));
    }
    Ok(modes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_scenario() {
        let cfg = ScenarioConfig::parse(
            "# comment\ninitial.kind = fourier\ninitial.coefficients = 2:0.1, 4:-0.02 # trailing\n\
             grid.n = 64\nflow.t_end = 2\nflow.output_times = 0, 1, 2\nflow.renormalize = false\n\
             comparison.enabled = no\nprofile.xi_samples = 9\noutput.dir = /tmp/x\n",
        )
        .unwrap();
        assert_eq!(
            cfg.initial,
            InitialData::Fourier {
                coefficients: vec![(2, 0.1), (4, -0.02)]
            }
        );
        assert_eq!(cfg.grid_n, 64);
        assert_eq!(cfg.output_times, Some(vec![0.0, 1.0, 2.0]));
        assert!(!cfg.renormalize && !cfg.comparison_enabled);
        assert_eq!(cfg.profile_xi().len(), 9);
        assert_eq!(cfg.output_dir, PathBuf::from("/tmp/x"));
    }

    #[test]
    fn empty_file_is_round_defaults() {
        assert_eq!(ScenarioConfig::parse("").unwrap(), ScenarioConfig::default());
    }

    fn field_of(text: &str) -> String {
        match ScenarioConfig::parse(text) {
            Err(Error::Config { field, .. }) => field,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn errors_name_the_field() {
        assert_eq!(field_of("grid.n = 33"), "grid.n");
        assert_eq!(field_of("grid.n = 8"), "grid.n");
        assert_eq!(field_of("flow.output_times = 0, 0.5, 0.2"), "flow.output_times");
        assert_eq!(field_of("flow.t_end = 1\nflow.output_times = 2"), "flow.output_times");
        assert_eq!(field_of("initial.kind = torus"), "initial.kind");
        assert_eq!(
            field_of("initial.kind = fourier\ninitial.coefficients = 3:0.1"),
            "initial.coefficients"
        );
        assert_eq!(field_of("initial.kind = fourier"), "initial.coefficients");
        assert_eq!(field_of("initial.s = 1"), "initial.s");
        assert_eq!(field_of("grid.m = 3"), "grid.m");
        assert_eq!(field_of("grid.n = 64\ngrid.n = 32"), "grid.n");
        assert_eq!(field_of("flow.safety = 1.5"), "flow.safety");
        assert_eq!(field_of("nonsense"), "line 1");
    }

    #[test]
    fn initial_amplitude_is_bounded() {
        let cfg = ScenarioConfig::parse("initial.kind = fourier\ninitial.coefficients = 2:1.5, 4:0.6").unwrap();
        match cfg.initial_metric(64) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "initial.coefficients"),
            other => panic!("{other:?}"),
        }
        let ok = ScenarioConfig::parse("initial.kind = fourier\ninitial.coefficients = 2:0.6").unwrap();
        let m = ok.initial_metric(64).unwrap();
        assert!((m.total_area() - 4.0 * std::f64::consts::PI).abs() < 1e-12);
    }
}
