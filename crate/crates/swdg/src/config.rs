//! Run configuration: a flat `key = value` text format with `#` comment
//! lines, scenario defaults, and command-line overrides.
//!
//! Precedence, lowest to highest: scenario defaults, plain keys, dotted
//! per-scenario keys (`thacker_planar.dt = ...`, applied only when that
//! scenario is selected). Command-line overrides replace file values of
//! the same key but keep the same plain-versus-dotted ranking. Unknown
//! keys are rejected rather than ignored so typos surface immediately.
//!
//! The manifest emitted after a run is itself a valid config file that
//! reproduces the run exactly.

use crate::error::ConfigError;
use crate::geom::Point;
use crate::limiter::{LimiterConfig, MomentumLimiting};
use crate::mesh::NeighborhoodVariant;
use crate::output::SectionLine;
use crate::rhs::DgForm;
use crate::scenario::Scenario;
use crate::stepper::StepControl;
use crate::GRAVITY;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, PartialEq)]
pub enum MeshSource {
    /// Scenario default mesh, refined this many extra levels.
    Levels(u32),
    /// Mesh loaded from a file (boundary tags included).
    File(PathBuf),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SnapshotFormat {
    Csv,
    Vtk,
    Both,
}

impl SnapshotFormat {
    pub fn csv(self) -> bool {
        matches!(self, SnapshotFormat::Csv | SnapshotFormat::Both)
    }

    pub fn vtk(self) -> bool {
        matches!(self, SnapshotFormat::Vtk | SnapshotFormat::Both)
    }
}

/// A fully resolved run description.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub g: f64,
    pub form: DgForm,
    /// `None` disables limiting (diagnostic runs only).
    pub limiter: Option<LimiterConfig>,
    pub tol_wet: f64,
    pub step: StepControl,
    pub t_end: f64,
    pub mesh: MeshSource,
    pub output_dir: PathBuf,
    /// Periodic field snapshots every this many steps; `None` = final only.
    pub snapshot_interval: Option<u64>,
    pub snapshot_format: SnapshotFormat,
    pub gauges: Vec<Point>,
    pub sections: Vec<SectionLine>,
    pub section_samples: usize,
    pub diag_interval: u64,
}

/// Every plain key the format accepts.
const KNOWN_KEYS: [&str; 16] = [
    "scenario",
    "g",
    "form",
    "limiter",
    "momentum_limiting",
    "tol_wet",
    "dt",
    "cfl",
    "t_end",
    "mesh_levels",
    "mesh_file",
    "output_dir",
    "snapshot_interval",
    "snapshot_format",
    "gauges",
    "sections",
];

/// Keys additionally accepted with a scenario-name prefix.
const SCENARIO_KEYS: [&str; 5] = ["dt", "cfl", "tol_wet", "t_end", "mesh_levels"];

const EXTRA_KEYS: [&str; 2] = ["section_samples", "diag_interval"];

fn known_plain_key(key: &str) -> bool {
    KNOWN_KEYS.contains(&key) || EXTRA_KEYS.contains(&key)
}

/// Splits a dotted key into (scenario, field) if it has that shape.
fn split_dotted(key: &str) -> Option<(&str, &str)> {
    let (prefix, field) = key.split_once('.')?;
    Some((prefix, field))
}

fn parse_lines(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Syntax { line: idx + 1, text: line.to_string() });
        };
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

fn f64_value(key: &str, value: &str) -> Result<f64, ConfigError> {
    value.parse::<f64>().map_err(|_| ConfigError::InvalidValue {
        key: key.to_string(),
        message: format!("expected a number, got `{value}`"),
    })
}

fn positive_f64(key: &str, value: &str) -> Result<f64, ConfigError> {
    let x = f64_value(key, value)?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(ConfigError::InvalidValue {
            key: key.to_string(),
            message: format!("must be a positive finite number, got `{value}`"),
        })
    }
}

fn positive_u64(key: &str, value: &str) -> Result<u64, ConfigError> {
    match value.parse::<u64>() {
        Ok(x) if x > 0 => Ok(x),
        _ => Err(ConfigError::InvalidValue {
            key: key.to_string(),
            message: format!("must be a positive integer, got `{value}`"),
        }),
    }
}

fn parse_gauges(value: &str) -> Result<Vec<Point>, ConfigError> {
    let bad = |msg: String| ConfigError::InvalidValue { key: "gauges".into(), message: msg };
    let mut points = Vec::new();
    for part in value.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (x, y) = part
            .split_once(',')
            .ok_or_else(|| bad(format!("expected `x,y`, got `{part}`")))?;
        let px = x.trim().parse::<f64>();
        let py = y.trim().parse::<f64>();
        match (px, py) {
            (Ok(px), Ok(py)) if px.is_finite() && py.is_finite() => {
                points.push(Point::new(px, py));
            }
            _ => return Err(bad(format!("expected `x,y`, got `{part}`"))),
        }
    }
    Ok(points)
}

fn parse_sections(value: &str) -> Result<Vec<SectionLine>, ConfigError> {
    let bad = |msg: String| ConfigError::InvalidValue { key: "sections".into(), message: msg };
    let mut lines = Vec::new();
    for part in value.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (axis, level) = part
            .split_once('=')
            .ok_or_else(|| bad(format!("expected `x=value` or `y=value`, got `{part}`")))?;
        let level: f64 = level
            .trim()
            .parse()
            .map_err(|_| bad(format!("expected a number after `=` in `{part}`")))?;
        match axis.trim() {
            "x" => lines.push(SectionLine::Vertical { x: level }),
            "y" => lines.push(SectionLine::Horizontal { y: level }),
            other => return Err(bad(format!("axis must be `x` or `y`, got `{other}`"))),
        }
    }
    Ok(lines)
}

/// Parses config text plus command-line `key=value` overrides.
pub fn parse_config(text: &str, overrides: &[String]) -> Result<RunConfig, ConfigError> {
    let file_pairs = parse_lines(text)?;

    // Duplicate plain keys within one file are almost always an edit slip.
    let mut seen = std::collections::BTreeSet::new();
    for (key, _) in &file_pairs {
        if !seen.insert(key.clone()) {
            return Err(ConfigError::DuplicateKey(key.clone()));
        }
    }

    let mut pairs = file_pairs;
    for entry in overrides {
        let Some((key, value)) = entry.split_once('=') else {
            return Err(ConfigError::Syntax { line: 0, text: entry.clone() });
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        pairs.retain(|(k, _)| *k != key);
        pairs.push((key, value));
    }

    // Validate key names and split into plain and dotted maps.
    let mut plain: BTreeMap<String, String> = BTreeMap::new();
    let mut dotted: BTreeMap<String, String> = BTreeMap::new();
    for (key, value) in pairs {
        if known_plain_key(&key) {
            plain.insert(key, value);
        } else if let Some((prefix, field)) = split_dotted(&key) {
            if Scenario::parse(prefix).is_none() || !SCENARIO_KEYS.contains(&field) {
                return Err(ConfigError::UnknownKey(key));
            }
            dotted.insert(key, value);
        } else {
            return Err(ConfigError::UnknownKey(key));
        }
    }

    let scenario_name = plain
        .get("scenario")
        .ok_or_else(|| ConfigError::MissingKey("scenario".into()))?;
    let scenario = Scenario::parse(scenario_name).ok_or_else(|| ConfigError::InvalidValue {
        key: "scenario".into(),
        message: format!(
            "unknown scenario `{scenario_name}`; expected one of {}",
            Scenario::ALL.map(|s| s.name()).join(", ")
        ),
    })?;

    // Fold the selected scenario's dotted keys over the plain ones.
    let mut resolved = plain;
    for (key, value) in dotted {
        let (prefix, field) = split_dotted(&key).unwrap();
        if prefix == scenario.name() {
            resolved.insert(field.to_string(), value);
        }
    }

    let get = |key: &str| resolved.get(key).map(String::as_str);

    let g = match get("g") {
        Some(v) => positive_f64("g", v)?,
        None => GRAVITY,
    };

    let form = match get("form") {
        None | Some("strong") => DgForm::Strong,
        Some("weak") => DgForm::Weak,
        Some(other) => {
            return Err(ConfigError::InvalidValue {
                key: "form".into(),
                message: format!("expected `strong` or `weak`, got `{other}`"),
            })
        }
    };

    let momentum = match get("momentum_limiting") {
        None | Some("velocity") => MomentumLimiting::VelocityBased,
        Some("direct") => MomentumLimiting::Direct,
        Some(other) => {
            return Err(ConfigError::InvalidValue {
                key: "momentum_limiting".into(),
                message: format!("expected `velocity` or `direct`, got `{other}`"),
            })
        }
    };

    let limiter = match get("limiter") {
        None | Some("vertex") => {
            Some(LimiterConfig { variant: NeighborhoodVariant::Vertex, momentum })
        }
        Some("edge") => Some(LimiterConfig { variant: NeighborhoodVariant::Edge, momentum }),
        Some("none") => None,
        Some(other) => {
            return Err(ConfigError::InvalidValue {
                key: "limiter".into(),
                message: format!("expected `vertex`, `edge`, or `none`, got `{other}`"),
            })
        }
    };

    let tol_wet = match get("tol_wet") {
        Some(v) => positive_f64("tol_wet", v)?,
        None => scenario.default_tol_wet(),
    };

    let step = match (get("dt"), get("cfl")) {
        (Some(_), Some(_)) => return Err(ConfigError::ConflictingStepControl),
        (Some(v), None) => StepControl::FixedDt(positive_f64("dt", v)?),
        (None, Some(v)) => StepControl::Courant(positive_f64("cfl", v)?),
        (None, None) => StepControl::FixedDt(scenario.default_dt()),
    };

    let t_end = match get("t_end") {
        Some(v) => positive_f64("t_end", v)?,
        None => scenario.default_t_end(),
    };

    let mesh = match (get("mesh_levels"), get("mesh_file")) {
        (Some(_), Some(_)) => {
            return Err(ConfigError::InvalidValue {
                key: "mesh_file".into(),
                message: "mutually exclusive with `mesh_levels`".into(),
            })
        }
        (Some(v), None) => {
            let levels = v.parse::<u32>().map_err(|_| ConfigError::InvalidValue {
                key: "mesh_levels".into(),
                message: format!("expected a small non-negative integer, got `{v}`"),
            })?;
            MeshSource::Levels(levels)
        }
        (None, Some(v)) => MeshSource::File(PathBuf::from(v)),
        (None, None) => MeshSource::Levels(0),
    };

    let output_dir = match get("output_dir") {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        Some(_) => {
            return Err(ConfigError::InvalidValue {
                key: "output_dir".into(),
                message: "must not be empty".into(),
            })
        }
        None => PathBuf::from(format!("out_{}", scenario.name())),
    };

    let snapshot_interval = match get("snapshot_interval") {
        Some(v) => Some(positive_u64("snapshot_interval", v)?),
        None => None,
    };

    let snapshot_format = match get("snapshot_format") {
        None | Some("csv") => SnapshotFormat::Csv,
        Some("vtk") => SnapshotFormat::Vtk,
        Some("both") => SnapshotFormat::Both,
        Some(other) => {
            return Err(ConfigError::InvalidValue {
                key: "snapshot_format".into(),
                message: format!("expected `csv`, `vtk`, or `both`, got `{other}`"),
            })
        }
    };

    let gauges = match get("gauges") {
        Some(v) => parse_gauges(v)?,
        None => Vec::new(),
    };
    let domain = scenario.domain();
    for (i, p) in gauges.iter().enumerate() {
        if !domain.contains(*p) {
            return Err(ConfigError::InvalidValue {
                key: "gauges".into(),
                message: format!(
                    "gauge {i} at ({}, {}) is outside the {} domain",
                    p.x,
                    p.y,
                    scenario.name()
                ),
            });
        }
    }

    let sections = match get("sections") {
        Some(v) => parse_sections(v)?,
        None => Vec::new(),
    };

    let section_samples = match get("section_samples") {
        Some(v) => positive_u64("section_samples", v)? as usize,
        None => 100,
    };

    let diag_interval = match get("diag_interval") {
        Some(v) => positive_u64("diag_interval", v)?,
        None => 1,
    };

    Ok(RunConfig {
        scenario,
        g,
        form,
        limiter,
        tol_wet,
        step,
        t_end,
        mesh,
        output_dir,
        snapshot_interval,
        snapshot_format,
        gauges,
        sections,
        section_samples,
        diag_interval,
    })
}

pub fn parse_config_file(path: &Path, overrides: &[String]) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text, overrides)
}

/// Serializes a float so that parsing it back is bit-exact.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl RunConfig {
    /// Renders the resolved config as a config file. Parsing the result
    /// yields a `RunConfig` equal to `self`.
    pub fn manifest(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        kv("scenario", self.scenario.name().to_string());
        kv("g", fmt_f64(self.g));
        kv(
            "form",
            match self.form {
                DgForm::Strong => "strong".into(),
                DgForm::Weak => "weak".into(),
            },
        );
        match self.limiter {
            Some(cfg) => {
                kv(
                    "limiter",
                    match cfg.variant {
                        NeighborhoodVariant::Vertex => "vertex".into(),
                        NeighborhoodVariant::Edge => "edge".into(),
                    },
                );
                kv(
                    "momentum_limiting",
                    match cfg.momentum {
                        MomentumLimiting::VelocityBased => "velocity".into(),
                        MomentumLimiting::Direct => "direct".into(),
                    },
                );
            }
            None => kv("limiter", "none".into()),
        }
        kv("tol_wet", fmt_f64(self.tol_wet));
        match self.step {
            StepControl::FixedDt(dt) => kv("dt", fmt_f64(dt)),
            StepControl::Courant(c) => kv("cfl", fmt_f64(c)),
        }
        kv("t_end", fmt_f64(self.t_end));
        match &self.mesh {
            MeshSource::Levels(l) => kv("mesh_levels", l.to_string()),
            MeshSource::File(p) => kv("mesh_file", p.display().to_string()),
        }
        kv("output_dir", self.output_dir.display().to_string());
        if let Some(i) = self.snapshot_interval {
            kv("snapshot_interval", i.to_string());
        }
        kv(
            "snapshot_format",
            match self.snapshot_format {
                SnapshotFormat::Csv => "csv".into(),
                SnapshotFormat::Vtk => "vtk".into(),
                SnapshotFormat::Both => "both".into(),
            },
        );
        if !self.gauges.is_empty() {
            let list: Vec<String> = self
                .gauges
                .iter()
                .map(|p| format!("{},{}", fmt_f64(p.x), fmt_f64(p.y)))
                .collect();
            kv("gauges", list.join("; "));
        }
        if !self.sections.is_empty() {
            let list: Vec<String> = self
                .sections
                .iter()
                .map(|s| match s {
                    SectionLine::Horizontal { y } => format!("y={}", fmt_f64(*y)),
                    SectionLine::Vertical { x } => format!("x={}", fmt_f64(*x)),
                })
                .collect();
            kv("sections", list.join("; "));
        }
        kv("section_samples", self.section_samples.to_string());
        kv("diag_interval", self.diag_interval.to_string());
        out
    }
}
