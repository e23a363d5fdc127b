//! Flat `key = value` scenario configuration.
//!
//! Every key has a type and a default (or is required). Parsing validates keys and types;
//! [`ScenarioConfig::validate`] checks the values against the model preconditions.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use serde_json::{Map, Value};
use thiserror::Error;
use xtunnel::{DoubleWellSpec, InteractionKernel, WellShape};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { key: String, line: usize },
    #[error("line {line}: `{key}` expects {expected}, got `{value}`")]
    TypeMismatch { key: String, line: usize, expected: &'static str, value: String },
    #[error("missing required key `{key}`")]
    MissingRequired { key: String },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: `{key}` given twice (first on line {first})")]
    Duplicate { key: String, line: usize, first: usize },
    #[error("invalid value for `{key}`: {reason}")]
    Invalid { key: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Spectrum,
    TunnelingScan,
    ExchangeScan,
    HfMix,
    ExactCompare,
    StrongCoupling,
    Coherence,
    WideB,
}

impl Scenario {
    pub const ALL: [Scenario; 8] = [
        Scenario::Spectrum,
        Scenario::TunnelingScan,
        Scenario::ExchangeScan,
        Scenario::HfMix,
        Scenario::ExactCompare,
        Scenario::StrongCoupling,
        Scenario::Coherence,
        Scenario::WideB,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Spectrum => "spectrum",
            Scenario::TunnelingScan => "tunneling-scan",
            Scenario::ExchangeScan => "exchange-scan",
            Scenario::HfMix => "hf-mix",
            Scenario::ExactCompare => "exact-compare",
            Scenario::StrongCoupling => "strong-coupling",
            Scenario::Coherence => "coherence",
            Scenario::WideB => "wide-b",
        }
    }

    pub fn from_name(s: &str) -> Option<Scenario> {
        Scenario::ALL.into_iter().find(|c| c.name() == s)
    }

    /// The scan parameter this scenario sweeps, if any.
    pub fn scan_parameter(&self) -> Option<&'static str> {
        match self {
            Scenario::Spectrum => None,
            Scenario::TunnelingScan | Scenario::ExchangeScan => Some("separation"),
            Scenario::HfMix | Scenario::ExactCompare | Scenario::StrongCoupling => Some("lambda"),
            Scenario::Coherence => Some("orbitals"),
            Scenario::WideB => Some("barrier"),
        }
    }

    fn default_scan(&self) -> Vec<f64> {
        match self {
            Scenario::Spectrum => vec![],
            Scenario::TunnelingScan => (0..11).map(|i| 3.0 + 0.5 * i as f64).collect(),
            Scenario::ExchangeScan => {
                let mut v: Vec<f64> = (0..13).map(|i| 4.0 + 0.25 * i as f64).collect();
                v.extend([8.0, 10.0, 13.0, 16.0, 20.0, 25.0, 32.0, 40.0]);
                v
            }
            Scenario::HfMix => vec![1e-3, 2e-3, 5e-3, 1e-2],
            Scenario::ExactCompare => vec![5e-4],
            Scenario::StrongCoupling => vec![0.02, 0.03, 0.05, 0.08, 0.12, 0.2],
            Scenario::Coherence => vec![1.0, 2.0, 4.0, 8.0],
            Scenario::WideB => vec![6.0, 7.0, 8.0],
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Str,
    Int,
    Float,
    OptFloat,
    List,
}

impl Kind {
    fn expected(&self) -> &'static str {
        match self {
            Kind::Str => "a string",
            Kind::Int => "a non-negative integer",
            Kind::Float | Kind::OptFloat => "a number",
            Kind::List => "a comma-separated list of numbers",
        }
    }
}

/// Key table: name, type, default (`None` = required or auto).
const KEYS: &[(&str, Kind, Option<&str>)] = &[
    ("scenario", Kind::Str, None),
    ("seed", Kind::Int, Some("0")),
    ("grid.n", Kind::Int, None),
    ("grid.h", Kind::Float, Some("0.02")),
    ("grid.x_min", Kind::OptFloat, None),
    ("grid.x_max", Kind::OptFloat, None),
    ("grid.pad", Kind::Float, Some("0.5")),
    ("well.shape", Kind::Str, Some("square")),
    ("well.separation", Kind::Float, Some("6")),
    ("well.center_a", Kind::OptFloat, None),
    ("well.center_b", Kind::OptFloat, None),
    ("well.depth_a", Kind::Float, Some("6")),
    ("well.depth_b", Kind::OptFloat, None),
    ("well.width_a", Kind::Float, Some("1.2")),
    ("well.width_b", Kind::OptFloat, None),
    ("kernel.lambda", Kind::Float, Some("1")),
    ("kernel.softening", Kind::Float, Some("1")),
    ("scan.parameter", Kind::Str, None),
    ("scan.values", Kind::List, None),
    ("output.dir", Kind::Str, Some("out")),
    ("output.prefix", Kind::Str, None),
    ("spectrum.potential", Kind::Str, Some("box")),
    ("spectrum.levels", Kind::Int, Some("10")),
    ("spectrum.omega", Kind::Float, Some("1")),
    ("exchange.t1_max_separation", Kind::Float, Some("10")),
    ("hf.passive_level", Kind::Int, Some("2")),
    ("exact.resonant_level", Kind::Int, Some("2")),
    ("exact.states", Kind::Int, Some("6")),
    ("coherence.beta2", Kind::Float, Some("0.1")),
    ("coherence.envelope_depth", Kind::Float, Some("1")),
    ("coherence.envelope_pad", Kind::Float, Some("1")),
    ("coherence.bump_gap", Kind::Float, Some("8")),
    ("coherence.bump_width", Kind::Float, Some("1.5")),
    ("wide.bandwidth", Kind::Float, Some("1")),
];

/// Where the grid comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extent {
    Explicit { x_min: f64, x_max: f64 },
    /// Sized around the wells of each scan point.
    Auto { pad: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Resolution {
    Points(usize),
    Spacing(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumPotential {
    Box,
    Harmonic,
    Wells,
}

impl SpectrumPotential {
    pub fn name(&self) -> &'static str {
        match self {
            SpectrumPotential::Box => "box",
            SpectrumPotential::Harmonic => "harmonic",
            SpectrumPotential::Wells => "wells",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub seed: u64,
    pub extent: Extent,
    pub resolution: Resolution,
    pub wells: DoubleWellSpec,
    /// `well.depth_b` was left to its default (equal to `well.depth_a`).
    pub depth_b_default: bool,
    pub kernel: InteractionKernel,
    pub scan_parameter: Option<String>,
    pub scan_values: Vec<f64>,
    pub output_dir: PathBuf,
    pub output_prefix: String,
    pub spectrum_potential: SpectrumPotential,
    pub spectrum_levels: usize,
    pub spectrum_omega: f64,
    pub t1_max_separation: f64,
    pub passive_level: usize,
    pub resonant_level: usize,
    pub exact_states: usize,
    pub beta2: f64,
    pub envelope_depth: f64,
    pub envelope_pad: f64,
    pub bump_gap: f64,
    pub bump_width: f64,
    pub bandwidth: f64,
    /// Every key with its resolved value, in table order.
    pub resolved: Map<String, Value>,
}

#[derive(Debug, Clone)]
enum Raw {
    Str(String),
    Int(u64),
    Float(f64),
    List(Vec<f64>),
}

fn parse_value(key: &str, kind: Kind, text: &str, line: usize) -> Result<Raw, ConfigError> {
    let mismatch = || ConfigError::TypeMismatch { key: key.to_string(), line, expected: kind.expected(), value: text.to_string() };
    let float = |s: &str| s.trim().parse::<f64>().ok().filter(|v| v.is_finite());
    match kind {
        Kind::Str => {
            if text.is_empty() {
                Err(mismatch())
            } else {
                Ok(Raw::Str(text.to_string()))
            }
        }
        Kind::Int => text.parse::<u64>().map(Raw::Int).map_err(|_| mismatch()),
        Kind::Float | Kind::OptFloat => float(text).map(Raw::Float).ok_or_else(mismatch),
        Kind::List => {
            let v: Option<Vec<f64>> = text.split(',').map(float).collect();
            match v {
                Some(v) if !v.is_empty() => Ok(Raw::List(v)),
                _ => Err(mismatch()),
            }
        }
    }
}

/// Parses config text. Unknown keys, malformed values and missing required keys are errors;
/// value ranges are checked afterwards by [`ScenarioConfig::validate`].
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut given: BTreeMap<&'static str, (Raw, usize)> = BTreeMap::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (k, v) = content.split_once('=').ok_or(ConfigError::Syntax { line })?;
        let (k, v) = (k.trim(), v.trim());
        let &(name, kind, _) =
            KEYS.iter().find(|e| e.0 == k).ok_or_else(|| ConfigError::UnknownKey { key: k.to_string(), line })?;
        if let Some((_, first)) = given.get(name) {
            return Err(ConfigError::Duplicate { key: name.to_string(), line, first: *first });
        }
        given.insert(name, (parse_value(name, kind, v, line)?, line));
    }

    let scenario_name = match given.get("scenario") {
        Some((Raw::Str(s), _)) => s.clone(),
        _ => return Err(ConfigError::MissingRequired { key: "scenario".into() }),
    };
    let scenario = Scenario::from_name(&scenario_name).ok_or_else(|| ConfigError::Invalid {
        key: "scenario".into(),
        reason: format!("`{scenario_name}` is not one of {}", Scenario::ALL.map(|s| s.name()).join(", ")),
    })?;

    let get = |key: &str| -> Option<&Raw> { given.get(key).map(|(r, _)| r) };
    let default = |key: &str| -> &'static str { KEYS.iter().find(|e| e.0 == key).and_then(|e| e.2).unwrap_or("") };
    let float = |key: &str| -> f64 {
        match get(key) {
            Some(Raw::Float(v)) => *v,
            _ => default(key).parse().unwrap_or(f64::NAN),
        }
    };
    let opt_float = |key: &str| -> Option<f64> {
        match get(key) {
            Some(Raw::Float(v)) => Some(*v),
            _ => None,
        }
    };
    let int = |key: &str| -> u64 {
        match get(key) {
            Some(Raw::Int(v)) => *v,
            _ => default(key).parse().unwrap_or(0),
        }
    };
    let string = |key: &str| -> String {
        match get(key) {
            Some(Raw::Str(s)) => s.clone(),
            _ => default(key).to_string(),
        }
    };

    let invalid = |key: &str, reason: String| ConfigError::Invalid { key: key.into(), reason };

    let extent = match (opt_float("grid.x_min"), opt_float("grid.x_max")) {
        (Some(x_min), Some(x_max)) => Extent::Explicit { x_min, x_max },
        (None, None) => match scenario {
            Scenario::Spectrum => Extent::Explicit { x_min: -10.0, x_max: 10.0 },
            _ => Extent::Auto { pad: float("grid.pad") },
        },
        _ => return Err(invalid("grid.x_min", "grid.x_min and grid.x_max must be given together".into())),
    };
    let resolution = match get("grid.n") {
        Some(Raw::Int(n)) => Resolution::Points(*n as usize),
        _ if scenario == Scenario::Spectrum => Resolution::Points(2001),
        _ => Resolution::Spacing(float("grid.h")),
    };

    let shape = match string("well.shape").as_str() {
        "square" => WellShape::Square,
        "gaussian" => WellShape::Gaussian,
        other => return Err(invalid("well.shape", format!("`{other}` is not square or gaussian"))),
    };
    let d = float("well.separation");
    let (depth_a, width_a) = (float("well.depth_a"), float("well.width_a"));
    let wells = DoubleWellSpec {
        shape,
        center_a: opt_float("well.center_a").unwrap_or(-d / 2.0),
        center_b: opt_float("well.center_b").unwrap_or(d / 2.0),
        depth_a,
        depth_b: opt_float("well.depth_b").unwrap_or(depth_a),
        width_a,
        width_b: opt_float("well.width_b").unwrap_or(width_a),
    };

    let kernel = InteractionKernel::new(float("kernel.lambda"), float("kernel.softening"))
        .map_err(|e| invalid("kernel.softening", e.to_string()))?;

    let scan_parameter = match get("scan.parameter") {
        Some(Raw::Str(s)) => Some(s.clone()),
        _ => scenario.scan_parameter().map(str::to_string),
    };
    let scan_values = match get("scan.values") {
        Some(Raw::List(v)) => v.clone(),
        _ => scenario.default_scan(),
    };

    let spectrum_potential = match string("spectrum.potential").as_str() {
        "box" => SpectrumPotential::Box,
        "harmonic" => SpectrumPotential::Harmonic,
        "wells" => SpectrumPotential::Wells,
        other => return Err(invalid("spectrum.potential", format!("`{other}` is not box, harmonic or wells"))),
    };

    let mut cfg = ScenarioConfig {
        scenario,
        seed: int("seed"),
        extent,
        resolution,
        wells,
        depth_b_default: opt_float("well.depth_b").is_none(),
        kernel,
        scan_parameter,
        scan_values,
        output_dir: PathBuf::from(string("output.dir")),
        output_prefix: match get("output.prefix") {
            Some(Raw::Str(s)) => s.clone(),
            _ => scenario.name().to_string(),
        },
        spectrum_potential,
        spectrum_levels: int("spectrum.levels") as usize,
        spectrum_omega: float("spectrum.omega"),
        t1_max_separation: float("exchange.t1_max_separation"),
        passive_level: int("hf.passive_level") as usize,
        resonant_level: int("exact.resonant_level") as usize,
        exact_states: int("exact.states") as usize,
        beta2: float("coherence.beta2"),
        envelope_depth: float("coherence.envelope_depth"),
        envelope_pad: float("coherence.envelope_pad"),
        bump_gap: float("coherence.bump_gap"),
        bump_width: float("coherence.bump_width"),
        bandwidth: float("wide.bandwidth"),
        resolved: Map::new(),
    };
    cfg.validate()?;
    cfg.resolved = cfg.resolve();
    Ok(cfg)
}

impl ScenarioConfig {
    /// Range checks that do not need a numerical solve.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |key: &str, reason: &str| Err(ConfigError::Invalid { key: key.into(), reason: reason.into() });
        match self.resolution {
            Resolution::Points(n) if n < 3 => return invalid("grid.n", "need at least 3 points"),
            Resolution::Spacing(h) if !(h > 0.0) => return invalid("grid.h", "must be positive"),
            _ => {}
        }
        if let Extent::Explicit { x_min, x_max } = self.extent {
            if !(x_max > x_min) {
                return invalid("grid.x_max", "must exceed grid.x_min");
            }
        }
        if let Extent::Auto { pad } = self.extent {
            if !(pad >= 0.0) {
                return invalid("grid.pad", "must be non-negative");
            }
        }
        let uses_wells = self.scenario != Scenario::Spectrum || self.spectrum_potential == SpectrumPotential::Wells;
        if uses_wells {
            if let Err(e) = self.wells.validate() {
                return invalid("well.separation", &e.to_string());
            }
        }
        match (self.scenario.scan_parameter(), &self.scan_parameter) {
            (None, Some(_)) => return invalid("scan.parameter", "this scenario does not scan"),
            (Some(p), Some(q)) if p != q => {
                return Err(ConfigError::Invalid {
                    key: "scan.parameter".into(),
                    reason: format!("{} scans `{p}`, not `{q}`", self.scenario),
                })
            }
            _ => {}
        }
        if self.scenario.scan_parameter().is_some() {
            let v = &self.scan_values;
            if !(v.windows(2).all(|w| w[1] > w[0]) || v.windows(2).all(|w| w[1] < w[0])) {
                return invalid("scan.values", "must be strictly monotone");
            }
            let positive = match self.scenario {
                Scenario::HfMix | Scenario::ExactCompare | Scenario::StrongCoupling => false,
                _ => true,
            };
            if positive && v.iter().any(|x| *x <= 0.0) {
                return invalid("scan.values", "must be positive");
            }
            if self.scenario == Scenario::Coherence && v.iter().any(|x| x.fract() != 0.0) {
                return invalid("scan.values", "orbital counts must be integers");
            }
        }
        if self.spectrum_levels == 0 {
            return invalid("spectrum.levels", "must be at least 1");
        }
        if !(self.spectrum_omega > 0.0) {
            return invalid("spectrum.omega", "must be positive");
        }
        if self.passive_level < 2 {
            return invalid("hf.passive_level", "must be 2 or higher");
        }
        if self.exact_states == 0 {
            return invalid("exact.states", "must be at least 1");
        }
        if !(self.beta2 > 0.0 && self.beta2 < 1.0) {
            return invalid("coherence.beta2", "must lie in (0, 1)");
        }
        for (key, v) in [
            ("coherence.envelope_depth", self.envelope_depth),
            ("coherence.bump_width", self.bump_width),
            ("wide.bandwidth", self.bandwidth),
        ] {
            if !(v > 0.0) {
                return invalid(key, "must be positive");
            }
        }
        if self.output_prefix.contains('/') {
            return invalid("output.prefix", "must not contain a path separator");
        }
        Ok(())
    }

    fn resolve(&self) -> Map<String, Value> {
        let mut m = Map::new();
        let mut put = |k: &str, v: Value| {
            m.insert(k.to_string(), v);
        };
        put("scenario", self.scenario.name().into());
        put("seed", self.seed.into());
        match self.resolution {
            Resolution::Points(n) => put("grid.n", n.into()),
            Resolution::Spacing(h) => put("grid.h", h.into()),
        }
        match self.extent {
            Extent::Explicit { x_min, x_max } => {
                put("grid.x_min", x_min.into());
                put("grid.x_max", x_max.into());
            }
            Extent::Auto { pad } => {
                put("grid.extent", "auto".into());
                put("grid.pad", pad.into());
            }
        }
        let w = &self.wells;
        put("well.shape", w.shape.name().into());
        put("well.center_a", w.center_a.into());
        put("well.center_b", w.center_b.into());
        put("well.depth_a", w.depth_a.into());
        if self.depth_b_default && self.scenario == Scenario::ExactCompare && self.resonant_level > 0 {
            put("well.depth_b", format!("resonant with level {}", self.resonant_level).into());
        } else {
            put("well.depth_b", w.depth_b.into());
        }
        put("well.width_a", w.width_a.into());
        put("well.width_b", w.width_b.into());
        put("kernel.lambda", self.kernel.lambda.into());
        put("kernel.softening", self.kernel.softening.into());
        if let Some(p) = &self.scan_parameter {
            put("scan.parameter", p.clone().into());
            put("scan.values", self.scan_values.clone().into());
        }
        put("output.dir", self.output_dir.display().to_string().into());
        put("output.prefix", self.output_prefix.clone().into());
        match self.scenario {
            Scenario::Spectrum => {
                put("spectrum.potential", self.spectrum_potential.name().into());
                put("spectrum.levels", self.spectrum_levels.into());
                if self.spectrum_potential == SpectrumPotential::Harmonic {
                    put("spectrum.omega", self.spectrum_omega.into());
                }
            }
            Scenario::ExchangeScan => put("exchange.t1_max_separation", self.t1_max_separation.into()),
            Scenario::HfMix => put("hf.passive_level", self.passive_level.into()),
            Scenario::ExactCompare => {
                put("exact.resonant_level", self.resonant_level.into());
                put("exact.states", self.exact_states.into());
            }
            Scenario::Coherence => {
                put("coherence.beta2", self.beta2.into());
                put("coherence.envelope_depth", self.envelope_depth.into());
                put("coherence.envelope_pad", self.envelope_pad.into());
                put("coherence.bump_gap", self.bump_gap.into());
                put("coherence.bump_width", self.bump_width.into());
            }
            Scenario::WideB => put("wide.bandwidth", self.bandwidth.into()),
            _ => {}
        }
        m
    }
}
