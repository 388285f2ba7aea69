//! Experiment configuration: flat dotted keys, SI units in the key names.
//!
//! A config is TOML. Sections and dotted keys are equivalent, so
//! `grid.span_hz = 1e9` and `[grid] span_hz = 1e9` name the same field.
//! Every key is checked against [`SCHEMA`]; unknown keys, wrong types and
//! missing required keys are errors that name the key.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;

use toml::{Table, Value};

/// Value type of a config key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Float,
    Int,
    Bool,
    Str(&'static [&'static str]),
    FloatList,
}

/// One recognised key.
#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub key: &'static str,
    pub kind: Kind,
    /// `None` for keys that are optional without a default, or required by
    /// some experiments.
    pub default: Option<DefaultValue>,
    pub help: &'static str,
}

#[derive(Debug, Clone, Copy)]
pub enum DefaultValue {
    Float(f64),
    Int(i64),
    Bool(bool),
    Str(&'static str),
    FloatList(&'static [f64]),
}

const EXPERIMENTS: &[&str] = &["burn_and_probe", "store_recall", "echo_decay", "rabi_scan", "spectrum", "efficiency_sweep"];
const PULSE_SHAPES: &[&str] = &["square", "square_with_rise"];
const TOOTH_SHAPES: &[&str] = &["square", "gaussian", "lorentzian"];
const PHASES: &[&str] = &["coherent", "randomized"];

macro_rules! key {
    ($key:literal, $kind:expr, $default:expr, $help:literal) => {
        KeySpec { key: $key, kind: $kind, default: $default, help: $help }
    };
}

use DefaultValue as D;
use Kind as K;

pub const SCHEMA: &[KeySpec] = &[
    key!("experiment", K::Str(EXPERIMENTS), None, "experiment to run"),
    key!("seed", K::Int, Some(D::Int(0)), "seed for randomized burn phases and detection noise"),
    key!("output.dir", K::Str(&[]), Some(D::Str("afc-out")), "output directory, relative to AFC_OUTPUT_ROOT when set"),
    key!("output.gnuplot", K::Bool, Some(D::Bool(false)), "also write a gnuplot script"),
    key!("grid.span_hz", K::Float, None, "full width of the spectral grid"),
    key!("grid.n_points", K::Int, Some(D::Int(16384)), "number of grid points"),
    key!("ions.t2_s", K::Float, Some(D::Float(700e-9)), "optical coherence time"),
    key!("ions.t1_s", K::Float, Some(D::Float(f64::INFINITY)), "excited-state lifetime"),
    key!("device.mode_area_m2", K::Float, Some(D::Float(afc_core::device::DEFAULT_MODE_AREA)), "effective mode area"),
    key!("device.length_m", K::Float, Some(D::Float(0.8e-3)), "waveguide length"),
    key!("device.coupling_in", K::Float, Some(D::Float(1e-3)), "input coupling efficiency"),
    key!("device.coupling_out", K::Float, Some(D::Float(1e-3)), "output coupling efficiency"),
    key!("device.rabi_anchor_power_w", K::Float, Some(D::Float(afc_core::device::DEFAULT_ANCHOR_POWER)), "in-waveguide power of the Rabi anchor"),
    key!("device.rabi_anchor_rad_s", K::Float, Some(D::Float(afc_core::device::DEFAULT_ANCHOR_RABI)), "Rabi frequency at the anchor"),
    key!("device.anchor_area_m2", K::Float, Some(D::Float(afc_core::device::DEFAULT_MODE_AREA)), "mode area of the anchor measurement"),
    key!("burn.pair_separation_s", K::Float, Some(D::Float(130e-9)), "start-to-start delay within a pair"),
    key!("burn.pulse_duration_s", K::Float, Some(D::Float(10e-9)), "burn pulse length"),
    key!("burn.n_pairs", K::Int, Some(D::Int(150)), "number of pulse pairs"),
    key!("burn.pair_wait_s", K::Float, Some(D::Float(3e-6)), "start-to-start delay between pairs"),
    key!("burn.peak_power_w", K::Float, Some(D::Float(0.5e-6)), "in-waveguide peak power of the burn pulses"),
    key!("burn.peak_rabi_rad_s", K::Float, None, "peak Rabi frequency; overrides burn.peak_power_w"),
    key!("burn.carrier_offset_hz", K::Float, Some(D::Float(0.0)), "burn carrier detuning"),
    key!("burn.shape", K::Str(PULSE_SHAPES), Some(D::Str("square")), "burn pulse shape"),
    key!("burn.rise_s", K::Float, Some(D::Float(afc_core::sequencer::DEFAULT_RISE_TIME)), "edge length for square_with_rise"),
    key!("burn.inter_pair_phase", K::Str(PHASES), Some(D::Str("coherent")), "phase relation between pairs"),
    key!("burn.coherence_gap_s", K::Float, Some(D::Float(1.5e-6)), "pulses further apart add in power"),
    key!("burn.aom_bandwidth_hz", K::Float, None, "AOM power FWHM applied to the burn spectrum"),
    key!("burn.kappa", K::Float, None, "fixed burn strength; skips calibration"),
    key!("burn.target_contrast", K::Float, Some(D::Float(0.23)), "OD contrast the calibration aims for"),
    key!("burn.target_background_od", K::Float, None, "trough OD the calibration aims for; sets the initial OD"),
    key!("burn.reference_time_s", K::Float, None, "calibrate once at this pair separation and reuse the strength"),
    key!("burn.hole_depth_cap", K::Float, Some(D::Float(1.0)), "largest burnable fraction of the OD"),
    key!("burn.initial_od", K::Float, Some(D::Float(1.0)), "OD of the unburned medium"),
    key!("burn.window_low_hz", K::Float, Some(D::Float(-40e6)), "lower edge of the analysis window"),
    key!("burn.window_high_hz", K::Float, Some(D::Float(40e6)), "upper edge of the analysis window"),
    key!("probe.duration_s", K::Float, Some(D::Float(10e-9)), "input pulse length"),
    key!("probe.rabi_rad_s", K::Float, Some(D::Float(1.0)), "input pulse Rabi frequency (weak field)"),
    key!("probe.fwhm_hz", K::Float, Some(D::Float(0.0)), "spectral resolution of the probe scan; 0 reads the absorption directly"),
    key!("comb.finesse", K::Float, Some(D::Float(1.7)), "synthetic comb finesse"),
    key!("comb.tooth_od", K::Float, Some(D::Float(1.0)), "synthetic tooth OD above background"),
    key!("comb.background_od", K::Float, Some(D::Float(0.0)), "synthetic background OD"),
    key!("comb.shape", K::Str(TOOTH_SHAPES), Some(D::Str("square")), "synthetic tooth shape"),
    key!("store.storage_times_s", K::FloatList, Some(D::FloatList(&[90e-9, 130e-9, 250e-9])), "storage times; comb spacing is 1/T"),
    key!("echo.pulse1_s", K::Float, Some(D::Float(35e-9)), "length of the pi/2 pulse"),
    key!("echo.pulse2_s", K::Float, Some(D::Float(70e-9)), "length of the pi pulse"),
    key!("echo.tau_s", K::Float, Some(D::Float(500e-9)), "start-to-start pulse delay"),
    key!("echo.rabi_rad_s", K::Float, Some(D::Float(afc_core::device::DEFAULT_ANCHOR_RABI)), "pulse Rabi frequency"),
    key!("echo.bandwidth_hz", K::Float, Some(D::Float(40e6)), "width of the detuning-class distribution"),
    key!("echo.n_classes", K::Int, Some(D::Int(201)), "number of detuning classes"),
    key!("echo.dt_s", K::Float, None, "integration step; largest stable step when absent"),
    key!("scan.values_s", K::FloatList, None, "scanned delays (echo_decay) or pi-pulse lengths (rabi_scan; absent means echo.pulse2_s alone)"),
    key!("noise.relative_sigma", K::Float, Some(D::Float(0.0)), "multiplicative Gaussian detection noise on echo intensities"),
];

/// Configuration error; the message names the offending key.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub reason: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config key `{}`: {}", self.key, self.reason)
    }
}

impl std::error::Error for ConfigError {}

fn err(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError { key: key.to_string(), reason: reason.into() }
}

/// Experiment kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    BurnAndProbe,
    StoreRecall,
    EchoDecay,
    RabiScan,
    Spectrum,
    EfficiencySweep,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::BurnAndProbe => "burn_and_probe",
            Experiment::StoreRecall => "store_recall",
            Experiment::EchoDecay => "echo_decay",
            Experiment::RabiScan => "rabi_scan",
            Experiment::Spectrum => "spectrum",
            Experiment::EfficiencySweep => "efficiency_sweep",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "burn_and_probe" => Experiment::BurnAndProbe,
            "store_recall" => Experiment::StoreRecall,
            "echo_decay" => Experiment::EchoDecay,
            "rabi_scan" => Experiment::RabiScan,
            "spectrum" => Experiment::Spectrum,
            "efficiency_sweep" => Experiment::EfficiencySweep,
            _ => return None,
        })
    }

    /// Keys without defaults this experiment cannot run without.
    fn required(self) -> &'static [&'static str] {
        match self {
            Experiment::EchoDecay => &["scan.values_s"],
            Experiment::RabiScan => &[],
            _ => &["grid.span_hz"],
        }
    }
}

/// A validated, fully resolved configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    values: BTreeMap<String, Value>,
    pub experiment: Experiment,
}

fn spec_of(key: &str) -> Option<&'static KeySpec> {
    SCHEMA.iter().find(|s| s.key == key)
}

fn flatten(prefix: &str, table: &Table, out: &mut BTreeMap<String, Value>) -> Result<(), ConfigError> {
    for (k, v) in table {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            Value::Table(t) => flatten(&key, t, out)?,
            other => {
                if out.insert(key.clone(), other.clone()).is_some() {
                    return Err(err(&key, "given twice"));
                }
            }
        }
    }
    Ok(())
}

fn check_kind(spec: &KeySpec, v: &Value) -> Result<Value, ConfigError> {
    let key = spec.key;
    let as_float = |v: &Value| match v {
        Value::Float(f) => Some(*f),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    };
    match spec.kind {
        Kind::Float => {
            let f = as_float(v).ok_or_else(|| err(key, format!("expected a number, got {}", v.type_str())))?;
            if f.is_nan() {
                return Err(err(key, "must not be NaN"));
            }
            Ok(Value::Float(f))
        }
        Kind::Int => match v {
            Value::Integer(i) => Ok(Value::Integer(*i)),
            Value::Float(f) if f.fract() == 0.0 && f.abs() < 9.0e15 => Ok(Value::Integer(*f as i64)),
            _ => Err(err(key, format!("expected an integer, got {v}"))),
        },
        Kind::Bool => match v {
            Value::Boolean(b) => Ok(Value::Boolean(*b)),
            _ => Err(err(key, format!("expected true or false, got {}", v.type_str()))),
        },
        Kind::Str(choices) => match v {
            Value::String(s) if choices.is_empty() || choices.contains(&s.as_str()) => Ok(v.clone()),
            Value::String(s) => Err(err(key, format!("`{s}` is not one of {}", choices.join(", ")))),
            _ => Err(err(key, format!("expected a string, got {}", v.type_str()))),
        },
        Kind::FloatList => match v {
            Value::Array(items) => {
                let mut out = Vec::with_capacity(items.len());
                for item in items {
                    let f = as_float(item).ok_or_else(|| err(key, format!("list entries must be numbers, got {item}")))?;
                    if !f.is_finite() {
                        return Err(err(key, "list entries must be finite"));
                    }
                    out.push(Value::Float(f));
                }
                if out.is_empty() {
                    return Err(err(key, "list is empty"));
                }
                Ok(Value::Array(out))
            }
            _ => Err(err(key, format!("expected a list of numbers, got {}", v.type_str()))),
        },
    }
}

fn default_value(d: DefaultValue) -> Value {
    match d {
        DefaultValue::Float(f) => Value::Float(f),
        DefaultValue::Int(i) => Value::Integer(i),
        DefaultValue::Bool(b) => Value::Boolean(b),
        DefaultValue::Str(s) => Value::String(s.to_string()),
        DefaultValue::FloatList(l) => Value::Array(l.iter().map(|f| Value::Float(*f)).collect()),
    }
}

impl Config {
    /// Parse config text. A manifest written by a previous run is accepted
    /// too; its `config` table is replayed.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let table: Table = text.parse().map_err(|e: toml::de::Error| err("<file>", format!("not valid TOML: {}", e.message())))?;
        let table = match (table.get("manifest"), table.get("config")) {
            (Some(_), Some(Value::Table(cfg))) => cfg.clone(),
            (Some(_), _) => return Err(err("config", "manifest has no config table")),
            _ => table,
        };
        let mut raw = BTreeMap::new();
        flatten("", &table, &mut raw)?;
        Self::from_flat(raw)
    }

    fn from_flat(raw: BTreeMap<String, Value>) -> Result<Self, ConfigError> {
        let mut values = BTreeMap::new();
        for (k, v) in &raw {
            let spec = spec_of(k).ok_or_else(|| err(k, "unknown key"))?;
            values.insert(k.clone(), check_kind(spec, v)?);
        }
        let experiment = match values.get("experiment") {
            Some(Value::String(s)) => Experiment::parse(s).expect("checked against the schema"),
            _ => return Err(err("experiment", "missing")),
        };
        for spec in SCHEMA {
            if let (false, Some(d)) = (values.contains_key(spec.key), spec.default) {
                values.insert(spec.key.to_string(), default_value(d));
            }
        }
        for key in experiment.required() {
            if !values.contains_key(*key) {
                return Err(err(key, format!("missing; required by {}", experiment.name())));
            }
        }
        let cfg = Self { values, experiment };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let positive = |key: &str| -> Result<(), ConfigError> {
            match self.values.get(key) {
                Some(Value::Float(f)) if !(*f > 0.0) => Err(err(key, format!("must be > 0, got {f}"))),
                Some(Value::Integer(i)) if *i <= 0 => Err(err(key, format!("must be > 0, got {i}"))),
                Some(Value::Array(a)) if a.iter().any(|v| !(v.as_float().unwrap_or(0.0) > 0.0)) => {
                    Err(err(key, "entries must be > 0"))
                }
                _ => Ok(()),
            }
        };
        for key in [
            "grid.span_hz",
            "grid.n_points",
            "ions.t2_s",
            "ions.t1_s",
            "device.mode_area_m2",
            "device.rabi_anchor_power_w",
            "device.rabi_anchor_rad_s",
            "device.anchor_area_m2",
            "burn.pair_separation_s",
            "burn.pulse_duration_s",
            "burn.n_pairs",
            "burn.pair_wait_s",
            "burn.rise_s",
            "burn.coherence_gap_s",
            "burn.aom_bandwidth_hz",
            "burn.target_background_od",
            "burn.reference_time_s",
            "probe.duration_s",
            "probe.rabi_rad_s",
            "comb.tooth_od",
            "store.storage_times_s",
            "echo.pulse1_s",
            "echo.pulse2_s",
            "echo.tau_s",
            "echo.rabi_rad_s",
            "echo.bandwidth_hz",
            "echo.n_classes",
            "echo.dt_s",
        ] {
            positive(key)?;
        }
        for key in [
            "device.length_m",
            "burn.peak_power_w",
            "burn.peak_rabi_rad_s",
            "burn.kappa",
            "burn.target_contrast",
            "burn.initial_od",
            "probe.fwhm_hz",
            "comb.background_od",
            "noise.relative_sigma",
        ] {
            if let Some(f) = self.opt_f64(key) {
                if !(f >= 0.0 && f.is_finite()) {
                    return Err(err(key, format!("must be finite and >= 0, got {f}")));
                }
            }
        }
        for key in ["device.coupling_in", "device.coupling_out", "burn.hole_depth_cap"] {
            let f = self.f64(key);
            if !(f > 0.0 && f <= 1.0) {
                return Err(err(key, format!("must lie in (0, 1], got {f}")));
            }
        }
        if self.f64("comb.finesse") <= 1.0 {
            return Err(err("comb.finesse", format!("must be > 1, got {}", self.f64("comb.finesse"))));
        }
        if self.f64("burn.window_low_hz") >= self.f64("burn.window_high_hz") {
            return Err(err("burn.window_high_hz", "must exceed burn.window_low_hz"));
        }
        if self.int("grid.n_points") < 16 {
            return Err(err("grid.n_points", "must be at least 16"));
        }
        if self.int("seed") < 0 {
            return Err(err("seed", "must be >= 0"));
        }
        if let Some(values) = self.opt_list("scan.values_s") {
            if values.iter().any(|v| *v < 0.0) {
                return Err(err("scan.values_s", "entries must be >= 0"));
            }
            if self.experiment == Experiment::RabiScan && values.windows(2).any(|w| w[1] < w[0]) {
                return Err(err("scan.values_s", "pulse lengths must be sorted"));
            }
        }
        Ok(())
    }

    pub fn f64(&self, key: &str) -> f64 {
        self.opt_f64(key).unwrap_or_else(|| panic!("float key `{key}` has no value"))
    }

    pub fn opt_f64(&self, key: &str) -> Option<f64> {
        self.values.get(key).and_then(Value::as_float)
    }

    pub fn int(&self, key: &str) -> i64 {
        self.values.get(key).and_then(Value::as_integer).unwrap_or_else(|| panic!("integer key `{key}` has no value"))
    }

    pub fn bool(&self, key: &str) -> bool {
        self.values.get(key).and_then(Value::as_bool).unwrap_or_else(|| panic!("bool key `{key}` has no value"))
    }

    pub fn str(&self, key: &str) -> &str {
        self.values.get(key).and_then(Value::as_str).unwrap_or_else(|| panic!("string key `{key}` has no value"))
    }

    pub fn opt_list(&self, key: &str) -> Option<Vec<f64>> {
        self.values.get(key).and_then(Value::as_array).map(|a| a.iter().filter_map(Value::as_float).collect())
    }

    pub fn seed(&self) -> u64 {
        self.int("seed") as u64
    }

    /// Copy with one numeric key replaced, as used by sweeps.
    pub fn with_value(&self, key: &str, value: f64) -> Result<Self, ConfigError> {
        let spec = spec_of(key).ok_or_else(|| err(key, "unknown key"))?;
        let v = match spec.kind {
            Kind::Float => Value::Float(value),
            Kind::Int if value.fract() == 0.0 && value.is_finite() => Value::Integer(value as i64),
            Kind::Int => return Err(err(key, format!("integer field cannot take {value}"))),
            _ => return Err(err(key, "not a numeric field")),
        };
        let mut raw = self.values.clone();
        raw.insert(key.to_string(), v);
        Self::from_flat(raw)
    }

    /// All resolved keys as TOML, one `key = value` line each.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.values {
            let _ = writeln!(out, "{k} = {}", format_value(v));
        }
        out
    }

    /// Resolved keys as `key=value` header lines for data files.
    pub fn header_lines(&self) -> Vec<String> {
        self.values.iter().map(|(k, v)| format!("{k}={}", format_value(v))).collect()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }
}

/// TOML rendering that round-trips floats exactly.
fn format_value(v: &Value) -> String {
    match v {
        Value::Float(f) if f.is_infinite() => (if *f > 0.0 { "inf" } else { "-inf" }).to_string(),
        Value::Float(f) => format!("{f:e}"),
        Value::Array(items) => format!("[{}]", items.iter().map(format_value).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}
