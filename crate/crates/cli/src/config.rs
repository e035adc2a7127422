//! Flat `key = value` configuration documents with unit suffixes.
//!
//! ```text
//! # high-frequency scenario without squeezing
//! preset = fig5_highfreq
//! squeeze = 0 dB
//! tilt = 85 prad
//! ```
//!
//! Blank lines and `#` comments are ignored. Unknown keys are rejected.
//! Keys left out keep the value of the selected preset (default
//! `fig3b_lowfreq`). Dimensional values must carry a unit suffix and are
//! converted to SI on parse.

use std::collections::BTreeMap;
use std::str::FromStr;

use wvasim_core::spectra::Window;
use wvasim_core::{BeamGeometry, MeasurementConfig, OpticalPower, QuadratureState, TraceConfig};

use crate::presets::Preset;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Postselection,
    Squeezing,
}

impl SweepKind {
    pub fn name(self) -> &'static str {
        match self {
            SweepKind::Postselection => "postselection",
            SweepKind::Squeezing => "squeezing",
        }
    }
}

/// Raw SI settings before they are assembled into core types.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub input_power_w: f64,
    pub output_power_w: f64,
    pub wavelength_m: f64,
    pub waist_m: f64,
    pub psi_rad: f64,
    pub squeeze_db: f64,
    pub squeeze_angle_rad: f64,
    pub tilt_rad: f64,
    pub lever_arm_m: f64,
    /// `None` means `1 / rbw`.
    pub integration_time_s: Option<f64>,
    pub signal_frequency_hz: f64,
    pub sample_rate_hz: f64,
    pub rbw_hz: f64,
    pub averages: usize,
    /// Overrides `averages` when set.
    pub duration_s: Option<f64>,
    pub seed: u64,
    pub window: Window,
    pub noise: bool,
    pub flipped_mode: bool,
    pub efficiency: f64,
    pub sweep: SweepKind,
    pub probabilities: Vec<f64>,
    pub squeeze_levels_db: Vec<f64>,
    pub phase_points: usize,
}

/// A fully validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: Preset,
    pub settings: Settings,
    pub trace: TraceConfig,
}

impl RunConfig {
    pub fn measurement(&self) -> &MeasurementConfig {
        &self.trace.measurement
    }
}

const KEYS: &[&str] = &[
    "preset",
    "input_power",
    "output_power",
    "wavelength",
    "waist",
    "psi",
    "squeeze",
    "squeeze_angle",
    "tilt",
    "lever_arm",
    "integration_time",
    "signal_frequency",
    "sample_rate",
    "rbw",
    "averages",
    "duration",
    "seed",
    "window",
    "noise",
    "flipped_mode",
    "efficiency",
    "sweep",
    "probabilities",
    "squeeze_levels",
    "phase_points",
];

/// Splits `"10 mW"` / `"10mW"` into the longest numeric prefix and the unit.
fn split_quantity(text: &str) -> Option<(f64, &str)> {
    let text = text.trim();
    let mut ends: Vec<usize> = text.char_indices().map(|(i, _)| i).skip(1).collect();
    ends.push(text.len());
    ends.into_iter()
        .rev()
        .find_map(|end| text[..end].trim().parse::<f64>().ok().map(|v| (v, text[end..].trim())))
}

fn unit_scale(unit: &str, table: &[(&str, f64)]) -> Option<f64> {
    let unit = unit.replace(['µ', 'μ'], "u");
    table.iter().find(|(u, _)| *u == unit).map(|(_, s)| *s)
}

const POWER: &[(&str, f64)] = &[("W", 1.0), ("mW", 1e-3), ("uW", 1e-6), ("nW", 1e-9)];
const LENGTH: &[(&str, f64)] = &[
    ("m", 1.0),
    ("cm", 1e-2),
    ("mm", 1e-3),
    ("um", 1e-6),
    ("nm", 1e-9),
    ("pm", 1e-12),
    ("fm", 1e-15),
];
const TILT: &[(&str, f64)] = &[
    ("rad", 1.0),
    ("mrad", 1e-3),
    ("urad", 1e-6),
    ("nrad", 1e-9),
    ("prad", 1e-12),
    ("deg", std::f64::consts::PI / 180.0),
];
const PHASE: &[(&str, f64)] = &[("rad", 1.0), ("deg", std::f64::consts::PI / 180.0)];
const TIME: &[(&str, f64)] = &[("s", 1.0), ("ms", 1e-3), ("us", 1e-6), ("ns", 1e-9)];
const FREQUENCY: &[(&str, f64)] = &[("Hz", 1.0), ("kHz", 1e3), ("MHz", 1e6), ("GHz", 1e9)];
const DECIBEL: &[(&str, f64)] = &[("dB", 1.0)];

struct Entry<'a> {
    line: usize,
    key: &'a str,
    value: &'a str,
}

impl Entry<'_> {
    fn error(&self, reason: impl std::fmt::Display) -> CliError {
        CliError::Config(format!("line {}: key '{}': {reason}", self.line, self.key))
    }

    fn quantity(&self, table: &[(&str, f64)]) -> Result<f64, CliError> {
        let units = || table.iter().map(|(u, _)| *u).collect::<Vec<_>>().join(", ");
        let (v, unit) = split_quantity(self.value).ok_or_else(|| self.error(format!("'{}' is not a number", self.value)))?;
        if unit.is_empty() {
            return Err(self.error(format!("missing unit suffix (one of {})", units())));
        }
        let scale = unit_scale(unit, table).ok_or_else(|| self.error(format!("unknown unit '{unit}' (one of {})", units())))?;
        Ok(v * scale)
    }

    fn fraction(&self, text: &str) -> Result<f64, CliError> {
        let (v, unit) = split_quantity(text).ok_or_else(|| self.error(format!("'{text}' is not a number")))?;
        match unit {
            "" => Ok(v),
            "%" => Ok(format!("{:.14e}", v / 100.0).parse().unwrap_or(v / 100.0)),
            other => Err(self.error(format!("unknown unit '{other}' (use % or a plain fraction)"))),
        }
    }

    fn count(&self) -> Result<usize, CliError> {
        self.value.parse().map_err(|_| self.error(format!("'{}' is not a non-negative integer", self.value)))
    }

    fn flag(&self) -> Result<bool, CliError> {
        match self.value.to_ascii_lowercase().as_str() {
            "true" | "yes" | "on" => Ok(true),
            "false" | "no" | "off" => Ok(false),
            other => Err(self.error(format!("'{other}' is not a boolean"))),
        }
    }

    fn list(&self) -> Vec<&str> {
        self.value.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
    }
}

fn entries(text: &str) -> Result<Vec<Entry<'_>>, CliError> {
    let mut out: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected 'key = value', got '{line}'", i + 1)))?;
        let key = key.trim();
        let value = value.trim();
        if !KEYS.contains(&key) {
            return Err(CliError::Config(format!("line {}: unknown key '{key}'", i + 1)));
        }
        if let Some(prev) = out.iter().find(|e| e.key == key) {
            return Err(CliError::Config(format!(
                "line {}: key '{key}' already set on line {}",
                i + 1,
                prev.line
            )));
        }
        out.push(Entry { line: i + 1, key, value });
    }
    Ok(out)
}

/// Parses a document on top of a preset. `preset_override` (the command-line
/// flag) wins over a `preset` key in the document.
pub fn parse_config(text: &str, preset_override: Option<Preset>) -> Result<RunConfig, CliError> {
    let entries = entries(text)?;
    let doc_preset = entries
        .iter()
        .find(|e| e.key == "preset")
        .map(|e| Preset::from_str(e.value).map_err(|err| e.error(err)))
        .transpose()?;
    let preset = preset_override.or(doc_preset).unwrap_or(Preset::Fig3bLowFreq);
    let mut s = preset.settings();

    for e in &entries {
        match e.key {
            "preset" => {}
            "input_power" => s.input_power_w = e.quantity(POWER)?,
            "output_power" => s.output_power_w = e.quantity(POWER)?,
            "wavelength" => s.wavelength_m = e.quantity(LENGTH)?,
            "waist" => s.waist_m = e.quantity(LENGTH)?,
            "psi" => s.psi_rad = e.quantity(PHASE)?,
            "squeeze" => s.squeeze_db = e.quantity(DECIBEL)?,
            "squeeze_angle" => s.squeeze_angle_rad = e.quantity(PHASE)?,
            "tilt" => s.tilt_rad = e.quantity(TILT)?,
            "lever_arm" => s.lever_arm_m = e.quantity(LENGTH)?,
            "integration_time" => s.integration_time_s = Some(e.quantity(TIME)?),
            "signal_frequency" => s.signal_frequency_hz = e.quantity(FREQUENCY)?,
            "sample_rate" => s.sample_rate_hz = e.quantity(FREQUENCY)?,
            "rbw" => s.rbw_hz = e.quantity(FREQUENCY)?,
            "averages" => s.averages = e.count()?,
            "duration" => s.duration_s = Some(e.quantity(TIME)?),
            "seed" => s.seed = e.value.parse().map_err(|_| e.error("not an unsigned integer"))?,
            "window" => s.window = Window::from_str(e.value).map_err(|err| e.error(err))?,
            "noise" => s.noise = e.flag()?,
            "flipped_mode" => s.flipped_mode = e.flag()?,
            "efficiency" => s.efficiency = e.fraction(e.value)?,
            "sweep" => {
                s.sweep = match e.value {
                    "postselection" => SweepKind::Postselection,
                    "squeezing" => SweepKind::Squeezing,
                    other => return Err(e.error(format!("'{other}' is not postselection or squeezing"))),
                }
            }
            "probabilities" => {
                s.probabilities = e.list().into_iter().map(|v| e.fraction(v)).collect::<Result<_, _>>()?;
            }
            "squeeze_levels" => {
                s.squeeze_levels_db = e
                    .list()
                    .into_iter()
                    .map(|v| {
                        Entry {
                            line: e.line,
                            key: e.key,
                            value: v,
                        }
                        .quantity(DECIBEL)
                    })
                    .collect::<Result<_, _>>()?;
            }
            "phase_points" => s.phase_points = e.count()?,
            _ => unreachable!("key list checked in entries()"),
        }
    }
    build(preset, s)
}

/// Assembles and validates core types from settings.
pub fn build(preset: Preset, s: Settings) -> Result<RunConfig, CliError> {
    let invalid = |e: wvasim_core::Error| CliError::Config(e.to_string());
    let geometry = BeamGeometry::new(s.wavelength_m, s.waist_m).map_err(invalid)?;
    let mut m = MeasurementConfig::new(
        geometry,
        OpticalPower::watts(s.input_power_w).map_err(invalid)?,
        OpticalPower::watts(s.output_power_w).map_err(invalid)?,
    )
    .map_err(invalid)?;
    let r = wvasim_core::quantum_state::db_to_r(s.squeeze_db).map_err(invalid)?;
    m.squeeze = QuadratureState::squeezed_vacuum(r, s.squeeze_angle_rad).map_err(invalid)?;
    m.psi = s.psi_rad;
    m.tilt = s.tilt_rad;
    m.lever_arm = s.lever_arm_m;
    m.flipped_mode = s.flipped_mode;
    m.efficiency = s.efficiency;
    if !(s.rbw_hz.is_finite() && s.rbw_hz > 0.0) {
        return Err(CliError::Config(format!("rbw {} Hz must be positive", s.rbw_hz)));
    }
    m.integration_time = s.integration_time_s.unwrap_or(1.0 / s.rbw_hz);
    m.validate().map_err(invalid)?;

    let mut trace = TraceConfig {
        measurement: m,
        signal_frequency: s.signal_frequency_hz,
        sample_rate: s.sample_rate_hz,
        duration: 1.0,
        rbw: s.rbw_hz,
        seed: s.seed,
        window: s.window,
        noise: s.noise,
    };
    trace.duration = match s.duration_s {
        Some(d) => d,
        None => trace.duration_for_averages(s.averages).map_err(invalid)?,
    };
    trace.validate().map_err(invalid)?;

    if s.probabilities.iter().any(|p| !(*p > 0.0 && *p < 1.0)) {
        return Err(CliError::Config("probabilities must lie in (0, 1)".into()));
    }
    if s.phase_points < 2 {
        return Err(CliError::Config("phase_points must be at least 2".into()));
    }
    Ok(RunConfig {
        preset,
        settings: s,
        trace,
    })
}

/// Applies `key=value` overrides given on the command line after the document.
pub fn merge_overrides(text: &str, overrides: &[String]) -> Result<String, CliError> {
    let mut keyed: BTreeMap<String, String> = BTreeMap::new();
    for o in overrides {
        let (k, v) = o
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("override '{o}' is not key=value")))?;
        keyed.insert(k.trim().to_string(), v.trim().to_string());
    }
    let mut out = String::new();
    for line in text.lines() {
        let key = line.split('#').next().unwrap_or("").split_once('=').map(|(k, _)| k.trim().to_string());
        match key {
            Some(k) if keyed.contains_key(&k) => {
                out.push_str(&format!("{k} = {}\n", keyed.remove(&k).unwrap_or_default()));
            }
            _ => {
                out.push_str(line);
                out.push('\n');
            }
        }
    }
    for (k, v) in keyed {
        out.push_str(&format!("{k} = {v}\n"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_quantities() {
        assert_eq!(split_quantity("10 mW"), Some((10.0, "mW")));
        assert_eq!(split_quantity("260uW"), Some((260.0, "uW")));
        assert_eq!(split_quantity("1e-3 W"), Some((1e-3, "W")));
        assert_eq!(split_quantity("2.6%"), Some((2.6, "%")));
        assert_eq!(split_quantity("7"), Some((7.0, "")));
        assert_eq!(split_quantity("mW"), None);
    }

    #[test]
    fn empty_document_is_fig3b() {
        let cfg = parse_config("", None).unwrap();
        assert_eq!(cfg, parse_config("preset = fig3b_lowfreq", None).unwrap());
        assert_eq!(cfg.preset, Preset::Fig3bLowFreq);
    }

    #[test]
    fn units_convert_to_si() {
        let cfg = parse_config("waist = 1860 um\ninput_power = 0.01 W\ntilt = 7.83e-3 nrad", None).unwrap();
        let reference = parse_config("", None).unwrap();
        assert!((cfg.settings.waist_m - reference.settings.waist_m).abs() < 1e-18);
        assert!((cfg.settings.tilt_rad / 7.83e-12 - 1.0).abs() < 1e-12);
        assert_eq!(cfg.settings.input_power_w, 0.01);
        let nm = parse_config("waist = 1860000 nm", None).unwrap();
        assert!((nm.settings.waist_m / 1.86e-3 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagnostics_name_line_and_key() {
        let err = parse_config("squeeze = 2 dB\nwaist = 1.86\n", None).unwrap_err();
        assert!(err.to_string().contains("line 2") && err.to_string().contains("waist"), "{err}");
        let err = parse_config("colour = blue", None).unwrap_err();
        assert!(err.to_string().contains("unknown key 'colour'"));
        let err = parse_config("tilt = 3 furlongs", None).unwrap_err();
        assert!(err.to_string().contains("unknown unit"));
        let err = parse_config("waist = 1 mm\nwaist = 2 mm", None).unwrap_err();
        assert!(err.to_string().contains("already set"));
        assert!(parse_config("no equals sign", None).is_err());
    }

    #[test]
    fn invariant_violations_name_constraint() {
        let err = parse_config("output_power = 20 mW", None).unwrap_err();
        assert!(err.to_string().contains("(0, 1)"), "{err}");
        let err = parse_config("squeeze = -1 dB", None).unwrap_err();
        assert!(err.to_string().contains("squeezing"), "{err}");
        let err = parse_config("sample_rate = 6 kHz", None).unwrap_err();
        assert!(err.to_string().contains("Nyquist"), "{err}");
    }

    #[test]
    fn lists_and_flags() {
        let cfg = parse_config("probabilities = 26%, 0.13, 5.2 %\nsqueeze_levels = 0 dB, 3dB\nnoise = off\nwindow = rect", None).unwrap();
        assert_eq!(cfg.settings.probabilities, vec![0.26, 0.13, 0.052]);
        assert_eq!(cfg.settings.squeeze_levels_db, vec![0.0, 3.0]);
        assert!(!cfg.trace.noise);
        assert_eq!(cfg.trace.window, Window::Rect);
    }

    #[test]
    fn flag_preset_wins() {
        let cfg = parse_config("preset = fig3b_lowfreq", Some(Preset::Fig5HighFreq)).unwrap();
        assert_eq!(cfg.preset, Preset::Fig5HighFreq);
        assert_eq!(cfg.trace.rbw, 30e3);
    }

    #[test]
    fn integration_time_defaults_to_inverse_rbw() {
        let cfg = parse_config("preset = fig5_highfreq", None).unwrap();
        assert!((cfg.measurement().integration_time - 1.0 / 30e3).abs() < 1e-18);
        let cfg = parse_config("integration_time = 2 s", None).unwrap();
        assert_eq!(cfg.measurement().integration_time, 2.0);
    }

    #[test]
    fn overrides_replace_and_append() {
        let merged = merge_overrides("squeeze = 2 dB\n# note\n", &["squeeze=0 dB".into(), "seed=5".into()]).unwrap();
        let cfg = parse_config(&merged, None).unwrap();
        assert_eq!(cfg.settings.squeeze_db, 0.0);
        assert_eq!(cfg.settings.seed, 5);
        assert!(merge_overrides("", &["nope".into()]).is_err());
    }
}
