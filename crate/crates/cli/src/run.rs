use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use wvasim_core::hg_modes::{self, ModeIndex};
use wvasim_core::interferometer::bright_photon_number;
use wvasim_core::spectra::{self, Window};
use wvasim_core::{dark_port_output, difference_statistics, min_detectable_tilt};

use crate::config::{RunConfig, SweepKind};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    /// Closed-form SNR of the split-detector difference signal.
    Snr,
    /// Minimum detectable tilt and displacement, with 1 Hz densities.
    Sensitivity,
    /// Monte Carlo photocurrent spectrum and its peak SNR.
    Spectrum,
    /// SNR over postselection probabilities or squeezing levels.
    Sweep,
    /// Squeezed-quadrature variance against local-oscillator phase.
    Phasescan,
    /// Mode-overlap table and flipped-mode expansion.
    Modes,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Snr => "snr",
            Command::Sensitivity => "sensitivity",
            Command::Spectrum => "spectrum",
            Command::Sweep => "sweep",
            Command::Phasescan => "phasescan",
            Command::Modes => "modes",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    /// Non-finite values become text (`inf`, `-inf`, `NaN`) so JSON stays valid.
    pub fn num(v: f64) -> Self {
        if v.is_finite() {
            Cell::Num(round12(v))
        } else {
            Cell::Text(v.to_string())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn push_nums(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&v| Cell::num(v)).collect());
    }
}

/// The configuration as run, in SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub input_power_w: f64,
    pub output_power_w: f64,
    pub wavelength_m: f64,
    pub waist_m: f64,
    pub phi_rad: f64,
    pub psi_rad: f64,
    pub squeeze_db: f64,
    pub squeeze_angle_rad: f64,
    pub tilt_rad: f64,
    pub lever_arm_m: f64,
    pub integration_time_s: f64,
    pub signal_frequency_hz: f64,
    pub sample_rate_hz: f64,
    pub rbw_hz: f64,
    pub duration_s: f64,
    pub window: Window,
    pub noise: bool,
    pub flipped_mode: bool,
    pub efficiency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub version: String,
    pub preset: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub command: String,
    pub config: ConfigEcho,
    /// Named scalar outputs. Non-finite values are omitted.
    pub scalars: BTreeMap<String, f64>,
    pub table: Table,
    pub provenance: Provenance,
}

/// Rounds to 12 significant digits so text output parses back to the same value.
pub fn round12(v: f64) -> f64 {
    if v.is_finite() && v != 0.0 {
        format!("{v:.11e}").parse().unwrap_or(v)
    } else {
        v
    }
}

#[derive(Default)]
struct Scalars(BTreeMap<String, f64>);

impl Scalars {
    fn set(&mut self, key: &str, v: f64) {
        if v.is_finite() {
            self.0.insert(key.to_string(), round12(v));
        }
    }
}

fn echo(cfg: &RunConfig) -> ConfigEcho {
    let m = cfg.measurement();
    let t = &cfg.trace;
    ConfigEcho {
        input_power_w: round12(m.input_power.as_watts()),
        output_power_w: round12(m.output_power.as_watts()),
        wavelength_m: round12(m.geometry.wavelength()),
        waist_m: round12(m.geometry.waist()),
        phi_rad: round12(m.phi),
        psi_rad: round12(m.psi),
        squeeze_db: round12(m.squeeze.squeeze_db()),
        squeeze_angle_rad: round12(m.squeeze.squeezed_quadrature_angle),
        tilt_rad: round12(m.tilt),
        lever_arm_m: round12(m.lever_arm),
        integration_time_s: round12(m.integration_time),
        signal_frequency_hz: round12(t.signal_frequency),
        sample_rate_hz: round12(t.sample_rate),
        rbw_hz: round12(t.rbw),
        duration_s: round12(t.duration),
        window: t.window,
        noise: t.noise,
        flipped_mode: m.flipped_mode,
        efficiency: round12(m.efficiency),
    }
}

pub fn run(command: Command, cfg: &RunConfig) -> Result<RunResult, CliError> {
    let mut scalars = Scalars::default();
    let table = match command {
        Command::Snr => snr(cfg, &mut scalars)?,
        Command::Sensitivity => sensitivity(cfg, &mut scalars)?,
        Command::Spectrum => spectrum(cfg, &mut scalars)?,
        Command::Sweep => sweep(cfg, &mut scalars)?,
        Command::Phasescan => phasescan(cfg, &mut scalars)?,
        Command::Modes => modes(cfg, &mut scalars)?,
    };
    Ok(RunResult {
        command: command.name().to_string(),
        config: echo(cfg),
        scalars: scalars.0,
        table,
        provenance: Provenance {
            seed: cfg.trace.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            preset: cfg.preset.name().to_string(),
        },
    })
}

fn snr(cfg: &RunConfig, out: &mut Scalars) -> Result<Table, CliError> {
    let m = cfg.measurement();
    let stats = difference_statistics(m)?;
    let dark = dark_port_output(m)?;
    out.set("snr_linear", stats.snr_linear);
    out.set("snr_db", stats.snr_db);
    out.set("mean", stats.mean);
    out.set("variance", stats.variance);
    out.set("weak_value", m.weak_value());
    out.set("postselection_probability", m.postselection_probability());
    out.set("photon_number", m.photon_number()?);
    out.set("dark_photon_number", dark.dark_photon_number);
    out.set("bright_photon_number", bright_photon_number(m)?);
    out.set("effective_variance", m.effective_quadrature_variance());
    let mut t = Table::new(&["snr_linear", "snr_db", "mean", "variance"]);
    t.push_nums(&[stats.snr_linear, stats.snr_db, stats.mean, stats.variance]);
    Ok(t)
}

fn sensitivity(cfg: &RunConfig, out: &mut Scalars) -> Result<Table, CliError> {
    let r = min_detectable_tilt(cfg.measurement())?;
    out.set("min_tilt_rad", r.min_tilt);
    out.set("min_displacement_m", r.min_displacement);
    out.set("tilt_density_rad_per_rthz", r.tilt_density);
    out.set("displacement_density_m_per_rthz", r.displacement_density);
    let mut t = Table::new(&[
        "min_tilt_rad",
        "min_displacement_m",
        "tilt_density_rad_per_rthz",
        "displacement_density_m_per_rthz",
    ]);
    t.push_nums(&[r.min_tilt, r.min_displacement, r.tilt_density, r.displacement_density]);
    Ok(t)
}

fn spectrum(cfg: &RunConfig, out: &mut Scalars) -> Result<Table, CliError> {
    let est = spectra::simulate_spectrum(&cfg.trace)?;
    let shot = spectra::shot_noise_density(cfg.measurement())?;
    out.set("shot_noise_density", shot);
    out.set("analytic_floor_density", spectra::analytic_floor_density(cfg.measurement())?);
    out.set("bin_width_hz", est.bin_width);
    out.set("enbw_hz", est.enbw);
    out.set("averages", est.n_averages as f64);
    if cfg.trace.noise {
        let peak = spectra::peak_snr(&est, cfg.trace.signal_frequency)?;
        out.set("peak_frequency_hz", peak.frequency);
        out.set("peak_power", peak.peak_power);
        out.set("floor_power", peak.floor_power);
        out.set("floor_density", peak.floor_density);
        out.set("floor_db_rel_snl", 10.0 * (peak.floor_density / shot).log10());
        out.set("peak_to_floor_db", peak.peak_to_floor_db);
        out.set("snr_linear", peak.snr_linear);
        out.set("snr_db", peak.snr_db);
    }
    let mut t = Table::new(&["frequency_hz", "psd_db_rel_snl", "psd"]);
    for (f, p) in est.frequencies.iter().zip(&est.psd) {
        t.push_nums(&[*f, 10.0 * (p / shot).log10(), *p]);
    }
    Ok(t)
}

fn sweep(cfg: &RunConfig, out: &mut Scalars) -> Result<Table, CliError> {
    let m = cfg.measurement();
    let s = &cfg.settings;
    let (columns, points): (&[&str], Vec<(f64, f64)>) = match s.sweep {
        SweepKind::Postselection => (
            &["p_f", "snr_db"],
            spectra::postselection_sweep(m, &s.probabilities)?
                .into_iter()
                .map(|e| (e.p_f, e.snr_db))
                .collect(),
        ),
        SweepKind::Squeezing => (
            &["squeeze_db", "snr_db"],
            spectra::squeezing_sweep(m, &s.squeeze_levels_db)?
                .into_iter()
                .map(|e| (e.squeeze_db, e.snr_db))
                .collect(),
        ),
    };
    if let (Some(first), Some(last)) = (points.first(), points.last()) {
        out.set("snr_db_span", last.1 - first.1);
    }
    let mut t = Table::new(columns);
    for (x, y) in points {
        t.push_nums(&[x, y]);
    }
    Ok(t)
}

fn phasescan(cfg: &RunConfig, out: &mut Scalars) -> Result<Table, CliError> {
    let points = spectra::local_phase_scan(&cfg.measurement().squeeze, cfg.settings.phase_points)?;
    let min = points.iter().map(|p| p.variance).fold(f64::INFINITY, f64::min);
    let max = points.iter().map(|p| p.variance).fold(f64::NEG_INFINITY, f64::max);
    out.set("min_variance_db", 10.0 * min.log10());
    out.set("max_variance_db", 10.0 * max.log10());
    let mut t = Table::new(&["psi_rad", "variance", "variance_db"]);
    for p in points {
        t.push_nums(&[p.psi, p.variance, 10.0 * p.variance.log10()]);
    }
    Ok(t)
}

fn modes(cfg: &RunConfig, out: &mut Scalars) -> Result<Table, CliError> {
    let g = &cfg.measurement().geometry;
    let top = ModeIndex::new(hg_modes::N_MAX)?;
    let flipped = hg_modes::flipped_mode(g, top)?;
    out.set("flipped_tem10_overlap", flipped.coeff(1).re);
    out.set("flipped_norm_captured", flipped.norm_sqr());

    let mut t = Table::new(&["kind", "m", "n", "value"]);
    let row = |kind: &str, m: usize, n: usize, v: f64| {
        vec![
            Cell::Text(kind.to_string()),
            Cell::Num(m as f64),
            Cell::Num(n as f64),
            Cell::num(v),
        ]
    };
    for m in 0..=hg_modes::N_MAX {
        for n in 0..=hg_modes::N_MAX {
            let (mi, ni) = (ModeIndex::new(m)?, ModeIndex::new(n)?);
            t.push(row("overlap", m, n, hg_modes::overlap(mi, ni, g)?));
        }
    }
    for m in 0..=hg_modes::N_MAX {
        for n in 0..=hg_modes::N_MAX {
            let (mi, ni) = (ModeIndex::new(m)?, ModeIndex::new(n)?);
            t.push(row("split_overlap", m, n, hg_modes::split_overlap(mi, ni, g)?));
        }
    }
    for (n, c) in flipped.coeffs().iter().enumerate() {
        t.push(row("flipped", n, 0, c.re));
    }
    Ok(t)
}
