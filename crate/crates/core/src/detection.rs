//! Split-like detection of the dark-port field.
//!
//! A D-shaped mirror divides the beam at `x = 0`. To first order in the
//! fluctuations the photon-number difference is
//! `N⁻ = A·2·Re(b s*) + B·√N'·δX(ψ)`, with `b` the TEM00 amplitude, `s` the
//! tilt-induced TEM10 amplitude, `A = √(2/π)` the TEM10/TEM00 split overlap
//! and `B = 1` the overlap of the TEM00 local field with the flipped noise mode.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hg_modes::FLIPPED_TEM10_OVERLAP;
use crate::interferometer::{dark_port_output, MeasurementConfig};

/// Split overlap `A = ∫ sign(x) u_1 u_0 dx`.
pub const SPLIT_SIGNAL_GAIN: f64 = FLIPPED_TEM10_OVERLAP;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DifferenceStatistics {
    /// Mean photon-number difference over `T`.
    pub mean: f64,
    /// Variance of the difference, photons².
    pub variance: f64,
    pub snr_linear: f64,
    pub snr_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Snr {
    pub linear: f64,
    pub db: f64,
}

impl Snr {
    fn from_linear(linear: f64) -> Self {
        Self {
            linear,
            db: 10.0 * linear.log10(),
        }
    }
}

/// Mean and variance of the split-detector photon-number difference.
pub fn difference_statistics(c: &MeasurementConfig) -> Result<DifferenceStatistics> {
    let dark = dark_port_output(c)?;
    if !(dark.dark_photon_number > 0.0) {
        return Err(Error::Degenerate("no photons reach the dark port".into()));
    }
    let mean = 2.0 * SPLIT_SIGNAL_GAIN * dark.baseline_u0_amplitude * dark.signal_u1_amplitude.re;
    let variance = dark.dark_photon_number * c.effective_quadrature_variance();
    if !(variance > 0.0) {
        return Err(Error::Degenerate(format!("non-positive noise variance {variance}")));
    }
    let snr_linear = mean * mean / variance;
    Ok(DifferenceStatistics {
        mean,
        variance,
        snr_linear,
        snr_db: 10.0 * snr_linear.log10(),
    })
}

/// Closed-form `SNR = (2/π)·N·cos²(φ/2)·w0²k² / V`, where `V = e^{-2r}` for
/// amplitude squeezing read at ψ = 0.
pub fn snr(c: &MeasurementConfig) -> Result<Snr> {
    c.validate()?;
    let n = c.photon_number()?;
    let v = c.effective_quadrature_variance();
    if !(v > 0.0) {
        return Err(Error::Degenerate(format!("non-positive noise variance {v}")));
    }
    let w0k = c.geometry.waist() * c.wavenumber();
    let cos2 = (0.5 * c.phi).cos().powi(2);
    Ok(Snr::from_linear(
        2.0 / std::f64::consts::PI * n * cos2 * w0k * w0k / v,
    ))
}

/// Smallest tilt and displacement resolvable at SNR = 1 (a tone 3 dB above the floor).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    /// Minimum tilt at the configured integration time, rad.
    pub min_tilt: f64,
    /// `l·sin(min_tilt)`, m.
    pub min_displacement: f64,
    /// Minimum tilt normalized to a 1 Hz bandwidth, rad/√Hz.
    pub tilt_density: f64,
    /// Minimum displacement normalized to a 1 Hz bandwidth, m/√Hz.
    pub displacement_density: f64,
}

/// Solves `snr = 1` for the tilt.
///
/// Densities use the convention `density = minimum · √T`, i.e. the minimum
/// detectable value for `T = 1 s`, so they do not depend on the configured `T`.
pub fn min_detectable_tilt(c: &MeasurementConfig) -> Result<SensitivityReport> {
    c.validate()?;
    let n = c.photon_number()?;
    let v = c.effective_quadrature_variance();
    let half = 0.5 * c.phi;
    let w0 = c.geometry.waist();
    let lambda = c.geometry.wavelength();
    let k_min = (std::f64::consts::FRAC_PI_2 * v).sqrt() / (n.sqrt() * half.cos() * w0);
    let sin_tilt = lambda * k_min / (2.0 * std::f64::consts::PI);
    if sin_tilt >= 1.0 {
        return Err(Error::Degenerate(format!("no tilt reaches SNR = 1 (sin θ = {sin_tilt})")));
    }
    let min_tilt = sin_tilt.asin();
    let min_displacement = c.lever_arm * sin_tilt;
    let root_t = c.integration_time.sqrt();
    Ok(SensitivityReport {
        min_tilt,
        min_displacement,
        tilt_density: min_tilt * root_t,
        displacement_density: min_displacement * root_t,
    })
}

/// `d = l sin θ`.
pub fn tilt_to_displacement(tilt: f64, lever_arm: f64) -> Result<f64> {
    check_lever_arm(lever_arm)?;
    Ok(lever_arm * tilt.sin())
}

/// `θ = asin(d / l)`.
pub fn displacement_to_tilt(displacement: f64, lever_arm: f64) -> Result<f64> {
    check_lever_arm(lever_arm)?;
    let ratio = displacement / lever_arm;
    if !(ratio.abs() <= 1.0) {
        return Err(Error::domain("displacement", format!("|d/l| = {} exceeds 1", ratio.abs())));
    }
    Ok(ratio.asin())
}

fn check_lever_arm(l: f64) -> Result<()> {
    if !(l.is_finite() && l > 0.0) {
        return Err(Error::domain("lever arm", format!("{l} m must be positive")));
    }
    Ok(())
}
