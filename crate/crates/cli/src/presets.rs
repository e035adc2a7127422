//! Named scenarios that seed every configuration key.

use std::fmt;
use std::str::FromStr;

use wvasim_core::spectra::Window;

use crate::config::{Settings, SweepKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// SNR against postselection probability at fixed output power, no squeezing.
    Fig2Postselection,
    /// 4 kHz tone, 1 Hz RBW, 2 dB squeezing.
    Fig3bLowFreq,
    /// Squeezed-quadrature variance against local-oscillator phase.
    Fig4bPhaseScan,
    /// 500 kHz tone, 30 kHz RBW, 2 dB squeezing.
    Fig5HighFreq,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::Fig2Postselection,
        Preset::Fig3bLowFreq,
        Preset::Fig4bPhaseScan,
        Preset::Fig5HighFreq,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2Postselection => "fig2_postselection",
            Preset::Fig3bLowFreq => "fig3b_lowfreq",
            Preset::Fig4bPhaseScan => "fig4b_phase_scan",
            Preset::Fig5HighFreq => "fig5_highfreq",
        }
    }

    pub fn settings(self) -> Settings {
        let low = Settings {
            input_power_w: 10e-3,
            output_power_w: 260e-6,
            wavelength_m: 1064e-9,
            waist_m: 1.86e-3,
            psi_rad: 0.0,
            squeeze_db: 2.0,
            squeeze_angle_rad: 0.0,
            tilt_rad: 7.83e-12,
            lever_arm_m: 12.77e-3,
            integration_time_s: None,
            signal_frequency_hz: 4e3,
            sample_rate_hz: 16e3,
            rbw_hz: 1.0,
            averages: 256,
            duration_s: None,
            seed: 2024,
            window: Window::Hann,
            noise: true,
            flipped_mode: false,
            efficiency: 1.0,
            sweep: SweepKind::Postselection,
            probabilities: vec![0.26, 0.13, 0.052, 0.026],
            squeeze_levels_db: vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
            phase_points: 360,
        };
        let high = Settings {
            tilt_rad: 85e-12,
            signal_frequency_hz: 500e3,
            sample_rate_hz: 2e6,
            rbw_hz: 30e3,
            ..low.clone()
        };
        match self {
            Preset::Fig3bLowFreq => low,
            Preset::Fig2Postselection => Settings { squeeze_db: 0.0, ..low },
            Preset::Fig5HighFreq => high,
            Preset::Fig4bPhaseScan => high,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Preset::ALL.into_iter().find(|p| p.name() == s.trim()).ok_or_else(|| {
            let names: Vec<_> = Preset::ALL.iter().map(|p| p.name()).collect();
            format!("unknown preset '{s}' (one of {})", names.join(", "))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::build;

    #[test]
    fn every_preset_validates() {
        for p in Preset::ALL {
            build(p, p.settings()).unwrap_or_else(|e| panic!("{p}: {e}"));
        }
    }

    #[test]
    fn names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("fig9".parse::<Preset>().is_err());
    }
}
