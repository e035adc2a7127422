//! Single-mode Gaussian states in quadrature form, and the photon-number and
//! decibel conversions used throughout.
//!
//! Variances are in shot-noise units: a coherent state (or vacuum) has
//! variance 1 in every quadrature. A squeezed state with parameter `r` has
//! `e^{-2r}` along its squeezed quadrature and `e^{+2r}` orthogonal to it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Planck constant, J·s (exact SI value).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureState {
    /// Mean amplitude quadrature, √photons.
    pub mean_x: f64,
    /// Mean phase quadrature, √photons.
    pub mean_y: f64,
    r: f64,
    /// Angle of the squeezed quadrature; 0 is amplitude squeezing.
    pub squeezed_quadrature_angle: f64,
}

impl QuadratureState {
    pub fn vacuum() -> Self {
        Self {
            mean_x: 0.0,
            mean_y: 0.0,
            r: 0.0,
            squeezed_quadrature_angle: 0.0,
        }
    }

    /// Coherent state `|α⟩` with real amplitude `α = √N`.
    pub fn coherent(alpha: f64) -> Self {
        Self {
            mean_x: alpha,
            ..Self::vacuum()
        }
    }

    pub fn squeezed_vacuum(r: f64, angle: f64) -> Result<Self> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::domain("squeezing parameter", format!("r = {r} must be finite and ≥ 0")));
        }
        Ok(Self {
            r,
            squeezed_quadrature_angle: angle,
            ..Self::vacuum()
        })
    }

    /// Amplitude-squeezed vacuum at the given squeezing level in dB.
    pub fn squeezed_vacuum_db(squeeze_db: f64) -> Result<Self> {
        Self::squeezed_vacuum(db_to_r(squeeze_db)?, 0.0)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn is_coherent(&self) -> bool {
        self.r == 0.0
    }

    pub fn squeeze_db(&self) -> f64 {
        r_to_db(self.r)
    }
}

/// Squeezing level in power dB to the parameter `r`, so that `e^{-2r} = 10^{-dB/10}`.
pub fn db_to_r(squeeze_db: f64) -> Result<f64> {
    if !(squeeze_db.is_finite() && squeeze_db >= 0.0) {
        return Err(Error::domain(
            "squeezing level",
            format!("{squeeze_db} dB; anti-squeezing is expressed through the quadrature angle"),
        ));
    }
    Ok(squeeze_db * std::f64::consts::LN_10 / 20.0)
}

pub fn r_to_db(r: f64) -> f64 {
    20.0 * r / std::f64::consts::LN_10
}

/// Variance of the quadrature measured at angle `psi`, in shot-noise units.
pub fn quadrature_variance(s: &QuadratureState, psi: f64) -> f64 {
    if s.r == 0.0 {
        return 1.0;
    }
    let delta = psi - s.squeezed_quadrature_angle;
    let (sin, cos) = delta.sin_cos();
    (-2.0 * s.r).exp() * cos * cos + (2.0 * s.r).exp() * sin * sin
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct OpticalPower(f64);

impl OpticalPower {
    pub fn watts(w: f64) -> Result<Self> {
        if !(w.is_finite() && w >= 0.0) {
            return Err(Error::domain("optical power", format!("{w} W is negative or not finite")));
        }
        Ok(Self(w))
    }

    pub fn milliwatts(mw: f64) -> Result<Self> {
        Self::watts(mw * 1e-3)
    }

    pub fn microwatts(uw: f64) -> Result<Self> {
        Self::watts(uw * 1e-6)
    }

    pub fn as_watts(self) -> f64 {
        self.0
    }
}

/// Mean photon number `N = P λ T / (h c)` delivered in the integration time `T`.
pub fn photon_number_from_power(p: OpticalPower, wavelength: f64, integration_time: f64) -> Result<f64> {
    if p.0 <= 0.0 {
        return Err(Error::domain("optical power", "must be positive"));
    }
    if !(wavelength.is_finite() && wavelength > 0.0) {
        return Err(Error::domain("wavelength", "must be positive"));
    }
    if !(integration_time.is_finite() && integration_time > 0.0) {
        return Err(Error::domain("integration time", "must be positive"));
    }
    Ok(p.0 * wavelength * integration_time / (PLANCK * SPEED_OF_LIGHT))
}

/// `10 log10(a / b)`.
pub fn power_ratio_db(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::domain("power ratio", format!("operands {a}, {b} must be positive")));
    }
    Ok(10.0 * (a / b).log10())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn db_conversion_examples() {
        assert_eq!(db_to_r(0.0).unwrap(), 0.0);
        let r = db_to_r(2.0).unwrap();
        assert!(((-2.0 * r).exp() - 10f64.powf(-0.2)).abs() < 1e-15);
        assert!((r - 2.0 * 10f64.ln() / 20.0).abs() < 1e-15);
        assert!((r - 0.230_26).abs() < 1e-5);
        assert!(db_to_r(-1.0).is_err());
        assert!(QuadratureState::squeezed_vacuum(-0.1, 0.0).is_err());
    }

    #[test]
    fn variance_examples() {
        let coherent = QuadratureState::coherent(3.0);
        for psi in [0.0, 0.4, 2.0] {
            assert_eq!(quadrature_variance(&coherent, psi), 1.0);
        }
        let s = QuadratureState::squeezed_vacuum(db_to_r(2.0).unwrap(), 0.3).unwrap();
        assert!((quadrature_variance(&s, 0.3) - 0.630_957_344_480_193).abs() < 1e-12);
        assert!((quadrature_variance(&s, 0.3 + FRAC_PI_2) - 1.584_893_192_461_113).abs() < 1e-12);
    }

    #[test]
    fn phase_averaged_variance_is_cosh() {
        let s = QuadratureState::squeezed_vacuum(0.7, 0.2).unwrap();
        let n = 4096;
        let mean: f64 = (0..n).map(|j| quadrature_variance(&s, 2.0 * PI * j as f64 / n as f64)).sum::<f64>() / n as f64;
        assert!((mean - (1.4f64).cosh()).abs() < 1e-6);
    }

    #[test]
    fn photon_number_examples() {
        let n = photon_number_from_power(OpticalPower::milliwatts(10.0).unwrap(), 1064e-9, 1.0).unwrap();
        let hc = 1.986_45e-25;
        assert!((n / (10e-3 * 1064e-9 / hc) - 1.0).abs() < 1e-5);
        assert!((n - 5.36e16).abs() < 0.01e16);

        let one = photon_number_from_power(OpticalPower::watts(PLANCK * SPEED_OF_LIGHT / 1064e-9).unwrap(), 1064e-9, 1.0).unwrap();
        assert!((one - 1.0).abs() < 1e-12);

        let dark = photon_number_from_power(OpticalPower::microwatts(260.0).unwrap(), 1064e-9, 1.0).unwrap();
        assert!((dark - 1.39e15).abs() < 0.01e15);

        assert!(photon_number_from_power(OpticalPower::watts(0.0).unwrap(), 1064e-9, 1.0).is_err());
        assert!(photon_number_from_power(OpticalPower::watts(1.0).unwrap(), 1064e-9, -1.0).is_err());
        assert!(OpticalPower::watts(-1.0).is_err());
    }

    #[test]
    fn ratio_db_examples() {
        assert!((power_ratio_db(2.0, 1.0).unwrap() - 3.0103).abs() < 1e-4);
        assert_eq!(power_ratio_db(1.0, 1.0).unwrap(), 0.0);
        assert!((power_ratio_db(251.2, 1.0).unwrap() - 24.0).abs() < 1e-3);
        assert!(power_ratio_db(0.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn minimum_uncertainty(r in 0.0f64..3.0, angle in -PI..PI) {
            let s = QuadratureState::squeezed_vacuum(r, angle).unwrap();
            let at = quadrature_variance(&s, angle) * quadrature_variance(&s, angle + FRAC_PI_2);
            prop_assert!((at - 1.0).abs() < 1e-12);
        }

        #[test]
        fn uncertainty_product_bounded(r in 0.0f64..3.0, psi in -PI..PI) {
            let s = QuadratureState::squeezed_vacuum(r, 0.0).unwrap();
            let product = quadrature_variance(&s, psi) * quadrature_variance(&s, psi + FRAC_PI_2);
            prop_assert!(product >= 1.0 - 1e-12);
        }

        #[test]
        fn db_round_trip(db in 0.0f64..30.0) {
            prop_assert!((r_to_db(db_to_r(db).unwrap()) - db).abs() < 1e-12);
        }

        #[test]
        fn photon_number_linear(p in 1e-6f64..1.0, t in 1e-6f64..10.0) {
            let n = |p: f64, t: f64| photon_number_from_power(OpticalPower::watts(p).unwrap(), 1064e-9, t).unwrap();
            prop_assert!((n(2.0 * p, t) / n(p, t) - 2.0).abs() < 1e-12);
            prop_assert!((n(p, 3.0 * t) / n(p, t) - 3.0).abs() < 1e-12);
        }
    }
}
