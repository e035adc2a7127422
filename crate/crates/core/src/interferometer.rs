//! Mach-Zehnder propagation with a tilt-induced transverse phase, and the
//! weak-value relations at the dark port.
//!
//! Port 1 of the output is the dark port. The coherent TEM00 beam enters
//! port 1 and the squeezed TEM10 vacuum enters port 2; with the relative arm
//! phase `φ` the TEM00 light interferes destructively at the dark port with
//! amplitude `sin(φ/2)` while the TEM10 input interferes constructively with
//! amplitude `cos(φ/2)`. Global phases are dropped.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hg_modes::{self, BeamGeometry, ModeExpansion, ModeIndex, FLIPPED_TEM10_OVERLAP};
use crate::quantum_state::{self, photon_number_from_power, OpticalPower, QuadratureState};

/// Lever arm from the incidence point to the mirror pivot, `0.10 pm / 7.83 prad`
/// rounded to the printed precision.
pub const DEFAULT_LEVER_ARM: f64 = 12.77e-3;

/// Largest `|k|·w0` accepted by a measurement configuration.
pub const FIRST_ORDER_LIMIT: f64 = 0.1;

const POSTSELECTION_CONSISTENCY: f64 = 1e-6;

type Pair = [Complex64; 2];
type Matrix = [[Complex64; 2]; 2];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let mut out = [[c(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn apply(m: &Matrix, v: Pair) -> Pair {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

fn beamsplitter_matrix() -> Matrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [[c(s, 0.0), c(0.0, s)], [c(0.0, s), c(s, 0.0)]]
}

fn interaction_matrix(phase: f64) -> Matrix {
    [
        [Complex64::from_polar(1.0, phase), c(0.0, 0.0)],
        [c(0.0, 0.0), Complex64::from_polar(1.0, -phase)],
    ]
}

/// Derivative of the interaction matrix with respect to its phase.
fn interaction_matrix_derivative(phase: f64) -> Matrix {
    [
        [c(0.0, 1.0) * Complex64::from_polar(1.0, phase), c(0.0, 0.0)],
        [c(0.0, 0.0), c(0.0, -1.0) * Complex64::from_polar(1.0, -phase)],
    ]
}

/// 50:50 beamsplitter `(1/√2)[[1, i], [i, 1]]`.
pub fn beamsplitter_transform(fields: Pair) -> Pair {
    apply(&beamsplitter_matrix(), fields)
}

/// Arm phases `diag(e^{+i(kx+φ/2)}, e^{-i(kx+φ/2)})`.
pub fn interaction_transform(fields: Pair, k: f64, phi: f64, x: f64) -> Pair {
    apply(&interaction_matrix(k * x + 0.5 * phi), fields)
}

/// Full interferometer `B·M·B` at arm phase `kx + φ/2`, and its derivative in that phase.
fn mzi_transfer(phase: f64) -> (Matrix, Matrix) {
    let b = beamsplitter_matrix();
    let m = matmul(&b, &matmul(&interaction_matrix(phase), &b));
    let dm = matmul(&b, &matmul(&interaction_matrix_derivative(phase), &b));
    (m, dm)
}

/// Weak value `A_w = cot(φ/2)`.
pub fn weak_value(phi: f64) -> Result<f64> {
    check_phi(phi)?;
    let half = 0.5 * phi;
    Ok(half.cos() / half.sin())
}

/// `p_f = sin²(φ/2)`.
pub fn postselection_probability(phi: f64) -> Result<f64> {
    check_phi(phi)?;
    Ok((0.5 * phi).sin().powi(2))
}

/// Inverse of [`postselection_probability`]: `φ = 2 asin √p_f`.
pub fn phi_for_probability(p_f: f64) -> Result<f64> {
    if !(p_f > 0.0 && p_f < 1.0) {
        return Err(Error::domain("postselection probability", format!("{p_f} not in (0, 1)")));
    }
    Ok(2.0 * p_f.sqrt().asin())
}

fn check_phi(phi: f64) -> Result<()> {
    // φ = π is admitted by weak_value and postselection_probability as the boundary case.
    if !(phi > 0.0 && phi <= std::f64::consts::PI) {
        return Err(Error::domain("relative phase φ", format!("{phi} rad not in (0, π]")));
    }
    Ok(())
}

/// Parameters of one measurement run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementConfig {
    pub geometry: BeamGeometry,
    pub input_power: OpticalPower,
    /// Dark-port power.
    pub output_power: OpticalPower,
    /// Relative arm phase φ, rad.
    pub phi: f64,
    /// Relative phase ψ between the two input beams, rad.
    pub psi: f64,
    /// State of the injected TEM10 beam.
    pub squeeze: QuadratureState,
    /// Mirror tilt θ, rad.
    pub tilt: f64,
    /// Lever arm l, m.
    pub lever_arm: f64,
    /// Integration time T, s.
    pub integration_time: f64,
    /// Treat the injected TEM10 squeezed beam as a phase-flipped TEM00 beam.
    pub flipped_mode: bool,
    /// Detection efficiency η applied to the squeezed-quadrature variance.
    pub efficiency: f64,
}

impl MeasurementConfig {
    /// Builds a config whose φ is fixed by `p_f = P_out / P_in`; the other
    /// fields start at vacuum injection, zero tilt, `T = 1 s`.
    pub fn new(geometry: BeamGeometry, input_power: OpticalPower, output_power: OpticalPower) -> Result<Self> {
        if input_power.as_watts() <= 0.0 {
            return Err(Error::Config("input power must be positive".into()));
        }
        let p_f = output_power.as_watts() / input_power.as_watts();
        let phi = phi_for_probability(p_f).map_err(|_| {
            Error::Config(format!("output/input power ratio {p_f} must lie in (0, 1)"))
        })?;
        Ok(Self {
            geometry,
            input_power,
            output_power,
            phi,
            psi: 0.0,
            squeeze: QuadratureState::vacuum(),
            tilt: 0.0,
            lever_arm: DEFAULT_LEVER_ARM,
            integration_time: 1.0,
            flipped_mode: false,
            efficiency: 1.0,
        })
    }

    pub fn with_tilt(mut self, tilt: f64) -> Self {
        self.tilt = tilt;
        self
    }

    pub fn with_squeeze(mut self, squeeze: QuadratureState) -> Self {
        self.squeeze = squeeze;
        self
    }

    pub fn with_squeeze_db(self, squeeze_db: f64) -> Result<Self> {
        Ok(self.with_squeeze(QuadratureState::squeezed_vacuum_db(squeeze_db)?))
    }

    pub fn with_integration_time(mut self, t: f64) -> Self {
        self.integration_time = t;
        self
    }

    pub fn with_psi(mut self, psi: f64) -> Self {
        self.psi = psi;
        self
    }

    pub fn with_lever_arm(mut self, l: f64) -> Self {
        self.lever_arm = l;
        self
    }

    /// Transverse wavenumber `k = 2π sin θ / λ`.
    pub fn wavenumber(&self) -> f64 {
        self.geometry.tilt_wavenumber(self.tilt)
    }

    pub fn postselection_probability(&self) -> f64 {
        (0.5 * self.phi).sin().powi(2)
    }

    pub fn weak_value(&self) -> f64 {
        1.0 / (0.5 * self.phi).tan()
    }

    /// Photons injected at the bright input during `T`.
    pub fn photon_number(&self) -> Result<f64> {
        photon_number_from_power(self.input_power, self.geometry.wavelength(), self.integration_time)
    }

    /// Photons reaching the dark port during `T`, `N' = N sin²(φ/2)`.
    pub fn dark_photon_number(&self) -> Result<f64> {
        Ok(self.photon_number()? * self.postselection_probability())
    }

    /// Variance of the detected TEM10 quadrature at angle ψ, including the
    /// flipped-mode mismatch and detection efficiency when configured.
    pub fn effective_quadrature_variance(&self) -> f64 {
        let mut v = quantum_state::quadrature_variance(&self.squeeze, self.psi);
        if self.flipped_mode {
            let matched = FLIPPED_TEM10_OVERLAP * FLIPPED_TEM10_OVERLAP;
            v = matched * v + (1.0 - matched);
        }
        self.efficiency * v + (1.0 - self.efficiency)
    }

    pub fn validate(&self) -> Result<()> {
        let pi = std::f64::consts::PI;
        if !(self.phi > 0.0 && self.phi < pi) {
            return Err(Error::Config(format!("relative phase φ = {} rad not in (0, π)", self.phi)));
        }
        let (p_in, p_out) = (self.input_power.as_watts(), self.output_power.as_watts());
        if p_in <= 0.0 {
            return Err(Error::Config("input power must be positive".into()));
        }
        if p_out > p_in {
            return Err(Error::Config(format!("output power {p_out} W exceeds input power {p_in} W")));
        }
        let p_f = self.postselection_probability();
        if (p_f - p_out / p_in).abs() > POSTSELECTION_CONSISTENCY {
            return Err(Error::Config(format!(
                "sin²(φ/2) = {p_f} disagrees with P_out/P_in = {}",
                p_out / p_in
            )));
        }
        if !self.tilt.is_finite() || !self.psi.is_finite() {
            return Err(Error::Config("tilt and ψ must be finite".into()));
        }
        let k_w0 = (self.wavenumber() * self.geometry.waist()).abs();
        if !(k_w0 < FIRST_ORDER_LIMIT) {
            return Err(Error::SmallAngle {
                k_w0,
                limit: FIRST_ORDER_LIMIT,
            });
        }
        if !(self.lever_arm.is_finite() && self.lever_arm > 0.0) {
            return Err(Error::Config(format!("lever arm {} m must be positive", self.lever_arm)));
        }
        if !(self.integration_time.is_finite() && self.integration_time > 0.0) {
            return Err(Error::Config(format!(
                "integration time {} s must be positive",
                self.integration_time
            )));
        }
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(Error::Config(format!("efficiency {} not in (0, 1]", self.efficiency)));
        }
        Ok(())
    }
}

/// First-order field at the dark port, relative to the global phase of its TEM00 term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DarkPortState {
    /// TEM00 amplitude `sin(φ/2)√N`, √photons.
    pub baseline_u0_amplitude: f64,
    /// Tilt-induced TEM10 amplitude `cos(φ/2)√N·w0k/2`, √photons.
    pub signal_u1_amplitude: Complex64,
    /// TEM10 quadrature variance at the dark port, shot-noise units.
    pub noise_u1_variance: f64,
    /// `N' = N sin²(φ/2)`.
    pub dark_photon_number: f64,
}

/// Propagates the two inputs through `B·M·B` and keeps the dark port to first order in `kx`.
pub fn dark_port_output(c: &MeasurementConfig) -> Result<DarkPortState> {
    c.validate()?;
    let n = c.photon_number()?;
    let g = c.geometry;
    let (transfer, slope) = mzi_transfer(0.5 * c.phi);

    // Dark-port row: transfer[0][0] carries TEM00 from the coherent input,
    // transfer[0][1] carries TEM10 from the squeezed input.
    let coherent_amp = transfer[0][0];
    let global = coherent_amp / coherent_amp.norm();

    // sin(kx + φ/2) ≈ sin(φ/2) + kx·cos(φ/2): the kx term acts on u0 via x·u0.
    let u0 = ModeExpansion::pure(g, ModeIndex::new(0)?);
    let x_u0 = hg_modes::multiply_by_x(&u0)?;
    let field = u0
        .scaled(coherent_amp)
        .added(&x_u0.scaled(slope[0][0] * c.wavenumber()))
        .scaled(Complex64::from(n.sqrt()) / global);

    let squeezed_weight = transfer[0][1].norm_sqr();
    let vacuum_weight = transfer[0][0].norm_sqr();
    let noise = squeezed_weight * c.effective_quadrature_variance() + vacuum_weight;

    Ok(DarkPortState {
        baseline_u0_amplitude: field.coeff(0).re,
        signal_u1_amplitude: field.coeff(1),
        noise_u1_variance: noise,
        dark_photon_number: n * vacuum_weight,
    })
}

/// Photons leaving the bright port during `T` (lossless model).
pub fn bright_photon_number(c: &MeasurementConfig) -> Result<f64> {
    let (transfer, _) = mzi_transfer(0.5 * c.phi);
    Ok(c.photon_number()? * transfer[1][0].norm_sqr())
}
