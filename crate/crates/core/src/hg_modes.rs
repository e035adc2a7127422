//! One-dimensional Hermite-Gauss modes at the beam waist.
//!
//! `u_n(x) = (2/π)^{1/4} (2^n n! w0)^{-1/2} H_n(√2 x / w0) exp(-x²/w0²)`,
//! normalized so that `∫ u_n² dx = 1`. Values are produced with the
//! three-term recurrence for Hermite functions, so no factorials appear.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, Options};

/// Highest mode order carried by any expansion.
pub const N_MAX: usize = 16;

/// `√(2/π)`: TEM10 content of the flipped mode, equal to the split-detection
/// overlap `∫ sign(x) u_1 u_0 dx`.
pub const FLIPPED_TEM10_OVERLAP: f64 = 0.797_884_560_802_865_4;

/// Integration half-width in units of the waist. Tails beyond contribute < 1e-27.
const HALF_WIDTH_W0: f64 = 8.0;

const SMALL_ANGLE_WARN: f64 = 0.1;
const SMALL_ANGLE_LIMIT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamGeometry {
    wavelength: f64,
    waist: f64,
}

impl BeamGeometry {
    pub fn new(wavelength: f64, waist: f64) -> Result<Self> {
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return Err(Error::domain("wavelength", format!("{wavelength} m is not positive")));
        }
        if !(waist.is_finite() && waist > 0.0) {
            return Err(Error::domain("waist", format!("{waist} m is not positive")));
        }
        Ok(Self { wavelength, waist })
    }

    /// Wavelength in meters.
    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// TEM00 waist radius `w0` in meters.
    pub fn waist(&self) -> f64 {
        self.waist
    }

    /// Transverse wavenumber `k = 2π sin θ / λ` imparted by a tilt `θ`.
    pub fn tilt_wavenumber(&self, tilt: f64) -> f64 {
        2.0 * std::f64::consts::PI * tilt.sin() / self.wavelength
    }
}

/// A validated mode order `n ≤ N_MAX`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModeIndex(usize);

impl ModeIndex {
    pub fn new(n: usize) -> Result<Self> {
        if n > N_MAX {
            return Err(Error::Truncation { n, max: N_MAX });
        }
        Ok(Self(n))
    }

    pub fn get(self) -> usize {
        self.0
    }

    pub fn is_odd(self) -> bool {
        self.0 % 2 == 1
    }
}

/// All normalized Hermite functions `ψ_0..=ψ_{n_max}` at the dimensionless point `xi`.
fn hermite_functions(xi: f64, n_max: usize, out: &mut [f64; N_MAX + 1]) {
    out[0] = std::f64::consts::PI.powf(-0.25) * (-0.5 * xi * xi).exp();
    if n_max == 0 {
        return;
    }
    out[1] = std::f64::consts::SQRT_2 * xi * out[0];
    for n in 1..n_max {
        let nf = n as f64;
        out[n + 1] = (2.0 / (nf + 1.0)).sqrt() * xi * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
    }
}

/// Values of `u_0..=u_{n_max}` at the dimensionless position `s = x / w0`, in units of `w0^{-1/2}`.
fn scaled_modes(s: f64, n_max: usize) -> [f64; N_MAX + 1] {
    let mut psi = [0.0; N_MAX + 1];
    hermite_functions(std::f64::consts::SQRT_2 * s, n_max, &mut psi);
    let scale = std::f64::consts::SQRT_2.sqrt();
    for v in psi.iter_mut().take(n_max + 1) {
        *v *= scale;
    }
    psi
}

/// `u_n(x)` in m^{-1/2}.
pub fn mode_amplitude(n: ModeIndex, x: f64, g: &BeamGeometry) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain("position", format!("{x} is not finite")));
    }
    let values = scaled_modes(x / g.waist, n.0);
    Ok(values[n.0] / g.waist.sqrt())
}

// Integrals of products of modes are dimensionless, so they are evaluated in
// s = x / w0 where the tolerance has a fixed meaning.
fn integrate_product<F>(integrand: F, signed: bool) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let opts = Options::default();
    let left = quadrature::integrate(&integrand, -HALF_WIDTH_W0, 0.0, opts)?;
    let right = quadrature::integrate(&integrand, 0.0, HALF_WIDTH_W0, opts)?;
    Ok(if signed {
        right.value - left.value
    } else {
        right.value + left.value
    })
}

/// `∫ u_m u_n dx` by adaptive quadrature.
pub fn overlap(m: ModeIndex, n: ModeIndex, _g: &BeamGeometry) -> Result<f64> {
    let top = m.0.max(n.0);
    integrate_product(
        |s| {
            let u = scaled_modes(s, top);
            u[m.0] * u[n.0]
        },
        false,
    )
}

/// Split-detection overlap `∫_0^∞ u_m u_n dx − ∫_{-∞}^0 u_m u_n dx`.
pub fn split_overlap(m: ModeIndex, n: ModeIndex, _g: &BeamGeometry) -> Result<f64> {
    let top = m.0.max(n.0);
    integrate_product(
        |s| {
            let u = scaled_modes(s, top);
            u[m.0] * u[n.0]
        },
        true,
    )
}

/// Complex amplitudes of a transverse field over `u_0..=u_{n_max}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeExpansion {
    geometry: BeamGeometry,
    coeffs: Vec<Complex64>,
}

impl ModeExpansion {
    pub fn zero(geometry: BeamGeometry, n_max: ModeIndex) -> Self {
        Self {
            geometry,
            coeffs: vec![Complex64::new(0.0, 0.0); n_max.0 + 1],
        }
    }

    /// The single mode `u_n`.
    pub fn pure(geometry: BeamGeometry, n: ModeIndex) -> Self {
        let mut e = Self::zero(geometry, n);
        e.coeffs[n.0] = Complex64::new(1.0, 0.0);
        e
    }

    pub fn from_coeffs(geometry: BeamGeometry, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::domain("mode expansion", "needs at least one coefficient"));
        }
        if coeffs.len() > N_MAX + 1 {
            return Err(Error::Truncation {
                n: coeffs.len() - 1,
                max: N_MAX,
            });
        }
        Ok(Self { geometry, coeffs })
    }

    pub fn geometry(&self) -> &BeamGeometry {
        &self.geometry
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `u_n`; zero beyond the stored range.
    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            geometry: self.geometry,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Coefficient-wise sum; the shorter expansion is zero-padded.
    pub fn added(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self {
            geometry: self.geometry,
            coeffs: (0..len).map(|n| self.coeff(n) + other.coeff(n)).collect(),
        }
    }

    /// Field value at `x`, in m^{-1/2}.
    pub fn evaluate(&self, x: f64) -> Complex64 {
        let u = scaled_modes(x / self.geometry.waist, self.n_max());
        let sum: Complex64 = self.coeffs.iter().zip(u.iter()).map(|(c, v)| c * v).sum();
        sum / self.geometry.waist.sqrt()
    }
}

/// Expansion of the phase-flipped TEM00 beam `sign(x) u_0(x)`.
///
/// Even coefficients vanish by parity and are set to exactly zero.
pub fn flipped_mode(g: &BeamGeometry, n_max: ModeIndex) -> Result<ModeExpansion> {
    let zero = ModeIndex(0);
    let mut e = ModeExpansion::zero(*g, n_max);
    for n in (1..=n_max.0).step_by(2) {
        e.coeffs[n] = Complex64::new(split_overlap(ModeIndex(n), zero, g)?, 0.0);
    }
    Ok(e)
}

/// Multiplies the field by `x` using `x u_n = (w0/2)(√(n+1) u_{n+1} + √n u_{n−1})`.
pub fn multiply_by_x(e: &ModeExpansion) -> Result<ModeExpansion> {
    if e.coeffs.len() == N_MAX + 1 && e.coeffs[N_MAX] != Complex64::new(0.0, 0.0) {
        return Err(Error::Truncation {
            n: N_MAX + 1,
            max: N_MAX,
        });
    }
    let half_w0 = 0.5 * e.geometry.waist;
    let len = (e.coeffs.len() + 1).min(N_MAX + 1);
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    for (n, &c) in e.coeffs.iter().enumerate() {
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        let nf = n as f64;
        out[n + 1] += c * half_w0 * (nf + 1.0).sqrt();
        if n > 0 {
            out[n - 1] += c * half_w0 * nf.sqrt();
        }
    }
    Ok(ModeExpansion {
        geometry: e.geometry,
        coeffs: out,
    })
}

fn check_small_angle(k: f64, g: &BeamGeometry) -> Result<()> {
    let k_w0 = (k * g.waist).abs();
    if !k_w0.is_finite() || k_w0 >= SMALL_ANGLE_LIMIT {
        return Err(Error::SmallAngle {
            k_w0,
            limit: SMALL_ANGLE_LIMIT,
        });
    }
    if k_w0 > SMALL_ANGLE_WARN {
        log::warn!("first-order tilt expansion at |k|·w0 = {k_w0:.3}; expect O((k·w0)²) errors");
    }
    Ok(())
}

/// First-order tilt: `exp(ikx) e ≈ e + ik·(x e)`.
pub fn apply_tilt(e: &ModeExpansion, k: f64) -> Result<ModeExpansion> {
    check_small_angle(k, &e.geometry)?;
    let shifted = multiply_by_x(e)?;
    Ok(e.added(&shifted.scaled(Complex64::new(0.0, k))))
}

/// Exact projection of `exp(ikx) e(x)` onto `u_0..=u_{n_max}` by quadrature.
///
/// Used to validate [`apply_tilt`]; not a first-order approximation.
pub fn project_tilt_exact(e: &ModeExpansion, k: f64, n_max: ModeIndex) -> Result<ModeExpansion> {
    check_small_angle(k, &e.geometry)?;
    let kw = k * e.geometry.waist;
    let top = e.n_max().max(n_max.0);
    let mut out = ModeExpansion::zero(e.geometry, n_max);
    for m in 0..=n_max.0 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, &c) in e.coeffs.iter().enumerate() {
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let re = integrate_product(
                |s| {
                    let u = scaled_modes(s, top);
                    (kw * s).cos() * u[m] * u[n]
                },
                false,
            )?;
            let im = integrate_product(
                |s| {
                    let u = scaled_modes(s, top);
                    (kw * s).sin() * u[m] * u[n]
                },
                false,
            )?;
            acc += c * Complex64::new(re, im);
        }
        out.coeffs[m] = acc;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn geom() -> BeamGeometry {
        BeamGeometry::new(1064e-9, 1.86e-3).unwrap()
    }

    fn idx(n: usize) -> ModeIndex {
        ModeIndex::new(n).unwrap()
    }

    // Oracle: explicit Hermite polynomial series with factorials, integrated
    // by composite Simpson on a fine grid. Shares no code with the module.
    fn hermite_explicit(n: usize, y: f64) -> f64 {
        let fact = |k: usize| (1..=k).map(|v| v as f64).product::<f64>();
        let mut sum = 0.0;
        for m in 0..=n / 2 {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * fact(n) / (fact(m) * fact(n - 2 * m)) * (2.0 * y).powi((n - 2 * m) as i32);
        }
        sum
    }

    fn u_oracle(n: usize, x: f64, w0: f64) -> f64 {
        let fact: f64 = (1..=n).map(|v| v as f64).product();
        (2.0 / PI).powf(0.25) / (2f64.powi(n as i32) * fact * w0).sqrt()
            * hermite_explicit(n, 2f64.sqrt() * x / w0)
            * (-x * x / (w0 * w0)).exp()
    }

    fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
        let h = (b - a) / intervals as f64;
        let mut sum = f(a) + f(b);
        for i in 1..intervals {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * f(a + i as f64 * h);
        }
        sum * h / 3.0
    }

    #[test]
    fn matches_explicit_formula() {
        let g = geom();
        for n in 0..=N_MAX {
            for &s in &[-3.1, -1.0, -0.2, 0.0, 0.45, 1.7, 2.9] {
                let x = s * g.waist();
                let got = mode_amplitude(idx(n), x, &g).unwrap();
                let want = u_oracle(n, x, g.waist());
                assert!(
                    (got - want).abs() <= 1e-10 * want.abs().max(1.0 / g.waist().sqrt() * 1e-3),
                    "n={n} s={s}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn ground_mode_peak_value() {
        let g = geom();
        let peak = mode_amplitude(idx(0), 0.0, &g).unwrap();
        let expected = (2.0 / (PI * g.waist() * g.waist())).powf(0.25);
        assert!((peak - expected).abs() < 1e-12 * expected);
        let norm = simpson(|x| u_oracle(0, x, g.waist()).powi(2), -8.0 * g.waist(), 8.0 * g.waist(), 4000);
        assert!((norm - 1.0).abs() < 1e-10);
    }

    #[test]
    fn odd_mode_vanishes_at_origin_and_tails_decay() {
        let g = geom();
        assert_eq!(mode_amplitude(idx(1), 0.0, &g).unwrap(), 0.0);
        assert!(mode_amplitude(idx(0), 50.0 * g.waist(), &g).unwrap().abs() < 1e-300);
        assert!(mode_amplitude(idx(0), -50.0 * g.waist(), &g).unwrap().abs() < 1e-300);
    }

    #[test]
    fn parity() {
        let g = geom();
        for n in 0..=N_MAX {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let a = mode_amplitude(idx(n), 0.8e-3, &g).unwrap();
            let b = mode_amplitude(idx(n), -0.8e-3, &g).unwrap();
            assert!((a - sign * b).abs() < 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn index_and_position_errors() {
        assert_eq!(ModeIndex::new(17), Err(Error::Truncation { n: 17, max: 16 }));
        assert!(mode_amplitude(idx(0), f64::NAN, &geom()).is_err());
        assert!(BeamGeometry::new(0.0, 1e-3).is_err());
        assert!(BeamGeometry::new(1e-6, -1.0).is_err());
    }

    #[test]
    fn overlap_examples() {
        let g = geom();
        assert!((overlap(idx(0), idx(0), &g).unwrap() - 1.0).abs() < 1e-9);
        assert!(overlap(idx(0), idx(1), &g).unwrap().abs() < 1e-9);
        assert!((overlap(idx(2), idx(2), &g).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn split_overlap_examples() {
        let g = geom();
        let a = split_overlap(idx(1), idx(0), &g).unwrap();
        assert!((a - (2.0 / PI).sqrt()).abs() < 1e-9);
        assert!(split_overlap(idx(0), idx(0), &g).unwrap().abs() < 1e-12);
        // Oracle: Simpson on the explicit formula.
        let w0 = g.waist();
        let oracle = simpson(|x| u_oracle(2, x, w0) * u_oracle(0, x, w0), 0.0, 8.0 * w0, 4000)
            - simpson(|x| u_oracle(2, x, w0) * u_oracle(0, x, w0), -8.0 * w0, 0.0, 4000);
        assert!(oracle.abs() < 1e-9);
        assert!(split_overlap(idx(2), idx(0), &g).unwrap().abs() < 1e-9);
    }

    #[test]
    fn flipped_overlap_constant() {
        assert!((FLIPPED_TEM10_OVERLAP - (2.0 / PI).sqrt()).abs() < 1e-16);
        let g = geom();
        assert!((split_overlap(idx(1), idx(0), &g).unwrap() - FLIPPED_TEM10_OVERLAP).abs() < 1e-9);
    }

    #[test]
    fn flipped_mode_coefficients() {
        let g = geom();
        let f = flipped_mode(&g, idx(9)).unwrap();
        assert_eq!(f.coeff(1).re, split_overlap(idx(1), idx(0), &g).unwrap());
        for n in (0..=9).step_by(2) {
            assert_eq!(f.coeff(n), Complex64::new(0.0, 0.0));
        }
        // Oracle value of Σ_{n≤9}|c_n|², from Simpson on the explicit formula.
        let w0 = g.waist();
        let partial: f64 = (1..=9)
            .step_by(2)
            .map(|n| {
                2.0 * simpson(|x| u_oracle(n, x, w0) * u_oracle(0, x, w0), 0.0, 8.0 * w0, 4000)
            })
            .map(|c| c * c)
            .sum();
        assert!((partial - 0.838_231_822_798).abs() < 1e-9, "{partial}");
        assert!((f.norm_sqr() - partial).abs() < 1e-9);
        assert!(f.norm_sqr() <= 1.0 + 1e-6);
    }

    #[test]
    fn multiply_by_x_ladder() {
        let g = geom();
        let w0 = g.waist();
        let from_u1 = multiply_by_x(&ModeExpansion::pure(g, idx(1))).unwrap();
        assert!((from_u1.coeff(0).re - w0 / 2.0).abs() < 1e-18);
        assert!((from_u1.coeff(2).re - 2f64.sqrt() * w0 / 2.0).abs() < 1e-18);
        assert_eq!(from_u1.coeff(1), Complex64::new(0.0, 0.0));

        let zero = multiply_by_x(&ModeExpansion::zero(g, idx(3))).unwrap();
        assert_eq!(zero.norm_sqr(), 0.0);

        let from_u0 = multiply_by_x(&ModeExpansion::pure(g, idx(0))).unwrap();
        let oracle = simpson(|x| x * u_oracle(0, x, w0) * u_oracle(1, x, w0), -8.0 * w0, 8.0 * w0, 4000);
        assert!((from_u0.coeff(1).re - w0 / 2.0).abs() < 1e-18);
        assert!((oracle - w0 / 2.0).abs() < 1e-12 * w0);
    }

    #[test]
    fn multiply_by_x_truncation() {
        let g = geom();
        let top = ModeExpansion::pure(g, idx(N_MAX));
        assert!(matches!(multiply_by_x(&top), Err(Error::Truncation { .. })));
        let below = ModeExpansion::pure(g, idx(N_MAX - 1));
        assert_eq!(multiply_by_x(&below).unwrap().n_max(), N_MAX);
    }

    #[test]
    fn tilt_examples() {
        let g = geom();
        let w0 = g.waist();
        let u0 = ModeExpansion::pure(g, idx(0));
        assert_eq!(apply_tilt(&u0, 0.0).unwrap().coeffs()[..1], u0.coeffs()[..1]);
        assert_eq!(apply_tilt(&u0, 0.0).unwrap().coeff(1), Complex64::new(0.0, 0.0));

        let k = 0.5 / w0 * 1e-3;
        let t0 = apply_tilt(&u0, k).unwrap();
        assert!((t0.coeff(1) - Complex64::new(0.0, k * w0 / 2.0)).norm() < 1e-18);

        let t1 = apply_tilt(&ModeExpansion::pure(g, idx(1)), k).unwrap();
        assert_eq!(t1.coeff(1), Complex64::new(1.0, 0.0));
        assert!((t1.coeff(0) - Complex64::new(0.0, k * w0 / 2.0)).norm() < 1e-18);
        assert!((t1.coeff(2) - Complex64::new(0.0, k * w0 * 2f64.sqrt() / 2.0)).norm() < 1e-18);

        assert!(matches!(apply_tilt(&u0, 1.0 / w0), Err(Error::SmallAngle { .. })));
    }

    #[test]
    fn tilt_matches_exact_projection() {
        let g = geom();
        let k = 1e-3 / g.waist();
        for n in 0..3 {
            let e = ModeExpansion::pure(g, idx(n));
            let first = apply_tilt(&e, k).unwrap();
            let exact = project_tilt_exact(&e, k, idx(first.n_max())).unwrap();
            for m in 0..=first.n_max() {
                let a = first.coeff(m);
                let b = exact.coeff(m);
                if a.norm() > 0.0 {
                    assert!((a - b).norm() <= 1e-4 * a.norm(), "n={n} m={m}: {a} vs {b}");
                } else {
                    assert!(b.norm() < 1e-6, "n={n} m={m}: {b}");
                }
            }
        }
    }

    #[test]
    fn evaluate_sums_modes() {
        let g = geom();
        let e = ModeExpansion::from_coeffs(g, vec![Complex64::new(0.5, 0.0), Complex64::new(0.0, 2.0)]).unwrap();
        let x = 0.3e-3;
        let want = Complex64::new(0.5 * mode_amplitude(idx(0), x, &g).unwrap(), 2.0 * mode_amplitude(idx(1), x, &g).unwrap());
        assert!((e.evaluate(x) - want).norm() < 1e-9);
    }
}
