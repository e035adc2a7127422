//! Monte Carlo photocurrent traces, Welch spectra and parameter sweeps.
//!
//! The difference photocurrent is modelled as a rate (photons/s):
//! a tone of amplitude `S = √2·⟨N⁻⟩/T` on top of white Gaussian noise whose
//! one-sided density is `D = N'·V/T`, the dark-port photon flux times the
//! detected quadrature variance. With these scalings the tone power over the
//! noise power in one resolution bandwidth equals the analytic SNR for
//! `T = 1/RBW`.
//!
//! Noise is drawn from ChaCha8 streams: the run seed selects the key and each
//! block of `hop` samples (half a Welch segment) uses its own stream id, so
//! traces are bit-reproducible regardless of thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::detection::{difference_statistics, snr};
use crate::error::{Error, Result};
use crate::interferometer::{phi_for_probability, MeasurementConfig};
use crate::quantum_state::{quadrature_variance, OpticalPower, QuadratureState};

const MIN_SEGMENT: usize = 16;
const MIN_AVERAGES: usize = 8;
/// Segments summed sequentially per parallel task; fixes the reduction order.
const SEGMENTS_PER_TASK: usize = 16;
/// Half-width, in RBWs, of the neighborhood excluded from the floor estimate.
const FLOOR_EXCLUSION_RBW: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    Hann,
    Rect,
}

impl Window {
    /// Equivalent noise bandwidth in bins.
    pub fn enbw_bins(self) -> f64 {
        match self {
            Window::Hann => 1.5,
            Window::Rect => 1.0,
        }
    }

    /// Periodic (DFT-even) window of length `len`.
    pub fn coefficients(self, len: usize) -> Vec<f64> {
        match self {
            Window::Rect => vec![1.0; len],
            Window::Hann => (0..len)
                .map(|j| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * j as f64 / len as f64).cos())
                .collect(),
        }
    }
}

impl std::str::FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hann" => Ok(Window::Hann),
            "rect" | "rectangular" => Ok(Window::Rect),
            other => Err(Error::Config(format!("unknown window '{other}' (expected hann or rect)"))),
        }
    }
}

/// Welch segment length whose equivalent noise bandwidth equals `rbw`.
pub fn segment_length(sample_rate: f64, rbw: f64, window: Window) -> Result<usize> {
    if !(sample_rate > 0.0 && rbw > 0.0) {
        return Err(Error::Config(format!("sample rate {sample_rate} Hz and RBW {rbw} Hz must be positive")));
    }
    let len = (window.enbw_bins() * sample_rate / rbw).round();
    if !(len >= MIN_SEGMENT as f64) || !len.is_finite() {
        return Err(Error::Config(format!(
            "segment length {len} below {MIN_SEGMENT}; raise the sample rate or the RBW"
        )));
    }
    Ok(len as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceConfig {
    pub measurement: MeasurementConfig,
    pub signal_frequency: f64,
    pub sample_rate: f64,
    pub duration: f64,
    pub rbw: f64,
    pub seed: u64,
    pub window: Window,
    /// When false the trace is the bare tone.
    pub noise: bool,
}

impl TraceConfig {
    pub fn segment_length(&self) -> Result<usize> {
        segment_length(self.sample_rate, self.rbw, self.window)
    }

    fn hop(&self) -> Result<usize> {
        Ok((self.segment_length()? / 2).max(1))
    }

    /// Duration giving exactly `averages` half-overlapping segments.
    pub fn duration_for_averages(&self, averages: usize) -> Result<f64> {
        let len = self.segment_length()?;
        let hop = self.hop()?;
        Ok(((averages.max(1) - 1) * hop + len) as f64 / self.sample_rate)
    }

    pub fn with_averages(mut self, averages: usize) -> Result<Self> {
        self.duration = self.duration_for_averages(averages)?;
        Ok(self)
    }

    pub fn sample_count(&self) -> usize {
        (self.duration * self.sample_rate).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        self.measurement.validate()?;
        if !(self.signal_frequency.is_finite() && self.signal_frequency >= 0.0) {
            return Err(Error::Config(format!("signal frequency {} Hz is invalid", self.signal_frequency)));
        }
        if !(self.sample_rate > 2.0 * self.signal_frequency) {
            return Err(Error::Config(format!(
                "sample rate {} Hz violates Nyquist for a {} Hz signal",
                self.sample_rate, self.signal_frequency
            )));
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(Error::Config(format!("duration {} s must be positive", self.duration)));
        }
        if !(self.rbw >= 1.0 / self.duration) {
            return Err(Error::Config(format!(
                "RBW {} Hz is finer than 1/duration = {} Hz",
                self.rbw,
                1.0 / self.duration
            )));
        }
        self.segment_length()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub sample_rate: f64,
    pub samples: Vec<f64>,
}

impl TimeSeries {
    pub fn variance(&self) -> f64 {
        let n = self.samples.len() as f64;
        let mean = self.samples.iter().sum::<f64>() / n;
        self.samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n
    }
}

/// One-sided shot-noise density of the difference rate for a coherent
/// TEM10 input: the dark-port photon flux, (photons/s)²/Hz.
pub fn shot_noise_density(c: &MeasurementConfig) -> Result<f64> {
    Ok(c.dark_photon_number()? / c.integration_time)
}

/// One-sided noise density with the configured squeezing.
pub fn analytic_floor_density(c: &MeasurementConfig) -> Result<f64> {
    Ok(shot_noise_density(c)? * c.effective_quadrature_variance())
}

/// Tone amplitude of the difference rate, photons/s.
pub fn tone_amplitude(c: &MeasurementConfig) -> Result<f64> {
    Ok(std::f64::consts::SQRT_2 * difference_statistics(c)?.mean / c.integration_time)
}

/// Synthesizes the sampled difference photocurrent.
pub fn simulate_photocurrent(t: &TraceConfig) -> Result<TimeSeries> {
    t.validate()?;
    let amplitude = tone_amplitude(&t.measurement)?;
    let density = analytic_floor_density(&t.measurement)?;
    let sigma = if t.noise {
        (density * t.sample_rate / 2.0).sqrt()
    } else {
        0.0
    };
    let n = t.sample_count();
    let hop = t.hop()?;
    let f = t.signal_frequency;
    let fs = t.sample_rate;
    let two_pi = 2.0 * std::f64::consts::PI;

    let mut samples = vec![0.0; n];
    samples
        .par_chunks_mut(hop)
        .enumerate()
        .for_each(|(block, chunk)| {
            let mut rng = ChaCha8Rng::seed_from_u64(t.seed);
            rng.set_stream(block as u64);
            let start = block * hop;
            for (j, s) in chunk.iter_mut().enumerate() {
                let i = (start + j) as f64;
                let cycles = (i * f / fs).fract();
                let noise: f64 = if t.noise { StandardNormal.sample(&mut rng) } else { 0.0 };
                *s = amplitude * (two_pi * cycles).sin() + sigma * noise;
            }
        });
    Ok(TimeSeries {
        sample_rate: fs,
        samples,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEstimate {
    pub frequencies: Vec<f64>,
    /// One-sided power spectral density per bin.
    pub psd: Vec<f64>,
    pub rbw: f64,
    /// Equivalent noise bandwidth of one bin, Hz.
    pub enbw: f64,
    pub bin_width: f64,
    pub n_averages: usize,
}

impl SpectrumEstimate {
    /// `Σ psd·Δf`, the total power; matches the series variance (Parseval).
    pub fn total_power(&self) -> f64 {
        self.psd.iter().sum::<f64>() * self.bin_width
    }
}

/// Averaged modified periodogram, 50 % overlap, segment ENBW = `rbw`.
pub fn welch_psd(ts: &TimeSeries, rbw: f64, window: Window) -> Result<SpectrumEstimate> {
    let fs = ts.sample_rate;
    let len = segment_length(fs, rbw, window)?;
    let hop = (len / 2).max(1);
    if ts.samples.len() < len {
        return Err(Error::Config(format!(
            "series of {} samples shorter than one {len}-sample segment",
            ts.samples.len()
        )));
    }
    let n_seg = (ts.samples.len() - len) / hop + 1;
    if n_seg < MIN_AVERAGES {
        return Err(Error::Config(format!("{n_seg} segments available, need at least {MIN_AVERAGES}")));
    }

    let w = window.coefficients(len);
    let sum_w: f64 = w.iter().sum();
    let sum_w2: f64 = w.iter().map(|v| v * v).sum();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(len);
    let n_bins = len / 2 + 1;

    let task_sums: Vec<Vec<f64>> = (0..n_seg)
        .collect::<Vec<_>>()
        .par_chunks(SEGMENTS_PER_TASK)
        .map(|segs| {
            let mut acc = vec![0.0; n_bins];
            let mut buf = vec![Complex::new(0.0, 0.0); len];
            let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            for &s in segs {
                let start = s * hop;
                for (b, (x, wv)) in buf.iter_mut().zip(ts.samples[start..start + len].iter().zip(&w)) {
                    *b = Complex::new(x * wv, 0.0);
                }
                fft.process_with_scratch(&mut buf, &mut scratch);
                for (a, b) in acc.iter_mut().zip(&buf) {
                    *a += b.norm_sqr();
                }
            }
            acc
        })
        .collect();

    let mut total = vec![0.0; n_bins];
    for part in &task_sums {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }

    let scale = 1.0 / (fs * sum_w2 * n_seg as f64);
    let psd = total
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let one_sided = if k == 0 || (len % 2 == 0 && k == len / 2) { 1.0 } else { 2.0 };
            one_sided * v * scale
        })
        .collect();
    let bin_width = fs / len as f64;
    Ok(SpectrumEstimate {
        frequencies: (0..n_bins).map(|k| k as f64 * bin_width).collect(),
        psd,
        rbw,
        enbw: fs * sum_w2 / (sum_w * sum_w),
        bin_width,
        n_averages: n_seg,
    })
}

/// Simulates a trace and returns its Welch spectrum.
pub fn simulate_spectrum(t: &TraceConfig) -> Result<SpectrumEstimate> {
    welch_psd(&simulate_photocurrent(t)?, t.rbw, t.window)
}

/// Marker reading of a tone against the median noise floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakReading {
    pub frequency: f64,
    /// Power in one ENBW at the peak bin (tone + noise).
    pub peak_power: f64,
    /// Power in one ENBW at the floor.
    pub floor_power: f64,
    pub floor_density: f64,
    /// `peak / floor`.
    pub peak_to_floor: f64,
    pub peak_to_floor_db: f64,
    /// `peak / floor − 1`, the signal-only SNR.
    pub snr_linear: f64,
    pub snr_db: f64,
}

pub fn peak_snr(s: &SpectrumEstimate, f_signal: f64) -> Result<PeakReading> {
    let last = s.psd.len() - 1;
    let f_max = s.frequencies[last];
    if !(f_signal >= 0.0 && f_signal <= f_max) {
        return Err(Error::domain("signal frequency", format!("{f_signal} Hz outside [0, {f_max}] Hz")));
    }
    let center = (f_signal / s.bin_width).round() as usize;
    let lo = center.saturating_sub(1);
    let hi = (center + 1).min(last);
    let (peak_bin, peak_density) = (lo..=hi)
        .map(|k| (k, s.psd[k]))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty bin range");

    let exclusion = FLOOR_EXCLUSION_RBW * s.rbw;
    let mut floor: Vec<f64> = s
        .frequencies
        .iter()
        .zip(&s.psd)
        .enumerate()
        .filter(|&(k, (f, _))| k != 0 && k != last && (f - f_signal).abs() > exclusion)
        .map(|(_, (_, p))| *p)
        .collect();
    if floor.is_empty() {
        return Err(Error::Degenerate("no bins left for the floor estimate".into()));
    }
    let mid = floor.len() / 2;
    floor.select_nth_unstable_by(mid, f64::total_cmp);
    let floor_density = if floor.len() % 2 == 1 {
        floor[mid]
    } else {
        let upper = floor[mid];
        let lower = floor[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (upper + lower)
    };
    if !(floor_density > 0.0) {
        return Err(Error::Degenerate("noise floor is zero".into()));
    }

    let ratio = peak_density / floor_density;
    let snr_linear = ratio - 1.0;
    Ok(PeakReading {
        frequency: s.frequencies[peak_bin],
        peak_power: peak_density * s.enbw,
        floor_power: floor_density * s.enbw,
        floor_density,
        peak_to_floor: ratio,
        peak_to_floor_db: 10.0 * ratio.log10(),
        snr_linear,
        snr_db: if snr_linear > 0.0 { 10.0 * snr_linear.log10() } else { f64::NEG_INFINITY },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub psi: f64,
    pub variance: f64,
}

/// Quadrature variance as the local-oscillator phase sweeps `[0, 2π)`.
pub fn local_phase_scan(squeeze: &QuadratureState, n_points: usize) -> Result<Vec<PhasePoint>> {
    if n_points < 2 {
        return Err(Error::domain("phase scan", format!("{n_points} points; need at least 2")));
    }
    Ok((0..n_points)
        .map(|j| {
            let psi = 2.0 * std::f64::consts::PI * j as f64 / n_points as f64;
            PhasePoint {
                psi,
                variance: quadrature_variance(squeeze, psi),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub p_f: f64,
    pub input_power: f64,
    pub phi: f64,
    pub snr_linear: f64,
    pub snr_db: f64,
}

/// SNR versus postselection probability at the base config's fixed output power.
pub fn postselection_sweep(base: &MeasurementConfig, probabilities: &[f64]) -> Result<Vec<SweepEntry>> {
    let p_out = base.output_power.as_watts();
    probabilities
        .par_iter()
        .map(|&p_f| {
            let phi = phi_for_probability(p_f)?;
            let mut c = *base;
            c.input_power = OpticalPower::watts(p_out / p_f)?;
            c.phi = phi;
            let s = snr(&c)?;
            Ok(SweepEntry {
                p_f,
                input_power: c.input_power.as_watts(),
                phi,
                snr_linear: s.linear,
                snr_db: s.db,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeEntry {
    pub squeeze_db: f64,
    pub snr_linear: f64,
    pub snr_db: f64,
}

/// SNR versus injected squeezing level (amplitude squeezing), other parameters fixed.
pub fn squeezing_sweep(base: &MeasurementConfig, levels_db: &[f64]) -> Result<Vec<SqueezeEntry>> {
    levels_db
        .par_iter()
        .map(|&db| {
            let c = base.with_squeeze_db(db)?;
            let s = snr(&c)?;
            Ok(SqueezeEntry {
                squeeze_db: db,
                snr_linear: s.linear,
                snr_db: s.db,
            })
        })
        .collect()
}
