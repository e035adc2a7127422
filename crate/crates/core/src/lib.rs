//! Simulation models for squeezing-assisted weak-value-amplification (WVA)
//! spatial measurement.
//!
//! A TEM00 coherent beam and a TEM10 squeezed vacuum enter a Mach-Zehnder
//! interferometer. A small mirror tilt couples TEM00 into TEM10, the nearly
//! dark output port amplifies that coupling by the weak value cot(φ/2), and a
//! split-like (D-mirror) detector reads the TEM10 content. Squeezing the
//! injected TEM10 vacuum lowers the noise floor of the difference signal.
//!
//! Modules, bottom up:
//!
//! * [`quadrature`] adaptive Gauss-Kronrod integration used as the mode-overlap oracle
//! * [`hg_modes`] 1-D Hermite-Gauss functions, overlaps and mode-coupling algebra
//! * [`quantum_state`] Gaussian quadrature states, photon numbers and dB bookkeeping
//! * [`interferometer`] beamsplitter/phase matrices, dark-port field, weak value
//! * [`detection`] split-detection statistics, SNR and minimum detectable tilt
//! * [`spectra`] seeded Monte Carlo photocurrent, Welch PSD and sweeps

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod detection;
pub mod error;
pub mod hg_modes;
pub mod interferometer;
pub mod quadrature;
pub mod quantum_state;
pub mod spectra;

pub use detection::{
    difference_statistics, min_detectable_tilt, snr, DifferenceStatistics, SensitivityReport, Snr,
};
pub use error::{Error, Result};
pub use hg_modes::{BeamGeometry, ModeExpansion, ModeIndex, N_MAX};
pub use interferometer::{dark_port_output, DarkPortState, MeasurementConfig};
pub use quantum_state::{OpticalPower, QuadratureState};
pub use spectra::{SpectrumEstimate, TimeSeries, TraceConfig, Window};
