//! Self-compressing chirped pulses in quadratic-dispersion media and the
//! position-selective addressing of quantum emitters they enable.
//!
//! Units are dimensionless throughout: `ħ = ε₀ = 1`, and the experiment
//! layer works with `ω_c = v = 1` so that lengths are in `v/ω_c` and times in
//! `1/ω_c`. The physics modules accept a general [`medium::QuadraticBand`].
//!
//! Layout:
//! * [`medium`] – quadratic band, hollow-waveguide TM/TE bands, 1D multilayer crystal
//! * [`pulse`] – the closed-form chirped pulse family and its spectra
//! * [`drive`] – coherent-state preparation, point driving, truncation, energy
//! * [`emitter`] – Lindblad dynamics of a qubit and a truncated transmon
//! * [`lz`] – Landau-Zener decomposition and the σ_q estimator
//! * [`experiments`] – scans, sweeps, peak statistics and the scattering budget

pub mod drive;
pub mod emitter;
pub mod error;
pub mod experiments;
pub mod lz;
pub mod medium;
pub mod numerics;
pub mod pulse;

pub use error::{Error, Result};
