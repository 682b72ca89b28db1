//! The chirped self-compressing pulse family.
//!
//! With `κ = k − k₀` the pulse is the free evolution of the chirped Gaussian
//! wave-number amplitude
//!
//! `A(k) = N/(k_c√(2π)) e^{iφ} exp(−σ_f²κ²/2 + i d_f κ²/(2k₀))`
//!
//! under `ω(k) = ω_c + v²k²/(2ω_c)`, which integrates to the closed form
//! implemented by [`PulseParams::field_plus`]. The pulse reaches its minimum
//! width `σ_f` at `z = d_f`, `t = t_f = η d_f / v`, with `η = k_c/k₀`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::medium::QuadraticBand;
use crate::numerics::fourier::{fft_frequencies, forward_integral, UniformSeries};
use crate::numerics::GaussLegendre;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseParams {
    pub k0: f64,
    pub d_f: f64,
    pub sigma_f: f64,
    pub phi: f64,
    /// Field-amplitude parameter `N`.
    pub amplitude: f64,
    pub band: QuadraticBand,
}

impl PulseParams {
    pub fn new(band: QuadraticBand, k0: f64, d_f: f64, sigma_f: f64, phi: f64, amplitude: f64) -> Result<Self> {
        ensure_positive("k0", k0)?;
        ensure_positive("d_f", d_f)?;
        ensure_positive("sigma_f", sigma_f)?;
        ensure_positive("amplitude", amplitude)?;
        if !phi.is_finite() {
            return Err(Error::InvalidParameter {
                name: "phi",
                reason: "must be finite".into(),
            });
        }
        Ok(Self {
            k0,
            d_f,
            sigma_f,
            phi,
            amplitude,
            band,
        })
    }

    /// Build from dimensionless ratios: `ω₀/ω_c`, `d_f/λ₀`,
    /// `σ_f/λ₀` and `φ`, with unit amplitude.
    pub fn from_ratios(
        band: QuadraticBand,
        omega0_over_omega_c: f64,
        d_f_over_lambda0: f64,
        sigma_f_over_lambda0: f64,
        phi: f64,
    ) -> Result<Self> {
        if !(omega0_over_omega_c > 1.0) {
            return Err(Error::InvalidParameter {
                name: "omega0_over_omega_c",
                reason: format!("carrier must lie above the cutoff, got {omega0_over_omega_c}"),
            });
        }
        let k0 = band.k_of_omega(omega0_over_omega_c * band.omega_c)?;
        let lambda0 = 2.0 * PI / k0;
        Self::new(
            band,
            k0,
            d_f_over_lambda0 * lambda0,
            sigma_f_over_lambda0 * lambda0,
            phi,
            1.0,
        )
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn omega0(&self) -> f64 {
        self.band.omega(self.k0)
    }

    pub fn eta(&self) -> f64 {
        self.band.k_c() / self.k0
    }

    pub fn t_f(&self) -> f64 {
        self.eta() * self.d_f / self.band.v
    }

    pub fn lambda0(&self) -> f64 {
        2.0 * PI / self.k0
    }

    /// `s(z,t) = η k_c z − ω_c t`.
    pub fn s(&self, z: f64, t: f64) -> f64 {
        self.eta() * self.band.k_c() * z - self.band.omega_c * t
    }

    fn sigma4(&self, t: f64) -> f64 {
        let kc = self.band.k_c();
        let u = self.s(self.d_f, t);
        self.sigma_f.powi(4) + u * u / kc.powi(4)
    }

    /// Instantaneous width `σ(t)`.
    pub fn sigma_t(&self, t: f64) -> f64 {
        self.sigma4(t).sqrt().sqrt()
    }

    /// Position of the envelope centre, `v t / η`.
    pub fn center(&self, t: f64) -> f64 {
        self.band.v * t / self.eta()
    }

    /// Chirp phase `θ(z,t)`.
    pub fn theta(&self, z: f64, t: f64) -> f64 {
        let kc = self.band.k_c();
        let eta = self.eta();
        let u = self.s(self.d_f, t);
        let s = self.s(z, t);
        -u * s * s / (2.0 * eta * eta * kc.powi(4) * self.sigma4(t))
            + 0.5 * (u / (kc * kc * self.sigma_f * self.sigma_f)).atan()
    }

    /// Analytic `∂θ/∂t`.
    pub fn dtheta_dt(&self, z: f64, t: f64) -> f64 {
        let kc = self.band.k_c();
        let wc = self.band.omega_c;
        let eta = self.eta();
        let u = self.s(self.d_f, t);
        let x = z - self.center(t);
        let s4 = self.sigma4(t);
        let sf2 = self.sigma_f * self.sigma_f;
        wc * x * x / (2.0 * kc * kc * s4) + u * x * self.band.v / (eta * kc * kc * s4)
            - u * u * x * x * wc / (kc.powi(6) * s4 * s4)
            - wc * kc * kc * sf2 / (2.0 * (kc.powi(4) * sf2 * sf2 + u * u))
    }

    /// `|E⁺(z,t)|`.
    pub fn envelope(&self, z: f64, t: f64) -> f64 {
        let s4 = self.sigma4(t);
        let x = z - self.center(t);
        self.amplitude / (self.band.k_c() * s4.sqrt().sqrt())
            * (-self.sigma_f * self.sigma_f * x * x / (2.0 * s4)).exp()
    }

    /// `E⁺(z,t)` with the carrier `e^{i(k₀z − ω₀t)}`.
    pub fn field_plus(&self, z: f64, t: f64) -> Complex64 {
        let phase = self.theta(z, t) + self.phi + self.k0 * z - self.omega0() * t;
        Complex64::from_polar(self.envelope(z, t), phase)
    }

    /// Real field `2 Re E⁺`.
    pub fn field_real(&self, z: f64, t: f64) -> f64 {
        2.0 * self.field_plus(z, t).re
    }

    /// Largest `|E⁺|`, attained at `(d_f, t_f)`.
    pub fn peak_envelope(&self) -> f64 {
        self.amplitude / (self.band.k_c() * self.sigma_f)
    }

    /// Normalisation of the real field, `2 max|E⁺|`.
    pub fn e_max(&self) -> f64 {
        2.0 * self.peak_envelope()
    }

    /// `E⁺ e^{iω₀t}/max|E⁺| = (σ_f/σ) exp(…) e^{i(θ + k₀z + φ)}`.
    pub fn normalized_envelope(&self, z: f64, t: f64) -> Complex64 {
        let s4 = self.sigma4(t);
        let x = z - self.center(t);
        let mag = self.sigma_f / s4.sqrt().sqrt() * (-self.sigma_f * self.sigma_f * x * x / (2.0 * s4)).exp();
        Complex64::from_polar(mag, self.theta(z, t) + self.k0 * z + self.phi)
    }

    /// Chirped Gaussian wave-number amplitude `A(k)`.
    pub fn spectral_amplitude(&self, k: f64) -> Complex64 {
        let kappa = k - self.k0;
        let norm = self.amplitude / (self.band.k_c() * (2.0 * PI).sqrt());
        Complex64::from_polar(
            norm * (-0.5 * self.sigma_f * self.sigma_f * kappa * kappa).exp(),
            self.phi + self.d_f * kappa * kappa / (2.0 * self.k0),
        )
    }

    /// Wave-number interval `k₀ ± half_widths/σ_f`.
    pub fn k_support(&self, half_widths: f64) -> (f64, f64) {
        (
            self.k0 - half_widths / self.sigma_f,
            self.k0 + half_widths / self.sigma_f,
        )
    }
}

/// Spectral statistics over positive frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumStats {
    pub mean_omega: f64,
    pub std_omega: f64,
    pub omega: Vec<f64>,
    /// Density `p(ω) = |Ẽ(ω)| / ∫|Ẽ|dω` at `omega`.
    pub p_of_omega: Vec<f64>,
}

/// Edge-to-peak envelope ratio above which a time window counts as truncated.
pub const WINDOW_EDGE_LIMIT: f64 = 1e-8;

/// `p(ω)` statistics from an FFT of the real field at `z` sampled on
/// `[t_start, t_end)`.
///
/// The envelope must have decayed below [`WINDOW_EDGE_LIMIT`] of its in-window
/// peak at both ends. Components near the band edge travel slowly, so at
/// fixed `z` the envelope falls off only algebraically unless `k₀σ_f` is
/// large; use [`spectrum_exact`] for strongly chirped pulses.
pub fn spectrum_at(pulse: &PulseParams, z: f64, t_start: f64, t_end: f64, n_samples: usize) -> Result<SpectrumStats> {
    if !(t_end > t_start) || n_samples < 16 {
        return Err(Error::InvalidParameter {
            name: "time_window",
            reason: "need t_end > t_start and at least 16 samples".into(),
        });
    }
    let dt = (t_end - t_start) / n_samples as f64;
    let period = 2.0 * PI / pulse.omega0();
    if dt > period / 16.0 {
        return Err(Error::InvalidParameter {
            name: "n_samples",
            reason: format!(
                "{:.1} samples per carrier period, need at least 16",
                period / dt
            ),
        });
    }
    let times: Vec<f64> = (0..n_samples).map(|i| t_start + dt * i as f64).collect();
    let env: Vec<f64> = times.iter().map(|&t| pulse.envelope(z, t)).collect();
    let peak = env.iter().cloned().fold(0.0, f64::max);
    let edge = env[0].max(*env.last().unwrap()) / peak;
    if !(edge <= WINDOW_EDGE_LIMIT) {
        return Err(Error::WindowTooShort {
            edge_ratio: edge,
            limit: WINDOW_EDGE_LIMIT,
        });
    }
    let series = UniformSeries {
        t0: t_start,
        dt,
        values: times
            .iter()
            .map(|&t| Complex64::new(pulse.field_real(z, t), 0.0))
            .collect(),
    };
    let spec = forward_integral(&series);
    let omegas = fft_frequencies(n_samples, dt);
    let dw = 2.0 * PI / (n_samples as f64 * dt);
    let mut pts: Vec<(f64, f64)> = omegas
        .iter()
        .zip(&spec)
        .filter(|(w, _)| **w > 0.0)
        .map(|(w, e)| (*w, e.norm() / (2.0 * PI).sqrt()))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let z_norm: f64 = pts.iter().map(|p| p.1).sum::<f64>() * dw;
    let mean = pts.iter().map(|p| p.0 * p.1).sum::<f64>() * dw / z_norm;
    let var = pts.iter().map(|p| (p.0 - mean).powi(2) * p.1).sum::<f64>() * dw / z_norm;
    Ok(SpectrumStats {
        mean_omega: mean,
        std_omega: var.max(0.0).sqrt(),
        omega: pts.iter().map(|p| p.0).collect(),
        p_of_omega: pts.iter().map(|p| p.1 / z_norm).collect(),
    })
}

/// `p(ω)` statistics from the wave-number representation.
///
/// Each `ω > ω_c` is reached by `±k`, so `|Ẽ(z,ω)| ∝ |A(k)e^{ikz} + A(−k)e^{−ikz}| / ω'(k)`
/// and `p(ω)dω` becomes that modulus times `dk`; integrals run over
/// `0 ≤ k ≤ k₀ + 12/σ_f` with composite Gauss-Legendre.
pub fn spectrum_exact(pulse: &PulseParams, z: f64, panels: usize) -> SpectrumStats {
    let k_hi = pulse.k0 + 12.0 / pulse.sigma_f;
    let gl = GaussLegendre::new(16);
    let pts = gl.composite_points(0.0, k_hi, panels.max(1));
    let weight = |k: f64| {
        let a = pulse.spectral_amplitude(k) * Complex64::from_polar(1.0, k * z)
            + pulse.spectral_amplitude(-k) * Complex64::from_polar(1.0, -k * z);
        a.norm()
    };
    let m: Vec<f64> = pts.iter().map(|&(k, _)| weight(k)).collect();
    let (mut z0, mut z1) = (0.0, 0.0);
    for ((k, w), mk) in pts.iter().zip(&m) {
        z0 += w * mk;
        z1 += w * mk * pulse.band.omega(*k);
    }
    let mean = z1 / z0;
    let var: f64 = pts
        .iter()
        .zip(&m)
        .map(|((k, w), mk)| w * mk * (pulse.band.omega(*k) - mean).powi(2))
        .sum::<f64>()
        / z0;
    SpectrumStats {
        mean_omega: mean,
        std_omega: var.sqrt(),
        omega: pts.iter().map(|&(k, _)| pulse.band.omega(k)).collect(),
        p_of_omega: pts
            .iter()
            .zip(&m)
            .map(|(&(k, _), mk)| mk / (pulse.band.group_velocity(k) * z0))
            .collect(),
    }
}

/// Quadrature settings for [`spectral_propagation_oracle`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleQuadrature {
    /// Total node count (rounded up to whole 16-point panels).
    pub nodes: usize,
    /// Integration half-width in units of `1/σ_f` about `k₀`.
    pub half_widths: f64,
}

impl Default for OracleQuadrature {
    fn default() -> Self {
        Self {
            nodes: 4096,
            half_widths: 6.0,
        }
    }
}

/// Largest phase swing across one panel the 16-point rule is trusted with.
const MAX_PANEL_PHASE: f64 = 12.0;

/// `E⁺(z,t) = ∫ A(k) e^{i(kz − ω(k)t)} dk` by composite Gauss-Legendre, an
/// independent check of the closed form.
pub fn spectral_propagation_oracle(
    pulse: &PulseParams,
    z_grid: &[f64],
    t: f64,
    quad: OracleQuadrature,
) -> Result<Vec<Complex64>> {
    let (k_lo, k_hi) = pulse.k_support(quad.half_widths);
    let panels = quad.nodes.div_ceil(16).max(1);
    let width = (k_hi - k_lo) / panels as f64;
    // ∂_k(kz − ωt + d_f κ²/(2k₀)) = (z − vt/η) + κ (d_f/k₀ − v²t/ω_c)
    let x_span = z_grid
        .iter()
        .map(|z| (z - pulse.center(t)).abs())
        .fold(0.0, f64::max);
    let chirp = (pulse.d_f / pulse.k0 - pulse.band.v * pulse.band.v * t / pulse.band.omega_c).abs();
    let slope = x_span + (k_hi - pulse.k0) * chirp;
    if slope * width > MAX_PANEL_PHASE {
        return Err(Error::QuadratureResolution(format!(
            "phase swing {:.1} rad per panel with {} nodes; need at most {MAX_PANEL_PHASE}",
            slope * width,
            panels * 16
        )));
    }
    let gl = GaussLegendre::new(16);
    let pts: Vec<(f64, Complex64)> = gl
        .composite_points(k_lo, k_hi, panels)
        .into_iter()
        .map(|(k, w)| {
            (
                k,
                pulse.spectral_amplitude(k) * Complex64::from_polar(w, -pulse.band.omega(k) * t),
            )
        })
        .collect();
    Ok(z_grid
        .par_iter()
        .map(|&z| {
            pts.iter()
                .map(|&(k, a)| a * Complex64::from_polar(1.0, k * z))
                .sum()
        })
        .collect())
}

/// Relative discrete L² distance `‖a − b‖/‖b‖`.
pub fn relative_l2(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}
