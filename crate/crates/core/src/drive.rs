//! Waveguide-level preparation of the pulse: coherent-state amplitudes,
//! photon number and energy, the point driving that creates them, and
//! frequency truncation of the resulting field.
//!
//! Conventions (`ħ = ε₀ = 1`):
//! * coherent amplitude `α(k) = C_α √ω(k) e^{iφ} exp(−σ_f²κ²/2 + i d_f κ²/(2k₀))`
//! * on-axis TM₀₁ mode `f_z(k,z) = iC e^{ikz}/ω(k)`, field
//!   `E⁺ = i∫√(ω/2) f_z α e^{i(kz−ωt)} dk`
//! * amplitude link `N = C_α C k_c √π`
//! * driving spectrum `D̃(ω) = (2π)^{-1}∫D(t)e^{−iωt}dt`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::medium::WaveguideGeometry;
use crate::numerics::fourier::{fft_frequencies, forward_integral, inverse_integral, UniformSeries};
use crate::numerics::{integrate_dense, GaussLegendre, StepControl};
use crate::pulse::PulseParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentPrep {
    pub c_alpha: f64,
    pub pulse: PulseParams,
    pub geom: WaveguideGeometry,
}

impl CoherentPrep {
    pub fn new(c_alpha: f64, pulse: PulseParams, geom: WaveguideGeometry) -> Result<Self> {
        ensure_positive("c_alpha", c_alpha)?;
        let wg = geom.quadratic_band();
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs());
        if !close(wg.omega_c, pulse.band.omega_c) || !close(wg.v, pulse.band.v) {
            return Err(Error::InvalidParameter {
                name: "geom",
                reason: format!(
                    "waveguide band (ω_c={}, v={}) differs from the pulse band (ω_c={}, v={})",
                    wg.omega_c, wg.v, pulse.band.omega_c, pulse.band.v
                ),
            });
        }
        Ok(Self {
            c_alpha,
            pulse,
            geom,
        })
    }

    /// Preparation reproducing `pulse` (including its amplitude `N`) in the
    /// waveguide whose TM₀₁ band is the pulse band.
    pub fn for_pulse(pulse: PulseParams) -> Self {
        let geom = WaveguideGeometry::for_band(&pulse.band);
        let c_alpha = pulse.amplitude / (geom.mode_constant() * pulse.band.k_c() * PI.sqrt());
        Self {
            c_alpha,
            pulse,
            geom,
        }
    }

    /// `N = C_α C k_c √π`.
    pub fn field_amplitude(&self) -> f64 {
        self.c_alpha * self.geom.mode_constant() * self.pulse.band.k_c() * PI.sqrt()
    }

    pub fn coherent_amplitude(&self, k: f64) -> Complex64 {
        let p = &self.pulse;
        let kappa = k - p.k0;
        Complex64::from_polar(
            self.c_alpha * p.band.omega(k).sqrt() * (-0.5 * p.sigma_f * p.sigma_f * kappa * kappa).exp(),
            p.phi + p.d_f * kappa * kappa / (2.0 * p.k0),
        )
    }

    /// Closed-form `N_ph = ∫|α|²dk`.
    pub fn photon_number(&self) -> f64 {
        let p = &self.pulse;
        let c = self.geom.c;
        let wc = p.band.omega_c;
        let sf = p.sigma_f;
        self.c_alpha * self.c_alpha * PI.sqrt()
            * (c * c * (2.0 * p.k0 * p.k0 * sf * sf + 1.0) + 4.0 * sf * sf * wc * wc)
            / (4.0 * sf.powi(3) * wc)
    }

    /// `∫|α|²dk` by quadrature over `k₀ ± 10/σ_f`.
    pub fn photon_number_quadrature(&self) -> f64 {
        let (lo, hi) = self.pulse.k_support(10.0);
        GaussLegendre::new(32).integrate(|k| self.coherent_amplitude(k).norm_sqr(), lo, hi, 64)
    }

    /// `U₀ = ∫ω(k)|α(k)|²dk` by quadrature.
    pub fn pulse_energy(&self) -> f64 {
        let (lo, hi) = self.pulse.k_support(10.0);
        GaussLegendre::new(32).integrate(
            |k| self.pulse.band.omega(k) * self.coherent_amplitude(k).norm_sqr(),
            lo,
            hi,
            64,
        )
    }

    /// `U₀` from Gaussian moments: `k ~ 𝒩(k₀, 1/(2σ_f²))`.
    pub fn pulse_energy_closed_form(&self) -> f64 {
        let p = &self.pulse;
        let wc = p.band.omega_c;
        let beta = p.band.v * p.band.v / (2.0 * wc);
        let s2 = 1.0 / (2.0 * p.sigma_f * p.sigma_f);
        let m2 = p.k0 * p.k0 + s2;
        let m4 = p.k0.powi(4) + 6.0 * p.k0 * p.k0 * s2 + 3.0 * s2 * s2;
        self.c_alpha * self.c_alpha * PI.sqrt() / p.sigma_f * (wc * wc + 2.0 * wc * beta * m2 + beta * beta * m4)
    }

    /// Driving spectrum that leaves mode `k ≥ 0` in `α(k)` once the drive is over.
    ///
    /// The Heisenberg equation `ȧ_k = −iω a_k − i D*(t)/√(2π)` gives
    /// `a_k(∞)e^{iωt} = −i√(2π) D̃*(ω)`, hence `D̃(ω(k)) = −i α*(k)/√(2π)`: the
    /// relation `D̃ = iα*` up to the factor `−1/√(2π)` fixed by this
    /// transform convention. Zero below the cutoff.
    pub fn driving_spectrum(&self, omega: f64) -> Complex64 {
        match self.pulse.band.k_of_omega(omega) {
            Ok(k) => -Complex64::i() * self.coherent_amplitude(k).conj() / (2.0 * PI).sqrt(),
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// `E⁺(z,t)` synthesised from the coherent amplitudes through the TM₀₁
    /// mode functions, by composite Gauss-Legendre over `k₀ ± 6/σ_f`.
    pub fn mode_field_plus(&self, z_grid: &[f64], t: f64, nodes: usize) -> Vec<Complex64> {
        let c = self.geom.mode_constant();
        let (lo, hi) = self.pulse.k_support(6.0);
        let gl = GaussLegendre::new(16);
        let pts: Vec<(f64, Complex64)> = gl
            .composite_points(lo, hi, nodes.div_ceil(16).max(1))
            .into_iter()
            .map(|(k, w)| {
                let omega = self.pulse.band.omega(k);
                // i √(ω/2) · iC/ω · α(k)
                let coeff = -(omega / 2.0).sqrt() * c / omega;
                (k, self.coherent_amplitude(k) * Complex64::from_polar(w * coeff, -omega * t))
            })
            .collect();
        z_grid
            .par_iter()
            .map(|&z| pts.iter().map(|&(k, a)| a * Complex64::from_polar(1.0, k * z)).sum())
            .collect()
    }
}

/// Edge-to-peak ratio allowed for a synthesised driving series.
pub const DRIVE_EDGE_LIMIT: f64 = 1e-6;

/// Point driving on a uniform time grid together with its spectrum on the
/// matching FFT bins.
#[derive(Debug, Clone, PartialEq)]
pub struct DrivingSpec {
    pub series: UniformSeries,
    /// FFT-bin frequencies (natural order) and `D̃` on them.
    pub omega: Vec<f64>,
    pub spectrum: Vec<Complex64>,
    /// Carrier used to demodulate the series for interpolation.
    pub carrier: f64,
}

impl DrivingSpec {
    /// `D(t)` by four-point Lagrange interpolation of the demodulated series;
    /// zero outside the window.
    pub fn eval(&self, t: f64) -> Complex64 {
        let s = &self.series;
        let n = s.values.len();
        let x = (t - s.t0) / s.dt;
        if x < 0.0 || x > (n - 1) as f64 {
            return Complex64::new(0.0, 0.0);
        }
        let i = (x.floor() as isize).clamp(1, n as isize - 3) as usize;
        let f = x - i as f64;
        let demod = |j: usize| {
            let tj = s.t0 + s.dt * j as f64;
            s.values[j] * Complex64::from_polar(1.0, -self.carrier * tj)
        };
        let (p0, p1, p2, p3) = (demod(i - 1), demod(i), demod(i + 1), demod(i + 2));
        let w0 = -f * (f - 1.0) * (f - 2.0) / 6.0;
        let w1 = (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0;
        let w2 = -(f + 1.0) * f * (f - 2.0) / 2.0;
        let w3 = (f + 1.0) * f * (f - 1.0) / 6.0;
        (p0 * w0 + p1 * w1 + p2 * w2 + p3 * w3) * Complex64::from_polar(1.0, self.carrier * t)
    }

    /// `D̃` recomputed from the time series on the same bins.
    pub fn round_trip_spectrum(&self) -> Vec<Complex64> {
        forward_integral(&self.series)
            .into_iter()
            .map(|x| x / (2.0 * PI))
            .collect()
    }
}

/// `D(t) = ∫D̃(ω)e^{iωt}dω` on `n_samples` points of `[t_start, t_end)`.
pub fn synthesize_driving(prep: &CoherentPrep, t_start: f64, t_end: f64, n_samples: usize) -> Result<DrivingSpec> {
    synthesize_driving_with_limit(prep, t_start, t_end, n_samples, DRIVE_EDGE_LIMIT)
}

/// As [`synthesize_driving`] with an explicit edge-to-peak limit; a limit of
/// 1 or more disables the check (used for window-convergence studies).
pub fn synthesize_driving_with_limit(
    prep: &CoherentPrep,
    t_start: f64,
    t_end: f64,
    n_samples: usize,
    edge_limit: f64,
) -> Result<DrivingSpec> {
    if !(t_end > t_start) || n_samples < 8 {
        return Err(Error::InvalidParameter {
            name: "time_window",
            reason: "need t_end > t_start and at least 8 samples".into(),
        });
    }
    let dt = (t_end - t_start) / n_samples as f64;
    let (_, k_hi) = prep.pulse.k_support(8.0);
    let omega_hi = prep.pulse.band.omega(k_hi);
    if PI / dt < omega_hi {
        return Err(Error::InvalidParameter {
            name: "n_samples",
            reason: format!(
                "Nyquist frequency {:.4} below the spectral support edge {omega_hi:.4}",
                PI / dt
            ),
        });
    }
    let omega = fft_frequencies(n_samples, dt);
    let spectrum: Vec<Complex64> = omega.iter().map(|&w| prep.driving_spectrum(w)).collect();
    let integrals: Vec<Complex64> = spectrum.iter().map(|d| d * (2.0 * PI)).collect();
    let series = inverse_integral(&integrals, t_start, dt);
    let peak = series.values.iter().map(|d| d.norm()).fold(0.0, f64::max);
    let edge = series.values[0].norm().max(series.values[n_samples - 1].norm()) / peak;
    if !(edge <= edge_limit) {
        return Err(Error::WindowTooShort {
            edge_ratio: edge,
            limit: edge_limit,
        });
    }
    Ok(DrivingSpec {
        series,
        omega,
        spectrum,
        carrier: prep.pulse.omega0(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrivenModeReport {
    pub k: Vec<f64>,
    pub achieved: Vec<Complex64>,
    pub target: Vec<Complex64>,
    pub relative_l2: f64,
}

/// Integrate `ȧ_k = −iω(k)a_k − iD*(t)/√(2π)` (point coupling at `z₀ = 0`)
/// from rest across the driving window for `n_k` uniformly spaced modes on
/// `[k₀ − 4/σ_f, k₀ + 4/σ_f] ∩ (0, ∞)` and compare with `α(k)`.
///
/// Negative wave numbers are excluded: a point drive excites `±k` equally, so
/// the backward modes carry `α(|k|)` rather than the forward target.
pub fn driven_mode_oracle(prep: &CoherentPrep, drive: &DrivingSpec, n_k: usize, rtol: f64) -> Result<DrivenModeReport> {
    let (lo, hi) = prep.pulse.k_support(4.0);
    let lo = lo.max(hi * 1e-6);
    let k: Vec<f64> = (0..n_k)
        .map(|i| lo + (hi - lo) * i as f64 / (n_k - 1).max(1) as f64)
        .collect();
    let t0 = drive.series.t0;
    let t1 = t0 + drive.series.dt * (drive.series.values.len() - 1) as f64;
    let control = StepControl {
        rtol,
        atol: rtol * 1e-3 * prep.coherent_amplitude(prep.pulse.k0).norm(),
        max_step: 4.0 * drive.series.dt.max(1.0),
        ..Default::default()
    };
    let inv_sqrt = 1.0 / (2.0 * PI).sqrt();
    // Interaction picture b = a e^{iωt}: ḃ = −i D*(t) e^{iωt}/√(2π).
    let achieved = k
        .par_iter()
        .map(|&kk| {
            let omega = prep.pulse.band.omega(kk);
            let rhs = |t: f64, _y: &[Complex64], dy: &mut [Complex64]| {
                dy[0] = -Complex64::i() * drive.eval(t).conj() * Complex64::from_polar(inv_sqrt, omega * t);
            };
            let (ys, _) = integrate_dense(rhs, t0, &[Complex64::new(0.0, 0.0)], &[t1], &control)?;
            Ok(ys[0][0])
        })
        .collect::<Result<Vec<_>>>()?;
    let target: Vec<Complex64> = k.iter().map(|&kk| prep.coherent_amplitude(kk)).collect();
    let relative_l2 = crate::pulse::relative_l2(&achieved, &target);
    Ok(DrivenModeReport {
        k,
        achieved,
        target,
        relative_l2,
    })
}

/// Zero every Fourier component with `|ω| > omega_r`. Real input gives real
/// output.
pub fn truncate_field(series: &UniformSeries, omega_r: f64) -> UniformSeries {
    let n = series.values.len();
    let omegas = fft_frequencies(n, series.dt);
    let spec: Vec<Complex64> = forward_integral(series)
        .into_iter()
        .zip(&omegas)
        .map(|(x, w)| if w.abs() > omega_r { Complex64::new(0.0, 0.0) } else { x })
        .collect();
    let mut out = inverse_integral(&spec, series.t0, series.dt);
    if series.values.iter().all(|v| v.im == 0.0) {
        for v in &mut out.values {
            v.im = 0.0;
        }
    }
    out
}

/// `∫_{|ω|>ω_r} |Ẽ(ω)|² dω` with `Ẽ = (2π)^{-1/2}∫E e^{−iωt}dt`.
pub fn spectral_energy_above(series: &UniformSeries, omega_r: f64) -> f64 {
    let n = series.values.len();
    let dw = 2.0 * PI / (n as f64 * series.dt);
    forward_integral(series)
        .into_iter()
        .zip(fft_frequencies(n, series.dt))
        .filter(|(_, w)| w.abs() > omega_r)
        .map(|(x, _)| x.norm_sqr() / (2.0 * PI))
        .sum::<f64>()
        * dw
}

/// Real on-axis field `E(z,t)` sampled on `n` points of `[t_start, t_end)`.
pub fn sample_field(pulse: &PulseParams, z: f64, t_start: f64, t_end: f64, n: usize) -> UniformSeries {
    let dt = (t_end - t_start) / n as f64;
    UniformSeries {
        t0: t_start,
        dt,
        values: (0..n)
            .map(|i| Complex64::new(pulse.field_real(z, t_start + dt * i as f64), 0.0))
            .collect(),
    }
}
