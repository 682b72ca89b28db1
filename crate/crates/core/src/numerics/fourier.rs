//! Continuous-transform approximations on uniform grids.
//!
//! Two conventions appear in this crate and both are spelled out here:
//!
//! * field spectra: `Ẽ(ω) = (2π)^{-1/2} ∫ E(t) e^{-iωt} dt`
//! * driving spectra: `D̃(ω) = (2π)^{-1} ∫ D(t) e^{-iωt} dt`, inverse
//!   `D(t) = ∫ D̃(ω) e^{iωt} dω`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Samples of a time series on `t_k = t0 + k·dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformSeries {
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<Complex64>,
}

impl UniformSeries {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |k| self.t0 + self.dt * k as f64)
    }
}

/// Angular frequencies of the FFT bins in natural (unshifted) order.
pub fn fft_frequencies(n: usize, dt: f64) -> Vec<f64> {
    let dw = 2.0 * PI / (n as f64 * dt);
    (0..n)
        .map(|j| {
            let jj = if j < n.div_ceil(2) { j as f64 } else { j as f64 - n as f64 };
            jj * dw
        })
        .collect()
}

/// `∫ x(t) e^{-iω_j t} dt` for every FFT bin, with the phase of the
/// window origin restored.
pub fn forward_integral(series: &UniformSeries) -> Vec<Complex64> {
    let n = series.values.len();
    let mut buf = series.values.clone();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let omegas = fft_frequencies(n, series.dt);
    buf.iter()
        .zip(&omegas)
        .map(|(x, w)| x * series.dt * Complex64::from_polar(1.0, -w * series.t0))
        .collect()
}

/// Inverse of [`forward_integral`]: recovers the samples from
/// `X(ω_j) = ∫ x(t) e^{-iω_j t} dt`.
pub fn inverse_integral(spectrum: &[Complex64], t0: f64, dt: f64) -> UniformSeries {
    let n = spectrum.len();
    let omegas = fft_frequencies(n, dt);
    let mut buf: Vec<Complex64> = spectrum
        .iter()
        .zip(&omegas)
        .map(|(x, w)| x * Complex64::from_polar(1.0, w * t0) / dt)
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    for v in &mut buf {
        *v /= n as f64;
    }
    UniformSeries { t0, dt, values: buf }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_transform_matches_closed_form() {
        let n = 1024;
        let dt = 0.05;
        let t0 = -25.6 + 3.0;
        let values = (0..n)
            .map(|k| {
                let t = t0 + dt * k as f64;
                Complex64::new((-(t - 3.0).powi(2) / 2.0).exp(), 0.0)
            })
            .collect();
        let s = UniformSeries { t0, dt, values };
        let spec = forward_integral(&s);
        for (x, w) in spec.iter().zip(fft_frequencies(n, dt)).take(60) {
            let want = Complex64::from_polar((2.0 * PI).sqrt() * (-w * w / 2.0).exp(), -3.0 * w);
            assert!((x - want).norm() < 1e-10, "w={w}");
        }
    }

    #[test]
    fn round_trip_is_identity() {
        let values: Vec<Complex64> = (0..257)
            .map(|k| Complex64::new((k as f64 * 0.3).sin(), (k as f64 * 0.11).cos()))
            .collect();
        let s = UniformSeries {
            t0: -4.0,
            dt: 0.2,
            values: values.clone(),
        };
        let back = inverse_integral(&forward_integral(&s), s.t0, s.dt);
        for (a, b) in back.values.iter().zip(&values) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
