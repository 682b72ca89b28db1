//! Landau-Zener picture of the driven qubit.
//!
//! Writing the rotating amplitude as `Ω̃ = g e^{iφ}` and removing the phase
//! with `exp(iφσ_z/2)` leaves `H = Δσ_z + (g/2)σ_x` with
//! `Δ = (∂_tφ + ω_q − ω₀)/2`. Energies here are those of this interaction
//! frame; the `ω₀/2` offset of the bare frame is dropped.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::emitter::{rabi_envelope, QubitSpec};
use crate::error::{Error, Result};
use crate::numerics::{bisect, golden_max, scan_brackets};
use crate::pulse::PulseParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LzFrame {
    pub g: f64,
    pub phi: f64,
    pub delta: f64,
}

/// `(g, φ, Δ)` at `(d, t)` from the analytic phase derivative.
pub fn lz_decompose(pulse: &PulseParams, qubit: &QubitSpec, d: f64, t: f64) -> LzFrame {
    let g = qubit.rwa_peak() * pulse.normalized_envelope(d, t).norm();
    LzFrame {
        g,
        phi: pulse.theta(d, t) + pulse.k0 * d + pulse.phi,
        delta: detuning(pulse, qubit, d, t),
    }
}

/// `Δ(d,t) = (∂_tθ + ω_q − ω₀)/2`.
pub fn detuning(pulse: &PulseParams, qubit: &QubitSpec, d: f64, t: f64) -> f64 {
    0.5 * (pulse.dtheta_dt(d, t) + qubit.omega_q - pulse.omega0())
}

/// `Δ` from a central difference of the unwrapped phase of `Ω̃`.
pub fn detuning_finite_difference(pulse: &PulseParams, qubit: &QubitSpec, d: f64, t: f64, h: f64) -> f64 {
    let a = rabi_envelope(pulse, qubit, d, t - h);
    let b = rabi_envelope(pulse, qubit, d, t + h);
    let dphi = (b * a.conj()).arg();
    0.5 * (dphi / (2.0 * h) + qubit.omega_q - pulse.omega0())
}

/// Dressed energies `∓√(Δ² + g²/4)`.
pub fn dressed_energies(delta: f64, g: f64) -> (f64, f64) {
    let e = (delta * delta + 0.25 * g * g).sqrt();
    (-e, e)
}

/// Which profile the half-maximum is taken of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum WindowMeasure {
    /// Half maximum of `g(d,t)`.
    #[default]
    Amplitude,
    /// Half maximum of `g²(d,t)`.
    Intensity,
}

impl WindowMeasure {
    fn half_level(self) -> f64 {
        match self {
            WindowMeasure::Amplitude => 0.5,
            WindowMeasure::Intensity => std::f64::consts::FRAC_1_SQRT_2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapWindow {
    pub t_open: f64,
    pub t_close: f64,
    pub t_peak: f64,
    pub g_max: f64,
    /// Sign changes of `Δ` on the window widened by half its length each side.
    pub zero_crossings: Vec<f64>,
}

impl GapWindow {
    pub fn length(&self) -> f64 {
        self.t_close - self.t_open
    }

    pub fn crossings_inside(&self) -> usize {
        self.zero_crossings
            .iter()
            .filter(|&&t| t >= self.t_open && t <= self.t_close)
            .count()
    }
}

const WINDOW_SCAN_POINTS: usize = 4000;

/// Coupling window of the qubit at `d`: outermost half-maximum crossings of
/// the chosen profile, plus the zero crossings of `Δ` near it.
pub fn gap_window(pulse: &PulseParams, qubit: &QubitSpec, d: f64, measure: WindowMeasure) -> Result<GapWindow> {
    if !(qubit.rwa_peak() > 0.0) {
        return Err(Error::DegenerateCoupling {
            d,
            reason: "zero Rabi scale".into(),
        });
    }
    let g = |t: f64| pulse.normalized_envelope(d, t).norm();
    // The envelope centre passes d at t_a; its duration there is ~ ησ²/(σ_f v).
    let t_a = pulse.eta() * d / pulse.band.v;
    let sig = pulse.sigma_t(t_a);
    let width = pulse.eta() * sig * sig / (pulse.sigma_f * pulse.band.v);
    let (lo, hi) = (t_a - 12.0 * width, t_a + 12.0 * width);
    let step = (hi - lo) / WINDOW_SCAN_POINTS as f64;
    let samples: Vec<(f64, f64)> = (0..=WINDOW_SCAN_POINTS)
        .map(|i| {
            let t = lo + step * i as f64;
            (t, g(t))
        })
        .collect();
    let (i_max, _) = samples
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .unwrap();
    let t_peak = golden_max(
        &g,
        samples[i_max.saturating_sub(1)].0,
        samples[(i_max + 1).min(WINDOW_SCAN_POINTS)].0,
        1e-9 * width,
    );
    let g_peak = g(t_peak);
    if !(g_peak > 0.0) {
        return Err(Error::DegenerateCoupling {
            d,
            reason: "coupling vanishes".into(),
        });
    }
    let level = measure.half_level() * g_peak;
    let first = samples.iter().position(|s| s.1 >= level).unwrap();
    let last = samples.iter().rposition(|s| s.1 >= level).unwrap();
    if first == 0 || last == WINDOW_SCAN_POINTS {
        return Err(Error::DegenerateCoupling {
            d,
            reason: "coupling does not fall to half maximum inside the scan".into(),
        });
    }
    let f = |t: f64| g(t) - level;
    let t_open = bisect(&f, samples[first - 1].0, samples[first].0, 0.0)?;
    let t_close = bisect(&f, samples[last].0, samples[last + 1].0, 0.0)?;
    let len = t_close - t_open;
    let zero_crossings = delta_zeros(pulse, qubit, d, t_open - 0.5 * len, t_close + 0.5 * len)?;
    Ok(GapWindow {
        t_open,
        t_close,
        t_peak,
        g_max: qubit.rwa_peak() * g_peak,
        zero_crossings,
    })
}

fn delta_zeros(pulse: &PulseParams, qubit: &QubitSpec, d: f64, lo: f64, hi: f64) -> Result<Vec<f64>> {
    let f = |t: f64| detuning(pulse, qubit, d, t);
    scan_brackets(&f, lo, hi, WINDOW_SCAN_POINTS)
        .into_iter()
        .map(|(a, b)| bisect(&f, a, b, 0.0))
        .collect()
}

/// `Δτ = 4ησ_f√(2 ln2) / (v √(1 − 2η² ln2/(k_c²σ_f²)))`.
pub fn interaction_time(pulse: &PulseParams) -> Result<f64> {
    let eta = pulse.eta();
    let kc = pulse.band.k_c();
    let sf = pulse.sigma_f;
    let arg = 1.0 - 2.0 * eta * eta * LN_2 / (kc * kc * sf * sf);
    if !(arg > 0.0) {
        return Err(Error::Regime(format!(
            "1 − 2η²ln2/(k_c²σ_f²) = {arg:.4} ≤ 0: pulse too narrow for the interaction-time formula"
        )));
    }
    Ok(4.0 * eta * sf * (2.0 * LN_2).sqrt() / (pulse.band.v * arg.sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaQ {
    pub d1: f64,
    pub d2: f64,
    pub sigma_q: f64,
    pub ratio: f64,
    pub measure: WindowMeasure,
}

/// Addressing width from the coincidence of the coupling window edges with
/// the zero crossings of `Δ`: below focus `d₁` is where the last crossing
/// leaves through `t_close`, above focus `d₂` where the first leaves through
/// `t_open`. Each coincidence is bracketed on a `σ_f/20` grid over
/// `[d_f − 4σ_f, d_f + 4σ_f]` and refined by bisection to `10⁻³σ_f`.
pub fn sigma_q_estimate(pulse: &PulseParams, qubit: &QubitSpec, measure: WindowMeasure) -> Result<SigmaQ> {
    let sf = pulse.sigma_f;
    let close_gap = |d: f64| -> Option<f64> {
        let w = gap_window(pulse, qubit, d, measure).ok()?;
        w.zero_crossings.last().map(|z| z - w.t_close)
    };
    let open_gap = |d: f64| -> Option<f64> {
        let w = gap_window(pulse, qubit, d, measure).ok()?;
        w.zero_crossings.first().map(|z| z - w.t_open)
    };
    let d1 = coincidence(&close_gap, pulse.d_f, -sf, "t_close coincidence below focus")?;
    let d2 = coincidence(&open_gap, pulse.d_f, sf, "t_open coincidence above focus")?;
    Ok(SigmaQ {
        d1,
        d2,
        sigma_q: d2 - d1,
        ratio: (d2 - d1) / sf,
        measure,
    })
}

/// First sign change of `f` walking from `d_f` in direction `step_sign·σ_f`.
fn coincidence<F: Fn(f64) -> Option<f64>>(f: &F, d_f: f64, signed_sf: f64, what: &str) -> Result<f64> {
    let n = 80;
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=n {
        let d = d_f + signed_sf * 4.0 * i as f64 / n as f64;
        let Some(v) = f(d) else {
            prev = None;
            continue;
        };
        if let Some((dp, vp)) = prev {
            if vp == 0.0 {
                return Ok(dp);
            }
            if vp.signum() != v.signum() {
                return refine(f, dp, vp, d, signed_sf.abs() * 1e-3, what);
            }
        }
        prev = Some((d, v));
    }
    Err(Error::RootNotBracketed {
        what: what.into(),
        lo: d_f.min(d_f + 4.0 * signed_sf),
        hi: d_f.max(d_f + 4.0 * signed_sf),
    })
}

fn refine<F: Fn(f64) -> Option<f64>>(f: &F, mut a: f64, va: f64, mut b: f64, tol: f64, what: &str) -> Result<f64> {
    while (b - a).abs() > tol {
        let m = 0.5 * (a + b);
        match f(m) {
            Some(vm) if vm == 0.0 => return Ok(m),
            Some(vm) if vm.signum() == va.signum() => a = m,
            Some(_) => b = m,
            None => {
                return Err(Error::RootNotBracketed {
                    what: format!("{what} (undefined inside bracket)"),
                    lo: a.min(b),
                    hi: a.max(b),
                })
            }
        }
    }
    Ok(0.5 * (a + b))
}
