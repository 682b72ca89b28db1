//! Dormand-Prince 5(4) integrator with the standard fourth-order continuous
//! extension, generic over real or complex state vectors.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Element type of an integrable state vector.
pub trait OdeScalar:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(self) -> f64;
}

impl OdeScalar for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl OdeScalar for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-10,
            max_step: f64::INFINITY,
            max_steps: 5_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Integrate `dy/dt = rhs(t, y)` from `t0` to the last entry of `sample_times`,
/// returning the state at every sample time (ascending, all `>= t0`) from the
/// dense output.
pub fn integrate_dense<T, F>(
    mut rhs: F,
    t0: f64,
    y0: &[T],
    sample_times: &[f64],
    control: &StepControl,
) -> Result<(Vec<Vec<T>>, StepStats)>
where
    T: OdeScalar,
    F: FnMut(f64, &[T], &mut [T]),
{
    let dim = y0.len();
    let mut out: Vec<Vec<T>> = Vec::with_capacity(sample_times.len());
    let mut stats = StepStats::default();
    if sample_times.is_empty() {
        return Ok((out, stats));
    }
    if sample_times.windows(2).any(|w| w[1] < w[0]) || sample_times[0] < t0 {
        return Err(Error::InvalidParameter {
            name: "sample_times",
            reason: "must be ascending and not before the initial time".into(),
        });
    }
    let t_end = *sample_times.last().unwrap();
    let mut next_sample = 0;
    while next_sample < sample_times.len() && sample_times[next_sample] <= t0 {
        out.push(y0.to_vec());
        next_sample += 1;
    }
    if next_sample == sample_times.len() {
        return Ok((out, stats));
    }

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<T>> = vec![vec![T::default(); dim]; 7];
    let mut stage = vec![T::default(); dim];
    let mut y_new = vec![T::default(); dim];
    rhs(t, &y, &mut k[0]);
    stats.evaluations += 1;

    let mut h = initial_step(&y, &k[0], t_end - t0, control);
    let mut err_prev = 1e-4_f64;

    while next_sample < sample_times.len() {
        if stats.accepted + stats.rejected >= control.max_steps {
            return Err(Error::Integration {
                t,
                reason: format!("exceeded {} steps", control.max_steps),
            });
        }
        h = h.min(control.max_step);
        let hits_end = h >= t_end - t;
        if hits_end {
            h = t_end - t;
        }
        if h <= 1e-14 * t.abs().max(1.0) {
            return Err(Error::Integration {
                t,
                reason: "step size underflow".into(),
            });
        }

        for s in 1..7 {
            for i in 0..dim {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        acc = acc + kj[i] * (h * a);
                    }
                }
                stage[i] = acc;
            }
            let (done, rest) = k.split_at_mut(s);
            let _ = done;
            rhs(t + C[s] * h, &stage, &mut rest[0]);
            stats.evaluations += 1;
            if s == 6 {
                y_new.copy_from_slice(&stage);
            }
        }

        let mut err_sq = 0.0;
        for i in 0..dim {
            let mut e = T::default();
            for (j, kj) in k.iter().enumerate() {
                if E[j] != 0.0 {
                    e = e + kj[i] * (h * E[j]);
                }
            }
            let scale =
                control.atol + control.rtol * y[i].magnitude().max(y_new[i].magnitude());
            let r = e.magnitude() / scale;
            err_sq += r * r;
        }
        let err = (err_sq / dim.max(1) as f64).sqrt();
        if !err.is_finite() {
            return Err(Error::Integration {
                t,
                reason: "non-finite state".into(),
            });
        }

        if err <= 1.0 {
            // Snap the final step so rounding cannot leave a sliver.
            let t_new = if hits_end { t_end } else { t + h };
            // Dense output for every sample inside (t, t_new].
            while next_sample < sample_times.len() && sample_times[next_sample] <= t_new {
                let theta = (sample_times[next_sample] - t) / h;
                out.push(dense_eval(&y, &y_new, &k, h, theta));
                next_sample += 1;
            }
            // FSAL: the last stage is f(t_new, y_new).
            let (first, last) = k.split_at_mut(6);
            first[0].copy_from_slice(&last[0]);
            std::mem::swap(&mut y, &mut y_new);
            t = t_new;
            stats.accepted += 1;
            // PI controller (Hairer's beta = 0.04).
            let fac = 0.9 * err.max(1e-10).powf(-0.2 + 0.04 * 0.75) * err_prev.powf(0.04);
            h *= fac.clamp(0.2, 10.0);
            err_prev = err.max(1e-4);
        } else {
            stats.rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
        }
    }
    Ok((out, stats))
}

fn dense_eval<T: OdeScalar>(y0: &[T], y1: &[T], k: &[Vec<T>], h: f64, theta: f64) -> Vec<T> {
    let theta = theta.clamp(0.0, 1.0);
    let one_minus = 1.0 - theta;
    (0..y0.len())
        .map(|i| {
            let r1 = y0[i];
            let r2 = y1[i] - y0[i];
            let r3 = k[0][i] * h - r2;
            let r4 = r2 - k[6][i] * h - r3;
            let mut r5 = T::default();
            for (j, kj) in k.iter().enumerate() {
                if D[j] != 0.0 {
                    r5 = r5 + kj[i] * (h * D[j]);
                }
            }
            r1 + (r2 + (r3 + (r4 + r5 * one_minus) * theta) * one_minus) * theta
        })
        .collect()
}

fn initial_step<T: OdeScalar>(y: &[T], f: &[T], span: f64, control: &StepControl) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for (yi, fi) in y.iter().zip(f) {
        let sc = control.atol + control.rtol * yi.magnitude();
        d0 += (yi.magnitude() / sc).powi(2);
        d1 += (fi.magnitude() / sc).powi(2);
    }
    let n = y.len().max(1) as f64;
    let (d0, d1) = ((d0 / n).sqrt(), (d1 / n).sqrt());
    let h = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h.min(control.max_step).min(span.abs()).max(1e-12)
}
