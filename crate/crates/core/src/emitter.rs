//! Lindblad dynamics of emitters driven by the chirped pulse.
//!
//! Both emitters are ladders `|0⟩, |1⟩, …` with lowering operator
//! `b|n⟩ = √n|n−1⟩` (for the qubit `b = σ₋`), Hamiltonian
//! `H = Σ E_n |n⟩⟨n| + c(t) b† + c*(t) b` and dissipator
//! `Γ(bρb† − {b†b, ρ}/2)`.
//!
//! * rwa frame (rotating at `ω₀`): `E_n = n(ω_q − ω₀) + α(n² − n)/2`,
//!   `c = Ω̃(d,t)/2`
//! * lab frame: `E_n = nω_q + α(n² − n)/2`, `c = Ω(d,t)/2` with the real
//!   coupling `Ω = 2A·Re(E⁺)/max|E⁺|`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::numerics::{integrate_dense, StepControl, StepStats};
use crate::pulse::PulseParams;

/// Meaning of the peak Rabi scale `Ω₀`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingConvention {
    /// `Ω₀` is the maximum of the real lab-frame coupling, so the rotating
    /// amplitude peaks at `Ω₀/2`.
    #[default]
    LabMax,
    /// `Ω₀` is the peak of the rotating amplitude itself.
    RwaMax,
}

impl CouplingConvention {
    /// Peak `|Ω̃|` for a given `Ω₀`.
    pub fn rwa_peak(self, omega_peak: f64) -> f64 {
        match self {
            CouplingConvention::LabMax => omega_peak / 2.0,
            CouplingConvention::RwaMax => omega_peak,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CouplingConvention::LabMax => "lab-max",
            CouplingConvention::RwaMax => "rwa-max",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Frame {
    #[default]
    Rwa,
    Lab,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitSpec {
    pub omega_q: f64,
    pub gamma: f64,
    /// Peak Rabi scale `Ω₀`.
    pub omega_peak: f64,
    pub convention: CouplingConvention,
}

impl QubitSpec {
    pub fn new(omega_q: f64, gamma: f64, omega_peak: f64, convention: CouplingConvention) -> Result<Self> {
        ensure_positive("omega_q", omega_q)?;
        ensure_non_negative("gamma", gamma)?;
        ensure_non_negative("omega_peak", omega_peak)?;
        Ok(Self {
            omega_q,
            gamma,
            omega_peak,
            convention,
        })
    }

    /// Resonant qubit `ω_q = ω₀`.
    pub fn resonant(pulse: &PulseParams, gamma_over_omega_q: f64, omega_peak: f64, convention: CouplingConvention) -> Result<Self> {
        let wq = pulse.omega0();
        Self::new(wq, gamma_over_omega_q * wq, omega_peak, convention)
    }

    pub fn rwa_peak(&self) -> f64 {
        self.convention.rwa_peak(self.omega_peak)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmonSpec {
    pub omega_q: f64,
    /// Anharmonicity `α` (negative for a transmon).
    pub alpha_anh: f64,
    pub gamma: f64,
    pub omega_peak: f64,
    pub convention: CouplingConvention,
    /// Initial Fock truncation; doubled until converged.
    pub n_levels: usize,
}

impl TransmonSpec {
    pub fn new(
        omega_q: f64,
        alpha_anh: f64,
        gamma: f64,
        omega_peak: f64,
        convention: CouplingConvention,
        n_levels: usize,
    ) -> Result<Self> {
        ensure_positive("omega_q", omega_q)?;
        ensure_non_negative("gamma", gamma)?;
        ensure_non_negative("omega_peak", omega_peak)?;
        if !alpha_anh.is_finite() {
            return Err(Error::InvalidParameter {
                name: "alpha_anh",
                reason: "must be finite".into(),
            });
        }
        if n_levels < 3 {
            return Err(Error::InvalidParameter {
                name: "n_levels",
                reason: format!("need at least 3 levels, got {n_levels}"),
            });
        }
        Ok(Self {
            omega_q,
            alpha_anh,
            gamma,
            omega_peak,
            convention,
            n_levels,
        })
    }

    pub fn rwa_peak(&self) -> f64 {
        self.convention.rwa_peak(self.omega_peak)
    }

    pub fn as_qubit(&self) -> QubitSpec {
        QubitSpec {
            omega_q: self.omega_q,
            gamma: self.gamma,
            omega_peak: self.omega_peak,
            convention: self.convention,
        }
    }
}

fn ensure_non_negative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite and >= 0, got {value}"),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub frame: Frame,
    pub rtol: f64,
    pub atol: f64,
    /// Explicit step cap; `None` uses `1/(20·max rate)`.
    pub max_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            frame: Frame::Rwa,
            rtol: 1e-8,
            // Nearly empty upper Fock levels need an absolute tolerance well
            // below the 1e-10 positivity check.
            atol: 1e-12,
            max_step: None,
            max_steps: 20_000_000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("rtol", self.rtol)?;
        ensure_positive("atol", self.atol)?;
        if let Some(h) = self.max_step {
            ensure_positive("max_step", h)?;
        }
        Ok(())
    }

    fn control(&self, fastest_rate: f64) -> StepControl {
        let cap = if fastest_rate > 0.0 {
            1.0 / (20.0 * fastest_rate)
        } else {
            f64::INFINITY
        };
        StepControl {
            rtol: self.rtol,
            atol: self.atol,
            max_step: self.max_step.unwrap_or(cap).min(cap),
            max_steps: self.max_steps,
        }
    }
}

/// Dense `dim × dim` density matrix, row major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

impl InvariantReport {
    /// Hermitian to 1e-12, unit trace to 1e-10, eigenvalues above −1e-10.
    pub fn holds(&self) -> bool {
        self.hermiticity_error <= 1e-12 && self.trace_error <= 1e-10 && self.min_eigenvalue > -1e-10
    }
}

impl DensityMatrix {
    /// `|n⟩⟨n|`.
    pub fn basis(dim: usize, n: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        data[n * dim + n] = Complex64::new(1.0, 0.0);
        Self { dim, data }
    }

    pub fn ground(dim: usize) -> Self {
        Self::basis(dim, 0)
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.data[m * self.dim + n]
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim).map(|n| self.get(n, n).re).collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|n| self.get(n, n)).sum()
    }

    pub fn purity(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let mut err: f64 = 0.0;
        for m in 0..self.dim {
            for n in m..self.dim {
                err = err.max((self.get(m, n) - self.get(n, m).conj()).norm());
            }
        }
        err
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let d = self.dim;
        let m = nalgebra::DMatrix::from_fn(d, d, |i, j| {
            let h = (self.get(i, j) + self.get(j, i).conj()) * 0.5;
            nalgebra::Complex::new(h.re, h.im)
        });
        m.symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn invariants(&self) -> InvariantReport {
        InvariantReport {
            trace_error: (self.trace() - Complex64::new(1.0, 0.0)).norm(),
            hermiticity_error: self.hermiticity_error(),
            min_eigenvalue: self.min_eigenvalue(),
        }
    }
}

/// Ladder emitter in a fixed frame.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderModel {
    pub energies: Vec<f64>,
    pub gamma: f64,
}

impl LadderModel {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn new(dim: usize, level_spacing: f64, alpha_anh: f64, gamma: f64) -> Self {
        let energies = (0..dim)
            .map(|n| {
                let n = n as f64;
                n * level_spacing + 0.5 * alpha_anh * (n * n - n)
            })
            .collect();
        Self { energies, gamma }
    }

    /// `dρ/dt` for the coupling `c` (coefficient of `b†`).
    pub fn rhs(&self, c: Complex64, rho: &[Complex64], out: &mut [Complex64]) {
        let d = self.dim();
        let sq: Vec<f64> = (0..=d).map(|n| (n as f64).sqrt()).collect();
        let cc = c.conj();
        let mi = Complex64::new(0.0, -1.0);
        for m in 0..d {
            for n in 0..d {
                let r = |i: usize, j: usize| rho[i * d + j];
                // (Hρ)_{mn}
                let mut h_rho = r(m, n) * self.energies[m];
                if m >= 1 {
                    h_rho += c * sq[m] * r(m - 1, n);
                }
                if m + 1 < d {
                    h_rho += cc * sq[m + 1] * r(m + 1, n);
                }
                // (ρH)_{mn}
                let mut rho_h = r(m, n) * self.energies[n];
                if n >= 1 {
                    rho_h += r(m, n - 1) * cc * sq[n];
                }
                if n + 1 < d {
                    rho_h += r(m, n + 1) * c * sq[n + 1];
                }
                let mut val = mi * (h_rho - rho_h);
                if self.gamma != 0.0 {
                    if m + 1 < d && n + 1 < d {
                        val += r(m + 1, n + 1) * (self.gamma * sq[m + 1] * sq[n + 1]);
                    }
                    val -= r(m, n) * (0.5 * self.gamma * (m + n) as f64);
                }
                out[m * d + n] = val;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, |s| s.dim)
    }

    pub fn populations(&self) -> Vec<Vec<f64>> {
        self.states.iter().map(|s| s.populations()).collect()
    }

    /// Level populations at `t`, linearly interpolated between the bracketing
    /// samples (so each value lies within the samples' range).
    pub fn populations_at(&self, t: f64) -> Result<Vec<f64>> {
        let (start, end) = (self.times[0], *self.times.last().unwrap());
        if !(t >= start && t <= end) {
            return Err(Error::OutOfSpan { t, start, end });
        }
        let i = self.times.partition_point(|&x| x <= t);
        if i == 0 || self.times[i - 1] == t || i == self.times.len() {
            let j = if i == 0 { 0 } else { i - 1 };
            return Ok(self.states[j].populations());
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let w = (t - t0) / (t1 - t0);
        let (a, b) = (self.states[i - 1].populations(), self.states[i].populations());
        Ok(a.iter().zip(&b).map(|(x, y)| (1.0 - w) * x + w * y).collect())
    }

    pub fn p_n_at(&self, n: usize, t: f64) -> Result<f64> {
        Ok(self.populations_at(t)?.get(n).copied().unwrap_or(0.0))
    }

    pub fn p_g_at(&self, t: f64) -> Result<f64> {
        self.p_n_at(0, t)
    }

    pub fn p_e_at(&self, t: f64) -> Result<f64> {
        self.p_n_at(1, t)
    }

    /// Worst invariant violation over all samples.
    pub fn worst_invariants(&self) -> InvariantReport {
        self.states.iter().map(|s| s.invariants()).fold(
            InvariantReport {
                trace_error: 0.0,
                hermiticity_error: 0.0,
                min_eigenvalue: f64::INFINITY,
            },
            |acc, r| InvariantReport {
                trace_error: acc.trace_error.max(r.trace_error),
                hermiticity_error: acc.hermiticity_error.max(r.hermiticity_error),
                min_eigenvalue: acc.min_eigenvalue.min(r.min_eigenvalue),
            },
        )
    }
}

/// Evolve `rho0` under `model` with coupling `coupling(t)` from
/// `sample_times[0]`, recording the state at every sample time.
pub fn evolve_ladder<F>(
    model: &LadderModel,
    coupling: F,
    rho0: &DensityMatrix,
    sample_times: &[f64],
    control: &StepControl,
) -> Result<Trajectory>
where
    F: Fn(f64) -> Complex64,
{
    if rho0.dim != model.dim() {
        return Err(Error::InvalidParameter {
            name: "rho0",
            reason: format!("dimension {} does not match the model ({})", rho0.dim, model.dim()),
        });
    }
    if sample_times.is_empty() {
        return Err(Error::InvalidParameter {
            name: "sample_times",
            reason: "empty".into(),
        });
    }
    let rhs = |t: f64, y: &[Complex64], dy: &mut [Complex64]| model.rhs(coupling(t), y, dy);
    let (ys, stats): (Vec<Vec<Complex64>>, StepStats) =
        integrate_dense(rhs, sample_times[0], &rho0.data, sample_times, control)?;
    Ok(Trajectory {
        times: sample_times.to_vec(),
        states: ys
            .into_iter()
            .map(|data| DensityMatrix {
                dim: model.dim(),
                data,
            })
            .collect(),
        accepted_steps: stats.accepted,
        rejected_steps: stats.rejected,
    })
}

/// Rotating-frame Rabi amplitude
/// `Ω̃(d,t) = A (σ_f/σ(t)) exp(−σ_f²(d − vt/η)²/(2σ⁴)) e^{i(θ + k₀d + φ)}`.
pub fn rabi_envelope(pulse: &PulseParams, qubit: &QubitSpec, d: f64, t: f64) -> Complex64 {
    pulse.normalized_envelope(d, t) * qubit.rwa_peak()
}

/// Real lab-frame coupling `Ω(d,t) = 2A Re(E⁺)/max|E⁺|`.
pub fn lab_coupling(pulse: &PulseParams, rwa_peak: f64, d: f64, t: f64) -> f64 {
    2.0 * rwa_peak * pulse.field_plus(d, t).re / pulse.peak_envelope()
}

fn ladder_run(
    pulse: &PulseParams,
    dim: usize,
    omega_q: f64,
    alpha_anh: f64,
    gamma: f64,
    rwa_peak: f64,
    d: f64,
    sample_times: &[f64],
    cfg: &SolverConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    let omega0 = pulse.omega0();
    let rho0 = DensityMatrix::ground(dim);
    // Step cap from the drive, detuning and decay rates; the stiffness of
    // the upper Fock levels is left to the adaptive controller.
    match cfg.frame {
        Frame::Rwa => {
            let delta = omega_q - omega0;
            let model = LadderModel::new(dim, delta, alpha_anh, gamma);
            let rate = rwa_peak.max(delta.abs()).max(gamma);
            let control = cfg.control(rate);
            evolve_ladder(
                &model,
                |t| pulse.normalized_envelope(d, t) * (0.5 * rwa_peak),
                &rho0,
                sample_times,
                &control,
            )
        }
        Frame::Lab => {
            let model = LadderModel::new(dim, omega_q, alpha_anh, gamma);
            let rate = omega_q.max(2.0 * rwa_peak).max(gamma);
            let control = cfg.control(rate);
            evolve_ladder(
                &model,
                |t| Complex64::new(0.5 * lab_coupling(pulse, rwa_peak, d, t), 0.0),
                &rho0,
                sample_times,
                &control,
            )
        }
    }
}

/// Qubit at position `d` starting in `|g⟩` at `sample_times[0]`.
pub fn evolve_qubit(pulse: &PulseParams, qubit: &QubitSpec, d: f64, sample_times: &[f64], cfg: &SolverConfig) -> Result<Trajectory> {
    ladder_run(
        pulse,
        2,
        qubit.omega_q,
        0.0,
        qubit.gamma,
        qubit.rwa_peak(),
        d,
        sample_times,
        cfg,
    )
}

/// Transmon trajectory together with its truncation diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransmonRun {
    pub trajectory: Trajectory,
    pub n_levels: usize,
    /// Largest population change against the doubled truncation.
    pub doubling_change: f64,
    /// Largest population of the top two levels over the trajectory.
    pub top_population: f64,
}

/// Largest Fock truncation tried before giving up.
pub const MAX_TRANSMON_LEVELS: usize = 48;

/// Transmon at `d`, doubling the truncation from `spec.n_levels` until the
/// top two levels stay below 1e-6 and doubling changes no population by
/// 1e-4 or more.
pub fn evolve_transmon(
    pulse: &PulseParams,
    spec: &TransmonSpec,
    d: f64,
    sample_times: &[f64],
    cfg: &SolverConfig,
) -> Result<TransmonRun> {
    let run = |n: usize| {
        ladder_run(
            pulse,
            n,
            spec.omega_q,
            spec.alpha_anh,
            spec.gamma,
            spec.rwa_peak(),
            d,
            sample_times,
            cfg,
        )
    };
    let mut n = spec.n_levels;
    let mut current = run(n)?;
    let mut last_change = f64::INFINITY;
    while 2 * n <= MAX_TRANSMON_LEVELS {
        let top = top_population(&current);
        let doubled = run(2 * n)?;
        let change = population_change(&current, &doubled);
        last_change = change;
        if top < 1e-6 && change < 1e-4 {
            return Ok(TransmonRun {
                trajectory: current,
                n_levels: n,
                doubling_change: change,
                top_population: top,
            });
        }
        n *= 2;
        current = doubled;
    }
    Err(Error::TruncationNotConverged {
        n_levels: n,
        change: last_change,
    })
}

fn top_population(traj: &Trajectory) -> f64 {
    let d = traj.dim();
    traj.states
        .iter()
        .map(|s| s.get(d - 1, d - 1).re.max(s.get(d - 2, d - 2).re))
        .fold(0.0, f64::max)
}

fn population_change(small: &Trajectory, large: &Trajectory) -> f64 {
    small
        .states
        .iter()
        .zip(&large.states)
        .map(|(a, b)| {
            a.populations()
                .iter()
                .zip(b.populations())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}
