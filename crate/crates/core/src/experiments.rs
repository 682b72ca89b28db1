//! Experiment harness: position scans, Γ sweeps, peak extraction, the
//! scattering budget, and the tables every CLI experiment writes.
//!
//! Every output is a [`ScanTable`]: one swept parameter, equal-length
//! observable columns and a JSON metadata record. CSV files start with a
//! `# metadata: {...}` line and are named `<experiment>_<hash>.csv` where the
//! hash is the first 12 hex digits of SHA-256 over the metadata JSON.

use std::f64::consts::{LN_2, PI};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::drive::{sample_field, synthesize_driving, truncate_field, CoherentPrep};
use crate::emitter::{evolve_qubit, evolve_transmon, QubitSpec, SolverConfig, TransmonSpec, Trajectory};
use crate::error::{ensure_positive, Error, Result};
use crate::lz::{dressed_energies, interaction_time, lz_decompose};
use crate::medium::{CrystalParams, ModeFamily, WaveguideGeometry};
use crate::numerics::bessel_j;
use crate::numerics::{bessel_zero, BesselZeroKind};
use crate::pulse::{spectrum_exact, PulseParams};

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    pub experiment: String,
    pub parameter: String,
    pub values: Vec<f64>,
    pub columns: Vec<(String, Vec<f64>)>,
    pub metadata: Value,
}

impl ScanTable {
    pub fn new(experiment: &str, parameter: &str, values: Vec<f64>, metadata: Value) -> Self {
        Self {
            experiment: experiment.into(),
            parameter: parameter.into(),
            values,
            columns: Vec::new(),
            metadata,
        }
    }

    /// Append a column; it must match the parameter length.
    pub fn push_column(&mut self, name: &str, data: Vec<f64>) -> Result<()> {
        if data.len() != self.values.len() {
            return Err(Error::InvalidParameter {
                name: "column",
                reason: format!("`{name}` has {} rows, table has {}", data.len(), self.values.len()),
            });
        }
        self.columns.push((name.into(), data));
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c.as_slice())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Metadata with the experiment name and code version filled in.
    pub fn full_metadata(&self) -> Value {
        let mut m = match &self.metadata {
            Value::Object(o) => o.clone(),
            Value::Null => Default::default(),
            other => {
                let mut o = serde_json::Map::new();
                o.insert("inputs".into(), other.clone());
                o
            }
        };
        m.insert("experiment".into(), json!(self.experiment));
        m.insert("code_version".into(), json!(CODE_VERSION));
        Value::Object(m)
    }

    pub fn metadata_hash(&self) -> String {
        let digest = Sha256::digest(self.full_metadata().to_string().as_bytes());
        digest.iter().take(6).map(|b| format!("{b:02x}")).collect()
    }

    pub fn file_stem(&self) -> String {
        format!("{}_{}", self.experiment, self.metadata_hash())
    }

    /// Header row and data rows, without the metadata line.
    pub fn csv_body(&self) -> String {
        let mut out = self.parameter.clone();
        for (name, _) in &self.columns {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (i, v) in self.values.iter().enumerate() {
            let _ = write!(out, "{v:e}");
            for (_, c) in &self.columns {
                let _ = write!(out, ",{:e}", c[i]);
            }
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        format!("# metadata: {}\n{}", self.full_metadata(), self.csv_body())
    }

    /// JSON mirror of the CSV content.
    pub fn to_json(&self) -> Value {
        let mut cols = serde_json::Map::new();
        cols.insert(self.parameter.clone(), json!(self.values));
        for (n, c) in &self.columns {
            cols.insert(n.clone(), json!(c));
        }
        json!({
            "metadata": self.full_metadata(),
            "parameter": self.parameter,
            "columns": Value::Object(cols),
        })
    }

    /// Parse a CSV written by [`ScanTable::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let meta_line = lines
            .next()
            .and_then(|l| l.strip_prefix("# metadata: "))
            .ok_or_else(|| Error::Io("missing `# metadata:` header".into()))?;
        let metadata: Value = serde_json::from_str(meta_line).map_err(|e| Error::Io(format!("metadata: {e}")))?;
        let header: Vec<&str> = lines
            .next()
            .ok_or_else(|| Error::Io("missing column header".into()))?
            .split(',')
            .collect();
        let mut data: Vec<Vec<f64>> = vec![Vec::new(); header.len()];
        for (row, line) in lines.enumerate() {
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != header.len() {
                return Err(Error::Io(format!("row {row}: {} cells, expected {}", cells.len(), header.len())));
            }
            for (col, cell) in data.iter_mut().zip(cells) {
                col.push(cell.parse().map_err(|e| Error::Io(format!("row {row}: {e}")))?);
            }
        }
        let experiment = metadata
            .get("experiment")
            .and_then(Value::as_str)
            .unwrap_or_default()
            .to_string();
        let mut it = header.into_iter().zip(data);
        let (parameter, values) = it.next().ok_or_else(|| Error::Io("no columns".into()))?;
        let mut meta = metadata;
        if let Value::Object(o) = &mut meta {
            o.remove("experiment");
            o.remove("code_version");
        }
        Ok(Self {
            experiment,
            parameter: parameter.into(),
            values,
            columns: it.map(|(n, c)| (n.to_string(), c)).collect(),
            metadata: meta,
        })
    }

    /// Write `<stem>.csv` and `<stem>.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let stem = self.file_stem();
        let csv = dir.join(format!("{stem}.csv"));
        let js = dir.join(format!("{stem}.json"));
        std::fs::write(&csv, self.to_csv())?;
        let pretty = serde_json::to_string_pretty(&self.to_json()).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(&js, pretty + "\n")?;
        Ok((csv, js))
    }
}

/// Emitter placed along the waveguide.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EmitterKind {
    Qubit(QubitSpec),
    Transmon(TransmonSpec),
}

impl EmitterKind {
    pub fn gamma(&self) -> f64 {
        match self {
            EmitterKind::Qubit(q) => q.gamma,
            EmitterKind::Transmon(t) => t.gamma,
        }
    }

    fn reported_levels(&self) -> usize {
        match self {
            EmitterKind::Qubit(_) => 2,
            EmitterKind::Transmon(t) => t.n_levels,
        }
    }
}

/// A table together with the precondition warnings raised while making it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanOutput {
    pub table: ScanTable,
    pub warnings: Vec<String>,
}

/// `τ(d) = 2t_f + ηd/v`.
pub fn readout_time(pulse: &PulseParams, d: f64) -> f64 {
    2.0 * pulse.t_f() + pulse.eta() * d / pulse.band.v
}

/// 161 points over `d_f ± 6σ_f` plus 8 far points each side at `8…15σ_f`.
pub fn default_d_grid(pulse: &PulseParams) -> Vec<f64> {
    let (df, sf) = (pulse.d_f, pulse.sigma_f);
    let mut d: Vec<f64> = (0..161).map(|i| df + sf * (-6.0 + 12.0 * i as f64 / 160.0)).collect();
    for j in 8..=15 {
        d.push(df - sf * j as f64);
        d.push(df + sf * j as f64);
    }
    d.sort_by(f64::total_cmp);
    d
}

/// Uniform grid of `n` points over `d_f ± half_widths·σ_f`.
pub fn uniform_d_grid(pulse: &PulseParams, half_widths: f64, n: usize) -> Vec<f64> {
    let (df, sf) = (pulse.d_f, pulse.sigma_f);
    (0..n)
        .map(|i| df + sf * half_widths * (-1.0 + 2.0 * i as f64 / (n - 1).max(1) as f64))
        .collect()
}

/// Factor-10 checks of `t_f ≪ τ(d) ≪ 1/Γ`, plus whether the coupling has
/// decayed to a tenth of its peak by `τ(d)`.
pub fn scan_warnings(pulse: &PulseParams, gamma: f64, d_grid: &[f64]) -> Vec<String> {
    let mut w = Vec::new();
    let tf = pulse.t_f();
    let tau_min = d_grid.iter().map(|&d| readout_time(pulse, d)).fold(f64::INFINITY, f64::min);
    let tau_max = d_grid.iter().map(|&d| readout_time(pulse, d)).fold(0.0, f64::max);
    if tau_min < 10.0 * tf {
        w.push(format!(
            "τ(d) ≫ t_f not met at factor 10: min τ/t_f = {:.3}",
            tau_min / tf
        ));
    }
    if gamma * tau_max > 0.1 {
        w.push(format!("τ(d) ≪ 1/Γ not met at factor 10: max Γτ = {:.3e}", gamma * tau_max));
    }
    let residual = d_grid
        .iter()
        .map(|&d| pulse.normalized_envelope(d, readout_time(pulse, d)).norm())
        .fold(0.0, f64::max);
    if residual > 0.1 {
        w.push(format!(
            "coupling at τ(d) still {residual:.3} of its peak: pulse has not passed"
        ));
    }
    w
}

fn pulse_metadata(pulse: &PulseParams) -> Value {
    json!({
        "omega_c": pulse.band.omega_c,
        "v": pulse.band.v,
        "omega0_over_omega_c": pulse.omega0() / pulse.band.omega_c,
        "k0": pulse.k0,
        "lambda0": pulse.lambda0(),
        "d_f": pulse.d_f,
        "d_f_over_lambda0": pulse.d_f / pulse.lambda0(),
        "sigma_f": pulse.sigma_f,
        "sigma_f_over_lambda0": pulse.sigma_f / pulse.lambda0(),
        "phi": pulse.phi,
        "amplitude": pulse.amplitude,
        "eta": pulse.eta(),
        "t_f": pulse.t_f(),
        "E_max": pulse.e_max(),
    })
}

fn emitter_metadata(e: &EmitterKind) -> Value {
    serde_json::to_value(e).unwrap_or(Value::Null)
}

fn solver_metadata(cfg: &SolverConfig) -> Value {
    serde_json::to_value(cfg).unwrap_or(Value::Null)
}

/// Populations at `τ(d)` for an emitter starting in its ground state at
/// `t = 0`, one evolution per grid point. Columns: `d_over_lambda0`, `tau`,
/// `p_0 … p_{n−1}` (`p_g`, `p_e` for a qubit).
pub fn position_scan(pulse: &PulseParams, emitter: &EmitterKind, d_grid: &[f64], cfg: &SolverConfig) -> Result<ScanOutput> {
    let mut d: Vec<f64> = d_grid.to_vec();
    d.sort_by(f64::total_cmp);
    let warnings = scan_warnings(pulse, emitter.gamma(), &d);
    let rows = d
        .par_iter()
        .map(|&di| {
            let tau = readout_time(pulse, di);
            let traj = run_emitter(pulse, emitter, di, &[0.0, tau], cfg).map_err(|e| Error::ScanPoint {
                d: di,
                source: Box::new(e),
            })?;
            let pops = traj.populations_at(tau)?;
            Ok((tau, pops))
        })
        .collect::<Result<Vec<_>>>()?;
    let meta = json!({
        "pulse": pulse_metadata(pulse),
        "emitter": emitter_metadata(emitter),
        "solver": solver_metadata(cfg),
        "readout": "tau(d) = 2 t_f + eta d / v",
    });
    let mut table = ScanTable::new("position_scan", "d", d.clone(), meta);
    table.push_column("d_over_lambda0", d.iter().map(|x| x / pulse.lambda0()).collect())?;
    table.push_column("tau", rows.iter().map(|r| r.0).collect())?;
    let n = emitter.reported_levels();
    for level in 0..n {
        let name = match (emitter, level) {
            (EmitterKind::Qubit(_), 0) => "p_g".to_string(),
            (EmitterKind::Qubit(_), _) => "p_e".to_string(),
            _ => format!("p_{level}"),
        };
        table.push_column(&name, rows.iter().map(|r| r.1.get(level).copied().unwrap_or(0.0)).collect())?;
    }
    Ok(ScanOutput { table, warnings })
}

fn run_emitter(pulse: &PulseParams, emitter: &EmitterKind, d: f64, times: &[f64], cfg: &SolverConfig) -> Result<Trajectory> {
    match emitter {
        EmitterKind::Qubit(q) => evolve_qubit(pulse, q, d, times, cfg),
        EmitterKind::Transmon(t) => evolve_transmon(pulse, t, d, times, cfg).map(|r| r.trajectory),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakStats {
    pub center: f64,
    pub height: f64,
    pub fwhm: f64,
    pub gaussian_equiv_width: f64,
}

/// Peak of `y(x)` on a sorted grid: parabolic refinement of the maximum and
/// FWHM from linear interpolation of the half-height crossings.
pub fn peak_stats(x: &[f64], y: &[f64]) -> Result<PeakStats> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::Peak("need at least three (x, y) pairs of equal length".into()));
    }
    let (i, &ymax) = y
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    if i == 0 || i == y.len() - 1 {
        return Err(Error::Peak(format!("maximum at grid edge x = {}", x[i])));
    }
    let half = 0.5 * ymax;
    let mut left = i;
    while left > 0 && y[left - 1] >= half {
        left -= 1;
    }
    let mut right = i;
    while right + 1 < y.len() && y[right + 1] >= half {
        right += 1;
    }
    if left == 0 || right == y.len() - 1 {
        return Err(Error::Peak("peak does not fall to half height inside the grid".into()));
    }
    if y[..left].iter().chain(&y[right + 1..]).any(|&v| v >= half) {
        return Err(Error::Peak("more than one region above half height".into()));
    }
    let cross = |a: usize, b: usize| x[a] + (half - y[a]) * (x[b] - x[a]) / (y[b] - y[a]);
    let x_lo = cross(left - 1, left);
    let x_hi = cross(right, right + 1);
    let (center, height) = parabola_vertex((x[i - 1], y[i - 1]), (x[i], y[i]), (x[i + 1], y[i + 1]));
    let fwhm = x_hi - x_lo;
    Ok(PeakStats {
        center,
        height,
        fwhm,
        gaussian_equiv_width: fwhm / (2.0 * (2.0 * LN_2).sqrt()),
    })
}

fn parabola_vertex(p0: (f64, f64), p1: (f64, f64), p2: (f64, f64)) -> (f64, f64) {
    let (x0, y0) = p0;
    let (x1, y1) = p1;
    let (x2, y2) = p2;
    // Newton form p(x) = y0 + d01(x − x0) + a(x − x0)(x − x1).
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let a = (d12 - d01) / (x2 - x0);
    if a >= 0.0 {
        return (x1, y1);
    }
    let xv = (0.5 * (x0 + x1) - d01 / (2.0 * a)).clamp(x0, x2);
    (xv, y0 + d01 * (xv - x0) + a * (xv - x0) * (xv - x1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaSweep {
    /// Stacked rows `(d, Γ/ω_q, p_g)`.
    pub table: ScanTable,
    pub gammas: Vec<f64>,
    /// `None` where the scan has no isolated half-height peak (strong decay
    /// returns every position to `|g⟩`).
    pub peaks: Vec<Option<PeakStats>>,
    /// Largest `p_g` on the grid, per `Γ`.
    pub max_p_g: Vec<f64>,
    pub warnings: Vec<String>,
}

/// One position scan per `Γ/ω_q`.
pub fn gamma_sweep(
    pulse: &PulseParams,
    qubit: &QubitSpec,
    d_grid: &[f64],
    gamma_over_omega_q: &[f64],
    cfg: &SolverConfig,
) -> Result<GammaSweep> {
    let mut d_all = Vec::new();
    let mut g_all = Vec::new();
    let mut p_all = Vec::new();
    let mut peaks = Vec::new();
    let mut max_p_g = Vec::new();
    let mut warnings = Vec::new();
    for &g in gamma_over_omega_q {
        let q = QubitSpec {
            gamma: g * qubit.omega_q,
            ..*qubit
        };
        let out = position_scan(pulse, &EmitterKind::Qubit(q), d_grid, cfg)?;
        let p = out.table.column("p_g").unwrap().to_vec();
        match peak_stats(&out.table.values, &p) {
            Ok(s) => peaks.push(Some(s)),
            Err(e) => {
                warnings.push(format!("Γ/ω_q = {g:e}: {e}"));
                peaks.push(None);
            }
        }
        max_p_g.push(p.iter().copied().fold(0.0, f64::max));
        for w in out.warnings {
            if !warnings.contains(&w) {
                warnings.push(w);
            }
        }
        g_all.extend(std::iter::repeat_n(g, p.len()));
        d_all.extend_from_slice(&out.table.values);
        p_all.extend(p);
    }
    let meta = json!({
        "pulse": pulse_metadata(pulse),
        "emitter": emitter_metadata(&EmitterKind::Qubit(*qubit)),
        "solver": solver_metadata(cfg),
        "gamma_over_omega_q": gamma_over_omega_q,
    });
    let mut table = ScanTable::new("gamma_sweep", "d", d_all.clone(), meta);
    table.push_column("d_over_lambda0", d_all.iter().map(|x| x / pulse.lambda0()).collect())?;
    table.push_column("gamma_over_omega_q", g_all)?;
    table.push_column("p_g", p_all)?;
    Ok(GammaSweep {
        table,
        gammas: gamma_over_omega_q.to_vec(),
        peaks,
        max_p_g,
        warnings,
    })
}

/// Power radiated into the TM₀₁ band by an on-axis dipole `d_eg` at `ω_q`:
/// `P = |d|²c/(4πR⁴) · p₀₁²/J₁²(p₀₁) · ω_q/√(ω_q² − ω_c²)`.
pub fn dipole_power(geom: &WaveguideGeometry, d_eg: f64, omega_q: f64) -> Result<f64> {
    let wc = geom.omega_c();
    if omega_q <= wc {
        return Err(Error::BelowCutoff { omega: omega_q, omega_c: wc });
    }
    let p01 = bessel_zero(BesselZeroKind::Function, 0, 1);
    let j1 = bessel_j(1, p01);
    Ok(d_eg * d_eg * geom.c / (4.0 * PI * geom.radius.powi(4)) * p01 * p01 / (j1 * j1) * omega_q
        / (omega_q * omega_q - wc * wc).sqrt())
}

/// Which field maximum `Ω₀ = 2 d_eg E_peak` refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EPeakConvention {
    /// `E_peak = max|2 Re E⁺| = 2 max|E⁺|`.
    RealField,
    /// `E_peak = max|E⁺|`.
    AnalyticSignal,
}

impl EPeakConvention {
    pub const ALL: [EPeakConvention; 2] = [EPeakConvention::RealField, EPeakConvention::AnalyticSignal];

    pub fn e_peak(self, pulse: &PulseParams) -> f64 {
        match self {
            EPeakConvention::RealField => pulse.e_max(),
            EPeakConvention::AnalyticSignal => pulse.peak_envelope(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EPeakConvention::RealField => "real-field",
            EPeakConvention::AnalyticSignal => "analytic-signal",
        }
    }
}

/// Reference scattered fraction used to size `photons_for_reference_nu`.
pub const REFERENCE_NU: f64 = 0.079;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterBudget {
    pub convention: EPeakConvention,
    pub d_eg: f64,
    pub e_peak: f64,
    pub p: f64,
    pub delta_tau: f64,
    pub u_dipole: f64,
    pub u_0: f64,
    pub nu: f64,
    pub n_q_max: usize,
    pub photon_number: f64,
    /// Photon number at which `ν` would equal [`REFERENCE_NU`] (`ν ∝ N_ph⁻²`
    /// at fixed `Ω₀`).
    pub photons_for_reference_nu: f64,
    pub warnings: Vec<String>,
}

/// `ν = P Δτ / U₀` with `d_eg = Ω₀/(2E_peak)` fixed by the configured `Ω₀`.
///
/// At fixed `Ω₀` the dipole scales as `1/C_α` and the pulse energy as
/// `C_α²`, so `ν ∝ C_α⁻⁴`: the fraction depends on the photon content of
/// the pulse, not only on dimensionless ratios.
pub fn scattering_fraction(prep: &CoherentPrep, qubit: &QubitSpec, convention: EPeakConvention, budget: f64) -> Result<ScatterBudget> {
    let pulse = &prep.pulse;
    let e_peak = convention.e_peak(pulse);
    let d_eg = qubit.omega_peak / (2.0 * e_peak);
    let p = dipole_power(&prep.geom, d_eg, qubit.omega_q)?;
    let delta_tau = interaction_time(pulse)?;
    let u_0 = prep.pulse_energy();
    let u_dipole = p * delta_tau;
    let nu = u_dipole / u_0;
    let photon_number = prep.photon_number();
    let mut warnings = Vec::new();
    if nu >= budget {
        warnings.push(format!("ν = {nu:.4} ≥ budget {budget}: no independent-emitter regime"));
    }
    Ok(ScatterBudget {
        convention,
        d_eg,
        e_peak,
        p,
        delta_tau,
        u_dipole,
        u_0,
        nu,
        n_q_max: max_independent_qubits(nu, budget),
        photon_number,
        photons_for_reference_nu: photon_number * (nu / REFERENCE_NU).sqrt(),
        warnings,
    })
}

/// `⌊budget/ν⌋`, zero when `ν ≥ budget`.
pub fn max_independent_qubits(nu: f64, budget: f64) -> usize {
    if !(nu > 0.0) || nu >= budget {
        return 0;
    }
    (budget / nu).floor() as usize
}

/// Both conventions side by side: `ν`, `N_q` and the photon number needed
/// for the reference fraction.
pub fn scatter_budget_table(prep: &CoherentPrep, qubit: &QubitSpec, budget: f64) -> Result<(ScanTable, Vec<ScatterBudget>)> {
    let rows: Vec<ScatterBudget> = EPeakConvention::ALL
        .iter()
        .map(|&c| scattering_fraction(prep, qubit, c, budget))
        .collect::<Result<_>>()?;
    let meta = json!({
        "pulse": pulse_metadata(&prep.pulse),
        "qubit": qubit,
        "c_alpha": prep.c_alpha,
        "waveguide": prep.geom,
        "budget": budget,
        "conventions": rows.iter().map(|r| r.convention.name()).collect::<Vec<_>>(),
    });
    let mut t = ScanTable::new("scatter_budget", "convention_index", vec![0.0, 1.0], meta);
    let col = |f: &dyn Fn(&ScatterBudget) -> f64| rows.iter().map(f).collect::<Vec<_>>();
    t.push_column("d_eg", col(&|r| r.d_eg))?;
    t.push_column("P", col(&|r| r.p))?;
    t.push_column("delta_tau", col(&|r| r.delta_tau))?;
    t.push_column("U_dipole", col(&|r| r.u_dipole))?;
    t.push_column("U_0", col(&|r| r.u_0))?;
    t.push_column("nu", col(&|r| r.nu))?;
    t.push_column("N_q_max", col(&|r| r.n_q_max as f64))?;
    t.push_column("N_ph", col(&|r| r.photon_number))?;
    t.push_column("N_ph_for_reference_nu", col(&|r| r.photons_for_reference_nu))?;
    Ok((t, rows))
}

/// Real field `E/E_max` along `z` at times given in units of `t_f`
/// (stacked rows).
pub fn pulse_profile(pulse: &PulseParams, t_over_t_f: &[f64], z_over_lambda0: &[f64]) -> Result<ScanTable> {
    let l0 = pulse.lambda0();
    let (mut z, mut tt, mut e, mut env) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for &tr in t_over_t_f {
        let t = tr * pulse.t_f();
        for &zr in z_over_lambda0 {
            z.push(zr);
            tt.push(tr);
            e.push(pulse.field_real(zr * l0, t) / pulse.e_max());
            env.push(2.0 * pulse.envelope(zr * l0, t) / pulse.e_max());
        }
    }
    let meta = json!({ "pulse": pulse_metadata(pulse), "t_over_t_f": t_over_t_f });
    let mut table = ScanTable::new("pulse_profile", "z_over_lambda0", z, meta);
    table.push_column("t_over_t_f", tt)?;
    table.push_column("E_over_E_max", e)?;
    table.push_column("envelope_over_E_max", env)?;
    Ok(table)
}

/// Spectral mean and standard deviation for each `σ_f/λ₀`, all other
/// pulse parameters held fixed, evaluated at `z = d_f`.
pub fn pulse_spectrum(pulse: &PulseParams, sigma_f_over_lambda0: &[f64], panels: usize) -> Result<ScanTable> {
    let wc = pulse.band.omega_c;
    let stats = sigma_f_over_lambda0
        .par_iter()
        .map(|&r| {
            let p = PulseParams::new(pulse.band, pulse.k0, pulse.d_f, r * pulse.lambda0(), pulse.phi, pulse.amplitude)?;
            Ok(spectrum_exact(&p, p.d_f, panels))
        })
        .collect::<Result<Vec<_>>>()?;
    let meta = json!({ "pulse": pulse_metadata(pulse), "z": "d_f", "panels": panels });
    let mut t = ScanTable::new("pulse_spectrum", "sigma_f_over_lambda0", sigma_f_over_lambda0.to_vec(), meta);
    t.push_column("mean_omega_over_omega_c", stats.iter().map(|s| s.mean_omega / wc).collect())?;
    t.push_column("S_omega_over_omega_c", stats.iter().map(|s| s.std_omega / wc).collect())?;
    Ok(t)
}

/// Level populations of one emitter at `d` on a time grid.
pub fn emitter_trace(pulse: &PulseParams, emitter: &EmitterKind, d: f64, times: &[f64], cfg: &SolverConfig) -> Result<ScanTable> {
    let traj = run_emitter(pulse, emitter, d, times, cfg)?;
    let pops = traj.populations();
    let meta = json!({
        "pulse": pulse_metadata(pulse),
        "emitter": emitter_metadata(emitter),
        "solver": solver_metadata(cfg),
        "d": d,
        "d_over_lambda0": d / pulse.lambda0(),
    });
    let wc = pulse.band.omega_c;
    let mut t = ScanTable::new("emitter_trace", "t_omega_c", times.iter().map(|x| x * wc).collect(), meta);
    t.push_column("t_over_t_f", times.iter().map(|x| x / pulse.t_f()).collect())?;
    for level in 0..emitter.reported_levels() {
        let name = match (emitter, level) {
            (EmitterKind::Qubit(_), 0) => "p_g".to_string(),
            (EmitterKind::Qubit(_), _) => "p_e".to_string(),
            _ => format!("p_{level}"),
        };
        t.push_column(&name, pops.iter().map(|p| p.get(level).copied().unwrap_or(0.0)).collect())?;
    }
    Ok(t)
}

/// `Δ`, `g` and the dressed energies along `t` for each position (stacked).
pub fn lz_trace(pulse: &PulseParams, qubit: &QubitSpec, d_list: &[f64], times: &[f64]) -> Result<ScanTable> {
    let wc = pulse.band.omega_c;
    let (mut tt, mut dd, mut delta, mut g, mut em, mut ep) = (vec![], vec![], vec![], vec![], vec![], vec![]);
    for &d in d_list {
        for &t in times {
            let f = lz_decompose(pulse, qubit, d, t);
            let (lo, hi) = dressed_energies(f.delta, f.g);
            tt.push(t * wc);
            dd.push(d / pulse.lambda0());
            delta.push(f.delta / wc);
            g.push(f.g / wc);
            em.push(lo / wc);
            ep.push(hi / wc);
        }
    }
    let meta = json!({ "pulse": pulse_metadata(pulse), "qubit": qubit, "d": d_list });
    let mut table = ScanTable::new("lz_trace", "t_omega_c", tt, meta);
    table.push_column("d_over_lambda0", dd)?;
    table.push_column("delta_over_omega_c", delta)?;
    table.push_column("g_over_omega_c", g)?;
    table.push_column("E_minus_over_omega_c", em)?;
    table.push_column("E_plus_over_omega_c", ep)?;
    Ok(table)
}

/// Exact TE/TM bands and the quadratic TM₀₁ approximation on a `k` grid.
pub fn waveguide_bands(geom: &WaveguideGeometry, k: &[f64], modes: &[(ModeFamily, u32, u32)]) -> Result<ScanTable> {
    let q = geom.quadratic_band();
    let meta = json!({ "radius": geom.radius, "c": geom.c, "omega_c": q.omega_c, "mode_constant": geom.mode_constant() });
    let mut t = ScanTable::new("waveguide_bands", "k", k.to_vec(), meta);
    t.push_column("k_over_k_c", k.iter().map(|x| x / q.k_c()).collect())?;
    for &(fam, n, m) in modes {
        let name = format!("{}{n}{m}", match fam {
            ModeFamily::TE => "omega_TE",
            ModeFamily::TM => "omega_TM",
        });
        let col = k.iter().map(|&kk| geom.dispersion(fam, n, m, kk)).collect::<Result<Vec<_>>>()?;
        t.push_column(&name, col)?;
    }
    t.push_column("omega_quadratic", k.iter().map(|&kk| q.omega(kk)).collect())?;
    Ok(t)
}

/// Crystal bands on `[0, π/a]` with the band-2 quadratic fit.
pub fn crystal_bands(crystal: &CrystalParams, n_k: usize, n_bands: usize, fit_half_width: f64, report_half_width: f64) -> Result<(ScanTable, crate::medium::Band2Fit)> {
    let bt = crystal.band_table(n_k, n_bands)?;
    let fit = crystal.band2_fit(fit_half_width, report_half_width)?;
    let meta = json!({
        "crystal": crystal,
        "fit": fit,
        "v_over_c1": fit.band.v / crystal.c1,
    });
    let mut t = ScanTable::new("crystal_bands", "k*a", bt.k.iter().map(|k| k * bt.a).collect(), meta);
    for (n, b) in bt.bands.iter().enumerate() {
        t.push_column(&format!("omega_band{}", n + 1), b.clone())?;
    }
    let edge = PI / bt.a;
    t.push_column("omega_fit", bt.k.iter().map(|&k| fit.band.omega(k - edge)).collect())?;
    Ok((t, fit))
}

/// Point driving `D(t)` and its spectrum `|D̃(ω)|` on `ω ≥ ω_c`.
pub fn drive_synth(prep: &CoherentPrep, t_start: f64, t_end: f64, n: usize) -> Result<(ScanTable, ScanTable)> {
    let spec = synthesize_driving(prep, t_start, t_end, n)?;
    let meta = json!({
        "pulse": pulse_metadata(&prep.pulse),
        "c_alpha": prep.c_alpha,
        "window": [t_start, t_end],
        "n_samples": n,
    });
    let times = spec.series.times();
    let mut ts = ScanTable::new("drive_synth_time", "t", times.collect(), meta.clone());
    ts.push_column("re_D", spec.series.values.iter().map(|v| v.re).collect())?;
    ts.push_column("im_D", spec.series.values.iter().map(|v| v.im).collect())?;
    let mut pairs: Vec<(f64, Complex64)> = spec
        .omega
        .iter()
        .zip(&spec.spectrum)
        .filter(|(w, _)| **w >= prep.pulse.band.omega_c)
        .map(|(w, s)| (*w, *s))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut fs = ScanTable::new("drive_synth_spectrum", "omega", pairs.iter().map(|p| p.0).collect(), meta);
    fs.push_column("abs_D_tilde", pairs.iter().map(|p| p.1.norm()).collect())?;
    fs.push_column(
        "abs_D_tilde_target",
        pairs.iter().map(|p| prep.driving_spectrum(p.0).norm()).collect(),
    )?;
    Ok((ts, fs))
}

/// Field at `z` before and after removing `|ω| > ω_r`.
pub fn drive_truncate(pulse: &PulseParams, z: f64, t_start: f64, t_end: f64, n: usize, omega_r: f64) -> Result<ScanTable> {
    ensure_positive("omega_r", omega_r)?;
    let raw = sample_field(pulse, z, t_start, t_end, n);
    let cut = truncate_field(&raw, omega_r);
    let meta = json!({
        "pulse": pulse_metadata(pulse),
        "z": z,
        "window": [t_start, t_end],
        "n_samples": n,
        "omega_r": omega_r,
    });
    let e_max = pulse.e_max();
    let mut t = ScanTable::new("drive_truncate", "t", raw.times().collect(), meta);
    t.push_column("E_over_E_max", raw.values.iter().map(|v| v.re / e_max).collect())?;
    t.push_column("E_truncated_over_E_max", cut.values.iter().map(|v| v.re / e_max).collect())?;
    Ok(t)
}
