//! Run configuration in dimensionless ratios, layered as
//! defaults < preset < config file < command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chirpaddr::emitter::{CouplingConvention, Frame};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    PulseProfile,
    PulseSpectrum,
    DriveSynth,
    DriveTruncate,
    QubitTrace,
    QubitScan,
    TransmonScan,
    GammaSweep,
    LzTrace,
    LzSigmaQ,
    WaveguideBands,
    CrystalBands,
    ScatterBudget,
}

impl Experiment {
    pub const ALL: [Experiment; 13] = [
        Experiment::PulseProfile,
        Experiment::PulseSpectrum,
        Experiment::DriveSynth,
        Experiment::DriveTruncate,
        Experiment::QubitTrace,
        Experiment::QubitScan,
        Experiment::TransmonScan,
        Experiment::GammaSweep,
        Experiment::LzTrace,
        Experiment::LzSigmaQ,
        Experiment::WaveguideBands,
        Experiment::CrystalBands,
        Experiment::ScatterBudget,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::PulseProfile => "pulse-profile",
            Experiment::PulseSpectrum => "pulse-spectrum",
            Experiment::DriveSynth => "drive-synth",
            Experiment::DriveTruncate => "drive-truncate",
            Experiment::QubitTrace => "qubit-trace",
            Experiment::QubitScan => "qubit-scan",
            Experiment::TransmonScan => "transmon-scan",
            Experiment::GammaSweep => "gamma-sweep",
            Experiment::LzTrace => "lz-trace",
            Experiment::LzSigmaQ => "lz-sigma-q",
            Experiment::WaveguideBands => "waveguide-bands",
            Experiment::CrystalBands => "crystal-bands",
            Experiment::ScatterBudget => "scatter-budget",
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Experiment::PulseProfile => "real field E/E_max along z at several t/t_f",
            Experiment::PulseSpectrum => "spectral mean and width at z = d_f versus σ_f/λ₀",
            Experiment::DriveSynth => "point driving D(t) at z = 0 and its spectrum",
            Experiment::DriveTruncate => "field at d_f with |ω| > ω_r removed",
            Experiment::QubitTrace => "qubit populations versus time at one position",
            Experiment::QubitScan => "p_g at τ(d) = 2t_f + ηd/v across positions",
            Experiment::TransmonScan => "transmon level populations at τ(d) across positions",
            Experiment::GammaSweep => "position scans for several Γ/ω_q",
            Experiment::LzTrace => "detuning Δ, gap g and dressed energies versus time",
            Experiment::LzSigmaQ => "addressing width σ_q from the Landau-Zener picture",
            Experiment::WaveguideBands => "cylindrical waveguide TE/TM bands and the quadratic fit",
            Experiment::CrystalBands => "1D photonic crystal bands and the band-2 quadratic fit",
            Experiment::ScatterBudget => "scattered energy fraction ν and independent-emitter count",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown experiment `{s}` (see `chirpaddr list`)"))
    }
}

/// Sampling grids; each experiment reads the fields it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    /// Uniform position grid over `d_f ± d_half_widths·σ_f`; `null` selects
    /// the default 161-point grid plus far-field points.
    pub d_half_widths: Option<f64>,
    pub d_points: usize,
    /// Single position for `qubit-trace`, in λ₀; `null` means `d_f`.
    pub d_over_lambda0: Option<f64>,
    /// Positions for `lz-trace`, as offsets from `d_f` in σ_f.
    pub d_offsets_over_sigma_f: Vec<f64>,
    pub t_points: usize,
    pub t_end_over_t_f: f64,
    /// Snapshot times for `pulse-profile`.
    pub t_over_t_f: Vec<f64>,
    pub z_points: usize,
    pub sigma_f_list: Vec<f64>,
    pub spectrum_panels: usize,
    pub gamma_list: Vec<f64>,
    /// Time window `[start, end]` in 1/ω_c for the drive experiments; `null`
    /// picks one from the pulse.
    pub window: Option<[f64; 2]>,
    pub n_samples: usize,
    pub omega_r_over_omega_c: f64,
    pub k_points: usize,
    pub crystal_fit_half_width: f64,
    pub crystal_report_half_width: f64,
    pub budget: f64,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

/// Fully resolved configuration, in the same ratios as the flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub omega0_over_omega_c: f64,
    pub d_f_over_lambda0: f64,
    pub sigma_f_over_lambda0: f64,
    #[serde(rename = "Omega0_over_omega_c")]
    pub omega_peak_over_omega_c: f64,
    #[serde(rename = "Gamma_over_omega_q")]
    pub gamma_over_omega_q: f64,
    pub phi: f64,
    pub alpha_over_omega_q: f64,
    pub n_levels: usize,
    pub frame: Frame,
    pub coupling_convention: CouplingConvention,
    pub rtol: f64,
    pub atol: f64,
    pub grids: Grids,
    /// Not part of the recorded metadata: moving outputs does not change a run.
    #[serde(default = "default_output_dir", skip_serializing)]
    pub output_dir: PathBuf,
}

/// Everything except `experiment`, which has no default.
pub fn defaults() -> Value {
    json!({
        "omega0_over_omega_c": 1.005,
        "d_f_over_lambda0": 18.0,
        "sigma_f_over_lambda0": 0.35,
        "Omega0_over_omega_c": 0.038,
        "Gamma_over_omega_q": 1e-6,
        "phi": 0.0,
        "alpha_over_omega_q": -0.05,
        "n_levels": 6,
        "frame": "rwa",
        "coupling_convention": "lab-max",
        "rtol": 1e-8,
        "atol": 1e-12,
        "grids": {
            "d_half_widths": null,
            "d_points": 61,
            "d_over_lambda0": null,
            "d_offsets_over_sigma_f": [-2.0, 0.0, 2.0],
            "t_points": 501,
            "t_end_over_t_f": 2.5,
            "t_over_t_f": [0.0, 0.5, 1.0],
            "z_points": 1001,
            "sigma_f_list": [0.1, 0.15, 0.21, 0.3, 0.5, 0.75, 1.0],
            "spectrum_panels": 400,
            "gamma_list": [1e-7, 1e-6, 1e-5, 1e-4],
            "window": null,
            "n_samples": 32768,
            "omega_r_over_omega_c": 2.0,
            "k_points": 401,
            "crystal_fit_half_width": 0.5,
            "crystal_report_half_width": 0.75,
            "budget": 0.8
        }
    })
}

pub const PRESETS: [(&str, &str); 5] = [
    ("compression", "d_f/λ₀ = 7.5, σ_f/λ₀ = 0.21"),
    ("addressing", "d_f/λ₀ = 18, σ_f/λ₀ = 0.35, Ω₀/ω_c = 0.038"),
    ("addressing-wide", "d_f/λ₀ = 18, σ_f/λ₀ = 0.5, Ω₀/ω_c = 0.030"),
    ("transmon", "addressing with a transmon, α/ω_q = −0.05, Γ/ω_q = 1e-6, grid ±4σ_f"),
    ("narrowband", "k₀σ_f = 6 pulse whose point drive fits a finite window"),
];

pub fn preset(name: &str) -> Result<Value, CliError> {
    let v = match name {
        "compression" => json!({"d_f_over_lambda0": 7.5, "sigma_f_over_lambda0": 0.21}),
        "addressing" => json!({"d_f_over_lambda0": 18.0, "sigma_f_over_lambda0": 0.35, "Omega0_over_omega_c": 0.038}),
        "addressing-wide" => json!({"d_f_over_lambda0": 18.0, "sigma_f_over_lambda0": 0.5, "Omega0_over_omega_c": 0.030}),
        "transmon" => json!({
            "d_f_over_lambda0": 18.0,
            "sigma_f_over_lambda0": 0.35,
            "Omega0_over_omega_c": 0.038,
            "alpha_over_omega_q": -0.05,
            "Gamma_over_omega_q": 1e-6,
            "grids": {"d_half_widths": 4.0, "d_points": 25}
        }),
        // k₀ = 0.1k_c, σ_f = 60/k_c, d_f = 10λ₀.
        "narrowband" => json!({
            "d_f_over_lambda0": 10.0,
            "sigma_f_over_lambda0": 60.0 * 0.1 / (2.0 * std::f64::consts::PI),
            "grids": {"window": [-30000.0, 6000.0], "n_samples": 32768}
        }),
        other => {
            return Err(CliError::Config(format!(
                "unknown preset `{other}`; available: {}",
                PRESETS.iter().map(|p| p.0).collect::<Vec<_>>().join(", ")
            )))
        }
    };
    Ok(v)
}

/// Recursive overlay: objects merge key by key, everything else replaces.
pub fn merge(base: &mut Value, over: &Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (b, o) => *b = o.clone(),
    }
}

/// Load a config layer from a JSON config, or from the metadata of a CSV or
/// JSON output (its `config` record).
pub fn load_layer(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let parse = |s: &str| -> Result<Value, CliError> {
        serde_json::from_str(s).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    };
    let value = match text.lines().next().and_then(|l| l.strip_prefix("# metadata: ")) {
        Some(meta) => parse(meta)?,
        None => parse(&text)?,
    };
    // Output files carry the config under `config` (CSV) or
    // `metadata.config` (JSON mirror).
    if let Some(c) = value.get("config") {
        return Ok(c.clone());
    }
    if let Some(c) = value.get("metadata").and_then(|m| m.get("config")) {
        return Ok(c.clone());
    }
    Ok(value)
}

impl RunConfig {
    pub fn from_value(v: Value) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_value(v).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Recorded form, re-ingestible with `--config`.
    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |field: &str, reason: String| Err(CliError::Validation {
            field: field.into(),
            reason,
        });
        let positive = [
            ("d_f_over_lambda0", self.d_f_over_lambda0),
            ("sigma_f_over_lambda0", self.sigma_f_over_lambda0),
            ("rtol", self.rtol),
            ("atol", self.atol),
            ("grids.t_end_over_t_f", self.grids.t_end_over_t_f),
            ("grids.omega_r_over_omega_c", self.grids.omega_r_over_omega_c),
            ("grids.crystal_fit_half_width", self.grids.crystal_fit_half_width),
            ("grids.crystal_report_half_width", self.grids.crystal_report_half_width),
            ("grids.budget", self.grids.budget),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return bad(name, format!("must be finite and > 0, got {v}"));
            }
        }
        if !(self.omega0_over_omega_c > 1.0 && self.omega0_over_omega_c.is_finite()) {
            return bad("omega0_over_omega_c", format!("carrier must lie above the cutoff (> 1), got {}", self.omega0_over_omega_c));
        }
        for (name, v) in [("Omega0_over_omega_c", self.omega_peak_over_omega_c), ("Gamma_over_omega_q", self.gamma_over_omega_q)] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(name, format!("must be finite and >= 0, got {v}"));
            }
        }
        for (name, v) in [("phi", self.phi), ("alpha_over_omega_q", self.alpha_over_omega_q)] {
            if !v.is_finite() {
                return bad(name, format!("must be finite, got {v}"));
            }
        }
        if self.n_levels < 3 {
            return bad("n_levels", format!("need at least 3, got {}", self.n_levels));
        }
        let g = &self.grids;
        for (name, n, min) in [
            ("grids.d_points", g.d_points, 3),
            ("grids.t_points", g.t_points, 2),
            ("grids.z_points", g.z_points, 2),
            ("grids.spectrum_panels", g.spectrum_panels, 1),
            ("grids.n_samples", g.n_samples, 16),
            ("grids.k_points", g.k_points, 2),
        ] {
            if n < min {
                return bad(name, format!("need at least {min}, got {n}"));
            }
        }
        if let Some(h) = g.d_half_widths {
            if !(h.is_finite() && h > 0.0) {
                return bad("grids.d_half_widths", format!("must be finite and > 0, got {h}"));
            }
        }
        if let Some([a, b]) = g.window {
            if !(a.is_finite() && b.is_finite() && b > a) {
                return bad("grids.window", format!("need start < end, got [{a}, {b}]"));
            }
        }
        if g.sigma_f_list.iter().any(|&s| !(s.is_finite() && s > 0.0)) {
            return bad("grids.sigma_f_list", "entries must be finite and > 0".into());
        }
        if g.gamma_list.is_empty() || g.gamma_list.iter().any(|&s| !(s.is_finite() && s >= 0.0)) {
            return bad("grids.gamma_list", "need at least one finite entry >= 0".into());
        }
        Ok(())
    }
}
