use std::path::PathBuf;

use chirpaddr::drive::CoherentPrep;
use chirpaddr::emitter::{QubitSpec, SolverConfig, TransmonSpec};
use chirpaddr::experiments::{self as ex, EmitterKind, ScanTable};
use chirpaddr::lz::{interaction_time, sigma_q_estimate, WindowMeasure};
use chirpaddr::medium::{CrystalParams, ModeFamily, QuadraticBand, WaveguideGeometry};
use chirpaddr::pulse::PulseParams;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Experiment, RunConfig};
use crate::CliError;

/// What a run produced; printed as JSON on stdout.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub experiment: Experiment,
    pub files: Vec<PathBuf>,
    pub rows: Vec<usize>,
    pub warnings: Vec<String>,
    pub summary: Value,
}

struct Output {
    tables: Vec<ScanTable>,
    warnings: Vec<String>,
    summary: Value,
}

impl Output {
    fn new(tables: Vec<ScanTable>) -> Self {
        Self {
            tables,
            warnings: Vec::new(),
            summary: Value::Null,
        }
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn pulse(cfg: &RunConfig) -> chirpaddr::Result<PulseParams> {
    PulseParams::from_ratios(
        QuadraticBand::unit(),
        cfg.omega0_over_omega_c,
        cfg.d_f_over_lambda0,
        cfg.sigma_f_over_lambda0,
        cfg.phi,
    )
}

fn qubit(cfg: &RunConfig, p: &PulseParams) -> chirpaddr::Result<QubitSpec> {
    QubitSpec::resonant(p, cfg.gamma_over_omega_q, cfg.omega_peak_over_omega_c, cfg.coupling_convention)
}

fn transmon(cfg: &RunConfig, p: &PulseParams) -> chirpaddr::Result<TransmonSpec> {
    let wq = p.omega0();
    TransmonSpec::new(
        wq,
        cfg.alpha_over_omega_q * wq,
        cfg.gamma_over_omega_q * wq,
        cfg.omega_peak_over_omega_c,
        cfg.coupling_convention,
        cfg.n_levels,
    )
}

fn solver(cfg: &RunConfig) -> SolverConfig {
    SolverConfig {
        frame: cfg.frame,
        rtol: cfg.rtol,
        atol: cfg.atol,
        ..SolverConfig::default()
    }
}

fn d_grid(cfg: &RunConfig, p: &PulseParams) -> Vec<f64> {
    match cfg.grids.d_half_widths {
        Some(h) => ex::uniform_d_grid(p, h, cfg.grids.d_points),
        None => ex::default_d_grid(p),
    }
}

fn peak_summary(table: &ScanTable, column: &str, lambda0: f64, warnings: &mut Vec<String>) -> Value {
    let y = table.column(column).unwrap_or_default();
    match ex::peak_stats(&table.values, y) {
        Ok(s) => json!({
            "column": column,
            "center_over_lambda0": s.center / lambda0,
            "height": s.height,
            "fwhm_over_lambda0": s.fwhm / lambda0,
            "gaussian_equiv_width_over_lambda0": s.gaussian_equiv_width / lambda0,
        }),
        Err(e) => {
            warnings.push(format!("{column}: {e}"));
            Value::Null
        }
    }
}

fn execute(cfg: &RunConfig) -> chirpaddr::Result<Output> {
    let g = &cfg.grids;
    let p = pulse(cfg)?;
    let l0 = p.lambda0();
    let tf = p.t_f();
    let out = match cfg.experiment {
        Experiment::PulseProfile => {
            let z = linspace(-cfg.d_f_over_lambda0, 2.0 * cfg.d_f_over_lambda0, g.z_points);
            Output::new(vec![ex::pulse_profile(&p, &g.t_over_t_f, &z)?])
        }
        Experiment::PulseSpectrum => Output::new(vec![ex::pulse_spectrum(&p, &g.sigma_f_list, g.spectrum_panels)?]),
        Experiment::DriveSynth => {
            let [a, b] = g.window.unwrap_or([-3.0 * tf, tf]);
            let prep = CoherentPrep::for_pulse(p);
            let (ts, fs) = ex::drive_synth(&prep, a, b, g.n_samples)?;
            let mut o = Output::new(vec![ts, fs]);
            o.summary = json!({ "c_alpha": prep.c_alpha, "photon_number": prep.photon_number() });
            o
        }
        Experiment::DriveTruncate => {
            let [a, b] = g.window.unwrap_or([0.75 * tf, 1.25 * tf]);
            let t = ex::drive_truncate(&p, p.d_f, a, b, g.n_samples, g.omega_r_over_omega_c * p.band.omega_c)?;
            let raw = t.column("E_over_E_max").unwrap_or_default();
            let cut = t.column("E_truncated_over_E_max").unwrap_or_default();
            let peak = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let mut o = Output::new(Vec::new());
            o.summary = json!({ "peak_raw": peak(raw), "peak_truncated": peak(cut) });
            o.tables.push(t);
            o
        }
        Experiment::QubitTrace => {
            let d = g.d_over_lambda0.unwrap_or(cfg.d_f_over_lambda0) * l0;
            let times = linspace(0.0, g.t_end_over_t_f * tf, g.t_points);
            let q = qubit(cfg, &p)?;
            Output::new(vec![ex::emitter_trace(&p, &EmitterKind::Qubit(q), d, &times, &solver(cfg))?])
        }
        Experiment::QubitScan | Experiment::TransmonScan => {
            let (emitter, column) = if cfg.experiment == Experiment::QubitScan {
                (EmitterKind::Qubit(qubit(cfg, &p)?), "p_g")
            } else {
                (EmitterKind::Transmon(transmon(cfg, &p)?), "p_0")
            };
            let scan = ex::position_scan(&p, &emitter, &d_grid(cfg, &p), &solver(cfg))?;
            let mut o = Output::new(Vec::new());
            o.warnings = scan.warnings;
            o.summary = json!({ "peak": peak_summary(&scan.table, column, l0, &mut o.warnings) });
            o.tables.push(scan.table);
            o
        }
        Experiment::GammaSweep => {
            let q = qubit(cfg, &p)?;
            let sweep = ex::gamma_sweep(&p, &q, &d_grid(cfg, &p), &g.gamma_list, &solver(cfg))?;
            let peaks: Vec<Value> = sweep
                .gammas
                .iter()
                .zip(&sweep.peaks)
                .zip(&sweep.max_p_g)
                .map(|((gm, pk), mx)| {
                    json!({
                        "gamma_over_omega_q": gm,
                        "max_p_g": mx,
                        "height": pk.map(|s| s.height),
                        "center_over_lambda0": pk.map(|s| s.center / l0),
                        "fwhm_over_lambda0": pk.map(|s| s.fwhm / l0),
                    })
                })
                .collect();
            let mut o = Output::new(vec![sweep.table]);
            o.warnings = sweep.warnings;
            o.summary = json!({ "peaks": peaks });
            o
        }
        Experiment::LzTrace => {
            let q = qubit(cfg, &p)?;
            let d: Vec<f64> = g.d_offsets_over_sigma_f.iter().map(|x| p.d_f + x * p.sigma_f).collect();
            let [a, b] = g.window.unwrap_or([0.8 * tf, 1.2 * tf]);
            Output::new(vec![ex::lz_trace(&p, &q, &d, &linspace(a, b, g.t_points))?])
        }
        Experiment::LzSigmaQ => {
            let q = qubit(cfg, &p)?;
            let measures = [WindowMeasure::Intensity, WindowMeasure::Amplitude];
            let est = measures
                .iter()
                .map(|&m| sigma_q_estimate(&p, &q, m))
                .collect::<chirpaddr::Result<Vec<_>>>()?;
            let mut o = Output::new(Vec::new());
            let dt = match interaction_time(&p) {
                Ok(v) => Some(v),
                Err(e) => {
                    o.warnings.push(format!("interaction time: {e}"));
                    None
                }
            };
            let meta = json!({
                "pulse": { "omega0": p.omega0(), "d_f": p.d_f, "sigma_f": p.sigma_f, "phi": p.phi },
                "qubit": q,
                "measures": measures,
            });
            let mut t = ScanTable::new("lz_sigma_q", "measure_index", vec![0.0, 1.0], meta);
            t.push_column("d1_over_lambda0", est.iter().map(|s| s.d1 / l0).collect())?;
            t.push_column("d2_over_lambda0", est.iter().map(|s| s.d2 / l0).collect())?;
            t.push_column("sigma_q_over_lambda0", est.iter().map(|s| s.sigma_q / l0).collect())?;
            t.push_column("sigma_q_over_sigma_f", est.iter().map(|s| s.ratio).collect())?;
            o.summary = json!({
                "sigma_q_over_sigma_f": { "intensity": est[0].ratio, "amplitude": est[1].ratio },
                "interaction_time": dt,
            });
            o.tables.push(t);
            o
        }
        Experiment::WaveguideBands => {
            let geom = WaveguideGeometry::for_band(&p.band);
            let k = linspace(0.0, 3.0 * p.band.k_c(), g.k_points);
            let modes = [
                (ModeFamily::TE, 1, 1),
                (ModeFamily::TM, 0, 1),
                (ModeFamily::TE, 2, 1),
                (ModeFamily::TE, 0, 1),
                (ModeFamily::TM, 1, 1),
            ];
            Output::new(vec![ex::waveguide_bands(&geom, &k, &modes)?])
        }
        Experiment::CrystalBands => {
            let (t, fit) = ex::crystal_bands(&CrystalParams::reference(), g.k_points, 3, g.crystal_fit_half_width, g.crystal_report_half_width)?;
            let mut o = Output::new(vec![t]);
            o.summary = json!({
                "omega_c": fit.band.omega_c,
                "v": fit.band.v,
                "max_rel_deviation": fit.max_rel_deviation,
            });
            o
        }
        Experiment::ScatterBudget => {
            let prep = CoherentPrep::for_pulse(p);
            let (t, rows) = ex::scatter_budget_table(&prep, &qubit(cfg, &p)?, g.budget)?;
            let mut o = Output::new(vec![t]);
            o.summary = json!(rows
                .iter()
                .map(|r| json!({
                    "convention": r.convention.name(),
                    "nu": r.nu,
                    "n_q_max": r.n_q_max,
                    "photon_number": r.photon_number,
                    "photons_for_reference_nu": r.photons_for_reference_nu,
                }))
                .collect::<Vec<_>>());
            for r in &rows {
                o.warnings.extend(r.warnings.iter().cloned());
            }
            o
        }
    };
    Ok(out)
}

/// Run the configured experiment and write every table into
/// `cfg.output_dir`. The resolved config is embedded in each table's
/// metadata under `config`, so any output file can be fed back with
/// `--config` to repeat the run.
pub fn run(cfg: &RunConfig) -> Result<RunReport, CliError> {
    cfg.validate()?;
    let fail = |source| CliError::Experiment {
        experiment: cfg.experiment,
        source,
    };
    let mut out = execute(cfg).map_err(fail)?;
    let mut files = Vec::new();
    let mut rows = Vec::new();
    for t in &mut out.tables {
        if let Value::Object(m) = &mut t.metadata {
            m.insert("config".into(), cfg.to_value());
        }
        let (csv, js) = t.write(&cfg.output_dir).map_err(fail)?;
        files.push(csv);
        files.push(js);
        rows.push(t.len());
    }
    Ok(RunReport {
        experiment: cfg.experiment,
        files,
        rows,
        warnings: out.warnings,
        summary: out.summary,
    })
}
