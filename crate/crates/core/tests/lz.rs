use chirpaddr::emitter::{rabi_envelope, CouplingConvention, QubitSpec};
use chirpaddr::lz::*;
use chirpaddr::medium::QuadraticBand;
use chirpaddr::pulse::PulseParams;
use chirpaddr::Error;

fn setup(sf_ratio: f64) -> (PulseParams, QubitSpec) {
    let p = PulseParams::from_ratios(QuadraticBand::unit(), 1.005, 18.0, sf_ratio, 0.0).unwrap();
    let q = QubitSpec::resonant(&p, 1e-6, 0.038, CouplingConvention::LabMax).unwrap();
    (p, q)
}

#[test]
fn decomposition_rebuilds_the_rabi_amplitude() {
    let (p, q) = setup(0.35);
    for (dd, tt) in [(0.0, 1.0), (2.0, 0.95), (-3.0, 1.1)] {
        let d = p.d_f + dd * p.sigma_f;
        let t = tt * p.t_f();
        let f = lz_decompose(&p, &q, d, t);
        let z = rabi_envelope(&p, &q, d, t);
        assert!((f.g - z.norm()).abs() < 1e-15);
        let rebuilt = num_complex::Complex64::from_polar(f.g, f.phi);
        assert!((rebuilt - z).norm() < 1e-12 * (1.0 + z.norm()));
        assert_eq!(f.delta, detuning(&p, &q, d, t));
    }
}

#[test]
fn detuning_matches_phase_finite_difference() {
    let (p, q) = setup(0.35);
    for (dd, tt) in [(0.0, 0.98), (1.0, 1.0), (-2.0, 1.02), (0.5, 0.9)] {
        let d = p.d_f + dd * p.sigma_f;
        let t = tt * p.t_f();
        let an = detuning(&p, &q, d, t);
        let fd = detuning_finite_difference(&p, &q, d, t, 1e-2);
        assert!((an - fd).abs() < 1e-7, "{an} vs {fd}");
    }
}

#[test]
fn detuning_at_focus_is_curvature_offset() {
    let (p, q) = setup(0.35);
    let kc = p.band.k_c();
    let expect = -p.band.omega_c / (4.0 * kc * kc * p.sigma_f * p.sigma_f);
    assert!((detuning(&p, &q, p.d_f, p.t_f()) - expect).abs() < 1e-15);
}

#[test]
fn dressed_energy_examples() {
    assert_eq!(dressed_energies(0.0, 0.0), (0.0, 0.0));
    assert_eq!(dressed_energies(0.0, 2.0), (-1.0, 1.0));
    assert_eq!(dressed_energies(3.0, 8.0), (-5.0, 5.0));
    let (lo, hi) = dressed_energies(-0.3, 0.1);
    assert_eq!(lo, -hi);
    assert!(hi >= 0.3);
}

#[test]
fn gap_window_brackets_the_half_maximum() {
    let (p, q) = setup(0.35);
    for d in [p.d_f, p.d_f + 1.5 * p.sigma_f, p.d_f - 2.0 * p.sigma_f] {
        let amp = gap_window(&p, &q, d, WindowMeasure::Amplitude).unwrap();
        let int = gap_window(&p, &q, d, WindowMeasure::Intensity).unwrap();
        for (w, level) in [(&amp, 0.5), (&int, std::f64::consts::FRAC_1_SQRT_2)] {
            assert!(w.t_open < w.t_peak && w.t_peak < w.t_close);
            let g = |t: f64| q.rwa_peak() * p.normalized_envelope(d, t).norm();
            assert!((g(w.t_open) / w.g_max - level).abs() < 1e-6);
            assert!((g(w.t_close) / w.g_max - level).abs() < 1e-6);
            assert!(g(w.t_peak) <= w.g_max + 1e-15);
            for z in &w.zero_crossings {
                assert!(detuning(&p, &q, d, *z).abs() < 1e-9);
            }
        }
        assert!(int.length() < amp.length());
        assert_eq!(amp.g_max, int.g_max);
    }
    // At the focus the coupling peak sits at t_f.
    let w = gap_window(&p, &q, p.d_f, WindowMeasure::Amplitude).unwrap();
    assert!((w.t_peak - p.t_f()).abs() < 1e-3);
    assert!((w.g_max - 0.019).abs() < 1e-12);
}

#[test]
fn gap_window_rejects_zero_coupling() {
    let (p, _) = setup(0.35);
    let q = QubitSpec::resonant(&p, 0.0, 0.0, CouplingConvention::LabMax).unwrap();
    assert!(matches!(
        gap_window(&p, &q, p.d_f, WindowMeasure::Amplitude),
        Err(Error::DegenerateCoupling { .. })
    ));
}

#[test]
fn interaction_time_value_and_regime() {
    let (p, _) = setup(0.35);
    let dt = interaction_time(&p).unwrap();
    assert!((dt - 1226.27).abs() < 0.05, "{dt}");
    let (narrow, _) = setup(0.15);
    assert!(matches!(interaction_time(&narrow), Err(Error::Regime(_))));
    let (wide, _) = setup(0.5);
    assert!(interaction_time(&wide).unwrap() > 0.0);
}

#[test]
fn sigma_q_brackets_the_focus() {
    let (p, q) = setup(0.35);
    let s = sigma_q_estimate(&p, &q, WindowMeasure::Intensity).unwrap();
    assert!(s.d1 < p.d_f && p.d_f < s.d2);
    assert!((s.sigma_q - (s.d2 - s.d1)).abs() < 1e-12);
    assert!((s.ratio - s.sigma_q / p.sigma_f).abs() < 1e-12);
    assert!(s.ratio > 0.5 && s.ratio < 4.0);
    assert_eq!(s.measure, WindowMeasure::Intensity);
}
