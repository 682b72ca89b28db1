use chirpaddr::medium::QuadraticBand;
use chirpaddr::pulse::{
    relative_l2, spectral_propagation_oracle, spectrum_at, spectrum_exact, OracleQuadrature, PulseParams,
};
use chirpaddr::Error;
use num_complex::Complex64;

fn reference_pulse() -> PulseParams {
    PulseParams::from_ratios(QuadraticBand::unit(), 1.005, 18.0, 0.35, 0.0).unwrap()
}

fn fig1() -> PulseParams {
    PulseParams::from_ratios(QuadraticBand::unit(), 1.005, 7.5, 0.21, 0.0).unwrap()
}

fn z_grid(p: &PulseParams, t: f64, widths: f64, n: usize) -> Vec<f64> {
    let s = p.sigma_t(t);
    let half = widths * s * s / p.sigma_f;
    let c = p.center(t);
    (0..n).map(|i| c - half + 2.0 * half * i as f64 / (n - 1) as f64).collect()
}

#[test]
fn reference_parameters() {
    let p = reference_pulse();
    assert!((p.k0 - 0.1).abs() < 1e-12);
    assert!((p.lambda0() - 62.83185307).abs() < 1e-6);
    assert!((p.eta() - 10.0).abs() < 1e-9);
    assert!((p.d_f - 1130.973355).abs() < 1e-5);
    assert!((p.sigma_f - 21.99114858).abs() < 1e-6);
    assert!((p.t_f() - 11309.73355).abs() < 1e-4);
}

#[test]
fn focus_is_exact() {
    for p in [fig1(), reference_pulse()] {
        let tf = p.t_f();
        assert_eq!(p.sigma_t(tf), p.sigma_f);
        for i in 0..50 {
            let z = p.d_f + (i as f64 - 25.0) * p.sigma_f / 5.0;
            assert_eq!(p.theta(z, tf), 0.0);
        }
        // Peak of |E⁺| is N/(k_c σ_f) at (d_f, t_f).
        assert!((p.envelope(p.d_f, tf) - p.peak_envelope()).abs() < 1e-15);
        let n = p.normalized_envelope(p.d_f, tf);
        let expect = Complex64::from_polar(1.0, p.k0 * p.d_f);
        assert!((n - expect).norm() < 1e-12);
    }
}

#[test]
fn width_is_minimal_at_focus() {
    let p = reference_pulse();
    let tf = p.t_f();
    for dt in [-5000.0, -100.0, 1.0, 300.0, 9000.0] {
        assert!(p.sigma_t(tf + dt) > p.sigma_f);
    }
}

#[test]
fn oracle_matches_closed_form() {
    let p = reference_pulse();
    let quad = OracleQuadrature {
        nodes: 16384,
        half_widths: 6.0,
    };
    for t in [0.0, 0.5 * p.t_f(), p.t_f(), 2.0 * p.t_f()] {
        let z = z_grid(&p, t, 6.0, 1201);
        let oracle = spectral_propagation_oracle(&p, &z, t, quad).unwrap();
        let exact: Vec<Complex64> = z.iter().map(|&zz| p.field_plus(zz, t)).collect();
        let err = relative_l2(&exact, &oracle);
        assert!(err < 1e-6, "t = {t}: relative L2 {err:e}");
    }
}

#[test]
fn oracle_rejects_coarse_quadrature() {
    let p = reference_pulse();
    let z = z_grid(&p, 0.0, 6.0, 11);
    let quad = OracleQuadrature {
        nodes: 64,
        half_widths: 6.0,
    };
    assert!(matches!(
        spectral_propagation_oracle(&p, &z, 0.0, quad),
        Err(Error::QuadratureResolution(_))
    ));
}

/// Residual of `i∂_t A + (v²/2ω_c)(∂_z²A + 2ik₀∂_zA) = 0` for the envelope
/// `A = E⁺e^{−i(k₀z − ω₀t)}`, relative to `max|∂_t A|`.
fn pde_residual(p: &PulseParams, t: f64) -> f64 {
    let a = |z: f64, t: f64| p.field_plus(z, t) * Complex64::from_polar(1.0, -(p.k0 * z - p.omega0() * t));
    let (hz, ht) = (0.05, 0.05);
    let beta = p.band.v * p.band.v / (2.0 * p.band.omega_c);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for z in z_grid(p, t, 4.0, 401) {
        let dt = (a(z, t + ht) - a(z, t - ht)) / (2.0 * ht);
        let dz = (a(z + hz, t) - a(z - hz, t)) / (2.0 * hz);
        let dzz = (a(z + hz, t) - 2.0 * a(z, t) + a(z - hz, t)) / (hz * hz);
        let r = Complex64::i() * dt + beta * (dzz + Complex64::i() * 2.0 * p.k0 * dz);
        worst = worst.max(r.norm());
        scale = scale.max(dt.norm());
    }
    worst / scale
}

#[test]
fn satisfies_envelope_equation() {
    for p in [fig1(), reference_pulse()] {
        for t in [0.0, 0.5 * p.t_f(), p.t_f(), 1.7 * p.t_f()] {
            let r = pde_residual(&p, t);
            assert!(r < 1e-4, "t = {t}: residual {r:e}");
        }
    }
}

#[test]
fn phase_derivative_matches_finite_difference() {
    let p = reference_pulse();
    for (dz, t) in [(0.0, 0.3), (1.0, 0.9), (-2.0, 1.0), (3.0, 1.4)] {
        let z = p.d_f + dz * p.sigma_f;
        let t = t * p.t_f();
        let h = 1e-3;
        let fd = (p.theta(z, t + h) - p.theta(z, t - h)) / (2.0 * h);
        let an = p.dtheta_dt(z, t);
        assert!((fd - an).abs() < 1e-8 * (1.0 + an.abs()), "{fd} vs {an}");
    }
}

#[test]
fn phase_derivative_is_even_about_focus() {
    let p = reference_pulse();
    let tf = p.t_f();
    for dt in [10.0, 200.0, 1500.0] {
        let a = p.dtheta_dt(p.d_f, tf - dt);
        let b = p.dtheta_dt(p.d_f, tf + dt);
        assert!((a - b).abs() < 1e-12 * a.abs().max(1e-12));
    }
    // Non-zero at the focus itself.
    let kc = p.band.k_c();
    let at_focus = -p.band.omega_c / (2.0 * kc * kc * p.sigma_f * p.sigma_f);
    assert!((p.dtheta_dt(p.d_f, tf) - at_focus).abs() < 1e-15);
}

#[test]
fn gaussian_substitution_point() {
    let p = reference_pulse();
    let t = 0.8 * p.t_f();
    let s = p.sigma_t(t);
    let z = p.center(t) + 3.0 * s * s / p.sigma_f;
    let got = p.normalized_envelope(z, t).norm();
    let expect = p.sigma_f / s * (-4.5f64).exp();
    assert!((got - expect).abs() < 1e-14);
}

#[test]
fn exact_spectrum_is_independent_of_focal_distance() {
    let band = QuadraticBand::unit();
    let a = PulseParams::from_ratios(band, 1.005, 7.5, 0.21, 0.0).unwrap();
    let b = PulseParams::from_ratios(band, 1.005, 18.0, 0.21, 0.0).unwrap();
    let sa = spectrum_exact(&a, a.d_f, 400);
    let sb = spectrum_exact(&b, b.d_f, 400);
    assert!((sa.mean_omega - sb.mean_omega).abs() < 1e-6);
    assert!((sa.std_omega - sb.std_omega).abs() < 1e-6);
}

#[test]
fn exact_spectrum_narrows_with_sigma() {
    let band = QuadraticBand::unit();
    let mut last_std = f64::INFINITY;
    let mut last_mean = f64::INFINITY;
    for r in [0.1, 0.15, 0.21, 0.3, 0.5, 1.0, 2.0] {
        let p = PulseParams::from_ratios(band, 1.005, 7.5, r, 0.0).unwrap();
        let s = spectrum_exact(&p, p.d_f, 400);
        assert!(s.std_omega < last_std);
        assert!(s.mean_omega < last_mean);
        assert!(s.mean_omega > p.omega0());
        last_std = s.std_omega;
        last_mean = s.mean_omega;
    }
    // Wide pulses tend to the carrier.
    let p = PulseParams::from_ratios(band, 1.005, 7.5, 20.0, 0.0).unwrap();
    let s = spectrum_exact(&p, p.d_f, 400);
    assert!((s.mean_omega - p.omega0()).abs() < 1e-5);
}

#[test]
fn fft_spectrum_flags_algebraic_tails() {
    let p = fig1();
    let tf = p.t_f();
    let r = spectrum_at(&p, p.d_f, tf - 4000.0, tf + 4000.0, 1 << 16);
    assert!(matches!(r, Err(Error::WindowTooShort { .. })));
}

#[test]
fn fft_spectrum_agrees_with_exact_route_for_narrowband_pulse() {
    // k₀σ_f = 12: tails are negligible and both routes apply.
    let band = QuadraticBand::unit();
    let p = PulseParams::new(band, 0.2, 400.0, 60.0, 0.0, 1.0).unwrap();
    let tf = p.t_f();
    let fft = spectrum_at(&p, p.d_f, tf - 6000.0, tf + 6000.0, 1 << 17).unwrap();
    let ex = spectrum_exact(&p, p.d_f, 400);
    assert!((fft.mean_omega - ex.mean_omega).abs() < 1e-6, "{} {}", fft.mean_omega, ex.mean_omega);
    assert!((fft.std_omega - ex.std_omega).abs() < 1e-3 * ex.std_omega);
}

#[test]
fn invalid_parameters_are_rejected() {
    let band = QuadraticBand::unit();
    assert!(PulseParams::new(band, 0.0, 1.0, 1.0, 0.0, 1.0).is_err());
    assert!(PulseParams::new(band, 0.1, 1.0, -1.0, 0.0, 1.0).is_err());
    assert!(PulseParams::from_ratios(band, 0.99, 18.0, 0.35, 0.0).is_err());
}
