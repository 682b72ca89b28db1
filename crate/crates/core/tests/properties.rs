use chirpaddr::drive::{spectral_energy_above, truncate_field};
use chirpaddr::emitter::{evolve_ladder, DensityMatrix, LadderModel};
use chirpaddr::experiments::ScanTable;
use chirpaddr::lz::dressed_energies;
use chirpaddr::medium::QuadraticBand;
use chirpaddr::numerics::fourier::UniformSeries;
use chirpaddr::numerics::StepControl;
use chirpaddr::pulse::PulseParams;
use num_complex::Complex64;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn density_matrix_stays_physical(
        dim in 2usize..5,
        spacing in -0.2f64..0.2,
        alpha in -0.1f64..0.0,
        gamma in 0.0f64..0.05,
        re in -0.2f64..0.2,
        im in -0.2f64..0.2,
        w in 0.0f64..0.3,
    ) {
        let model = LadderModel::new(dim, spacing, alpha, gamma);
        let c0 = Complex64::new(re, im);
        let times: Vec<f64> = (0..=20).map(|i| i as f64).collect();
        let ctl = StepControl { rtol: 1e-9, atol: 1e-11, max_step: 0.5, max_steps: 1_000_000 };
        let traj = evolve_ladder(&model, |t| c0 * (w * t).cos(), &DensityMatrix::ground(dim), &times, &ctl).unwrap();
        let r = traj.worst_invariants();
        prop_assert!(r.trace_error < 1e-7);
        prop_assert!(r.hermiticity_error < 1e-9);
        prop_assert!(r.min_eigenvalue > -1e-7);
        for s in &traj.states {
            prop_assert!(s.purity() <= 1.0 + 1e-7);
        }
    }

    #[test]
    fn scan_table_round_trips(
        rows in prop::collection::vec((-1e300f64..1e300, -1e-300f64..1e-300, any::<i32>()), 1..30),
        key in "[a-z]{1,8}",
        val in -1e6f64..1e6,
    ) {
        let mut meta = serde_json::Map::new();
        meta.insert(key, serde_json::json!(val));
        let mut t = ScanTable::new("prop", "x", rows.iter().map(|r| r.0).collect(), serde_json::Value::Object(meta));
        t.push_column("tiny", rows.iter().map(|r| r.1).collect()).unwrap();
        t.push_column("int", rows.iter().map(|r| r.2 as f64).collect()).unwrap();
        let back = ScanTable::from_csv(&t.to_csv()).unwrap();
        prop_assert_eq!(&back, &t);
        prop_assert_eq!(back.metadata_hash(), t.metadata_hash());
    }

    #[test]
    fn k_of_omega_inverts_the_band(omega_c in 0.1f64..10.0, v in 0.1f64..10.0, k in 0.0f64..50.0) {
        let b = QuadraticBand::new(omega_c, v).unwrap();
        let w = b.omega(k);
        let back = b.k_of_omega(w).unwrap();
        prop_assert!((b.omega(back) - w).abs() <= 1e-12 * w);
        prop_assert!(back >= 0.0);
    }

    #[test]
    fn truncation_is_a_projection(
        vals in prop::collection::vec(-1.0f64..1.0, 64..65),
        omega_r in 0.01f64..4.0,
        dt in 0.1f64..2.0,
    ) {
        let s = UniformSeries { t0: -3.0, dt, values: vals.iter().map(|&v| Complex64::new(v, 0.0)).collect() };
        let once = truncate_field(&s, omega_r);
        let twice = truncate_field(&once, omega_r);
        for (a, b) in once.values.iter().zip(&twice.values) {
            prop_assert!((a - b).norm() < 1e-12);
            prop_assert_eq!(a.im, 0.0);
        }
        let removed: f64 = s.values.iter().zip(&once.values).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>() * dt;
        prop_assert!((removed - spectral_energy_above(&s, omega_r)).abs() < 1e-10 * (1.0 + removed));
    }

    #[test]
    fn normalized_envelope_is_bounded(
        df in 2.0f64..30.0,
        sf in 0.15f64..1.0,
        dz in -10.0f64..10.0,
        tt in 0.0f64..3.0,
    ) {
        let p = PulseParams::from_ratios(QuadraticBand::unit(), 1.005, df, sf, 0.0).unwrap();
        let z = p.d_f + dz * p.sigma_f;
        let t = tt * p.t_f();
        prop_assert!(p.normalized_envelope(z, t).norm() <= 1.0 + 1e-12);
        prop_assert!(p.sigma_t(t) >= p.sigma_f);
    }

    #[test]
    fn dressed_energies_bound_the_detuning(delta in -1.0f64..1.0, g in 0.0f64..1.0) {
        let (lo, hi) = dressed_energies(delta, g);
        prop_assert_eq!(lo, -hi);
        prop_assert!(hi >= delta.abs());
        prop_assert!(hi >= 0.5 * g);
    }
}
