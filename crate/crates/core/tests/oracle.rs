use approx::assert_relative_eq;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use raman_witness::coefficients::{eval_coefficients, verify_order2_consistency};
use raman_witness::model::{CoherentAmplitudes, RamanParams};
use raman_witness::moments::MomentKey;
use raman_witness::oracle::{
    build_hamiltonian, build_hamiltonian_explicit, coherent_product_state, compare_with_closed_form, evolve,
    moment_table, normal_ordered_moment, oracle_run, oracle_witness_sweep, required_cutoff, FockConfig,
};
use raman_witness::witnesses::{three_mode_witness, witness_from_moments};
use raman_witness::{Error, Mode, Pair, WitnessSpec};

fn desk_params() -> RamanParams<f64> {
    RamanParams::new(1.0, 1.0, 10.0, 19.0).unwrap()
}

fn desk_amps(phi: f64) -> CoherentAmplitudes<f64> {
    CoherentAmplitudes::from_pump_phase(0.5, phi, 0.3, 0.2, 0.1)
}

fn config(cutoffs: [usize; 4]) -> FockConfig {
    FockConfig::new(cutoffs).unwrap()
}

#[test]
fn hamiltonian_is_exactly_symmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let p = RamanParams::new(rng.gen_range(0.1..3.0), rng.gen_range(0.0..3.0), 7.0, -4.0).unwrap();
        let h = build_hamiltonian(&p, &config([3, 2, 3, 2])).unwrap();
        assert_eq!(h.matrix().hermiticity_defect(), 0.0);
    }
}

#[test]
fn dimension_cap_is_a_resource_error() {
    let mut cfg = config([9, 9, 9, 9]);
    cfg.max_dim = 5000;
    let err = build_hamiltonian(&desk_params(), &cfg).unwrap_err();
    assert!(matches!(err, Error::Resource { dimension: 10000, cap: 5000 }));
}

#[test]
fn vacuum_state_and_moments() {
    let state = coherent_product_state(&CoherentAmplitudes::vacuum(), &config([2, 2, 2, 2])).unwrap();
    assert_eq!(state.amplitudes()[0], Complex64::new(1.0, 0.0));
    let key = MomentKey::number_power(Mode::A, 1).with(Mode::C, 0, 2);
    assert_eq!(normal_ordered_moment(&state, &key).unwrap(), Complex64::new(0.0, 0.0));
}

#[test]
fn single_mode_coherent_expansion() {
    let amps = CoherentAmplitudes::from_pump_phase(0.5, 0.0, 0.0, 0.0, 0.0);
    let state = coherent_product_state(&amps, &config([7, 1, 1, 1])).unwrap();
    let basis = state.basis();
    let raw: Vec<f64> = (0..=7)
        .map(|n| {
            let fact: f64 = (1..=n).map(|k| k as f64).product();
            (-0.125f64).exp() * 0.5f64.powi(n) / fact.sqrt()
        })
        .collect();
    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    for (n, r) in raw.iter().enumerate() {
        let amp = state.amplitudes()[basis.index([n, 0, 0, 0])];
        assert_relative_eq!(amp.re, r / norm, max_relative = 1e-14);
        assert_eq!(amp.im, 0.0);
    }
}

#[test]
fn coherent_moments_are_products_of_amplitudes() {
    let amps = CoherentAmplitudes::from_complex([
        Complex64::new(0.6, 0.2),
        Complex64::new(-0.3, 0.4),
        Complex64::new(0.1, -0.5),
        Complex64::new(0.2, 0.0),
    ]);
    let state = coherent_product_state(&amps, &config([12, 12, 12, 12])).unwrap();
    let a = amps.as_array();
    assert!((normal_ordered_moment(&state, &MomentKey::annihilation(Mode::A, 1)).unwrap() - a[0]).norm() < 1e-8);
    let key = MomentKey::new([(1, 2), (0, 1), (2, 0), (1, 1)]);
    let expected = a[0].conj() * a[0] * a[0] * a[1] * a[2].conj() * a[2].conj() * a[3].norm_sqr();
    assert!((normal_ordered_moment(&state, &key).unwrap() - expected).norm() < 1e-8);
}

#[test]
fn cutoff_too_small_reports_requirement() {
    let amps = CoherentAmplitudes::from_pump_phase(1.5, 0.0, 0.0, 0.0, 0.0);
    let err = coherent_product_state(&amps, &config([5, 1, 1, 1])).unwrap_err();
    match err {
        Error::CutoffTooSmall { mode, cutoff, required, .. } => {
            assert_eq!((mode, cutoff), ('a', 5));
            assert_eq!(required, required_cutoff(1.5, 1e-8));
            assert!(required > 5);
        }
        other => panic!("unexpected {other}"),
    }
}

#[test]
fn moment_power_above_cutoff_is_rejected() {
    let state = coherent_product_state(&CoherentAmplitudes::vacuum(), &config([2, 2, 2, 2])).unwrap();
    let err = normal_ordered_moment(&state, &MomentKey::annihilation(Mode::B, 3)).unwrap_err();
    assert!(matches!(err, Error::Truncation { mode: 'b', power: 3, cutoff: 2 }));
}

#[test]
fn free_evolution_is_a_phase_rotation() {
    let cfg = config([8, 6, 6, 6]);
    let h = build_hamiltonian_explicit(&cfg, [-8.0, 1.0, 1.0, -26.0], 0.0, 0.0).unwrap();
    assert!(h.matrix().entries().all(|(i, j, _)| i == j));
    let amps = desk_amps(0.3);
    let state = coherent_product_state(&amps, &cfg).unwrap();
    let t = 0.7;
    let evolved = evolve(&state, &h, t, 1e-12).unwrap();
    let diff = evolved
        .amplitudes()
        .iter()
        .zip(state.amplitudes())
        .enumerate()
        .map(|(idx, (a, b))| (a - b * Complex64::from_polar(1.0, -h.matrix().get(idx, idx) * t)).norm_sqr())
        .sum::<f64>()
        .sqrt();
    assert!(diff < 1e-10, "free evolution deviates by {diff:e}");
    let a = normal_ordered_moment(&evolved, &MomentKey::annihilation(Mode::A, 1)).unwrap();
    let a0 = normal_ordered_moment(&state, &MomentKey::annihilation(Mode::A, 1)).unwrap();
    assert!((a - a0 * Complex64::from_polar(1.0, 8.0 * t)).norm() < 1e-10);
}

#[test]
fn zero_time_is_identity_and_steps_compose() {
    let cfg = config([7, 5, 5, 5]);
    let h = build_hamiltonian(&desk_params(), &cfg).unwrap();
    let s0 = coherent_product_state(&desk_amps(0.0), &cfg).unwrap();
    let same = evolve(&s0, &h, 0.0, 1e-10).unwrap();
    assert_eq!(same.amplitudes(), s0.amplitudes());
    let one = evolve(&s0, &h, 0.3, 1e-10).unwrap();
    let two = evolve(&evolve(&s0, &h, 0.11, 1e-10).unwrap(), &h, 0.3, 1e-10).unwrap();
    let diff = one
        .amplitudes()
        .iter()
        .zip(two.amplitudes())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    assert!(diff < 1e-9, "composition error {diff:e}");
    assert!(evolve(&one, &h, 0.1, 1e-10).is_err());
}

#[test]
fn uncoupled_witnesses_vanish() {
    let cfg = config([8, 7, 6, 5]);
    let h = build_hamiltonian_explicit(&cfg, [-8.0, 1.0, 1.0, -26.0], 0.0, 0.0).unwrap();
    let specs: Vec<WitnessSpec> = Pair::ALL
        .iter()
        .flat_map(|&p| [WitnessSpec::hz1(p, 1, 1).unwrap(), WitnessSpec::hz2(p, 2, 1).unwrap()])
        .chain([WitnessSpec::three_mode(), WitnessSpec::four_mode()])
        .collect();
    let mut state = coherent_product_state(&desk_amps(0.9), &cfg).unwrap();
    for t in [0.0, 0.05, 0.1] {
        state = evolve(&state, &h, t, 1e-10).unwrap();
        let table = moment_table(&state, &specs).unwrap();
        for spec in &specs {
            let v = witness_from_moments(spec, &table, t).unwrap().value;
            assert!(v.abs() < 1e-9, "{spec} at {t}: {v:e}");
        }
    }
}

#[test]
fn spontaneous_three_mode_is_negative() {
    let amps = CoherentAmplitudes::from_pump_phase(0.7, 0.0, 0.0, 0.0, 0.0);
    let cfg = config([9, 4, 4, 3]);
    let times = [0.0, 0.02, 0.04, 0.08];
    let (series, _) = oracle_witness_sweep(&desk_params(), &amps, &cfg, &times, &[WitnessSpec::three_mode()]).unwrap();
    for (k, &t) in times.iter().enumerate().skip(1) {
        let v = series[0].values[k];
        let cs = eval_coefficients(&desk_params(), t);
        let leading = -cs.f(2).norm_sqr() * 0.7f64.powi(4);
        assert!(v < 0.0);
        assert!((v - leading).abs() < 0.05 * leading.abs(), "t = {t}: {v} vs {leading}");
        assert_relative_eq!(three_mode_witness(&cs, &amps).value, leading, max_relative = 1e-12);
    }
}

/// Spontaneous Stokes-phonon pair creation: the HZ-2 bc witness is
/// negative and the HZ-1 ab witness positive, in the closed forms and in
/// the exact dynamics alike.
#[test]
fn spontaneous_pairwise_witnesses_match_exact_dynamics() {
    let amps = CoherentAmplitudes::from_pump_phase(0.7, 0.0, 0.0, 0.0, 0.0);
    let specs = [WitnessSpec::hz2(Pair::Bc, 1, 1).unwrap(), WitnessSpec::hz1(Pair::Ab, 1, 1).unwrap()];
    let times = [0.02, 0.04];
    let cfg = config([10, 4, 4, 3]);
    let (series, _) = oracle_witness_sweep(&desk_params(), &amps, &cfg, &times, &specs).unwrap();
    for (s, expected_sign) in series.iter().zip([-1.0, 1.0]) {
        for (k, &t) in times.iter().enumerate() {
            let closed = raman_witness::witnesses::closed_form_witness(&s.spec, &eval_coefficients(&desk_params(), t), &amps)
                .unwrap()
                .value;
            let exact = s.values[k];
            assert!(exact * expected_sign > 0.0 && closed * expected_sign > 0.0, "{}: {exact} {closed}", s.spec);
            assert!((exact - closed).abs() < 0.01 * exact.abs(), "{}: {exact} {closed}", s.spec);
        }
    }
}

#[test]
fn monitor_breach_is_an_error() {
    let amps = desk_amps(0.0);
    let cfg = config([7, 5, 5, 5]);
    let err = oracle_witness_sweep(&desk_params(), &amps, &cfg, &[0.0, 0.01], &[WitnessSpec::three_mode()]).unwrap_err();
    assert!(err.is_numerical());
    assert!(matches!(err, Error::TruncationBreach { .. }));
}

#[test]
fn desk_point_converges_at_third_order() {
    let specs = [
        WitnessSpec::hz1(Pair::Ab, 1, 1).unwrap(),
        WitnessSpec::hz1(Pair::Ab, 2, 1).unwrap(),
        WitnessSpec::hz1(Pair::Bc, 1, 1).unwrap(),
        WitnessSpec::hz2(Pair::Bc, 1, 1).unwrap(),
        WitnessSpec::three_mode(),
        WitnessSpec::four_mode(),
    ];
    let amps = desk_amps(std::f64::consts::FRAC_PI_2);
    let times = [0.0125, 0.025, 0.05];
    let cfg = config([8, 7, 6, 5]);
    let (series, diag) = oracle_witness_sweep(&desk_params(), &amps, &cfg, &times, &specs).unwrap();
    assert_eq!(series.len(), specs.len());
    for d in &diag {
        assert!(d.norm_drift < 1e-9);
        assert!(d.max_conservation_drift() < 1e-8, "{d:?}");
    }
    let run = oracle_run(&desk_params(), &amps, &cfg, &times, &specs).unwrap();
    let rows = compare_with_closed_form(&desk_params(), &amps, &times, &specs, &run).unwrap();
    for row in &rows {
        println!("{row:?}");
        if row.t == 0.0125 {
            assert!(row.abs_diff < 1e-6 * row.oracle.abs().max(1.0));
        }
        if let Some(order) = row.order {
            assert!((2.5..=3.5).contains(&order), "{}: order {order}", row.spec);
        }
    }
}

#[test]
fn first_moment_residual_scales_as_t_cubed() {
    let amps = desk_amps(0.4);
    let cfg = config([8, 7, 6, 5]);
    let residual = |t: f64| {
        let h = build_hamiltonian(&desk_params(), &cfg).unwrap();
        let s = evolve(&coherent_product_state(&amps, &cfg).unwrap(), &h, t, 1e-12).unwrap();
        let table = Mode::ALL
            .iter()
            .map(|&m| {
                let k = MomentKey::annihilation(m, 1);
                (k, normal_ordered_moment(&s, &k).unwrap())
            })
            .collect();
        // Oracle frequencies must match for the rotating phases to agree.
        let omega = h.omega();
        let p = desk_params().with_omega(omega).unwrap();
        verify_order2_consistency(&p, &amps, t, &table).unwrap().max()
    };
    let (r1, r2) = (residual(0.05), residual(0.025));
    let order = (r1 / r2).log2();
    assert!((2.5..=3.5).contains(&order), "residuals {r1:e}, {r2:e}, order {order}");
}
