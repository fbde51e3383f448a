use num_complex::Complex64;
use proptest::prelude::*;
use ringrad::correlation::Kernel;
use ringrad::dynamics::{
    beat_frequency, beat_probability, center_state, propagate, propagate_unchecked, time_grid,
    uniform_ring_state,
};
use ringrad::scalar::hermitian;
use ringrad::spectrum::{spectrum, track_p0_branches, ModeLabel};
use ringrad::Config;

#[test]
fn beat_formula_equals_modal_propagator() {
    let times = time_grid(10.0, 201);
    for n in [10, 30, 50] {
        let r = 0.45;
        let spec = spectrum(&Config::centered(n, r).unwrap(), &Kernel::Approx).unwrap();
        let traj = propagate(&spec, &center_state(n), &times).unwrap();
        let c0 = uniform_ring_state::<f64>(n, n + 1);
        let curve = beat_probability(n, r, &Kernel::Approx, &times).unwrap();
        for (k, amps) in traj.site_amplitudes.iter().enumerate() {
            let p = hermitian(&c0, amps).norm_sqr();
            assert!(
                (p - curve.probability[k]).abs() < 1e-10,
                "N={n} t={}",
                times[k]
            );
        }
        assert_eq!(curve.probability[0], 0.0);
        assert!(
            *curve.probability.last().unwrap()
                < curve.probability.iter().cloned().fold(0.0, f64::max)
        );
    }
}

/// Largest secondary maximum relative to the main peak.
fn beat_visibility(v: &[f64]) -> f64 {
    let mut peaks: Vec<f64> = v
        .windows(3)
        .filter(|w| w[1] > w[0] && w[1] >= w[2])
        .map(|w| w[1])
        .collect();
    peaks.sort_by(|a, b| b.partial_cmp(a).unwrap());
    peaks.get(1).map_or(0.0, |second| second / peaks[0])
}

#[test]
fn ten_atom_beat_is_practically_aperiodic() {
    let times = time_grid(10.0, 2001);
    let vis: Vec<f64> = [10, 30, 50]
        .iter()
        .map(|&n| {
            beat_visibility(
                &beat_probability(n, 0.45, &Kernel::Approx, &times)
                    .unwrap()
                    .normalized,
            )
        })
        .collect();
    assert!(vis[0] < 0.1, "{vis:?}");
    assert!(vis[0] < vis[1] && vis[1] < vis[2], "{vis:?}");
}

#[test]
fn beat_probability_decays() {
    let far = beat_probability(10, 0.45, &Kernel::Approx, &[2000.0]).unwrap();
    assert!(far.probability[0] < 1e-12);
}

#[test]
fn two_beat_formulas_agree_on_grid() {
    for n in (2..=20).step_by(2) {
        for k in 1..=10 {
            let r = 0.3 * k as f64;
            let b = beat_frequency(n, r, &Kernel::Approx).unwrap();
            assert!(
                (b.omega_r - b.omega_shift_difference).abs() < 1e-12,
                "N={n} r={r}"
            );
        }
    }
}

#[test]
fn beat_vanishes_at_crossings() {
    for n in [10, 60] {
        let grid: Vec<f64> = (5..=400).map(|k| k as f64 * 0.01).collect();
        let track = track_p0_branches(n, &grid, &Kernel::Approx).unwrap();
        assert!(!track.crossings.is_empty());
        for &rc in &track.crossings {
            let b = beat_frequency(n, rc, &Kernel::Approx).unwrap();
            assert!(
                b.omega_r < 1e-6 && b.crossing,
                "N={n} r={rc}: {}",
                b.omega_r
            );
        }
    }
}

#[test]
fn single_mode_is_a_single_pole() {
    let spec = spectrum(&Config::ring(9, 0.7).unwrap(), &Kernel::Approx).unwrap();
    let times = time_grid(8.0, 33);
    for m in &spec.modes {
        let traj = propagate(&spec, &m.normalized_state(), &times).unwrap();
        for (t, s) in times.iter().zip(&traj.survival) {
            assert!((s - (-m.rate * t).exp()).abs() < 1e-12);
        }
    }
}

fn random_state(n: usize, seed: &[f64]) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(seed[2 * i % seed.len()], seed[(2 * i + 1) % seed.len()]))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter().map(|z| z / norm).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn survival_never_increases(
        n in 2usize..=20,
        r in 0.1f64..3.0,
        center in any::<bool>(),
        seed in prop::collection::vec(-1.0f64..1.0, 8..42),
    ) {
        let cfg = Config::new(n, r, center).unwrap();
        let spec = spectrum(&cfg, &Kernel::Approx).unwrap();
        prop_assume!(!spec.p0.is_some_and(|p| p.near_defective));
        let init = random_state(cfg.n_sites(), &seed);
        prop_assume!(init.iter().all(|z| z.norm().is_finite()));
        let times = time_grid(6.0, 61);
        let traj = propagate(&spec, &init, &times).unwrap();
        prop_assert!((traj.survival[0] - 1.0).abs() < 1e-10);
        for w in traj.survival.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-10, "{} > {}", w[1], w[0]);
        }
    }

    #[test]
    fn propagation_is_linear(
        n in 2usize..=12,
        r in 0.1f64..3.0,
        center in any::<bool>(),
        a in prop::collection::vec(-1.0f64..1.0, 26),
        b in prop::collection::vec(-1.0f64..1.0, 26),
        alpha in (-2.0f64..2.0, -2.0f64..2.0),
        beta in (-2.0f64..2.0, -2.0f64..2.0),
    ) {
        let cfg = Config::new(n, r, center).unwrap();
        let spec = spectrum(&cfg, &Kernel::Approx).unwrap();
        prop_assume!(!spec.p0.is_some_and(|p| p.near_defective));
        let sites = cfg.n_sites();
        let va: Vec<Complex64> = (0..sites).map(|i| Complex64::new(a[2 * i], a[2 * i + 1])).collect();
        let vb: Vec<Complex64> = (0..sites).map(|i| Complex64::new(b[2 * i], b[2 * i + 1])).collect();
        let (al, be) = (Complex64::new(alpha.0, alpha.1), Complex64::new(beta.0, beta.1));
        let mix: Vec<Complex64> = va.iter().zip(&vb).map(|(x, y)| al * x + be * y).collect();
        let times = [0.0, 0.3, 1.7, 4.0];
        let ta = propagate_unchecked(&spec, &va, &times).unwrap();
        let tb = propagate_unchecked(&spec, &vb, &times).unwrap();
        let tm = propagate_unchecked(&spec, &mix, &times).unwrap();
        for k in 0..times.len() {
            for i in 0..sites {
                let want = al * ta.site_amplitudes[k][i] + be * tb.site_amplitudes[k][i];
                prop_assert!((tm.site_amplitudes[k][i] - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn outer_modes_never_populate_the_center(n in 2usize..=16, r in 0.1f64..3.0, p in 1usize..16) {
        prop_assume!(p < n);
        let spec = spectrum(&Config::centered(n, r).unwrap(), &Kernel::Approx).unwrap();
        let init = spec.mode(ModeLabel::P(p)).unwrap().normalized_state();
        let traj = propagate(&spec, &init, &time_grid(5.0, 21)).unwrap();
        for amps in &traj.site_amplitudes {
            prop_assert!(amps[n].norm() < 1e-15);
        }
    }
}
