use plap_ensemble::*;
use plap_integrator::{simulate, SimConfig};
use plap_noise::{NoiseSpec, ThetaLevel, ThetaSpec};
use plap_operator::PExponent;
use plap_spectral::{random_band_limited, Grid, SpectralField};

fn grid() -> Grid {
    Grid::new(2, 16).unwrap()
}

fn p3() -> PExponent {
    PExponent::new(3.0, 2).unwrap()
}

fn constant_noise(kappa: f64) -> NoiseSpec {
    NoiseSpec::new(kappa, ThetaSpec::Constant(ThetaLevel::uniform(2, &[1, 2]).unwrap())).unwrap()
}

fn doubling_noise(kappa: f64, mu0: f64) -> NoiseSpec {
    let levels = [vec![1], vec![1, 2], vec![1, 2, 4]].iter().map(|s| ThetaLevel::uniform(2, s).unwrap()).collect();
    NoiseSpec::new(kappa, ThetaSpec::step_doubling(mu0, levels).unwrap()).unwrap()
}

fn cfg(noise: NoiseSpec, amp: f64, dt: f64, horizon: f64) -> SimConfig {
    let u0 = random_band_limited(grid(), 3, 1.0, 4).with_l2_norm(amp);
    SimConfig::new(grid(), p3(), noise, u0, dt, horizon, 17).unwrap()
}

#[test]
fn estimate_matches_textbook_formulas() {
    let e = Estimate::from_samples(&[1.0, 2.0, 3.0, 6.0]);
    assert_eq!(e.mean, 3.0);
    // sample variance 14/3, over 4 samples
    assert!((e.std_err - (14.0f64 / 12.0).sqrt()).abs() < 1e-15);
    assert_eq!(e.upper(), 3.0 + 3.0 * e.std_err);
    assert_eq!(Estimate::from_samples(&[2.5]).std_err, 0.0);
}

#[test]
fn noise_off_paths_are_identical() {
    let s = run_ensemble(&cfg(NoiseSpec::off(2), 0.5, 1e-3, 0.1), 5, 0.02).unwrap();
    assert_eq!(s.len(), 5);
    assert_eq!(s.schedule, Schedule::Off);
    assert!(s.energy.iter().chain(&s.dissipation).all(|e| e.std_err == 0.0));
    assert!(s.paths.windows(2).all(|w| w[0].ledger == w[1].ledger));
    assert_eq!(s.paths.iter().map(|r| r.path).collect::<Vec<_>>(), vec![0, 1, 2, 3, 4]);
}

#[test]
fn rejects_bad_requests() {
    let c = cfg(constant_noise(0.1), 0.5, 1e-3, 0.1);
    assert_eq!(run_ensemble(&c, 1, 0.02), Err(EnsembleError::TooFewPaths(1)));
    assert!(matches!(run_ensemble(&c, 2, 0.0125), Err(EnsembleError::IntervalLength { .. })));
    assert_eq!(run_ensemble(&c, 2, 0.2), Err(EnsembleError::NoInterval(0.2)));
}

#[test]
fn same_seed_same_summary_and_new_seed_differs() {
    let c = cfg(constant_noise(0.2), 0.5, 1e-3, 0.06);
    let a = run_ensemble(&c, 4, 0.02).unwrap();
    let b = run_ensemble(&c, 4, 0.02).unwrap();
    assert_eq!(a, b);
    let other = SimConfig::new(grid(), p3(), constant_noise(0.2), c.u0().clone(), 1e-3, 0.06, 18).unwrap();
    assert_ne!(run_ensemble(&other, 4, 0.02).unwrap().energy, a.energy);
}

#[test]
fn thread_count_does_not_change_the_summary() {
    let c = cfg(constant_noise(0.2), 0.5, 1e-3, 0.04);
    let on = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| run_ensemble(&c, 6, 0.02).unwrap())
    };
    assert_eq!(on(1), on(3));
}

#[test]
fn standard_error_shrinks_like_root_m() {
    let c = cfg(constant_noise(0.3), 0.5, 1e-3, 0.05);
    let se = |m: usize| run_ensemble(&c, m, 0.05).unwrap().energy[1].std_err;
    let ratio = se(128) / se(32);
    // 1/2 expected; the spread of the standard-error estimate itself is ~10%
    assert!((0.35..0.65).contains(&ratio), "{ratio}");
}

#[test]
fn labels_at_the_extremes() {
    let s = run_ensemble(&cfg(constant_noise(0.2), 0.5, 1e-3, 0.06), 6, 0.02).unwrap();
    for n in 0..s.intervals() {
        assert_eq!(classify_interval(&s, n, 0.0).case, Case::Case1);
        // far above the energy budget ‖u₀‖²/(2t₀) per unit threshold
        assert_eq!(classify_interval(&s, n, 1e12).case, Case::Case2);
    }
}

#[test]
fn labels_match_recomputation_from_raw_ledgers() {
    let c = cfg(constant_noise(0.3), 0.5, 1e-3, 0.06);
    let paths = 8;
    let s = run_ensemble(&c, paths, 0.02).unwrap();
    let ledgers: Vec<_> = (0..paths as u64).map(|i| simulate(&c.clone().with_path(i), 1000).unwrap().ledger).collect();
    let m = paths as f64;
    for n in 0..3 {
        let (a, b) = (n * 20, (n + 1) * 20);
        let mean_e = ledgers.iter().map(|l| l.energy()[a]).sum::<f64>() / m;
        let mean_d = ledgers.iter().map(|l| 0.5 * (l.dissipation()[b] - l.dissipation()[a])).sum::<f64>() / m;
        let floor = mean_d / (0.02 * mean_e.powf(1.5));
        let below = classify_interval(&s, n, 0.5 * floor);
        let above = classify_interval(&s, n, 2.0 * floor);
        assert_eq!(below.case, Case::Case1, "{below:?}");
        assert_eq!(above.case, Case::Case2, "{above:?}");
        assert!((below.dissipation - mean_d).abs() <= 1e-14 * mean_d);
        assert!((below.threshold - 0.5 * floor * 0.02 * mean_e.powf(1.5)).abs() <= 1e-12 * below.threshold);
    }
}

#[test]
fn zero_mu_decay_always_passes() {
    let s = run_ensemble(&cfg(constant_noise(0.2), 0.5, 1e-3, 0.06), 6, 0.02).unwrap();
    for c in check_avg_decay(&s, 0.0) {
        assert_eq!(c.cumulative, s.u0_norm.powi(2));
        assert!(c.cumulative_holds && c.one_step_holds, "{c:?}");
    }
}

#[test]
fn case1_intervals_pass_the_one_step_bound() {
    let s = run_ensemble(&cfg(constant_noise(0.3), 0.5, 1e-3, 0.08), 16, 0.02).unwrap();
    let mut seen = 0;
    for scale in [0.1, 0.3, 0.6, 0.9] {
        let floor = s.dissipation[0].mean / (s.t0 * s.energy[0].mean.powf(1.5));
        for c in check_avg_decay(&s, scale * floor) {
            if c.case == Case::Case1 {
                seen += 1;
                assert!(c.one_step_holds, "{c:?}");
            }
        }
    }
    assert!(seen > 0);
}

#[test]
fn pathwise_rejects_constant_schedule_and_zero_data() {
    let s = run_ensemble(&cfg(constant_noise(0.2), 0.5, 1e-2, 1.0), 2, 0.5).unwrap();
    assert_eq!(pathwise_stats(&s, 1.0), Err(EnsembleError::Schedule));
    let zero =
        SimConfig::new(grid(), p3(), doubling_noise(0.1, 1.0), SpectralField::zeros(grid()), 1e-2, 1.0, 1).unwrap();
    let z = run_ensemble(&zero, 2, 1.0).unwrap();
    assert_eq!(pathwise_stats(&z, 1.0), Err(EnsembleError::ZeroInitial));
}

#[test]
fn noise_off_with_large_mu0_never_escapes() {
    let s = run_ensemble(&cfg(NoiseSpec::off(2), 1.0, 1e-3, 4.0), 3, 1.0).unwrap();
    let st = pathwise_stats(&s, 1e4).unwrap();
    assert!(st.events.iter().all(|e| e.freq == 1.0), "{:?}", st.events);
    assert_eq!(st.censored, 3);
    assert_eq!(st.histogram[3], 3);
    assert!(replay_pathwise(&s, &st).violations.is_empty());
}

#[test]
fn enhanced_run_obeys_its_own_envelope() {
    let s = run_ensemble(&cfg(doubling_noise(0.05, 3000.0), 1.0, 1e-3, 4.0), 12, 1.0).unwrap();
    let st = pathwise_stats(&s, 3000.0).unwrap();
    assert!(st.chebyshev_consistent(), "{:?}", st.events);
    assert!(st.tail_shrinks(), "{:?}", st.tail_sums);
    assert_eq!(st.ln_random_constants.len(), 12);
    for (ln_c, &k) in st.ln_random_constants.iter().zip(&st.last_event) {
        assert!((ln_c - 3000.0 * (1.0 + k as f64)).abs() <= 1e-12 * ln_c);
    }
    assert!(st.moments.iter().all(|m| m.estimate.mean >= 1.0));
    assert_eq!(st.moments.iter().filter(|m| m.below_limit).count(), 3);
    let replay = replay_pathwise(&s, &st);
    assert_eq!(replay.checked, 12 * 4001);
    assert!(replay.violations.is_empty(), "{:?}", &replay.violations[..1]);
}

#[test]
fn envelope_edge_cases() {
    let (mu0, p, u0): (f64, f64, f64) = (2.0, 3.0, 0.8);
    // C = e^{μ₀(p-2)} at t = 0 leaves room above ‖u₀‖
    let c = (mu0 * (p - 2.0)).exp();
    assert!(pathwise_envelope(0.0, mu0, p, u0, c) >= u0);
    // once (p-2)μ₀t = ln C the envelope is ‖u₀‖ exactly
    assert!((pathwise_envelope(1.0, mu0, p, u0, c) - u0).abs() < 1e-15);
    assert!(pathwise_envelope(0.0, mu0, p, u0, 1e6) == f64::INFINITY);
    let t = 3.0;
    let bound = pathwise_envelope(t, mu0, p, u0, c);
    let (lhs, rhs) = plap_bounds::pathwise_inequality(bound, t, u0, c, mu0, p);
    assert!((lhs - rhs).abs() < 1e-12 * rhs);
}
