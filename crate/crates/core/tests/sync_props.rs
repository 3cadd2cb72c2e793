use fracsync_core::stats::median;
use fracsync_core::sync::*;
use fracsync_core::*;
use proptest::prelude::*;

fn lin(a: f64, b: f64) -> NoiseChannel {
    LinearNoiseCoeffs::new(a, vec![b]).unwrap().into()
}

fn factory(seed: u64, window: TimeGrid) -> NoiseFactory {
    NoiseFactory::new(window, HurstParameter::new(0.75).unwrap(), HurstParameter::new(0.6).unwrap(), FouConfig::default(), seed).unwrap()
}

fn affine_pair(c1: NoiseChannel, c2: NoiseChannel, kappa: f64) -> CoupledConfig {
    CoupledConfig::new(
        c1,
        c2,
        DriftSpec::affine(1.0, vec![1.0]).unwrap(),
        DriftSpec::affine(1.0, vec![-1.0]).unwrap(),
        HurstParameter::new(0.75).unwrap(),
        HurstParameter::new(0.6).unwrap(),
        kappa,
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    // the realized gap vector sits below the fundamental solution of the
    // linear comparison system on every noise path, up to the O(h²) error of
    // the two discretizations
    #[test]
    fn fundamental_comparison_holds(seed in any::<u64>(), kappa in 0.1f64..50.0, du in 0.1f64..3.0, dv in -3.0f64..3.0) {
        let window = TimeGrid::new(0.0, 10.0, 2560).unwrap();
        let t = factory(seed, window).trial(0).unwrap();
        let cfg = affine_pair(lin(1.0, 0.5), lin(0.5, -0.5), kappa);
        let a = CoupledState::new(vec![1.0], vec![-1.0]);
        let b = CoupledState::new(vec![1.0 + du], vec![-1.0 + dv]);
        let r = coupled_contraction_eigs(&cfg, &t.fou1, &t.fou2, &window, (&a, &b)).unwrap();
        prop_assert!(r.fundamental_excess.unwrap() <= 1e-4, "{:?}", r.fundamental_excess);
    }

    #[test]
    fn gap_is_nonincreasing_in_kappa(seed in any::<u64>()) {
        let window = TimeGrid::new(0.0, 20.0, 5120).unwrap();
        let t = factory(seed, window).trial(0).unwrap();
        let cfg = affine_pair(lin(1.0, 0.5), lin(0.5, -0.5), 1.0);
        let r = sync_gap_sweep(&cfg, &[1.0, 3.0, 10.0, 30.0, 100.0], &t.fou1, &t.fou2, &window, &CoupledState::new(vec![1.0], vec![-1.0])).unwrap();
        let gaps: Vec<f64> = r.iter().map(|x| x.steady_gap.unwrap()).collect();
        prop_assert!(nonincreasing(&gaps), "{gaps:?}");
    }
}

#[test]
fn symmetry_nulls_are_exact() {
    let window = TimeGrid::new(0.0, 10.0, 2560).unwrap();
    let t = factory(2, window).trial(0).unwrap();
    let c = lin(1.0, 0.5);
    let f = DriftSpec::cubic_dissipative();
    let hp = HurstParameter::new(0.75).unwrap();
    let cfg = CoupledConfig::new(c.clone(), c.clone(), f.clone(), f.clone(), hp, hp, 1.0).unwrap();
    let s = CoupledState::new(vec![0.7], vec![0.7]);
    let kappas = [1.0, 10.0, 100.0];
    for r in sync_gap_sweep(&cfg, &kappas, &t.fou1, &t.fou1, &window, &s).unwrap() {
        assert!(r.gap_trajectory.iter().all(|g| g.1 == 0.0));
        assert_eq!(r.steady_gap, Some(0.0));
    }
    for r in averaged_limit_sweep(&cfg, &kappas, &t.fou1, &t.fou1, &window, &s).unwrap() {
        assert_eq!(r.reference_distance, Some(0.0));
    }
    let suite = run_sync_suite(&cfg, &kappas, &t.fou1, &t.fou1, &window, &s).unwrap();
    assert!(suite.reconstruction_residual.iter().all(|&r| r == 0.0));
    let g = TimeGrid::new(-10.0, 0.0, 2560).unwrap();
    let o = factory(2, g).trial(0).unwrap().fou1;
    let p = pullback_attractor_estimate(&f, &c, &o, &[-5.0, -10.0], 0.0).unwrap();
    assert!(p.diameters.iter().all(|&d| d == 0.0));
}

#[test]
fn eigenvalue_bound_holds_in_median() {
    let window = TimeGrid::new(0.0, 20.0, 5120).unwrap();
    let f = factory(12, window);
    let cfg = affine_pair(lin(1.0, 0.5), lin(0.5, -0.5), 10.0);
    let a = CoupledState::new(vec![1.0], vec![-1.0]);
    let b = CoupledState::new(vec![2.0], vec![-2.0]);
    let finals = run_trials(30, |k| {
        let t = f.trial(k as u64)?;
        coupled_contraction_eigs(&cfg, &t.fou1, &t.fou2, &window, (&a, &b)).map(|r| r.eigenvalue_bound.unwrap())
    })
    .unwrap();
    assert!(median(&finals) <= -20.0, "{}", median(&finals));
}

#[test]
fn pullback_diameters_shrink_with_earlier_starts() {
    let g = TimeGrid::new(-20.0, 0.0, 5120).unwrap();
    let f = DriftSpec::affine(1.0, vec![1.0]).unwrap();
    let c = lin(0.5, 0.5);
    let fac = factory(6, g);
    let strict = (0..20)
        .filter(|&k| {
            let o = fac.trial(k).unwrap().fou1;
            pullback_attractor_estimate(&f, &c, &o, &[-5.0, -10.0, -20.0], 10.0).unwrap().strictly_decreasing
        })
        .count();
    assert!(strict >= 15, "{strict}/20");
}

#[test]
fn single_system_contracts() {
    let window = TimeGrid::new(0.0, 20.0, 5120).unwrap();
    let fac = factory(8, window);
    let f = DriftSpec::cubic_dissipative();
    let c = lin(1.0, 0.5);
    let pairs = vec![(vec![1.0], vec![-1.0])];
    let rates = run_trials(20, |k| contraction_test(&f, &c, &fac.trial(k as u64)?.fou1, &pairs, &window).map(|r| r.fitted_rate.unwrap())).unwrap();
    assert!(median(&rates) <= -1.0);
}

#[test]
fn special_cases_validate_their_channels() {
    let window = TimeGrid::new(0.0, 1.0, 64).unwrap();
    let o = SamplePath::zeros(window, 1);
    let s = CoupledState::new(vec![1.0], vec![-1.0]);
    let generic = affine_pair(lin(1.0, 0.5), lin(0.5, -0.5), 1.0);
    assert!(case_pure_multiplicative(&generic, &[1.0], &o, &o, &window, &s).is_err());
    assert!(case_mixed_noise(&generic, &[1.0], &o, &o, &window, &s).is_err());
    let mult = affine_pair(lin(1.0, 0.0), lin(0.5, 0.0), 1.0);
    assert!(case_pure_multiplicative(&mult, &[1.0], &o, &o, &window, &s).is_ok());
    let mixed = affine_pair(lin(1.0, 0.5), NoiseChannel::additive(vec![0.5]).unwrap(), 1.0);
    assert!(case_mixed_noise(&mixed, &[1.0], &o, &o, &window, &s).is_ok());
}
