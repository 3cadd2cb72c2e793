use fracsync_core::rde::{coupling_flow, integrate_channel};
use fracsync_core::stats::linear_fit;
use fracsync_core::*;
use proptest::prelude::*;

fn lin(a: f64, b: f64) -> NoiseChannel {
    LinearNoiseCoeffs::new(a, vec![b]).unwrap().into()
}

fn zero_drift() -> DriftSpec {
    DriftSpec::custom("zero", 1.0, 0.0, 1.0, |_, out| out.fill(0.0)).unwrap()
}

fn fou_pair(seed: u64, window: &TimeGrid) -> (SamplePath, SamplePath) {
    let hp = HurstParameter::new(0.7).unwrap();
    let f = NoiseFactory::new(*window, hp, hp, FouConfig::default(), seed).unwrap();
    let t = f.trial(0).unwrap();
    (t.fou1, t.fou2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coupling_flow_is_exact(u in -5.0f64..5.0, v in -5.0f64..5.0, kappa in 0.0f64..1e4, h in 1e-4f64..0.1) {
        let g = TimeGrid::with_step(0.0, h, 20).unwrap();
        let o = SamplePath::zeros(g, 1);
        let cfg = CoupledConfig::new(lin(1.0, 0.0), lin(1.0, 0.0), zero_drift(), zero_drift(),
            HurstParameter::new(0.7).unwrap(), HurstParameter::new(0.7).unwrap(), kappa).unwrap();
        let tr = integrate_coupled(&cfg, &o, &o, &CoupledState::new(vec![u], vec![v]), &g).unwrap();
        let q = (-2.0 * kappa * h).exp();
        for i in 0..20 {
            let (u0, v0, u1, v1) = (tr.u.value(i), tr.v.value(i), tr.u.value(i + 1), tr.v.value(i + 1));
            prop_assert!(((u1 + v1) - (u + v)).abs() <= 1e-12 * (1.0 + (u + v).abs()));
            prop_assert!(((u1 - v1) - q * (u0 - v0)).abs() <= 1e-12 * (1.0 + (u0 - v0).abs()));
        }
    }

    #[test]
    fn flow_composes(u in -5.0f64..5.0, v in -5.0f64..5.0, kappa in 0.0f64..100.0, tau in 0.0f64..0.5) {
        let (mut a, mut b) = (vec![u], vec![v]);
        coupling_flow(&mut a, &mut b, kappa, tau);
        coupling_flow(&mut a, &mut b, kappa, tau);
        let (mut c, mut d) = (vec![u], vec![v]);
        coupling_flow(&mut c, &mut d, kappa, 2.0 * tau);
        prop_assert!((a[0] - c[0]).abs() <= 1e-12 * (1.0 + u.abs() + v.abs()));
        prop_assert!((b[0] - d[0]).abs() <= 1e-12 * (1.0 + u.abs() + v.abs()));
    }
}

#[test]
fn zero_coupling_matches_independent_solves() {
    let window = TimeGrid::new(0.0, 10.0, 2560).unwrap();
    let (o1, o2) = fou_pair(3, &window);
    let (c1, c2) = (lin(1.0, 0.5), NoiseChannel::additive(vec![0.4]).unwrap());
    let f = DriftSpec::cubic_dissipative();
    let g = DriftSpec::affine(1.0, vec![-1.0]).unwrap();
    let hp = HurstParameter::new(0.7).unwrap();
    let cfg = CoupledConfig::new(c1.clone(), c2.clone(), f.clone(), g.clone(), hp, hp, 0.0).unwrap();
    let tr = integrate_coupled(&cfg, &o1, &o2, &CoupledState::new(vec![0.8], vec![-2.0]), &window).unwrap();
    let u = integrate_channel(&f, &c1, &o1, &[0.8], &window, RdeScheme::Heun).unwrap();
    let v = integrate_channel(&g, &c2, &o2, &[-2.0], &window, RdeScheme::Heun).unwrap();
    assert_eq!(tr.u.values(), u.values());
    assert_eq!(tr.v.values(), v.values());
}

#[test]
fn heun_is_second_order() {
    // smooth manufactured coefficient path and smooth drift
    let f = DriftSpec::affine(1.0, vec![0.5]).unwrap();
    let c = LinearNoiseCoeffs::new(0.8, vec![0.3]).unwrap();
    let run = |n: usize| {
        let g = TimeGrid::new(0.0, 2.0, n).unwrap();
        let o = SamplePath::from_fn(g, |t| (2.0 * t).sin());
        integrate_rde(&f, &c, &o, &[1.0], &g).unwrap().values()[n]
    };
    let reference = run(1 << 16);
    let ns = [64usize, 128, 256, 512];
    let (hs, es): (Vec<f64>, Vec<f64>) = ns.iter().map(|&n| ((2.0 / n as f64).ln(), (run(n) - reference).abs().ln())).unzip();
    let slope = linear_fit(&hs, &es).slope;
    assert!((slope - 2.0).abs() <= 0.2, "slope {slope}");
}

#[test]
fn averaged_system_of_identical_pair_is_single_solve() {
    let window = TimeGrid::new(0.0, 5.0, 1280).unwrap();
    let (o, _) = fou_pair(5, &window);
    let c = lin(1.0, 0.5);
    let f = DriftSpec::cubic_dissipative();
    let hp = HurstParameter::new(0.7).unwrap();
    let cfg = CoupledConfig::new(c.clone(), c.clone(), f.clone(), f.clone(), hp, hp, 1.0).unwrap();
    let w = integrate_averaged(&cfg, &o, &o, &[1.2], &window).unwrap();
    let u = integrate_channel(&f, &c, &o, &[1.2], &window, RdeScheme::Heun).unwrap();
    assert_eq!(w.values(), u.values());
}

#[test]
fn instability_is_reported() {
    let window = TimeGrid::new(0.0, 10.0, 10).unwrap();
    let o = SamplePath::zeros(window, 1);
    let f = DriftSpec::cubic_dissipative();
    let r = integrate_rde(&f, &LinearNoiseCoeffs::new(1.0, vec![0.0]).unwrap(), &o, &[50.0], &window);
    assert!(matches!(r, Err(Error::StepExplosion { .. })));
}
