//! One function per experiment: ensemble run, verdicts and output tables.

use fracsync_core::fou::tail_steps;
use fracsync_core::noise::estimate_holder_exponent;
use fracsync_core::rde::CoupledConfig;
use fracsync_core::stats::{covariance, median, quantile};
use fracsync_core::sync::{
    averaged_limit_sweep, contraction_test, coupled_contraction_eigs, nonincreasing, pullback_attractor_estimate,
    strictly_decreasing, sync_gap_sweep, SyncReport,
};
use fracsync_core::{
    ergodic_average, equivalence_harness, fbm_covariance, fou_stationary_on, run_trials, CoupledState, FbmSampler,
    HarnessOptions, NoiseChannel, NoiseFactory, Result, RngSeed, TimeGrid, Verdict,
};
use serde_json::json;

use crate::config::{Experiment, ExperimentConfig};

/// Pass thresholds.
pub mod tolerance {
    /// Max |empirical - exact| covariance over the probe pairs.
    pub const COVARIANCE: f64 = 0.02;
    /// Band around `2H` for the median variogram slope.
    pub const VARIOGRAM_SLOPE: f64 = 0.1;
    /// Ensemble mean of `|(1/T) ∫₀ᵀ O|`.
    pub const ERGODIC_MEAN: f64 = 0.05;
    /// Median of distance / envelope.
    pub const EQUIVALENCE_RATIO: f64 = 1.0;
    /// No path may exceed this multiple of its envelope.
    pub const EQUIVALENCE_HARD_RATIO: f64 = 3.0;
    /// Median pullback diameter from the earliest start.
    pub const PULLBACK_DIAMETER: f64 = 1e-3;
    /// `gap(κ_max) <= gap(κ_min) * GAP_REDUCTION`.
    pub const GAP_REDUCTION: f64 = 0.1;
    /// Relative excess over the matrix-exponential comparison bound.
    pub const COMPARISON: f64 = 1e-6;
}

/// Probe pairs as fractions of the grid length.
const PROBE_FRACTIONS: [(f64, f64); 10] = [
    (1.0 / 64.0, 1.0 / 64.0),
    (1.0 / 16.0, 15.0 / 16.0),
    (1.0 / 8.0, 1.0 / 8.0),
    (1.0 / 4.0, 3.0 / 4.0),
    (3.0 / 8.0, 5.0 / 8.0),
    (1.0 / 2.0, 1.0 / 2.0),
    (1.0 / 2.0, 1.0),
    (3.0 / 4.0, 7.0 / 8.0),
    (15.0 / 16.0, 5.0 / 16.0),
    (1.0, 1.0),
];

/// Grid index pairs probed by the covariance check.
pub fn probe_pairs(n: usize) -> Vec<(usize, usize)> {
    let at = |q: f64| ((q * n as f64).round() as usize).clamp(0, n);
    PROBE_FRACTIONS.iter().map(|&(a, b)| (at(a), at(b))).collect()
}

/// A CSV table; `kappa` goes into the file name.
#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub kappa: Option<f64>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(name: &str, kappa: Option<f64>, header: &[&str], rows: Vec<Vec<f64>>) -> Self {
        Self {
            name: name.into(),
            kappa,
            header: header.iter().map(|s| s.to_string()).collect(),
            rows,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub verdicts: Vec<Verdict>,
    pub tables: Vec<Table>,
}

fn verdict(name: String, params: serde_json::Value, statistic: f64, tolerance: f64, pass: bool) -> Verdict {
    Verdict {
        experiment: name,
        params,
        statistic,
        tolerance,
        pass,
    }
}

pub fn execute(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    match cfg.experiment {
        Experiment::GenerateFbm => generate_fbm(cfg),
        Experiment::Fou => fou(cfg),
        Experiment::Equivalence => equivalence(cfg),
        Experiment::Contraction => contraction(cfg),
        Experiment::Pullback => pullback(cfg),
        Experiment::SyncSweep => coupled(cfg, &[Part::Gap]),
        Experiment::AveragedSweep => coupled(cfg, &[Part::Averaged]),
        Experiment::EigenComparison => coupled(cfg, &[Part::Eigen]),
        Experiment::CaseMultiplicative | Experiment::CaseMixed => coupled(cfg, &[Part::Gap, Part::Averaged, Part::Eigen]),
    }
}

fn base_params(cfg: &ExperimentConfig) -> serde_json::Value {
    json!({
        "seed": cfg.seed,
        "trials": cfg.trials,
        "grid": cfg.grid,
        "h1": cfg.h1().value(),
        "h2": cfg.h2().value(),
    })
}

fn with(mut base: serde_json::Value, extra: serde_json::Value) -> serde_json::Value {
    if let (Some(b), serde_json::Value::Object(e)) = (base.as_object_mut(), extra) {
        b.extend(e);
    }
    base
}

fn generate_fbm(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let grid = cfg.window();
    let hurst = cfg.h1();
    let sampler = FbmSampler::new(grid, hurst)?;
    let paths = run_trials(cfg.trials, |k| Ok(sampler.sample(RngSeed::new(cfg.seed, k as u64))))?;
    let name = cfg.experiment.name();
    let mut verdicts = Vec::new();
    let mut tables = Vec::new();

    let shown = paths.len().min(8);
    let mut header = vec!["t".to_string()];
    header.extend((0..shown).map(|k| format!("path{k}")));
    tables.push(Table {
        name: "paths".into(),
        kappa: None,
        header,
        rows: (0..grid.len())
            .map(|i| std::iter::once(grid.point(i)).chain(paths[..shown].iter().map(|p| p.value(i))).collect())
            .collect(),
    });

    if paths.len() >= 2 {
        let mut rows = Vec::new();
        let mut worst: f64 = 0.0;
        for (i, j) in probe_pairs(grid.n()) {
            let xi: Vec<f64> = paths.iter().map(|p| p.value(i)).collect();
            let xj: Vec<f64> = paths.iter().map(|p| p.value(j)).collect();
            let emp = covariance(&xi, &xj);
            let exact = fbm_covariance(grid.point(i), grid.point(j), hurst);
            worst = worst.max((emp - exact).abs());
            rows.push(vec![grid.point(i), grid.point(j), emp, exact]);
        }
        tables.push(Table::new("covariance", None, &["t", "s", "empirical", "exact"], rows));
        verdicts.push(verdict(
            format!("{name}/covariance"),
            with(base_params(cfg), json!({"probe_pairs": probe_pairs(grid.n())})),
            worst,
            tolerance::COVARIANCE,
            worst < tolerance::COVARIANCE,
        ));
    }

    if grid.n() >= fracsync_core::noise::regularity::MIN_VARIOGRAM_STEPS {
        let slopes = run_trials(paths.len(), |k| Ok(estimate_holder_exponent(&paths[k])?.slope))?;
        let target = 2.0 * hurst.value();
        let m = median(&slopes);
        tables.push(Table::new(
            "variogram",
            None,
            &["trial", "slope"],
            slopes.iter().enumerate().map(|(k, &s)| vec![k as f64, s]).collect(),
        ));
        verdicts.push(verdict(
            format!("{name}/variogram"),
            with(base_params(cfg), json!({"target_slope": target, "median_slope": m})),
            (m - target).abs(),
            tolerance::VARIOGRAM_SLOPE,
            (m - target).abs() <= tolerance::VARIOGRAM_SLOPE,
        ));
    }
    Ok(ExperimentOutput { verdicts, tables })
}

fn fou(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let window = cfg.window();
    let hurst = cfg.h1();
    let factory = NoiseFactory::new(window, hurst, hurst, cfg.fou, cfg.seed)?;
    let t = window.t1();
    let runs = run_trials(cfg.trials, |k| {
        let noise = factory.noise(k as u64, 0);
        let o = fou_stationary_on(&noise, &window, &cfg.fou)?.path;
        let avg = ergodic_average(&o, t)?;
        Ok((avg, if k == 0 { Some((noise, o)) } else { None }))
    })?;
    let avgs: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let stat = avgs.iter().map(|a| a.abs()).sum::<f64>() / avgs.len() as f64;
    let (noise, o) = runs[0].1.clone().expect("trial 0 keeps its path");
    let lo = noise.grid().locate(&window)?;
    let tables = vec![
        Table::new(
            "path",
            None,
            &["t", "fbm", "fou"],
            (0..window.len()).map(|i| vec![window.point(i), noise.value(lo + i), o.value(i)]).collect(),
        ),
        Table::new(
            "ergodic",
            None,
            &["trial", "average"],
            avgs.iter().enumerate().map(|(k, &a)| vec![k as f64, a]).collect(),
        ),
    ];
    let verdicts = vec![verdict(
        format!("{}/ergodic", cfg.experiment.name()),
        with(base_params(cfg), json!({"horizon": t, "nu": cfg.fou.nu})),
        stat,
        tolerance::ERGODIC_MEAN,
        stat < tolerance::ERGODIC_MEAN,
    )];
    Ok(ExperimentOutput { verdicts, tables })
}

fn linear_channel(cfg: &ExperimentConfig) -> fracsync_core::LinearNoiseCoeffs {
    match &cfg.noise.channel1 {
        NoiseChannel::Linear(c) => c.clone(),
        NoiseChannel::Additive { .. } => unreachable!("validated as linear"),
    }
}

fn equivalence(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let window = cfg.window();
    let half = 0.5 * window.step();
    let tail = tail_steps(half, cfg.fou.tail_length);
    let noise_grid = TimeGrid::with_step(window.t0() - tail as f64 * half, half, 2 * window.n() + tail)?;
    let sampler = FbmSampler::new(noise_grid, cfg.h1())?;
    let drift = cfg.drift.f.build()?;
    let coeffs = linear_channel(cfg);
    let opts = HarnessOptions {
        alpha: cfg.equivalence.alpha,
        fou: cfg.fou,
        ..HarnessOptions::default()
    };
    let reports = run_trials(cfg.trials, |k| {
        let noise = sampler.sample(RngSeed::new(cfg.seed, k as u64));
        equivalence_harness(&drift, &coeffs, &noise, &cfg.initial.x0, &window, &opts)
    })?;
    let ratios: Vec<f64> = reports.iter().map(|r| r.ratio).collect();
    let orders: Vec<f64> = reports.iter().map(|r| r.refinement_order).filter(|o| o.is_finite()).collect();
    let (m, worst) = (median(&ratios), quantile(&ratios, 1.0));
    let tables = vec![Table::new(
        "distances",
        None,
        &["trial", "sup_distance", "fine_sup_distance", "self_gap", "envelope"],
        reports
            .iter()
            .enumerate()
            .map(|(k, r)| vec![k as f64, r.sup_distance, r.fine_sup_distance, r.self_gap, r.envelope])
            .collect(),
    )];
    let verdicts = vec![verdict(
        format!("{}/conjugacy", cfg.experiment.name()),
        with(
            base_params(cfg),
            json!({
                "a": coeffs.a(),
                "b": coeffs.b(),
                "drift": cfg.drift.f,
                "alpha": cfg.equivalence.alpha,
                "max_ratio": worst,
                "hard_ratio": tolerance::EQUIVALENCE_HARD_RATIO,
                "median_refinement_order": median(&orders),
            }),
        ),
        m,
        tolerance::EQUIVALENCE_RATIO,
        m <= tolerance::EQUIVALENCE_RATIO && worst <= tolerance::EQUIVALENCE_HARD_RATIO,
    )];
    Ok(ExperimentOutput { verdicts, tables })
}

fn contraction(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let window = cfg.window();
    let hurst = cfg.h1();
    let factory = NoiseFactory::new(window, hurst, hurst, cfg.fou, cfg.seed)?;
    let drift = cfg.drift.f.build()?;
    let pairs = vec![(cfg.initial.x0.clone(), cfg.initial.y0.clone())];
    let reports = run_trials(cfg.trials, |k| {
        let noise = factory.noise(k as u64, 0);
        let o = fou_stationary_on(&noise, &window, &cfg.fou)?.path;
        contraction_test(&drift, &cfg.noise.channel1, &o, &pairs, &window)
    })?;
    let rates: Vec<f64> = reports.iter().map(|r| r.fitted_rate.expect("contraction reports a rate")).collect();
    let bounds: Vec<f64> = reports.iter().map(|r| r.rate_bound.expect("contraction reports a bound")).collect();
    let l = drift.dissipativity_l();
    let m = median(&rates);
    let tables = vec![
        Table::new(
            "rates",
            None,
            &["trial", "fitted_rate", "rate_bound"],
            rates.iter().zip(&bounds).enumerate().map(|(k, (r, b))| vec![k as f64, *r, *b]).collect(),
        ),
        Table::new("gap", None, &["t", "gap_squared"], reports[0].gap_trajectory.iter().map(|&(t, g)| vec![t, g]).collect()),
    ];
    let verdicts = vec![verdict(
        format!("{}/rate", cfg.experiment.name()),
        with(base_params(cfg), json!({"dissipativity": l, "drift": cfg.drift.f, "median_rate_bound": median(&bounds)})),
        m,
        -l,
        m <= -l,
    )];
    Ok(ExperimentOutput { verdicts, tables })
}

fn pullback(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let window = cfg.window();
    let hurst = cfg.h1();
    let factory = NoiseFactory::new(window, hurst, hurst, cfg.fou, cfg.seed)?;
    let drift = cfg.drift.f.build()?;
    let starts = &cfg.pullback.start_times;
    let reports = run_trials(cfg.trials, |k| {
        let noise = factory.noise(k as u64, 0);
        let o = fou_stationary_on(&noise, &window, &cfg.fou)?.path;
        pullback_attractor_estimate(&drift, &cfg.noise.channel1, &o, starts, cfg.pullback.radius0)
    })?;
    // latest start first
    let mut order: Vec<usize> = (0..starts.len()).collect();
    order.sort_by(|&a, &b| starts[b].total_cmp(&starts[a]));
    let medians: Vec<f64> = order
        .iter()
        .map(|&j| median(&reports.iter().map(|r| r.diameters[j]).collect::<Vec<_>>()))
        .collect();
    let last = *medians.last().expect("at least one start time");
    let strict = strictly_decreasing(&medians);
    let mut header = vec!["trial".to_string()];
    header.extend(order.iter().map(|&j| format!("diameter_from_{}", starts[j])));
    let tables = vec![
        Table::new(
            "medians",
            None,
            &["start_time", "median_diameter"],
            order.iter().zip(&medians).map(|(&j, &m)| vec![starts[j], m]).collect(),
        ),
        Table {
            name: "diameters".into(),
            kappa: None,
            header,
            rows: reports
                .iter()
                .enumerate()
                .map(|(k, r)| std::iter::once(k as f64).chain(order.iter().map(|&j| r.diameters[j])).collect())
                .collect(),
        },
    ];
    let verdicts = vec![verdict(
        format!("{}/singleton", cfg.experiment.name()),
        with(
            base_params(cfg),
            json!({
                "start_times": order.iter().map(|&j| starts[j]).collect::<Vec<_>>(),
                "radius0": cfg.pullback.radius0,
                "median_diameters": medians,
                "strictly_decreasing": strict,
            }),
        ),
        last,
        tolerance::PULLBACK_DIAMETER,
        strict && last < tolerance::PULLBACK_DIAMETER,
    )];
    Ok(ExperimentOutput { verdicts, tables })
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Part {
    Gap,
    Averaged,
    Eigen,
}

/// Per-trial reports of one coupled check, indexed `[trial][kappa]`.
type Reports = Vec<Vec<SyncReport>>;

fn coupled_config(cfg: &ExperimentConfig) -> Result<CoupledConfig> {
    CoupledConfig::new(
        cfg.noise.channel1.clone(),
        cfg.channel2().clone(),
        cfg.drift.f.build()?,
        cfg.drift_g().build()?,
        cfg.h1(),
        cfg.h2(),
        cfg.kappas[0],
    )
}

fn column(reports: &Reports, j: usize, f: impl Fn(&SyncReport) -> f64) -> Vec<f64> {
    reports.iter().map(|r| f(&r[j])).collect()
}

fn coupled(cfg: &ExperimentConfig, parts: &[Part]) -> Result<ExperimentOutput> {
    let window = cfg.window();
    let base = coupled_config(cfg)?;
    let factory = NoiseFactory::new(window, cfg.h1(), cfg.h2(), cfg.fou, cfg.seed)?;
    let state0 = CoupledState::new(cfg.initial.x0.clone(), cfg.initial.y0.clone());
    let other = CoupledState::new(
        state0.u.iter().map(|x| x + 1.0).collect(),
        state0.v.iter().map(|x| x - 1.0).collect(),
    );
    let kappas = &cfg.kappas;
    let per_trial = run_trials(cfg.trials, |k| {
        let t = factory.trial(k as u64)?;
        let mut out: Vec<Vec<SyncReport>> = Vec::new();
        for part in parts {
            out.push(match part {
                Part::Gap => sync_gap_sweep(&base, kappas, &t.fou1, &t.fou2, &window, &state0)?,
                Part::Averaged => averaged_limit_sweep(&base, kappas, &t.fou1, &t.fou2, &window, &state0)?,
                Part::Eigen => kappas
                    .iter()
                    .map(|&kappa| coupled_contraction_eigs(&base.with_kappa(kappa), &t.fou1, &t.fou2, &window, (&state0, &other)))
                    .collect::<Result<Vec<_>>>()?,
            });
        }
        Ok(out)
    })?;
    let name = cfg.experiment.name();
    let params = with(
        base_params(cfg),
        json!({
            "kappas": kappas,
            "channel1": cfg.noise.channel1,
            "channel2": cfg.channel2(),
            "drift_f": cfg.drift.f,
            "drift_g": cfg.drift_g(),
            "x0": cfg.initial.x0,
            "y0": cfg.initial.y0,
        }),
    );
    let mut verdicts = Vec::new();
    let mut tables = Vec::new();
    for (p, part) in parts.iter().enumerate() {
        let reports: Reports = per_trial.iter().map(|t| t[p].clone()).collect();
        match part {
            Part::Gap => gap_checks(name, &params, kappas, &reports, &mut verdicts, &mut tables),
            Part::Averaged => averaged_checks(name, &params, kappas, &reports, &mut verdicts, &mut tables),
            Part::Eigen => eigen_checks(name, &params, kappas, &window, base.dissipativity_l, &reports, &mut verdicts, &mut tables),
        }
    }
    Ok(ExperimentOutput { verdicts, tables })
}

fn trajectory_tables(label: &str, column_name: &str, kappas: &[f64], reports: &Reports, tables: &mut Vec<Table>) {
    for (j, &k) in kappas.iter().enumerate() {
        tables.push(Table::new(
            label,
            Some(k),
            &["t", column_name],
            reports[0][j].gap_trajectory.iter().map(|&(t, g)| vec![t, g]).collect(),
        ));
    }
}

fn gap_checks(
    name: &str,
    params: &serde_json::Value,
    kappas: &[f64],
    reports: &Reports,
    verdicts: &mut Vec<Verdict>,
    tables: &mut Vec<Table>,
) {
    let medians: Vec<f64> = (0..kappas.len())
        .map(|j| median(&column(reports, j, |r| r.steady_gap.expect("gap sweep reports a steady gap"))))
        .collect();
    let first = medians[0];
    let last = *medians.last().expect("nonempty kappas");
    let ratio = if first > 0.0 { last / first } else if last == 0.0 { 0.0 } else { f64::INFINITY };
    let monotone = nonincreasing(&medians);
    tables.push(Table::new(
        "gap-summary",
        None,
        &["kappa", "median_steady_gap"],
        kappas.iter().zip(&medians).map(|(&k, &m)| vec![k, m]).collect(),
    ));
    trajectory_tables("gap", "gap_squared", kappas, reports, tables);
    verdicts.push(verdict(
        format!("{name}/gap"),
        with(params.clone(), json!({"median_steady_gaps": medians, "nonincreasing": monotone})),
        ratio,
        tolerance::GAP_REDUCTION,
        monotone && ratio <= tolerance::GAP_REDUCTION,
    ));
}

fn averaged_checks(
    name: &str,
    params: &serde_json::Value,
    kappas: &[f64],
    reports: &Reports,
    verdicts: &mut Vec<Verdict>,
    tables: &mut Vec<Table>,
) {
    let medians: Vec<f64> = (0..kappas.len())
        .map(|j| median(&column(reports, j, |r| r.reference_distance.expect("averaged sweep reports a distance"))))
        .collect();
    let worst_step = medians
        .windows(2)
        .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { f64::INFINITY })
        .fold(0.0, f64::max);
    let strict = strictly_decreasing(&medians);
    tables.push(Table::new(
        "averaged-summary",
        None,
        &["kappa", "median_sup_distance"],
        kappas.iter().zip(&medians).map(|(&k, &m)| vec![k, m]).collect(),
    ));
    trajectory_tables("averaged", "distance", kappas, reports, tables);
    verdicts.push(verdict(
        format!("{name}/averaged"),
        with(params.clone(), json!({"median_sup_distances": medians})),
        worst_step,
        1.0,
        strict,
    ));
}

#[allow(clippy::too_many_arguments)]
fn eigen_checks(
    name: &str,
    params: &serde_json::Value,
    kappas: &[f64],
    window: &TimeGrid,
    l: f64,
    reports: &Reports,
    verdicts: &mut Vec<Verdict>,
    tables: &mut Vec<Table>,
) {
    let span = window.span();
    let mut eig_stat = f64::NEG_INFINITY;
    let mut onset_ok = true;
    let mut comparison = f64::NEG_INFINITY;
    let mut fundamental = f64::NEG_INFINITY;
    let mut summary = Vec::new();
    let mut per_kappa = Vec::new();
    for (j, &k) in kappas.iter().enumerate() {
        let finals = column(reports, j, |r| r.eigenvalue_bound.expect("eigen check reports a final eigenvalue"));
        let onsets = column(reports, j, |r| r.onset.unwrap_or(f64::INFINITY));
        let excess = column(reports, j, |r| r.comparison_excess.expect("eigen check reports an excess"));
        let fund = column(reports, j, |r| r.fundamental_excess.expect("eigen check reports an excess"));
        let median_final = median(&finals);
        let median_onset = median(&onsets);
        let found = onsets.iter().filter(|o| o.is_finite()).count();
        let exceeding = excess.iter().filter(|&&e| e > tolerance::COMPARISON).count();
        let max_excess = excess.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        eig_stat = eig_stat.max(median_final + l * span);
        onset_ok &= median_onset.is_finite();
        comparison = comparison.max(max_excess);
        fundamental = fundamental.max(fund.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        summary.push(vec![k, median_final, -l * span, found as f64 / finals.len() as f64, exceeding as f64, max_excess]);
        per_kappa.push(json!({
            "kappa": k,
            "median_final_eigenvalue": median_final,
            "median_onset": if median_onset.is_finite() { Some(median_onset) } else { None },
            "trials_with_onset": found,
            "trials_above_comparison_bound": exceeding,
            "max_comparison_excess": max_excess,
        }));
        let r = &reports[0][j];
        tables.push(Table::new(
            "eigen",
            Some(k),
            &["t", "max_eigenvalue", "bound", "gap_vector_sum"],
            r.eigen_trajectory
                .iter()
                .zip(&r.gap_trajectory)
                .map(|(&(t, e), &(_, g))| vec![t, e, -l * (t - window.t0()), g])
                .collect(),
        ));
    }
    tables.push(Table::new(
        "eigen-summary",
        None,
        &["kappa", "median_final_eigenvalue", "bound", "onset_fraction", "trials_above_bound", "max_excess"],
        summary,
    ));
    verdicts.push(verdict(
        format!("{name}/eigenvalue"),
        with(params.clone(), json!({"dissipativity": l, "per_kappa": per_kappa.clone(), "onset_found_in_median": onset_ok})),
        eig_stat,
        0.0,
        onset_ok && eig_stat <= 0.0,
    ));
    verdicts.push(verdict(
        format!("{name}/comparison"),
        with(
            params.clone(),
            json!({"per_kappa": per_kappa, "max_fundamental_solution_excess": fundamental}),
        ),
        comparison,
        tolerance::COMPARISON,
        comparison <= tolerance::COMPARISON,
    ));
}
