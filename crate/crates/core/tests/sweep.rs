//! Window-length sweeps: advantage ratios, decoupling-count staircases,
//! thermalization-time curves and overlap datasets.

mod common;

use azd_otto::{
    markov_baseline, markovian_rate, overlap_dataset, qa_sweep, run_limit_cycle, sinc_kernel, thermalization_time_sweep,
    Error, Mode, ModulationSchedule, Observable, OttoConfig, QuadratureConfig, SpectralModel, SweepRow, SweepSpec,
    ThermalizationCriterion,
};

fn engine_spec() -> SweepSpec {
    common::run_config("engine_lorentzian.toml").sweep_spec().unwrap()
}

fn converged(rows: &[SweepRow]) -> Vec<&SweepRow> {
    rows.iter().filter(|r| r.converged).collect()
}

#[test]
fn engine_sweep_structure() {
    let q = QuadratureConfig::default();
    let spec = engine_spec();
    let rows = qa_sweep(&spec, &q).unwrap();
    assert_eq!(rows.len(), spec.tau_cp_grid.len());
    assert!(rows.iter().zip(&spec.tau_cp_grid).all(|(r, t)| r.tau_cp == *t));

    let baseline = markov_baseline(&spec.base).unwrap().power_abs;
    let ok = converged(&rows);
    assert!(ok.len() > rows.len() / 2);
    for r in &ok {
        assert_eq!(r.baseline, Some(baseline));
        assert_eq!(r.qa_ratio, Some(r.value.unwrap() / baseline));
    }
    assert!(ok.iter().any(|r| r.qa_ratio.unwrap() > 1.0));

    // Decoupling counts only fall as the windows grow while R stays
    // positive. Inside the dip where R < 0 the accumulated rate shrinks with
    // the window and the counts climb back.
    let positive_r: Vec<_> = ok.iter().filter(|r| r.tau_cp < 1.89).collect();
    for w in positive_r.windows(2) {
        assert!(w[1].n_dc_hot <= w[0].n_dc_hot, "{} -> {}", w[0].tau_cp, w[1].tau_cp);
        assert!(w[1].n_dc_cold <= w[0].n_dc_cold, "{} -> {}", w[0].tau_cp, w[1].tau_cp);
    }
    let at = |t: f64| ok.iter().find(|r| (r.tau_cp - t).abs() < 1e-9).unwrap().n_dc_hot.unwrap();
    assert!(at(2.3) > at(1.9));

    // Within a plateau of fixed counts, shorter windows give more power, up
    // to the shift of the landing point inside the band, which moves the
    // work per cycle by a fraction of a percent.
    for w in ok.windows(2) {
        if (w[0].n_dc_hot, w[0].n_dc_cold) == (w[1].n_dc_hot, w[1].n_dc_cold) {
            let (short, long) = (w[0].value.unwrap(), w[1].value.unwrap());
            assert!(short >= long * (1.0 - 1e-2), "{} vs {}", w[0].tau_cp, w[1].tau_cp);
        }
    }

    // Non-converged rows carry no numbers.
    for r in rows.iter().filter(|r| !r.converged) {
        assert!(r.value.is_none() && r.qa_ratio.is_none() && r.n_dc_hot.is_none());
    }
}

#[test]
fn sweeps_are_bit_identical() {
    let q = QuadratureConfig::default();
    let mut spec = engine_spec();
    spec.tau_cp_grid.truncate(60);
    let a = qa_sweep(&spec, &q).unwrap();
    let b = qa_sweep(&spec, &q).unwrap();
    let bits = |rows: &[SweepRow]| rows.iter().map(|r| r.value.map(f64::to_bits)).collect::<Vec<_>>();
    assert_eq!(bits(&a), bits(&b));
    assert_eq!(a, b);
}

#[test]
fn efficiency_is_flat_across_the_sweep() {
    let q = QuadratureConfig::default();
    let spec = engine_spec();
    let etas: Vec<f64> = spec
        .tau_cp_grid
        .iter()
        .step_by(7)
        .filter_map(|&t| run_limit_cycle(&spec.base.with_tau_cp(t), &q).ok())
        .map(|r| r.eta.unwrap())
        .collect();
    assert!(etas.len() > 10);
    let (lo, hi) = etas.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &e| (a.min(e), b.max(e)));
    assert!(hi - lo <= 10.0 * 0.0015, "{lo} .. {hi}");
}

#[test]
fn refrigerator_sweep_has_advantage_rows() {
    let q = QuadratureConfig::default();
    let spec = common::run_config("refrigerator_lorentzian.toml").sweep_spec().unwrap();
    let rows = qa_sweep(&spec, &q).unwrap();
    let baseline = markov_baseline(&spec.base).unwrap();
    assert!(baseline.kappa > 0.0);
    assert!(rows.iter().any(|r| r.qa_ratio.is_some_and(|x| x > 1.0)));
    assert!(rows.iter().filter(|r| r.converged).all(|r| r.value.unwrap() > 0.0 || r.regime_mismatch));
}

/// Resonant bath with a correlation time far below the Markovian stroke
/// time, and the cold coupling tuned so both Markovian strokes take equally
/// long. A single window per stroke then reproduces the baseline cycle.
fn resonant_machine() -> OttoConfig {
    let shape = SpectralModel::lorentzian(0.05, 10.0, 0.0, 1.0, 1.0).unwrap();
    let schedule = ModulationSchedule::new(1.0, 0.5).unwrap();
    let mut c = OttoConfig {
        omega_c: 80.0,
        omega_h: 100.0,
        beta_h: 0.0005,
        beta_c: 0.01,
        tau_u1: 0.0,
        tau_u2: 0.0,
        hot_schedule: schedule,
        cold_schedule: schedule,
        hot_bath: shape.anchored(100.0, 0.0005),
        cold_bath: shape.anchored(80.0, 0.01),
        criterion: ThermalizationCriterion::new(0.0015).unwrap(),
        mode: Mode::Azd,
    };
    let m = markov_baseline(&c).unwrap();
    c.cold_schedule.lambda_bar = (m.tau_c / m.tau_h).sqrt();
    c
}

#[test]
fn single_window_sweep_normalizes_to_one() {
    let q = QuadratureConfig::default();
    let base = resonant_machine();
    let m = markov_baseline(&base).unwrap();
    assert!((m.tau_h - m.tau_c).abs() < 1e-9 * m.tau_h);
    let grid: Vec<f64> = (0..10).map(|k| m.tau_h * (1.0 + 0.005 * k as f64)).collect();
    let spec = SweepSpec { base, tau_cp_grid: grid, observable: Observable::Power, emit_overlap: false };
    let rows = qa_sweep(&spec, &q).unwrap();

    // R lags its Markov value by about one correlation time, so a window of
    // exactly the Markovian length falls just short and needs a second one.
    assert_eq!(rows[0].n_dc_hot, Some(1));
    let single = rows.iter().find(|r| r.n_dc_hot == Some(0) && r.n_dc_cold == Some(0)).unwrap();
    assert!((single.qa_ratio.unwrap() - 1.0).abs() < 0.05, "{single:?}");
}

#[test]
fn thermalization_time_curve() {
    let q = QuadratureConfig::default();
    let mut spec = engine_spec();
    spec.observable = Observable::ThermalizationTime;
    spec.tau_cp_grid.insert(0, 0.02);
    let sweep = thermalization_time_sweep(&spec, &q).unwrap();
    let tau_dc = spec.base.hot_schedule.tau_dc;
    let rows: Vec<_> = sweep.rows.iter().filter(|r| r.tau_th.is_some()).collect();
    for r in &rows {
        let n = r.n_dc.unwrap() as f64;
        assert!((r.tau_th.unwrap() - ((n + 1.0) * r.tau_cp + n * tau_dc)).abs() < 1e-9);
    }
    // Linear within a plateau; jumps follow the count in either direction.
    for w in rows.windows(2) {
        if w[0].n_dc == w[1].n_dc {
            assert!(w[1].tau_th > w[0].tau_th);
        } else {
            assert_eq!(w[1].n_dc > w[0].n_dc, w[1].tau_th > w[0].tau_th, "{:?} {:?}", w[0], w[1]);
        }
    }
    // Deep-Zeno windows thermalize more slowly than the best window.
    let best = rows.iter().map(|r| r.tau_th.unwrap()).fold(f64::INFINITY, f64::min);
    assert!(rows[0].tau_cp == 0.02 && rows[0].tau_th.unwrap() > best);

    // In the common layout the Markov time is the baseline of every row.
    let markov = sweep.markov_tau_th;
    assert!(sweep.into_rows().iter().all(|r| r.baseline == Some(markov)));
}

#[test]
fn overlap_datasets() {
    let q = QuadratureConfig::default();
    let m = SpectralModel::lorentzian(1.0, 0.4, 2.0, 0.0005, 100.0).unwrap();
    let markov = markovian_rate(&m, 100.0).unwrap();

    // R is negative for t between about 1.9 and 2.9, so the short-time
    // enhancement is checked on either side of that dip.
    let later = overlap_dataset(&m, 100.0, 4.0, &q).unwrap();
    assert!(later.overlap > markov);
    let short = overlap_dataset(&m, 100.0, 1.0, &q).unwrap();
    assert_eq!(short.samples.len(), 2001);
    assert!(short.overlap > markov);
    assert!(short.samples.iter().all(|s| s.sinc_kernel <= short.t));
    assert_eq!(sinc_kernel(0.0, short.t), short.t);
    let peak = short.samples.iter().max_by(|a, b| a.g.total_cmp(&b.g)).unwrap();
    assert!((peak.nu - 102.0).abs() < 0.1);

    let long = overlap_dataset(&m, 100.0, 24.0 / 0.4, &q).unwrap();
    assert!((long.overlap - markov).abs() / markovian_rate(&m, 102.0).unwrap() < 1e-2);
    assert!(overlap_dataset(&m, 100.0, 0.0, &q).is_err());
}

#[test]
fn invalid_grids_and_failed_sweeps() {
    let q = QuadratureConfig::default();
    let mut spec = engine_spec();
    spec.tau_cp_grid = vec![];
    assert!(matches!(qa_sweep(&spec, &q), Err(Error::InvalidParameter { .. })));
    spec.tau_cp_grid = vec![1.0, 1.0];
    assert!(matches!(qa_sweep(&spec, &q), Err(Error::InvalidParameter { .. })));

    // A band far inside the windowed steady-state offset: no row converges,
    // while the continuously coupled baseline still does.
    let mut spec = engine_spec();
    spec.tau_cp_grid = vec![0.5, 1.0];
    spec.base.criterion = ThermalizationCriterion::new(1e-5).unwrap();
    assert!(matches!(qa_sweep(&spec, &q), Err(Error::SweepFailed { rows: 2 })));
}
