//! Scans over the coupling-window length and comparison against the
//! continuously coupled Markovian cycle.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cycle::{run_limit_cycle, CycleReport, Mode, OttoConfig, Regime};
use crate::dynamics::{gibbs_state, markovian_thermalization_stroke_with_coupling, stroke_with_map, WindowMap};
use crate::error::{Error, ErrorKind, Result};
use crate::spectral::{markovian_rate, response_coefficient, spectral_density, sinc_kernel, QuadratureConfig, SpectralModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Power,
    CoolingRate,
    ThermalizationTime,
}

impl Observable {
    /// Regime in which the advantage ratio is defined.
    fn regime(&self) -> Option<Regime> {
        match self {
            Observable::Power => Some(Regime::Engine),
            Observable::CoolingRate => Some(Regime::Refrigerator),
            Observable::ThermalizationTime => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub base: OttoConfig,
    pub tau_cp_grid: Vec<f64>,
    pub observable: Observable,
    pub emit_overlap: bool,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.tau_cp_grid.is_empty() {
            return Err(Error::invalid("tau_cp_grid", "must not be empty"));
        }
        if self.tau_cp_grid.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::invalid("tau_cp_grid", "entries must be positive"));
        }
        if self.tau_cp_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("tau_cp_grid", "must be strictly increasing"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub tau_cp: f64,
    /// `|P|` for power sweeps, `kappa` for cooling-rate sweeps.
    pub value: Option<f64>,
    pub baseline: Option<f64>,
    /// `value / baseline`, present only when both cycles run in the regime
    /// the observable refers to.
    pub qa_ratio: Option<f64>,
    pub n_dc_hot: Option<usize>,
    pub n_dc_cold: Option<usize>,
    pub converged: bool,
    pub regime: Option<Regime>,
    /// Converged, but the windowed cycle runs in a different regime than
    /// the observable requires.
    pub regime_mismatch: bool,
}

/// The same cycle with continuous coupling and constant Markovian rates.
pub fn markov_baseline(config: &OttoConfig) -> Result<CycleReport> {
    run_limit_cycle(&config.with_mode(Mode::Markovian), &QuadratureConfig::default())
}

fn observed(observable: Observable, report: &CycleReport) -> f64 {
    match observable {
        Observable::CoolingRate => report.kappa,
        _ => report.power_abs,
    }
}

/// Advantage-ratio sweep over `tau_cp` (both strokes share the window length).
/// Rows are computed in parallel and returned in grid order.
pub fn qa_sweep(spec: &SweepSpec, q: &QuadratureConfig) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    q.validate()?;
    let Some(wanted) = spec.observable.regime() else {
        return thermalization_time_sweep(spec, q).map(|s| s.into_rows());
    };

    let baseline_report = markov_baseline(&spec.base)?;
    let baseline_ok = baseline_report.regime == wanted;
    if !baseline_ok {
        log::warn!(
            "Markovian baseline runs as {}, advantage ratios are undefined",
            baseline_report.regime.as_str()
        );
    }
    let baseline = observed(spec.observable, &baseline_report);

    let rows = spec
        .tau_cp_grid
        .par_iter()
        .map(|&tau_cp| {
            let config = spec.base.with_tau_cp(tau_cp).with_mode(Mode::Azd);
            match run_limit_cycle(&config, q) {
                Ok(report) => {
                    let value = observed(spec.observable, &report);
                    let matches = report.regime == wanted;
                    Ok(SweepRow {
                        tau_cp,
                        value: Some(value),
                        baseline: Some(baseline),
                        qa_ratio: (matches && baseline_ok).then(|| value / baseline),
                        n_dc_hot: Some(report.n_dc_hot),
                        n_dc_cold: Some(report.n_dc_cold),
                        converged: true,
                        regime: Some(report.regime),
                        regime_mismatch: !matches,
                    })
                }
                Err(e) if e.kind() == ErrorKind::Convergence => {
                    log::info!("tau_cp = {tau_cp}: {e}");
                    Ok(SweepRow {
                        tau_cp,
                        value: None,
                        baseline: Some(baseline),
                        qa_ratio: None,
                        n_dc_hot: None,
                        n_dc_cold: None,
                        converged: false,
                        regime: None,
                        regime_mismatch: false,
                    })
                }
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;

    if !rows.iter().any(|r| r.converged) {
        return Err(Error::SweepFailed { rows: rows.len() });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalizationRow {
    pub tau_cp: f64,
    pub tau_th: Option<f64>,
    pub n_dc: Option<usize>,
}

/// Hot-stroke thermalization times starting from the cold Gibbs state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalizationSweep {
    pub markov_tau_th: f64,
    pub rows: Vec<ThermalizationRow>,
}

impl ThermalizationSweep {
    /// Rows in the common sweep layout; the ratio is `tau_th / tau_th_markov`.
    pub fn into_rows(self) -> Vec<SweepRow> {
        let baseline = self.markov_tau_th;
        self.rows
            .into_iter()
            .map(|r| SweepRow {
                tau_cp: r.tau_cp,
                value: r.tau_th,
                baseline: Some(baseline),
                qa_ratio: r.tau_th.filter(|_| baseline > 0.0).map(|t| t / baseline),
                n_dc_hot: r.n_dc,
                n_dc_cold: None,
                converged: r.tau_th.is_some(),
                regime: None,
                regime_mismatch: false,
            })
            .collect()
    }
}

pub fn thermalization_time_sweep(spec: &SweepSpec, q: &QuadratureConfig) -> Result<ThermalizationSweep> {
    spec.validate()?;
    q.validate()?;
    if spec.observable != Observable::ThermalizationTime {
        return Err(Error::invalid("observable", "thermalization-time sweep needs observable = thermalization_time"));
    }
    let base = &spec.base;
    let start = gibbs_state(base.omega_c, base.beta_c)?;
    let target = gibbs_state(base.omega_h, base.beta_h)?;
    let markov = markovian_thermalization_stroke_with_coupling(
        start,
        &base.hot_bath,
        base.omega_h,
        &base.criterion,
        base.beta_h,
        base.hot_schedule.lambda_bar,
    )?;

    let rows = spec
        .tau_cp_grid
        .par_iter()
        .map(|&tau_cp| {
            let schedule = base.with_tau_cp(tau_cp).hot_schedule;
            let map = WindowMap::compute(&base.hot_bath, base.omega_h, tau_cp, schedule.lambda_bar, q)?;
            match stroke_with_map(start, &map, &schedule, &base.criterion, target, None) {
                Ok(rec) => Ok(ThermalizationRow {
                    tau_cp,
                    tau_th: Some(rec.duration),
                    n_dc: Some(rec.n_dc),
                }),
                Err(e) if e.kind() == ErrorKind::Convergence => {
                    log::info!("tau_cp = {tau_cp}: {e}");
                    Ok(ThermalizationRow { tau_cp, tau_th: None, n_dc: None })
                }
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;

    if !rows.iter().any(|r| r.tau_th.is_some()) {
        return Err(Error::SweepFailed { rows: rows.len() });
    }
    Ok(ThermalizationSweep {
        markov_tau_th: markov.duration,
        rows,
    })
}

/// Number of frequency samples in an overlap dataset.
pub const OVERLAP_SAMPLES: usize = 2001;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapSample {
    pub nu: f64,
    pub g: f64,
    pub sinc_kernel: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapDataset {
    pub omega: f64,
    pub t: f64,
    /// `R(omega, t)`: the integral of `G` against the sinc kernel.
    pub overlap: f64,
    /// `pi G(omega)`: the long-time limit of `overlap`.
    pub markov: f64,
    pub samples: Vec<OverlapSample>,
}

/// `G(nu)` and `sin((nu - omega) t) / (nu - omega)` on a grid spanning the
/// spectral peak and several kernel lobes around `omega`.
pub fn overlap_dataset(model: &SpectralModel, omega: f64, t: f64, q: &QuadratureConfig) -> Result<OverlapDataset> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::invalid("t", format!("must be positive, got {t}")));
    }
    let overlap = response_coefficient(model, omega, t, q)?;
    let markov = markovian_rate(model, omega)?;

    let span = 8.0 * model.width.max(std::f64::consts::PI / t);
    let peak = model.peak_frequency();
    let lo = (omega - span).min(peak - span);
    let hi = (omega + span).max(peak + span);
    let step = (hi - lo) / (OVERLAP_SAMPLES - 1) as f64;
    let samples = (0..OVERLAP_SAMPLES)
        .map(|k| {
            let nu = lo + step * k as f64;
            Ok(OverlapSample {
                nu,
                g: spectral_density(model, nu)?,
                sinc_kernel: sinc_kernel(nu - omega, t),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(OverlapDataset { omega, t, overlap, markov, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{ModulationSchedule, ThermalizationCriterion};

    fn spec(observable: Observable, grid: Vec<f64>) -> SweepSpec {
        let shape = SpectralModel::lorentzian(1.0, 0.4, 2.0, 1.0, 1.0).unwrap();
        let schedule = ModulationSchedule::new(0.5, 4.0).unwrap();
        SweepSpec {
            base: OttoConfig {
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
            },
            tau_cp_grid: grid,
            observable,
            emit_overlap: false,
        }
    }

    #[test]
    fn grid_validation() {
        let q = QuadratureConfig::default();
        assert!(qa_sweep(&spec(Observable::Power, vec![]), &q).is_err());
        assert!(qa_sweep(&spec(Observable::Power, vec![1.0, 0.5]), &q).is_err());
        assert!(qa_sweep(&spec(Observable::Power, vec![-1.0]), &q).is_err());
    }

    #[test]
    fn rows_follow_grid_order() {
        let grid = vec![0.5, 1.0, 1.75, 2.5];
        let rows = qa_sweep(&spec(Observable::Power, grid.clone()), &QuadratureConfig::default()).unwrap();
        let taus: Vec<_> = rows.iter().map(|r| r.tau_cp).collect();
        assert_eq!(taus, grid);
        for r in rows.iter().filter(|r| r.converged) {
            assert_eq!(r.qa_ratio.is_some(), r.regime == Some(Regime::Engine));
        }
    }

    #[test]
    fn thermalization_sweep_requires_matching_observable() {
        let q = QuadratureConfig::default();
        assert!(thermalization_time_sweep(&spec(Observable::Power, vec![0.5]), &q).is_err());
        let s = thermalization_time_sweep(&spec(Observable::ThermalizationTime, vec![0.5]), &q).unwrap();
        assert!(s.markov_tau_th > 0.0);
        assert_eq!(s.rows.len(), 1);
    }

    #[test]
    fn overlap_grid_covers_peak_and_gap() {
        let m = SpectralModel::lorentzian(1.0, 0.2, 2.0, 0.0005, 100.0).unwrap();
        let d = overlap_dataset(&m, 100.0, 4.0, &QuadratureConfig::default()).unwrap();
        assert_eq!(d.samples.len(), OVERLAP_SAMPLES);
        assert!(d.samples[0].nu < 100.0 && d.samples[OVERLAP_SAMPLES - 1].nu > 102.0);
        assert!(overlap_dataset(&m, 100.0, 0.0, &QuadratureConfig::default()).is_err());
    }
}
