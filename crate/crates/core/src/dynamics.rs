//! Population dynamics of the two-level working medium during a
//! thermalization stroke with step-function coupling.
//!
//! During a coupling window the populations follow the closed-form solution
//! of the rate equations in terms of the accumulated rates `J+` and `J-`;
//! during a decoupling window nothing evolves. The clock of the response
//! coefficients restarts at every coupling window.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{accumulated_rate, response_coefficient, QuadratureConfig, SpectralModel};

pub const DEFAULT_MAX_WINDOWS: usize = 10_000;
pub const DEFAULT_SAMPLES_PER_WINDOW: usize = 32;

const NORMALIZATION_TOL: f64 = 1e-12;

/// Diagonal state `p1 |0><0| + p2 |1><1|`; `|0>` is the ground state at
/// energy `-omega / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitState {
    pub p1: f64,
    pub p2: f64,
}

impl QubitState {
    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        let unit = |p: f64| p.is_finite() && (0.0..=1.0).contains(&p);
        if !unit(p1) || !unit(p2) {
            return Err(Error::invalid("state", format!("populations must lie in [0, 1], got ({p1}, {p2})")));
        }
        if (p1 + p2 - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::invalid("state", format!("populations must sum to 1, got {}", p1 + p2)));
        }
        Ok(QubitState { p1, p2 })
    }

    pub fn from_ground_population(p1: f64) -> Result<Self> {
        QubitState::new(p1, 1.0 - p1)
    }

    /// Ground-population distance `|p1 - p1'|`.
    pub fn distance(&self, other: &QubitState) -> f64 {
        (self.p1 - other.p1).abs()
    }

    /// Mean energy `(omega / 2)(p2 - p1)` under `H = (omega / 2) sigma_z`.
    pub fn energy(&self, omega: f64) -> f64 {
        0.5 * omega * (self.p2 - self.p1)
    }
}

/// Step-function coupling protocol of one thermalization stroke.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulationSchedule {
    pub tau_cp: f64,
    pub tau_dc: f64,
    pub lambda_bar: f64,
    pub max_windows: usize,
}

impl ModulationSchedule {
    pub fn new(tau_cp: f64, tau_dc: f64) -> Result<Self> {
        let schedule = ModulationSchedule {
            tau_cp,
            tau_dc,
            lambda_bar: 1.0,
            max_windows: DEFAULT_MAX_WINDOWS,
        };
        schedule.validate()?;
        Ok(schedule)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau_cp.is_finite() && self.tau_cp > 0.0) {
            return Err(Error::invalid("tau_cp", format!("must be positive, got {}", self.tau_cp)));
        }
        if !(self.tau_dc.is_finite() && self.tau_dc >= 0.0) {
            return Err(Error::invalid("tau_dc", format!("must be non-negative, got {}", self.tau_dc)));
        }
        if !(self.lambda_bar.is_finite() && self.lambda_bar >= 0.0) {
            return Err(Error::invalid("lambda_bar", format!("must be non-negative, got {}", self.lambda_bar)));
        }
        if self.max_windows < 1 {
            return Err(Error::invalid("max_windows", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalizationCriterion {
    pub epsilon: f64,
}

impl ThermalizationCriterion {
    pub fn new(epsilon: f64) -> Result<Self> {
        let c = ThermalizationCriterion { epsilon };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.epsilon > 0.0 && self.epsilon < 1.0 {
            Ok(())
        } else {
            Err(Error::invalid("epsilon", format!("must lie in (0, 1), got {}", self.epsilon)))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    Coupling,
    Decoupling,
}

impl WindowKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            WindowKind::Coupling => "coupling",
            WindowKind::Decoupling => "decoupling",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub time: f64,
    pub p1: f64,
    pub kind: WindowKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrokeRecord {
    /// Wall time of the stroke: coupling windows plus completed decoupling
    /// windows, no trailing idle window.
    pub duration: f64,
    pub n_cp: usize,
    pub n_dc: usize,
    pub final_state: QubitState,
    pub trajectory: Option<Vec<TrajectoryPoint>>,
}

pub fn gibbs_state(omega: f64, beta: f64) -> Result<QubitState> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::invalid("omega", format!("must be positive, got {omega}")));
    }
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::invalid("beta", format!("must be positive, got {beta}")));
    }
    Ok(gibbs_unchecked(omega, beta))
}

fn gibbs_unchecked(omega: f64, beta: f64) -> QubitState {
    let x = beta * omega;
    QubitState {
        p1: 1.0 / (1.0 + (-x).exp()),
        p2: 1.0 / (1.0 + x.exp()),
    }
}

/// Accumulated rates of one coupling window; the map they define is the
/// same for every window because the response clock restarts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct WindowMap {
    pub up: f64,
    pub down: f64,
}

impl WindowMap {
    pub(crate) fn compute(
        model: &SpectralModel,
        omega: f64,
        tau: f64,
        lambda_bar: f64,
        q: &QuadratureConfig,
    ) -> Result<Self> {
        let scale = lambda_bar * lambda_bar;
        Ok(WindowMap {
            up: scale * accumulated_rate(model, omega, tau, q)?,
            down: scale * accumulated_rate(model, -omega, tau, q)?,
        })
    }

    /// Closed-form rate-equation solution; `up` feeds the ground state.
    pub(crate) fn apply(&self, s: QubitState) -> QubitState {
        let total = self.up + self.down;
        if total == 0.0 {
            return s;
        }
        // (1 - e^{-x}) / x, well-conditioned as x -> 0.
        let phi = -(-total).exp_m1() / total;
        let flow = phi * (self.up * s.p2 - self.down * s.p1);
        QubitState {
            p1: s.p1 + flow,
            p2: s.p2 - flow,
        }
    }
}

fn check_positive(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be positive, got {v}")))
    }
}

fn check_duration(v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("tau", format!("duration must be non-negative, got {v}")))
    }
}

fn check_state(s: &QubitState) -> Result<()> {
    QubitState::new(s.p1, s.p2).map(|_| ())
}

pub fn evolve_coupling_window(
    initial: QubitState,
    model: &SpectralModel,
    omega: f64,
    tau: f64,
    lambda_bar: f64,
    q: &QuadratureConfig,
) -> Result<QubitState> {
    check_state(&initial)?;
    check_positive("omega", omega)?;
    check_duration(tau)?;
    if !(lambda_bar.is_finite() && lambda_bar >= 0.0) {
        return Err(Error::invalid("lambda_bar", "must be non-negative"));
    }
    Ok(WindowMap::compute(model, omega, tau, lambda_bar, q)?.apply(initial))
}

/// One window of length `tau` under the constant Markovian rates `pi G(+-omega)`.
pub fn evolve_markovian_window(
    initial: QubitState,
    model: &SpectralModel,
    omega: f64,
    tau: f64,
    lambda_bar: f64,
) -> Result<QubitState> {
    check_state(&initial)?;
    check_positive("omega", omega)?;
    check_duration(tau)?;
    model.validate()?;
    let scale = 2.0 * lambda_bar * lambda_bar * PI * tau;
    let map = WindowMap {
        up: scale * model.density(omega),
        down: scale * model.density(-omega),
    };
    Ok(map.apply(initial))
}

pub fn evolve_decoupling_window(initial: QubitState, tau: f64) -> Result<QubitState> {
    check_state(&initial)?;
    check_duration(tau)?;
    Ok(initial)
}

/// Runs coupling/decoupling windows, starting with a coupling window, until
/// the ground population is within `epsilon` of the Gibbs state at
/// `(omega, target_beta)`. Convergence is tested after each coupling window
/// and no trailing decoupling window is appended.
pub fn run_thermalization_stroke(
    initial: QubitState,
    model: &SpectralModel,
    omega: f64,
    schedule: &ModulationSchedule,
    criterion: &ThermalizationCriterion,
    target_beta: f64,
    q: &QuadratureConfig,
) -> Result<StrokeRecord> {
    run_stroke_impl(initial, model, omega, schedule, criterion, target_beta, q, None)
}

/// As [`run_thermalization_stroke`], additionally recording `p1(t)` at
/// `samples_per_window` equal steps inside every coupling window and at the
/// edges of every decoupling window.
#[allow(clippy::too_many_arguments)]
pub fn run_thermalization_stroke_sampled(
    initial: QubitState,
    model: &SpectralModel,
    omega: f64,
    schedule: &ModulationSchedule,
    criterion: &ThermalizationCriterion,
    target_beta: f64,
    q: &QuadratureConfig,
    samples_per_window: usize,
) -> Result<StrokeRecord> {
    if samples_per_window < 1 {
        return Err(Error::invalid("samples_per_window", "must be at least 1"));
    }
    run_stroke_impl(
        initial,
        model,
        omega,
        schedule,
        criterion,
        target_beta,
        q,
        Some(samples_per_window),
    )
}

#[allow(clippy::too_many_arguments)]
fn run_stroke_impl(
    initial: QubitState,
    model: &SpectralModel,
    omega: f64,
    schedule: &ModulationSchedule,
    criterion: &ThermalizationCriterion,
    target_beta: f64,
    q: &QuadratureConfig,
    samples: Option<usize>,
) -> Result<StrokeRecord> {
    check_state(&initial)?;
    check_positive("omega", omega)?;
    schedule.validate()?;
    criterion.validate()?;
    let target = gibbs_state(omega, target_beta)?;
    let map = WindowMap::compute(model, omega, schedule.tau_cp, schedule.lambda_bar, q)?;

    let sub_maps = match samples {
        Some(n) => Some(
            (1..n)
                .map(|k| {
                    let t = schedule.tau_cp * k as f64 / n as f64;
                    WindowMap::compute(model, omega, t, schedule.lambda_bar, q)
                })
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };

    stroke_with_map(initial, &map, schedule, criterion, target, sub_maps.as_deref())
}

/// Iterates a precomputed window map. `sub_maps` holds the partial-window
/// maps at interior sample times when a trajectory is wanted.
pub(crate) fn stroke_with_map(
    initial: QubitState,
    map: &WindowMap,
    schedule: &ModulationSchedule,
    criterion: &ThermalizationCriterion,
    target: QubitState,
    sub_maps: Option<&[WindowMap]>,
) -> Result<StrokeRecord> {
    let mut trajectory = sub_maps.map(|_| Vec::new());
    let mut state = initial;
    let mut time = 0.0;
    let mut best = f64::INFINITY;
    let n_sub = sub_maps.map_or(0, |s| s.len() + 1);

    for window in 1..=schedule.max_windows {
        if window > 1 {
            if let Some(points) = trajectory.as_mut() {
                points.push(TrajectoryPoint { time, p1: state.p1, kind: WindowKind::Decoupling });
                points.push(TrajectoryPoint {
                    time: time + schedule.tau_dc,
                    p1: state.p1,
                    kind: WindowKind::Decoupling,
                });
            }
            time += schedule.tau_dc;
        }

        let next = map.apply(state);
        if let (Some(points), Some(subs)) = (trajectory.as_mut(), sub_maps) {
            points.push(TrajectoryPoint { time, p1: state.p1, kind: WindowKind::Coupling });
            for (k, sub) in subs.iter().enumerate() {
                points.push(TrajectoryPoint {
                    time: time + schedule.tau_cp * (k + 1) as f64 / n_sub as f64,
                    p1: sub.apply(state).p1,
                    kind: WindowKind::Coupling,
                });
            }
            points.push(TrajectoryPoint {
                time: time + schedule.tau_cp,
                p1: next.p1,
                kind: WindowKind::Coupling,
            });
        }
        time += schedule.tau_cp;

        let distance = next.distance(&target);
        best = best.min(distance);
        if distance <= criterion.epsilon {
            return Ok(StrokeRecord {
                duration: time,
                n_cp: window,
                n_dc: window - 1,
                final_state: next,
                trajectory,
            });
        }
        if next == state {
            // Fixed point outside the epsilon band: further windows are identical.
            return Err(Error::StrokeNonConvergence { windows: window, best_distance: best });
        }
        state = next;
    }

    Err(Error::StrokeNonConvergence {
        windows: schedule.max_windows,
        best_distance: best,
    })
}

/// Continuous coupling under the constant rates `pi G(+-omega)` with unit
/// coupling amplitude.
pub fn markovian_thermalization_stroke(
    initial: QubitState,
    model: &SpectralModel,
    omega: f64,
    criterion: &ThermalizationCriterion,
    target_beta: f64,
) -> Result<StrokeRecord> {
    markovian_thermalization_stroke_with_coupling(initial, model, omega, criterion, target_beta, 1.0)
}

/// Markovian stroke whose duration is the analytic first-passage time into
/// the epsilon band around the target Gibbs state.
pub fn markovian_thermalization_stroke_with_coupling(
    initial: QubitState,
    model: &SpectralModel,
    omega: f64,
    criterion: &ThermalizationCriterion,
    target_beta: f64,
    lambda_bar: f64,
) -> Result<StrokeRecord> {
    check_state(&initial)?;
    check_positive("omega", omega)?;
    criterion.validate()?;
    model.validate()?;
    let target = gibbs_state(omega, target_beta)?;

    let eps = criterion.epsilon;
    let start = initial.p1;
    if (start - target.p1).abs() <= eps {
        return Ok(StrokeRecord {
            duration: 0.0,
            n_cp: 0,
            n_dc: 0,
            final_state: initial,
            trajectory: None,
        });
    }

    let up = PI * model.density(omega);
    let down = PI * model.density(-omega);
    let rate = 2.0 * lambda_bar * lambda_bar * (up + down);
    if !(rate > 0.0) {
        return Err(Error::ZeroRates { omega });
    }
    let steady = up / (up + down);

    let edge = if start > target.p1 { target.p1 + eps } else { target.p1 - eps };
    let reaches = if start > edge { steady < edge } else { steady > edge };
    if !reaches {
        return Err(Error::StrokeNonConvergence {
            windows: 1,
            best_distance: (steady - target.p1).abs(),
        });
    }
    let duration = ((start - steady) / (edge - steady)).ln() / rate;

    Ok(StrokeRecord {
        duration,
        n_cp: 1,
        n_dc: 0,
        final_state: QubitState { p1: edge, p2: 1.0 - edge },
        trajectory: None,
    })
}

/// Grid points at which the response coefficient is negative.
pub fn detect_nonmarkovianity(
    model: &SpectralModel,
    omega: f64,
    t_grid: &[f64],
    q: &QuadratureConfig,
) -> Result<Vec<(f64, f64)>> {
    if t_grid.is_empty() {
        return Err(Error::invalid("t_grid", "must not be empty"));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("t_grid", "must be strictly increasing"));
    }
    let mut witnesses = Vec::new();
    for &t in t_grid {
        let r = response_coefficient(model, omega, t, q)?;
        if r < 0.0 {
            witnesses.push((t, r));
        }
    }
    Ok(witnesses)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lorentzian(omega: f64, beta: f64) -> SpectralModel {
        SpectralModel::lorentzian(1.0, 0.4, 2.0, beta, omega).unwrap()
    }

    #[test]
    fn gibbs_values() {
        let hot = gibbs_state(100.0, 0.0005).unwrap();
        assert!((hot.p1 / hot.p2 - 0.05f64.exp()).abs() < 1e-12);
        assert!((hot.p1 - 0.512497).abs() < 1e-6);
        let cold = gibbs_state(80.0, 0.01).unwrap();
        assert!((cold.p1 / cold.p2 - 0.8f64.exp()).abs() < 1e-12);
        assert!((cold.p1 - 0.689974).abs() < 1e-6);
        let flat = gibbs_state(1.0, 1e-12).unwrap();
        assert!((flat.p1 - 0.5).abs() < 1e-9 && (flat.p2 - 0.5).abs() < 1e-9);
        assert!(gibbs_state(0.0, 1.0).is_err());
        assert!(gibbs_state(1.0, -1.0).is_err());
    }

    #[test]
    fn state_validation() {
        assert!(QubitState::new(0.3, 0.7).is_ok());
        assert!(QubitState::new(0.3, 0.6).is_err());
        assert!(QubitState::new(-0.1, 1.1).is_err());
        assert!(QubitState::from_ground_population(f64::NAN).is_err());
    }

    #[test]
    fn zero_length_window_is_identity() {
        let s = QubitState::from_ground_population(0.8).unwrap();
        let q = QuadratureConfig::default();
        let out = evolve_coupling_window(s, &lorentzian(100.0, 0.0005), 100.0, 0.0, 1.0, &q).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn decoupling_is_identity() {
        let s = QubitState::from_ground_population(0.3).unwrap();
        assert_eq!(evolve_decoupling_window(s, 4.0).unwrap(), s);
        assert_eq!(evolve_decoupling_window(s, 0.0).unwrap().p1, 0.3);
        assert!(evolve_decoupling_window(s, -1.0).is_err());

        let q = QuadratureConfig::default();
        let m = lorentzian(100.0, 0.0005);
        let coupled = evolve_coupling_window(s, &m, 100.0, 1.5, 1.0, &q).unwrap();
        assert_eq!(evolve_decoupling_window(coupled, 4.0).unwrap(), coupled);
    }

    #[test]
    fn markov_window_fixed_point_is_gibbs() {
        let m = lorentzian(100.0, 0.0005);
        let g = gibbs_state(100.0, 0.0005).unwrap();
        let out = evolve_markovian_window(g, &m, 100.0, 60.0, 1.0).unwrap();
        assert!(out.distance(&g) < 1e-9);
    }

    #[test]
    fn window_map_preserves_normalization() {
        let map = WindowMap { up: 0.37, down: 1.9 };
        let mut s = QubitState::from_ground_population(0.123).unwrap();
        for _ in 0..100 {
            s = map.apply(s);
            assert!((s.p1 + s.p2 - 1.0).abs() < 1e-12);
        }
        assert!((s.p1 - 0.37 / 2.27).abs() < 1e-12);
    }

    #[test]
    fn markov_stroke_from_target_takes_no_time() {
        let m = lorentzian(100.0, 0.0005);
        let g = gibbs_state(100.0, 0.0005).unwrap();
        let c = ThermalizationCriterion::new(0.0015).unwrap();
        let rec = markovian_thermalization_stroke(g, &m, 100.0, &c, 0.0005).unwrap();
        assert_eq!(rec.duration, 0.0);
        assert_eq!(rec.n_dc, 0);
    }

    #[test]
    fn markov_stroke_rejects_detuned_bath() {
        let so = SpectralModel::super_ohmic(1.0, 0.5, -5.0, 3.0, 0.0005, 100.0).unwrap();
        let start = gibbs_state(80.0, 0.01).unwrap();
        let c = ThermalizationCriterion::new(0.0015).unwrap();
        let err = markovian_thermalization_stroke(start, &so, 100.0, &c, 0.0005).unwrap_err();
        assert!(matches!(err, Error::ZeroRates { .. }));
    }

    #[test]
    fn grid_validation() {
        let m = lorentzian(100.0, 0.0005);
        let q = QuadratureConfig::default();
        assert!(detect_nonmarkovianity(&m, 100.0, &[], &q).is_err());
        assert!(detect_nonmarkovianity(&m, 100.0, &[1.0, 1.0], &q).is_err());
        assert!(detect_nonmarkovianity(&m, 100.0, &[0.0], &q).unwrap().is_empty());
    }

    #[test]
    fn max_windows_one_with_tight_epsilon_fails() {
        let m = lorentzian(100.0, 0.0005);
        let q = QuadratureConfig::default();
        let mut schedule = ModulationSchedule::new(0.5, 4.0).unwrap();
        schedule.max_windows = 1;
        let c = ThermalizationCriterion::new(1e-6).unwrap();
        let start = gibbs_state(80.0, 0.01).unwrap();
        let err = run_thermalization_stroke(start, &m, 100.0, &schedule, &c, 0.0005, &q).unwrap_err();
        match err {
            Error::StrokeNonConvergence { windows, best_distance } => {
                assert_eq!(windows, 1);
                assert!(best_distance > 1e-6);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
