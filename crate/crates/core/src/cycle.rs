//! Four-stroke Otto cycle: two unitary gap changes and two thermalization
//! strokes, either with windowed coupling or continuous Markovian coupling.
//!
//! Stroke order is A -> B (gap omega_c to omega_h, populations frozen),
//! B -> C (hot bath), C -> D (gap omega_h to omega_c), D -> A (cold bath).
//! The cycle is started from the cold Gibbs state and iterated until the
//! state at A reproduces itself.

use serde::{Deserialize, Serialize};

use crate::dynamics::{
    gibbs_state, markovian_thermalization_stroke_with_coupling, stroke_with_map,
    ModulationSchedule, QubitState, StrokeRecord, ThermalizationCriterion, WindowMap,
};
use crate::error::{Error, Result};
use crate::spectral::{QuadratureConfig, SpectralModel};

/// Closure tolerance on the ground population at point A.
pub const CLOSURE_TOL: f64 = 1e-13;
/// Passes through the cycle before giving up on closure.
pub const MAX_CYCLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Azd,
    Markovian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OttoConfig {
    pub omega_c: f64,
    pub omega_h: f64,
    pub beta_h: f64,
    pub beta_c: f64,
    pub tau_u1: f64,
    pub tau_u2: f64,
    pub hot_schedule: ModulationSchedule,
    pub cold_schedule: ModulationSchedule,
    /// Anchored at `omega_h` and `beta_h`.
    pub hot_bath: SpectralModel,
    /// Anchored at `omega_c` and `beta_c`.
    pub cold_bath: SpectralModel,
    pub criterion: ThermalizationCriterion,
    pub mode: Mode,
}

impl OttoConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |field: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(field, format!("must be positive, got {v}")))
            }
        };
        positive("omega_c", self.omega_c)?;
        positive("omega_h", self.omega_h)?;
        positive("beta_h", self.beta_h)?;
        positive("beta_c", self.beta_c)?;
        for (field, v) in [("tau_u1", self.tau_u1), ("tau_u2", self.tau_u2)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(field, format!("must be non-negative, got {v}")));
            }
        }
        if self.omega_h < self.omega_c {
            return Err(Error::invalid("omega_h", "must not be below omega_c"));
        }
        self.hot_schedule.validate()?;
        self.cold_schedule.validate()?;
        self.criterion.validate()?;
        self.hot_bath.validate()?;
        self.cold_bath.validate()?;
        check_anchor("hot_bath", &self.hot_bath, self.omega_h, self.beta_h)?;
        check_anchor("cold_bath", &self.cold_bath, self.omega_c, self.beta_c)?;
        Ok(())
    }

    /// Same configuration with both coupling windows set to `tau_cp`.
    pub fn with_tau_cp(&self, tau_cp: f64) -> Self {
        let mut c = *self;
        c.hot_schedule.tau_cp = tau_cp;
        c.cold_schedule.tau_cp = tau_cp;
        c
    }

    pub fn with_mode(&self, mode: Mode) -> Self {
        OttoConfig { mode, ..*self }
    }
}

fn check_anchor(field: &'static str, bath: &SpectralModel, omega: f64, beta: f64) -> Result<()> {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs();
    if !close(bath.omega_ref, omega) {
        return Err(Error::invalid(field, format!("omega_ref {} differs from gap {omega}", bath.omega_ref)));
    }
    if !close(bath.beta, beta) {
        return Err(Error::invalid(field, format!("beta {} differs from bath beta {beta}", bath.beta)));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Engine,
    Refrigerator,
    HeatDistributor,
    Other,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Engine => "engine",
            Regime::Refrigerator => "refrigerator",
            Regime::HeatDistributor => "heat_distributor",
            Regime::Other => "other",
        }
    }
}

/// Thermodynamics of one closed cycle. Heats and work are positive when
/// they flow into the medium, so an engine has `work < 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleReport {
    pub mode: Mode,
    pub p1_a: f64,
    pub p1_c: f64,
    pub energy_a: f64,
    pub energy_b: f64,
    pub energy_c: f64,
    pub energy_d: f64,
    pub q_h: f64,
    pub q_c: f64,
    pub e_ab: f64,
    pub e_cd: f64,
    pub work: f64,
    pub tau_h: f64,
    pub tau_c: f64,
    pub tau_total: f64,
    pub power: f64,
    pub power_abs: f64,
    pub eta: Option<f64>,
    pub kappa: f64,
    pub cop: Option<f64>,
    pub regime: Regime,
    pub n_cp_hot: usize,
    pub n_cp_cold: usize,
    pub n_dc_hot: usize,
    pub n_dc_cold: usize,
    /// Passes through the cycle needed to close the limit cycle.
    pub cycles: usize,
}

/// Runs the cycle to its limit cycle and reports its thermodynamics.
pub fn run_limit_cycle(config: &OttoConfig, q: &QuadratureConfig) -> Result<CycleReport> {
    config.validate()?;
    q.validate()?;

    let hot_target = gibbs_state(config.omega_h, config.beta_h)?;
    let cold_target = gibbs_state(config.omega_c, config.beta_c)?;

    let strokes = match config.mode {
        Mode::Azd => {
            let hot = WindowMap::compute(
                &config.hot_bath,
                config.omega_h,
                config.hot_schedule.tau_cp,
                config.hot_schedule.lambda_bar,
                q,
            )?;
            let cold = WindowMap::compute(
                &config.cold_bath,
                config.omega_c,
                config.cold_schedule.tau_cp,
                config.cold_schedule.lambda_bar,
                q,
            )?;
            Some((hot, cold))
        }
        Mode::Markovian => None,
    };

    let hot_stroke = |s: QubitState| -> Result<StrokeRecord> {
        match &strokes {
            Some((map, _)) => stroke_with_map(s, map, &config.hot_schedule, &config.criterion, hot_target, None),
            None => markovian_thermalization_stroke_with_coupling(
                s,
                &config.hot_bath,
                config.omega_h,
                &config.criterion,
                config.beta_h,
                config.hot_schedule.lambda_bar,
            ),
        }
    };
    let cold_stroke = |s: QubitState| -> Result<StrokeRecord> {
        match &strokes {
            Some((_, map)) => stroke_with_map(s, map, &config.cold_schedule, &config.criterion, cold_target, None),
            None => markovian_thermalization_stroke_with_coupling(
                s,
                &config.cold_bath,
                config.omega_c,
                &config.criterion,
                config.beta_c,
                config.cold_schedule.lambda_bar,
            ),
        }
    };

    let mut state_a = cold_target;
    let mut residual = f64::INFINITY;
    for pass in 1..=MAX_CYCLES {
        let hot = hot_stroke(state_a)?;
        let cold = cold_stroke(hot.final_state)?;
        residual = cold.final_state.distance(&state_a);
        if residual <= CLOSURE_TOL {
            log::debug!("limit cycle closed after {pass} passes (residual {residual:e})");
            return assemble(config, state_a, &hot, &cold, pass);
        }
        state_a = cold.final_state;
    }
    Err(Error::LimitCycleOpen {
        cycles: MAX_CYCLES,
        residual,
    })
}

fn assemble(
    config: &OttoConfig,
    start: QubitState,
    hot: &StrokeRecord,
    cold: &StrokeRecord,
    cycles: usize,
) -> Result<CycleReport> {
    let (wc, wh) = (config.omega_c, config.omega_h);
    let after_hot = hot.final_state;
    let energy_a = start.energy(wc);
    let energy_b = start.energy(wh);
    let energy_c = after_hot.energy(wh);
    let energy_d = after_hot.energy(wc);

    let q_h = energy_c - energy_b;
    // Heat of the last cold stroke as actually run, so the first law holds
    // up to the closure residual.
    let q_c = cold.final_state.energy(wc) - energy_d;
    let e_ab = energy_b - energy_a;
    let e_cd = energy_d - energy_c;
    let work = -(q_h + q_c);

    let tau_h = hot.duration;
    let tau_c = cold.duration;
    let tau_total = config.tau_u1 + tau_h + config.tau_u2 + tau_c;
    if !(tau_total > 0.0) {
        return Err(Error::invalid("tau_total", "cycle period is zero"));
    }
    let power = work / tau_total;

    let mut report = CycleReport {
        mode: config.mode,
        p1_a: start.p1,
        p1_c: after_hot.p1,
        energy_a,
        energy_b,
        energy_c,
        energy_d,
        q_h,
        q_c,
        e_ab,
        e_cd,
        work,
        tau_h,
        tau_c,
        tau_total,
        power,
        power_abs: power.abs(),
        eta: None,
        kappa: q_c / tau_total,
        cop: None,
        regime: classify_regime(q_h, q_c, work),
        n_cp_hot: hot.n_cp,
        n_cp_cold: cold.n_cp,
        n_dc_hot: hot.n_dc,
        n_dc_cold: cold.n_dc,
        cycles,
    };
    report.eta = efficiency(&report).ok();
    report.cop = cooling_rate_and_cop(&report).ok().map(|(_, cop)| cop);
    Ok(report)
}

/// `eta = -W / Q_h`.
pub fn efficiency(report: &CycleReport) -> Result<f64> {
    if report.q_h == 0.0 {
        return Err(Error::UndefinedEfficiency);
    }
    Ok(-report.work / report.q_h)
}

/// Cooling rate `Q_c / tau` and coefficient of performance
/// `Q_c / (E_AB + E_CD)`.
pub fn cooling_rate_and_cop(report: &CycleReport) -> Result<(f64, f64)> {
    if !(report.tau_total > 0.0) {
        return Err(Error::invalid("tau_total", "cycle period is zero"));
    }
    let kappa = report.q_c / report.tau_total;
    let input = report.e_ab + report.e_cd;
    if input == 0.0 {
        return Err(Error::UndefinedCop);
    }
    Ok((kappa, report.q_c / input))
}

pub fn classify_regime(q_h: f64, q_c: f64, work: f64) -> Regime {
    if q_h > 0.0 && q_c < 0.0 && work < 0.0 {
        Regime::Engine
    } else if q_h < 0.0 && q_c > 0.0 && work > 0.0 {
        Regime::Refrigerator
    } else if q_c < 0.0 && work > 0.0 {
        Regime::HeatDistributor
    } else {
        Regime::Other
    }
}
