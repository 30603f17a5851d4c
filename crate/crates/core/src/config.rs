//! Declarative TOML run configuration for the command-line front end.
//!
//! Frequencies and inverse temperatures are in natural units (hbar = k_B = 1).
//! Durations (`tau_*`, overlap times) are in units of the hot bath's
//! correlation time `1 / width` unless `time_unit = "absolute"`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cycle::{Mode, OttoConfig};
use crate::dynamics::{ModulationSchedule, ThermalizationCriterion, DEFAULT_MAX_WINDOWS, DEFAULT_SAMPLES_PER_WINDOW};
use crate::error::{Error, Result};
use crate::spectral::{QuadratureConfig, SpectralKind, SpectralModel, DEFAULT_OHMIC_EXPONENT};
use crate::sweep::{Observable, SweepSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeUnit {
    #[default]
    CorrelationTime,
    Absolute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BathSide {
    #[default]
    Hot,
    Cold,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub time_unit: TimeUnit,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    pub machine: MachineSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bath: Option<BathSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hot_bath: Option<BathSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cold_bath: Option<BathSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thermalize: Option<ThermalizeSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    /// `error`, `warn`, `info`, `debug` or `trace`; `RUST_LOG` takes precedence.
    pub verbosity: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: PathBuf::from("."),
            verbosity: "warn".into(),
        }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineSection {
    pub omega_c: f64,
    pub omega_h: f64,
    pub beta_h: f64,
    pub beta_c: f64,
    #[serde(default)]
    pub tau_u1: f64,
    #[serde(default)]
    pub tau_u2: f64,
    pub epsilon: f64,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default = "one")]
    pub lambda_bar_h: f64,
    #[serde(default = "one")]
    pub lambda_bar_c: f64,
}

fn default_mode() -> Mode {
    Mode::Azd
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathSection {
    pub kind: SpectralKind,
    pub gamma0: f64,
    /// Lorentzian half-width or super-Ohmic cutoff scale.
    pub width: f64,
    pub detuning: f64,
    #[serde(default = "default_exponent")]
    pub ohmic_exponent: f64,
}

fn default_exponent() -> f64 {
    DEFAULT_OHMIC_EXPONENT
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSection {
    pub tau_cp: f64,
    pub tau_dc: f64,
    #[serde(default = "default_max_windows")]
    pub max_windows: usize,
}

fn default_max_windows() -> usize {
    DEFAULT_MAX_WINDOWS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub observable: Observable,
    /// Explicit grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_cp: Option<Vec<f64>>,
    /// `[start, stop, step]`, inclusive of `stop` when it lies on the grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_cp_range: Option<[f64; 3]>,
    #[serde(default)]
    pub emit_overlap: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumSection {
    pub bath: BathSide,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu_max: Option<f64>,
    pub samples: usize,
    /// Times at which to emit overlap datasets.
    pub overlap_times: Vec<f64>,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        SpectrumSection {
            bath: BathSide::Hot,
            nu_min: None,
            nu_max: None,
            samples: 2001,
            overlap_times: Vec::new(),
        }
    }
}

/// Thermalizes with `bath`, starting from the Gibbs state of the other bath.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThermalizeSection {
    pub bath: BathSide,
    pub samples_per_window: usize,
}

impl Default for ThermalizeSection {
    fn default() -> Self {
        ThermalizeSection {
            bath: BathSide::Hot,
            samples_per_window: DEFAULT_SAMPLES_PER_WINDOW,
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: RunConfig =
            toml::from_str(text).map_err(|e| Error::invalid("config", e.to_string().trim_end().to_string()))?;
        config.quadrature.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::invalid("config", format!("cannot read {}: {e}", path.display())))?;
        RunConfig::from_toml_str(&text)
    }

    /// The configuration with all defaults filled in, as TOML.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configuration serializes")
    }

    fn bath_section(&self, side: BathSide) -> Result<BathSection> {
        let specific = match side {
            BathSide::Hot => self.hot_bath,
            BathSide::Cold => self.cold_bath,
        };
        specific
            .or(self.bath)
            .ok_or_else(|| Error::invalid("bath", "missing section [bath] (or [hot_bath] and [cold_bath])"))
    }

    /// Conversion factor from configured durations to absolute time.
    pub fn time_scale(&self) -> Result<f64> {
        match self.time_unit {
            TimeUnit::Absolute => Ok(1.0),
            TimeUnit::CorrelationTime => {
                let width = self.bath_section(BathSide::Hot)?.width;
                if width.is_finite() && width > 0.0 {
                    Ok(1.0 / width)
                } else {
                    Err(Error::invalid("width", format!("must be positive, got {width}")))
                }
            }
        }
    }

    /// Spectral model of one bath, anchored to its gap and temperature.
    pub fn spectral_model(&self, side: BathSide) -> Result<SpectralModel> {
        let b = self.bath_section(side)?;
        let m = &self.machine;
        let (omega, beta) = match side {
            BathSide::Hot => (m.omega_h, m.beta_h),
            BathSide::Cold => (m.omega_c, m.beta_c),
        };
        match b.kind {
            SpectralKind::Lorentzian => SpectralModel::lorentzian(b.gamma0, b.width, b.detuning, beta, omega),
            SpectralKind::SuperOhmic => {
                SpectralModel::super_ohmic(b.gamma0, b.width, b.detuning, b.ohmic_exponent, beta, omega)
            }
        }
    }

    pub fn schedule_section(&self) -> Result<ScheduleSection> {
        self.schedule
            .ok_or_else(|| Error::invalid("schedule", "missing section [schedule]"))
    }

    pub fn otto_config(&self) -> Result<OttoConfig> {
        let m = &self.machine;
        let s = self.schedule_section()?;
        let scale = self.time_scale()?;
        let schedule = |lambda_bar: f64| -> Result<ModulationSchedule> {
            let schedule = ModulationSchedule {
                tau_cp: s.tau_cp * scale,
                tau_dc: s.tau_dc * scale,
                lambda_bar,
                max_windows: s.max_windows,
            };
            schedule.validate()?;
            Ok(schedule)
        };
        let config = OttoConfig {
            omega_c: m.omega_c,
            omega_h: m.omega_h,
            beta_h: m.beta_h,
            beta_c: m.beta_c,
            tau_u1: m.tau_u1 * scale,
            tau_u2: m.tau_u2 * scale,
            hot_schedule: schedule(m.lambda_bar_h)?,
            cold_schedule: schedule(m.lambda_bar_c)?,
            hot_bath: self.spectral_model(BathSide::Hot)?,
            cold_bath: self.spectral_model(BathSide::Cold)?,
            criterion: ThermalizationCriterion::new(m.epsilon)?,
            mode: m.mode,
        };
        config.validate()?;
        Ok(config)
    }

    /// Sweep grid in configured units.
    pub fn sweep_grid(&self) -> Result<Vec<f64>> {
        let sweep = self
            .sweep
            .as_ref()
            .ok_or_else(|| Error::invalid("sweep", "missing section [sweep]"))?;
        match (&sweep.tau_cp, &sweep.tau_cp_range) {
            (Some(grid), None) => Ok(grid.clone()),
            (None, Some([start, stop, step])) => range_grid(*start, *stop, *step),
            _ => Err(Error::invalid("sweep", "give exactly one of `tau_cp` and `tau_cp_range`")),
        }
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        let sweep = self
            .sweep
            .as_ref()
            .ok_or_else(|| Error::invalid("sweep", "missing section [sweep]"))?;
        let scale = self.time_scale()?;
        let spec = SweepSpec {
            base: self.otto_config()?,
            tau_cp_grid: self.sweep_grid()?.into_iter().map(|t| t * scale).collect(),
            observable: sweep.observable,
            emit_overlap: sweep.emit_overlap,
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn range_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite() && step > 0.0 && stop >= start) {
        return Err(Error::invalid("tau_cp_range", "need start <= stop and step > 0"));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    if n > 1_000_000 {
        return Err(Error::invalid("tau_cp_range", "grid has more than 10^6 points"));
    }
    // Each point is rounded to 12 significant digits so that grid values
    // print exactly as configured.
    Ok((0..=n)
        .map(|k| {
            let t = start + step * k as f64;
            format!("{t:.11e}").parse().expect("formatted float parses")
        })
        .collect())
}
