//! Bath spectral response functions and the time-dependent response
//! coefficients obtained by convolving them with the sinc kernel.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};

/// Super-Ohmic exponent used when none is configured.
pub const DEFAULT_OHMIC_EXPONENT: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralKind {
    Lorentzian,
    SuperOhmic,
}

/// Spectral response `G(nu)` of one thermal bath.
///
/// For `nu >= 0` the closed form of `kind` applies; the negative branch is
/// fixed by detailed balance, `G(-|nu|) = exp(-|nu| beta) G(|nu|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralModel {
    pub kind: SpectralKind,
    /// Coupling-strength prefactor.
    pub gamma0: f64,
    /// Lorentzian half-width, or the super-Ohmic cutoff scale.
    pub width: f64,
    /// Peak offset above `omega_ref` (Lorentzian) or edge offset below it
    /// (super-Ohmic).
    pub detuning: f64,
    /// Super-Ohmic exponent; ignored for Lorentzian baths.
    pub ohmic_exponent: f64,
    /// Bath inverse temperature.
    pub beta: f64,
    /// Working-medium gap the spectrum is anchored to.
    pub omega_ref: f64,
}

impl SpectralModel {
    pub fn lorentzian(gamma0: f64, width: f64, detuning: f64, beta: f64, omega_ref: f64) -> Result<Self> {
        let model = SpectralModel {
            kind: SpectralKind::Lorentzian,
            gamma0,
            width,
            detuning,
            ohmic_exponent: DEFAULT_OHMIC_EXPONENT,
            beta,
            omega_ref,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn super_ohmic(
        gamma0: f64,
        width: f64,
        detuning: f64,
        ohmic_exponent: f64,
        beta: f64,
        omega_ref: f64,
    ) -> Result<Self> {
        let model = SpectralModel {
            kind: SpectralKind::SuperOhmic,
            gamma0,
            width,
            detuning,
            ohmic_exponent,
            beta,
            omega_ref,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        positive("gamma0", self.gamma0)?;
        positive("width", self.width)?;
        positive("beta", self.beta)?;
        positive("omega_ref", self.omega_ref)?;
        if !self.detuning.is_finite() {
            return Err(Error::invalid("detuning", "must be finite"));
        }
        if self.kind == SpectralKind::SuperOhmic
            && !(self.ohmic_exponent.is_finite() && self.ohmic_exponent > 1.0)
        {
            return Err(Error::invalid(
                "ohmic_exponent",
                format!("must be > 1 for a super-Ohmic bath, got {}", self.ohmic_exponent),
            ));
        }
        Ok(())
    }

    /// The same spectral shape re-anchored to another gap and temperature.
    pub fn anchored(self, omega_ref: f64, beta: f64) -> Self {
        SpectralModel {
            omega_ref,
            beta,
            ..self
        }
    }

    /// Bath correlation time `1 / width`.
    pub fn correlation_time(&self) -> f64 {
        1.0 / self.width
    }

    /// Frequency of the spectral maximum on the positive axis.
    pub fn peak_frequency(&self) -> f64 {
        match self.kind {
            SpectralKind::Lorentzian => (self.omega_ref + self.detuning).max(0.0),
            SpectralKind::SuperOhmic => {
                (self.edge() + self.ohmic_exponent * self.width).max(0.0)
            }
        }
    }

    fn edge(&self) -> f64 {
        self.omega_ref - self.detuning
    }

    fn positive_branch(&self, nu: f64) -> f64 {
        match self.kind {
            SpectralKind::Lorentzian => {
                let x = nu - self.omega_ref - self.detuning;
                self.gamma0 * self.width * self.width / (x * x + self.width * self.width)
            }
            SpectralKind::SuperOhmic => {
                let x = nu - self.edge();
                if x < 0.0 {
                    0.0
                } else {
                    let s = self.ohmic_exponent;
                    self.gamma0 * x.powf(s) / self.width.powf(s - 1.0) * (-x / self.width).exp()
                }
            }
        }
    }

    /// Unchecked evaluation of `G(nu)`; the model must already be valid.
    pub(crate) fn density(&self, nu: f64) -> f64 {
        if nu >= 0.0 {
            self.positive_branch(nu)
        } else {
            (nu * self.beta).exp() * self.positive_branch(-nu)
        }
    }

    /// Intervals on the positive and negative axes outside which `G` is
    /// treated as negligible.
    fn support(&self, factor: f64) -> [(f64, f64); 2] {
        let (lo, hi) = match self.kind {
            SpectralKind::Lorentzian => {
                let center = (self.omega_ref + self.detuning).max(0.0);
                let half = factor * self.width;
                ((center - half).max(0.0), center + half)
            }
            SpectralKind::SuperOhmic => {
                let lo = self.edge().max(0.0);
                (lo, lo + (factor + 2.0 * self.ohmic_exponent) * self.width)
            }
        };
        [(lo, hi), (-hi, -lo)]
    }

    fn landmarks(&self) -> [f64; 3] {
        let mark = match self.kind {
            SpectralKind::Lorentzian => self.omega_ref + self.detuning,
            SpectralKind::SuperOhmic => self.edge(),
        };
        [0.0, mark, -mark]
    }
}

fn positive(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be positive and finite, got {value}")))
    }
}

/// Controls the sinc-kernel quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Half-width of the kernel window in units of `max(width, 2 pi / t)`;
    /// also scales the spectral support windows.
    pub window_halfwidth_factor: f64,
    /// Bisections allowed beyond the initial zero-aligned partition.
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            window_halfwidth_factor: 40.0,
            max_subdivisions: 10_000,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        positive("rel_tol", self.rel_tol)?;
        positive("abs_tol", self.abs_tol)?;
        positive("window_halfwidth_factor", self.window_halfwidth_factor)?;
        if self.max_subdivisions < 1 {
            return Err(Error::invalid("max_subdivisions", "must be at least 1"));
        }
        Ok(())
    }

    fn tolerance(&self) -> Tolerance {
        Tolerance {
            rel: self.rel_tol,
            abs: self.abs_tol,
            max_subdivisions: self.max_subdivisions,
        }
    }

    /// Kernel-window half-width around the kernel center for time `t`.
    pub fn kernel_halfwidth(&self, model: &SpectralModel, t: f64) -> f64 {
        self.window_halfwidth_factor * model.width.max(2.0 * PI / t)
    }
}

/// `sin(x t) / x`, with the removable point `x = 0` mapped to `t`.
pub fn sinc_kernel(x: f64, t: f64) -> f64 {
    let y = x * t;
    if y.abs() < 1e-3 {
        let y2 = y * y;
        t * (1.0 - y2 / 6.0 + y2 * y2 / 120.0)
    } else {
        (y).sin() / x
    }
}

/// `(1 - cos(x t)) / x^2`, with the removable point `x = 0` mapped to `t^2 / 2`.
fn cosine_kernel(x: f64, t: f64) -> f64 {
    let y = x * t;
    if y.abs() < 1e-3 {
        let y2 = y * y;
        0.5 * t * t * (1.0 - y2 / 12.0 + y2 * y2 / 360.0)
    } else {
        let s = (0.5 * y).sin();
        2.0 * s * s / (x * x)
    }
}

/// Initial partition for a kernel centered at `omega` with time scale `t`:
/// the kernel window and the spectral support windows, merged, and cut at
/// every kernel zero `omega + k pi / t` and at the spectral landmarks.
fn partition(model: &SpectralModel, omega: f64, t: f64, q: &QuadratureConfig) -> Vec<(f64, f64)> {
    let half = q.kernel_halfwidth(model, t);
    let mut windows = vec![(omega - half, omega + half)];
    windows.extend(model.support(q.window_halfwidth_factor));
    windows.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(windows.len());
    for (lo, hi) in windows {
        match merged.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }

    let spacing = PI / t;
    let landmarks = model.landmarks();
    let mut panels = Vec::new();
    for (lo, hi) in merged {
        let mut cuts = vec![lo, hi];
        let k_lo = ((lo - omega) / spacing).ceil() as i64;
        let k_hi = ((hi - omega) / spacing).floor() as i64;
        cuts.extend((k_lo..=k_hi).map(|k| omega + k as f64 * spacing));
        cuts.extend(landmarks.iter().copied().filter(|&m| m > lo && m < hi));
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
        panels.extend(cuts.windows(2).map(|w| (w[0], w[1])));
    }
    panels
}

/// `G(nu)` for any finite `nu`.
pub fn spectral_density(model: &SpectralModel, nu: f64) -> Result<f64> {
    model.validate()?;
    if !nu.is_finite() {
        return Err(Error::invalid("nu", "frequency must be finite"));
    }
    Ok(model.density(nu))
}

/// `R(omega, t) = int G(nu) sin((nu - omega) t) / (nu - omega) dnu`.
///
/// Negative values signal non-Markovian dynamics.
pub fn response_coefficient(
    model: &SpectralModel,
    omega: f64,
    t: f64,
    q: &QuadratureConfig,
) -> Result<f64> {
    check_kernel_args(model, omega, t, q)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let f = |nu: f64| model.density(nu) * sinc_kernel(nu - omega, t);
    let est = quadrature::integrate(&f, &partition(model, omega, t, q), q.tolerance())?;
    Ok(est.value)
}

/// Constant rate `pi G(omega)` reached once the sinc kernel is much narrower
/// than the spectrum.
pub fn markovian_rate(model: &SpectralModel, omega: f64) -> Result<f64> {
    Ok(PI * spectral_density(model, omega)?)
}

/// `J(T) = 2 int_0^T R(omega, t) dt`, evaluated in the exchanged order
/// `2 int G(nu) (1 - cos((nu - omega) T)) / (nu - omega)^2 dnu`.
pub fn accumulated_rate(
    model: &SpectralModel,
    omega: f64,
    duration: f64,
    q: &QuadratureConfig,
) -> Result<f64> {
    check_kernel_args(model, omega, duration, q)?;
    if duration == 0.0 {
        return Ok(0.0);
    }
    let f = |nu: f64| 2.0 * model.density(nu) * cosine_kernel(nu - omega, duration);
    let est = quadrature::integrate(&f, &partition(model, omega, duration, q), q.tolerance())?;
    Ok(est.value)
}

fn check_kernel_args(model: &SpectralModel, omega: f64, t: f64, q: &QuadratureConfig) -> Result<()> {
    model.validate()?;
    q.validate()?;
    if !omega.is_finite() {
        return Err(Error::invalid("omega", "must be finite"));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid("t", format!("time must be finite and non-negative, got {t}")));
    }
    Ok(())
}
