//! Finite-time quantum Otto cycles whose thermalization strokes are driven by
//! repeated short system-bath coupling windows.
//!
//! The crate is organised bottom-up: [`spectral`] evaluates bath spectra and
//! the time-dependent overlap integrals, [`dynamics`] evolves the two-level
//! working medium through coupling and decoupling windows, [`cycle`] closes
//! the four-stroke cycle and reports its thermodynamics, and [`sweep`] scans
//! the coupling-window length against the continuously coupled baseline.

pub mod cli;
pub mod config;
pub mod cycle;
pub mod dynamics;
pub mod error;
pub mod output;
mod quadrature;
pub mod spectral;
pub mod sweep;

pub use config::{BathSide, RunConfig, TimeUnit};
pub use cycle::{
    classify_regime, cooling_rate_and_cop, efficiency, run_limit_cycle, CycleReport, Mode,
    OttoConfig, Regime,
};
pub use dynamics::{
    detect_nonmarkovianity, evolve_coupling_window, evolve_decoupling_window,
    evolve_markovian_window, gibbs_state, markovian_thermalization_stroke,
    markovian_thermalization_stroke_with_coupling, run_thermalization_stroke,
    run_thermalization_stroke_sampled, ModulationSchedule, QubitState, StrokeRecord,
    ThermalizationCriterion, TrajectoryPoint, WindowKind,
};
pub use error::{Error, ErrorKind, Result};
pub use spectral::{
    accumulated_rate, markovian_rate, response_coefficient, sinc_kernel, spectral_density,
    QuadratureConfig, SpectralKind, SpectralModel,
};
pub use sweep::{
    markov_baseline, overlap_dataset, qa_sweep, thermalization_time_sweep, Observable,
    OverlapDataset, SweepRow, SweepSpec, ThermalizationRow, ThermalizationSweep,
};
