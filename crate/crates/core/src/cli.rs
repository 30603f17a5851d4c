//! Subcommand implementations behind the `azd-otto` binary.
//!
//! Each command reads a resolved [`RunConfig`], writes its CSV artifacts into
//! the output directory and returns a one-line summary plus the process exit
//! code: 0 on success, 2 for configuration errors, 3 for convergence
//! failures and 4 for quadrature failures.

use std::path::{Path, PathBuf};

use crate::config::{BathSide, RunConfig};
use crate::cycle::{run_limit_cycle, CycleReport, Mode};
use crate::dynamics::{
    gibbs_state, markovian_thermalization_stroke_with_coupling, run_thermalization_stroke_sampled,
    StrokeRecord, TrajectoryPoint, WindowKind,
};
use crate::error::{Error, ErrorKind};
use crate::output::{format_number, format_opt, CsvDocument};
use crate::spectral::spectral_density;
use crate::sweep::{overlap_dataset, qa_sweep, thermalization_time_sweep, Observable, SweepRow};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CONVERGENCE: i32 = 3;
pub const EXIT_QUADRATURE: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Thermalize,
    Cycle,
    Sweep,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Thermalize => "thermalize",
            Command::Cycle => "cycle",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub summary: String,
    pub files: Vec<PathBuf>,
    pub exit_code: i32,
}

#[derive(Debug)]
pub enum CliError {
    Model(Error),
    Io(PathBuf, std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Model(e) => write!(f, "{e}"),
            CliError::Io(path, e) => write!(f, "{}: {e}", path.display()),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Model(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(e) => exit_code(e),
            CliError::Io(..) => EXIT_IO,
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e.kind() {
        ErrorKind::Invalid => EXIT_CONFIG,
        ErrorKind::Convergence => EXIT_CONVERGENCE,
        ErrorKind::Quadrature => EXIT_QUADRATURE,
    }
}

struct Writer<'a> {
    dir: &'a Path,
    header: String,
    files: Vec<PathBuf>,
}

impl Writer<'_> {
    fn document(&self) -> CsvDocument {
        CsvDocument::with_comment(&self.header)
    }

    fn write(&mut self, name: &str, doc: &CsvDocument) -> Result<(), CliError> {
        let path = self.dir.join(name);
        doc.write_to(&path).map_err(|e| CliError::Io(path.clone(), e))?;
        log::info!("wrote {}", path.display());
        self.files.push(path);
        Ok(())
    }
}

pub fn run(command: Command, config: &RunConfig, out_dir: &Path) -> Result<Outcome, CliError> {
    let header = format!(
        "azd-otto {} {}\nhbar = k_B = 1; durations in units of {}\n\n{}",
        command.name(),
        env!("CARGO_PKG_VERSION"),
        match config.time_unit {
            crate::config::TimeUnit::CorrelationTime => "the hot-bath correlation time 1/width",
            crate::config::TimeUnit::Absolute => "absolute time",
        },
        config.to_toml()
    );
    let mut writer = Writer {
        dir: out_dir,
        header,
        files: Vec::new(),
    };
    let (summary, exit_code) = match command {
        Command::Spectrum => cmd_spectrum(config, &mut writer)?,
        Command::Thermalize => cmd_thermalize(config, &mut writer)?,
        Command::Cycle => cmd_cycle(config, &mut writer)?,
        Command::Sweep => cmd_sweep(config, &mut writer)?,
    };
    Ok(Outcome {
        summary,
        files: writer.files,
        exit_code,
    })
}

fn side_name(side: BathSide) -> &'static str {
    match side {
        BathSide::Hot => "hot",
        BathSide::Cold => "cold",
    }
}

fn overlap_file(
    config: &RunConfig,
    writer: &mut Writer<'_>,
    side: BathSide,
    t: f64,
    name: &str,
) -> Result<(), CliError> {
    let model = config.spectral_model(side)?;
    let data = overlap_dataset(&model, model.omega_ref, t, &config.quadrature)?;
    let mut doc = writer.document();
    doc.comment(&format!(
        "overlap: bath = {}, omega = {}, t = {}, R = {}, pi G(omega) = {}",
        side_name(side),
        format_number(data.omega),
        format_number(data.t),
        format_number(data.overlap),
        format_number(data.markov)
    ));
    doc.row(["nu", "G", "sinc_kernel"]);
    for s in &data.samples {
        doc.row([format_number(s.nu), format_number(s.g), format_number(s.sinc_kernel)]);
    }
    writer.write(name, &doc)
}

fn cmd_spectrum(config: &RunConfig, writer: &mut Writer<'_>) -> Result<(String, i32), CliError> {
    let section = config.spectrum.clone().unwrap_or_default();
    let model = config.spectral_model(section.bath)?;
    if section.samples < 2 {
        return Err(Error::invalid("samples", "need at least 2 samples").into());
    }
    let peak = model.peak_frequency();
    let lo = section.nu_min.unwrap_or(peak - 20.0 * model.width);
    let hi = section.nu_max.unwrap_or(peak + 20.0 * model.width);
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::invalid("nu_max", "must exceed nu_min").into());
    }

    let mut doc = writer.document();
    doc.row(["nu", "G"]);
    let step = (hi - lo) / (section.samples - 1) as f64;
    let mut best = (f64::NEG_INFINITY, lo);
    for k in 0..section.samples {
        let nu = lo + step * k as f64;
        let g = spectral_density(&model, nu)?;
        if g > best.0 {
            best = (g, nu);
        }
        doc.row([format_number(nu), format_number(g)]);
    }
    let side = side_name(section.bath);
    writer.write(&format!("spectrum_{side}.csv"), &doc)?;

    let scale = config.time_scale()?;
    for (k, &t) in section.overlap_times.iter().enumerate() {
        overlap_file(config, writer, section.bath, t * scale, &format!("overlap_{side}_{k}.csv"))?;
    }
    Ok((
        format!(
            "spectrum: {} samples, max G = {} at nu = {}",
            section.samples,
            format_number(best.0),
            format_number(best.1)
        ),
        EXIT_OK,
    ))
}

fn trajectory_rows(doc: &mut CsvDocument, points: &[TrajectoryPoint]) {
    doc.row(["time", "p1", "window_kind"]);
    for p in points {
        doc.row([format_number(p.time), format_number(p.p1), p.kind.as_str().to_string()]);
    }
}

fn cmd_thermalize(config: &RunConfig, writer: &mut Writer<'_>) -> Result<(String, i32), CliError> {
    let section = config.thermalize.clone().unwrap_or_default();
    let otto = config.otto_config()?;
    let (model, omega, beta, schedule, start) = match section.bath {
        BathSide::Hot => (
            otto.hot_bath,
            otto.omega_h,
            otto.beta_h,
            otto.hot_schedule,
            gibbs_state(otto.omega_c, otto.beta_c)?,
        ),
        BathSide::Cold => (
            otto.cold_bath,
            otto.omega_c,
            otto.beta_c,
            otto.cold_schedule,
            gibbs_state(otto.omega_h, otto.beta_h)?,
        ),
    };
    let target = gibbs_state(omega, beta)?;

    let result: Result<StrokeRecord, Error> = match otto.mode {
        Mode::Azd => run_thermalization_stroke_sampled(
            start,
            &model,
            omega,
            &schedule,
            &otto.criterion,
            beta,
            &config.quadrature,
            section.samples_per_window,
        ),
        Mode::Markovian => markovian_thermalization_stroke_with_coupling(
            start,
            &model,
            omega,
            &otto.criterion,
            beta,
            schedule.lambda_bar,
        )
        .map(|mut rec| {
            rec.trajectory = Some(vec![
                TrajectoryPoint { time: 0.0, p1: start.p1, kind: WindowKind::Coupling },
                TrajectoryPoint { time: rec.duration, p1: rec.final_state.p1, kind: WindowKind::Coupling },
            ]);
            rec
        }),
    };

    let mut summary = writer.document();
    summary.row([
        "converged", "duration", "n_cp", "n_dc", "p1_initial", "p1_final", "p1_target", "distance",
    ]);
    match result {
        Ok(rec) => {
            let mut doc = writer.document();
            trajectory_rows(&mut doc, rec.trajectory.as_deref().unwrap_or_default());
            writer.write("trajectory.csv", &doc)?;
            summary.row([
                "true".to_string(),
                format_number(rec.duration),
                rec.n_cp.to_string(),
                rec.n_dc.to_string(),
                format_number(start.p1),
                format_number(rec.final_state.p1),
                format_number(target.p1),
                format_number(rec.final_state.distance(&target)),
            ]);
            writer.write("stroke.csv", &summary)?;
            Ok((
                format!(
                    "thermalize: converged in {} with n_cp = {}, n_dc = {}",
                    format_number(rec.duration),
                    rec.n_cp,
                    rec.n_dc
                ),
                EXIT_OK,
            ))
        }
        Err(e) if e.kind() == ErrorKind::Convergence => {
            log::error!("{e}");
            let best = match e {
                Error::StrokeNonConvergence { best_distance, .. } => Some(best_distance),
                _ => None,
            };
            summary.row([
                "false".to_string(),
                String::new(),
                String::new(),
                String::new(),
                format_number(start.p1),
                String::new(),
                format_number(target.p1),
                format_opt(best),
            ]);
            writer.write("stroke.csv", &summary)?;
            Ok((format!("thermalize: not converged ({e})"), EXIT_CONVERGENCE))
        }
        Err(e) => Err(e.into()),
    }
}

/// Column names and values of a cycle report, in output order.
pub fn cycle_fields(report: &CycleReport) -> Vec<(&'static str, String)> {
    let f = format_number;
    vec![
        ("mode", match report.mode {
            Mode::Azd => "azd".to_string(),
            Mode::Markovian => "markovian".to_string(),
        }),
        ("regime", report.regime.as_str().to_string()),
        ("p1_a", f(report.p1_a)),
        ("p1_c", f(report.p1_c)),
        ("E_A", f(report.energy_a)),
        ("E_B", f(report.energy_b)),
        ("E_C", f(report.energy_c)),
        ("E_D", f(report.energy_d)),
        ("Q_h", f(report.q_h)),
        ("Q_c", f(report.q_c)),
        ("E_AB", f(report.e_ab)),
        ("E_CD", f(report.e_cd)),
        ("W", f(report.work)),
        ("tau_h", f(report.tau_h)),
        ("tau_c", f(report.tau_c)),
        ("tau_total", f(report.tau_total)),
        ("P", f(report.power)),
        ("P_abs", f(report.power_abs)),
        ("eta", format_opt(report.eta)),
        ("kappa", f(report.kappa)),
        ("cop", format_opt(report.cop)),
        ("n_cp_hot", report.n_cp_hot.to_string()),
        ("n_cp_cold", report.n_cp_cold.to_string()),
        ("n_dc_hot", report.n_dc_hot.to_string()),
        ("n_dc_cold", report.n_dc_cold.to_string()),
        ("cycles", report.cycles.to_string()),
    ]
}

fn cmd_cycle(config: &RunConfig, writer: &mut Writer<'_>) -> Result<(String, i32), CliError> {
    let otto = config.otto_config()?;
    match run_limit_cycle(&otto, &config.quadrature) {
        Ok(report) => {
            let fields = cycle_fields(&report);
            let mut doc = writer.document();
            doc.row(std::iter::once("converged").chain(fields.iter().map(|(k, _)| *k)));
            doc.row(std::iter::once("true".to_string()).chain(fields.into_iter().map(|(_, v)| v)));
            writer.write("cycle.csv", &doc)?;
            Ok((
                format!(
                    "cycle: {} with W = {}, tau = {}, P = {}, kappa = {}",
                    report.regime.as_str(),
                    format_number(report.work),
                    format_number(report.tau_total),
                    format_number(report.power),
                    format_number(report.kappa)
                ),
                EXIT_OK,
            ))
        }
        Err(e) if e.kind() == ErrorKind::Convergence => {
            log::error!("{e}");
            let mut doc = writer.document();
            doc.comment(&format!("error: {e}"));
            doc.row(["converged"]);
            doc.row(["false"]);
            writer.write("cycle.csv", &doc)?;
            Ok((format!("cycle: not converged ({e})"), EXIT_CONVERGENCE))
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_sweep(config: &RunConfig, writer: &mut Writer<'_>) -> Result<(String, i32), CliError> {
    let spec = config.sweep_spec()?;
    let grid = config.sweep_grid()?;
    let q = &config.quadrature;

    let rows: Vec<SweepRow> = match spec.observable {
        Observable::ThermalizationTime => thermalization_time_sweep(&spec, q).map(|s| s.into_rows()),
        _ => qa_sweep(&spec, q),
    }?;

    let mut doc = writer.document();
    doc.row(["tau_cp", "value", "baseline", "qa_ratio", "n_dc_hot", "n_dc_cold", "converged"]);
    for (row, tau) in rows.iter().zip(&grid) {
        doc.row([
            format_number(*tau),
            format_opt(row.value),
            format_opt(row.baseline),
            format_opt(row.qa_ratio),
            row.n_dc_hot.map(|n| n.to_string()).unwrap_or_default(),
            row.n_dc_cold.map(|n| n.to_string()).unwrap_or_default(),
            row.converged.to_string(),
        ]);
    }
    writer.write("sweep.csv", &doc)?;

    if spec.emit_overlap {
        let t = spec.tau_cp_grid[0];
        overlap_file(config, writer, BathSide::Hot, t, "overlap_hot.csv")?;
        overlap_file(config, writer, BathSide::Cold, t, "overlap_cold.csv")?;
    }

    let converged = rows.iter().filter(|r| r.converged).count();
    let above = rows.iter().filter(|r| r.qa_ratio.is_some_and(|x| x > 1.0)).count();
    let max = rows.iter().filter_map(|r| r.qa_ratio).fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))));
    Ok((
        format!(
            "sweep: {} rows, {} converged, {} with qa_ratio > 1, max qa_ratio = {}",
            rows.len(),
            converged,
            above,
            max.map(format_number).unwrap_or_else(|| "n/a".into())
        ),
        EXIT_OK,
    ))
}
