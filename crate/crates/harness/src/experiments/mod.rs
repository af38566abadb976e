//! Experiment registry and orchestration: each kind consumes a parsed
//! config, runs to completion, and returns recorded series plus monitor
//! verdicts; the orchestrator writes the artifacts and the manifest.

pub mod decay;
pub mod euler_lagrange;
pub mod hns2d_exp;
pub mod ins3d_direct;
pub mod ins3d_picard;
pub mod maxreg;
pub mod patch;
pub mod twisted;

use crate::config::Config;
use crate::error::{HarnessError, Result};
use crate::manifest::RunManifest;
use nssl_estimates::{render_reports, MonitorReport, NormSeries, Verdict};
use nssl_spectral::PhysicalField;
use std::path::{Path, PathBuf};

pub struct ExperimentOutput {
    pub series: NormSeries,
    pub reports: Vec<MonitorReport>,
    /// Free-form notes appended after the monitor blocks.
    pub notes: String,
    /// Named snapshots to persist (name, field).
    pub snapshots: Vec<(String, PhysicalField)>,
    /// Extra text artifacts (file name, contents).
    pub text_files: Vec<(String, String)>,
}

impl ExperimentOutput {
    pub fn new() -> Self {
        ExperimentOutput {
            series: NormSeries::new(),
            reports: Vec::new(),
            notes: String::new(),
            snapshots: Vec::new(),
            text_files: Vec::new(),
        }
    }

    pub fn failed_monitors(&self) -> Vec<String> {
        self.reports
            .iter()
            .filter(|r| r.verdict == Verdict::Fail)
            .map(|r| r.id.clone())
            .collect()
    }
}

impl Default for ExperimentOutput {
    fn default() -> Self {
        Self::new()
    }
}

pub fn dispatch(config: &Config) -> Result<ExperimentOutput> {
    match config.experiment_kind()?.as_str() {
        "hns2d" => hns2d_exp::run(config),
        "ins3d-direct" => ins3d_direct::run(config),
        "ins3d-picard" => ins3d_picard::run(config),
        "decay-probe" => decay::run(config),
        "patch" => patch::run(config),
        "twisted-div" => twisted::run(config),
        "stokes-maxreg" => maxreg::run(config),
        "euler-lagrange" => euler_lagrange::run(config),
        _ => unreachable!("kind validated by experiment_kind"),
    }
}

/// Execute the configured experiment and write `series.csv`, `monitors.txt`,
/// snapshots and `manifest.txt` under the output directory. Returns the
/// manifest; the caller maps failed monitors to the exit status.
pub fn run_to_directory(config: &Config, outdir: &Path) -> Result<(RunManifest, Vec<String>)> {
    std::fs::create_dir_all(outdir)?;
    let started = std::time::Instant::now();
    let output = dispatch(config)?;
    let wall = started.elapsed().as_secs_f64();

    let mut artifacts: Vec<PathBuf> = Vec::new();
    let series_path = outdir.join("series.csv");
    std::fs::write(&series_path, output.series.to_csv())?;
    artifacts.push(series_path);

    let monitors_path = outdir.join("monitors.txt");
    let mut text = render_reports(&output.reports);
    if !output.notes.is_empty() {
        text.push('\n');
        text.push_str(&output.notes);
    }
    std::fs::write(&monitors_path, text)?;
    artifacts.push(monitors_path);

    for (name, field) in &output.snapshots {
        let path = outdir.join(format!("{name}.nssl"));
        nssl_spectral::snapshot::write_snapshot(&path, field)?;
        artifacts.push(path);
    }

    for (name, contents) in &output.text_files {
        let path = outdir.join(name);
        std::fs::write(&path, contents)?;
        artifacts.push(path);
    }

    let mut manifest = RunManifest::new(config.hash(), wall, &output.reports);
    for path in &artifacts {
        manifest.add_artifact(path)?;
    }
    manifest.write(&outdir.join("manifest.txt"))?;
    Ok((manifest, output.failed_monitors()))
}

/// Shared helper: initial CFL sanity gate `max|v₀|·dt/Δx` unless waived.
pub fn cfl_gate(
    config: &Config,
    v0: &nssl_spectral::SpectralField,
    dt: f64,
) -> Result<()> {
    if config.bool("time.cfl_waived", false)? {
        return Ok(());
    }
    let limit = config.f64("time.cfl_limit", 1.0)?;
    let measured = v0.to_physical().max_magnitude() * dt / v0.grid.min_spacing();
    if measured > limit {
        return Err(HarnessError::Config {
            line: 0,
            message: format!(
                "time.dt: initial CFL {measured:.3} exceeds limit {limit:.3} (set time.cfl_waived = true to override)"
            ),
        });
    }
    Ok(())
}

/// Shared helper: monitor-subset selection. The experiment passes its full
/// registry; `monitors.list` (when present) must name a subset.
pub fn select_monitors(
    config: &Config,
    registry: &[&str],
    mut reports: Vec<MonitorReport>,
) -> Result<Vec<MonitorReport>> {
    let requested = config.list("monitors.list");
    if requested.is_empty() {
        return Ok(reports);
    }
    for name in &requested {
        if !registry.contains(&name.as_str()) {
            return Err(HarnessError::Config {
                line: 0,
                message: format!(
                    "monitors.list: unknown monitor `{name}` (known: {})",
                    registry.join(", ")
                ),
            });
        }
    }
    reports.retain(|r| requested.iter().any(|n| n == &r.id));
    Ok(reports)
}
