//! `nssl` command line: run experiments, fit decay series, inspect run
//! directories and snapshots.
//!
//! Exit codes: 0 pass, 1 monitor failure, 2 configuration error,
//! 3 numerical failure.

use nssl_harness::{config::Config, deterministic_flag, experiments, init_from_env, HarnessError};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

fn main() -> ExitCode {
    init_from_env();
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run_cli(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn usage() -> HarnessError {
    HarnessError::Config {
        line: 0,
        message: "usage: nssl run <config> | nssl fit --series <csv> --window t0,t1 [--name <series>] | nssl report <dir> | nssl snapshot {dump,info} <file>"
            .into(),
    }
}

fn run_cli(args: &[String]) -> Result<(), HarnessError> {
    match args.first().map(String::as_str) {
        Some("run") => {
            let path = args.get(1).ok_or_else(usage)?;
            cmd_run(Path::new(path))
        }
        Some("fit") => cmd_fit(&args[1..]),
        Some("report") => {
            let dir = args.get(1).ok_or_else(usage)?;
            cmd_report(Path::new(dir))
        }
        Some("snapshot") => {
            let mode = args.get(1).ok_or_else(usage)?;
            let file = args.get(2).ok_or_else(usage)?;
            cmd_snapshot(mode, Path::new(file))
        }
        _ => Err(usage()),
    }
}

fn cmd_run(config_path: &Path) -> Result<(), HarnessError> {
    let config = Config::load(config_path)?;
    let outdir = PathBuf::from(config.require("output.dir")?);
    let deterministic = deterministic_flag(&config);
    let (manifest, failed) = experiments::run_to_directory(&config, &outdir)?;
    println!("deterministic: {deterministic}");
    print!("{}", manifest.render());
    if failed.is_empty() {
        Ok(())
    } else {
        Err(HarnessError::MonitorFailure(failed.join(", ")))
    }
}

fn cmd_fit(args: &[String]) -> Result<(), HarnessError> {
    let mut series_path: Option<PathBuf> = None;
    let mut window: Option<(f64, f64)> = None;
    let mut name: Option<String> = None;
    let mut i = 0;
    while i < args.len() {
        match args[i].as_str() {
            "--series" => {
                series_path = Some(PathBuf::from(args.get(i + 1).ok_or_else(usage)?));
                i += 2;
            }
            "--window" => {
                let spec = args.get(i + 1).ok_or_else(usage)?;
                let (a, b) = spec.split_once(',').ok_or_else(usage)?;
                window = Some((
                    a.parse().map_err(|_| usage())?,
                    b.parse().map_err(|_| usage())?,
                ));
                i += 2;
            }
            "--name" => {
                name = Some(args.get(i + 1).ok_or_else(usage)?.clone());
                i += 2;
            }
            _ => return Err(usage()),
        }
    }
    let series_path = series_path.ok_or_else(usage)?;
    let window = window.ok_or_else(usage)?;
    let text = std::fs::read_to_string(&series_path)?;
    let series = nssl_estimates::NormSeries::from_csv(&text)
        .map_err(|e| HarnessError::Numerical(e.to_string()))?;
    let names = match name {
        Some(n) => vec![n],
        None => series.names(),
    };
    for n in names {
        let points = series.get(&n);
        if points.is_empty() {
            continue;
        }
        match nssl_estimates::decay_fit(&points, window) {
            Ok(fit) => println!(
                "{n}: slope {} intercept {} r2 {} window {:?}",
                fit.slope, fit.intercept, fit.r2, fit.window
            ),
            Err(e) => println!("{n}: {e}"),
        }
    }
    Ok(())
}

fn cmd_report(dir: &Path) -> Result<(), HarnessError> {
    let manifest_path = dir.join("manifest.txt");
    let text = std::fs::read_to_string(&manifest_path)?;
    print!("{text}");
    // Re-verify artifact checksums.
    let mut stale = Vec::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("artifact: ") {
            if let Some((path, checksum)) = rest.rsplit_once(' ') {
                let bytes = std::fs::read(path)?;
                let fresh = format!("{:016x}", nssl_harness::fnv1a(&bytes));
                if fresh != checksum {
                    stale.push(path.to_string());
                }
            }
        }
    }
    if stale.is_empty() {
        println!("checksums: ok");
        Ok(())
    } else {
        Err(HarnessError::Numerical(format!(
            "stale artifacts: {}",
            stale.join(", ")
        )))
    }
}

fn cmd_snapshot(mode: &str, file: &Path) -> Result<(), HarnessError> {
    match mode {
        "info" => {
            let text = nssl_spectral::snapshot::describe(file)
                .map_err(|e| HarnessError::Numerical(e.to_string()))?;
            println!("{text}");
            Ok(())
        }
        "dump" => {
            let field = nssl_spectral::snapshot::read_snapshot(file)
                .map_err(|e| HarnessError::Numerical(e.to_string()))?;
            let grid = &field.grid;
            let ndim = grid.ndim();
            let mut idx = [0usize; 3];
            for c in 0..field.ncomp() {
                for flat in 0..grid.len() {
                    grid.unravel(flat, &mut idx[..ndim]);
                    let coords: Vec<String> = (0..ndim)
                        .map(|a| format!("{}", grid.coordinate(a, idx[a])))
                        .collect();
                    println!("{},{},{}", c, coords.join(","), field.data[c][flat]);
                }
            }
            Ok(())
        }
        _ => Err(usage()),
    }
}
