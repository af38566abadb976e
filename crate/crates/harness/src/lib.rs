//! Experiment orchestration: configuration, named initial-data generators,
//! experiment drivers, and run manifests.

pub mod config;
pub mod error;
pub mod experiments;
pub mod generators;
pub mod manifest;

pub use config::{fnv1a, Config};
pub use error::{HarnessError, Result};
pub use manifest::RunManifest;

/// Apply environment overrides: `NSSL_THREADS` sizes the worker pool,
/// `NSSL_DETERMINISTIC` forces the deterministic flag on. Reductions that
/// feed reported values always run in a fixed order, so determinism holds
/// regardless of the worker count; the flag is recorded for provenance.
pub fn init_from_env() {
    if let Ok(threads) = std::env::var("NSSL_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Effective deterministic flag: environment overrides config.
pub fn deterministic_flag(config: &Config) -> bool {
    match std::env::var("NSSL_DETERMINISTIC") {
        Ok(v) if v == "1" || v == "true" => true,
        Ok(v) if v == "0" || v == "false" => false,
        _ => config.bool("run.deterministic", true).unwrap_or(true),
    }
}
