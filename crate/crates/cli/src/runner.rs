use std::time::Instant;

use crate::config::{ConfigError, Format, RunConfig};
use crate::report::{Metadata, VerificationReport};
use crate::suites::{run_suite, Params};

/// Runs every selected suite in sorted order. `cfg` must be validated.
pub fn run(cfg: &RunConfig) -> VerificationReport {
    let params = Params::from_config(cfg);
    let mut suites = cfg.suites.clone();
    suites.sort();
    let mut records = Vec::new();
    for id in &suites {
        records.extend(run_suite(id, &params).unwrap_or_else(|| panic!("unvalidated suite id {id}")));
    }
    let metadata = Metadata {
        seed: cfg.seed,
        config_hash: cfg.hash(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        suites,
    };
    VerificationReport::new(metadata, records)
}

/// Runs and renders in the configured format, writing to `cfg.output` when set.
pub fn run_and_render(cfg: &RunConfig) -> Result<(VerificationReport, String, f64), ConfigError> {
    let start = Instant::now();
    let report = run(cfg);
    let text = match cfg.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    if let Some(path) = &cfg.output {
        std::fs::write(path, &text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    }
    Ok((report, text, start.elapsed().as_secs_f64()))
}
