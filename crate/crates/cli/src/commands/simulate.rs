//! `homsim simulate`: one scenario, histogram and summary.

use std::path::Path;

use homsim_core::model::UEV_TO_RAD_PER_NS;
use homsim_core::montecarlo::{BLOCK_PULSES, RNG_ALGORITHM};
use serde::Serialize;

use super::evaluate::{evaluate, AnalyticReference, Discrepancy, MonteCarloEstimate, Windows};
use crate::config::{Artifact, ScenarioConfig};
use crate::error::CliResult;
use crate::output::{ensure_dir, histogram_csv, json_bytes, write_atomic, RunLog};

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub seed: u64,
    pub stream_id: u32,
    pub homsim_version: &'static str,
    pub homsim_core_version: &'static str,
    pub rng_algorithm: &'static str,
    pub block_pulses: u64,
    #[serde(rename = "ueV_to_rad_per_ns")]
    pub uev_to_rad_per_ns: f64,
}

impl Provenance {
    pub fn new(config: &ScenarioConfig) -> Self {
        Self {
            seed: config.rng.seed,
            stream_id: config.rng.stream_id,
            homsim_version: env!("CARGO_PKG_VERSION"),
            homsim_core_version: homsim_core::VERSION,
            rng_algorithm: RNG_ALGORITHM,
            block_pulses: BLOCK_PULSES,
            uev_to_rad_per_ns: UEV_TO_RAD_PER_NS,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub name: Option<String>,
    pub monte_carlo: Option<MonteCarloEstimate>,
    pub analytic: AnalyticReference,
    pub discrepancy: Option<Discrepancy>,
    pub analysis: Windows,
    pub provenance: Provenance,
    pub effective_config: ScenarioConfig,
}

pub fn run(config_path: &Path, out_dir: &Path, seed: Option<u64>) -> CliResult<()> {
    let mut log = RunLog::default();
    log.line(format!("simulate config={}", config_path.display()));
    let mut config = ScenarioConfig::from_path(config_path)?;
    if let Some(seed) = seed {
        config.rng.seed = seed;
    }
    let config = config.effective();
    let scenario = config.scenario()?;
    log.line(format!(
        "mode={:?} n_pulses={} seed={} stream_id={}",
        scenario.mode, scenario.n_pulses, config.rng.seed, config.rng.stream_id
    ));

    let eval = evaluate(
        &scenario,
        &config.peak_options(),
        &config.rng(),
        config.model_overrides.analytic_only,
    )?;
    match &eval.monte_carlo {
        Some(m) => {
            log.line(format!(
                "g2_indist={:.6} +- {:.6} (analytic {:.6}), visibility={:.6} (analytic {:.6}, model {:.6})",
                m.g2_indist, m.g2_error, eval.analytic.g2_indist, m.visibility, eval.analytic.visibility,
                eval.analytic.visibility_model
            ));
        }
        None => log.line(format!(
            "analytic only: g2_indist={:.6}, visibility={:.6}, model visibility={:.6}",
            eval.analytic.g2_indist, eval.analytic.visibility, eval.analytic.visibility_model
        )),
    }

    let summary = Summary {
        schema_version: crate::config::SCHEMA_VERSION,
        command: "simulate",
        name: config.name.clone(),
        monte_carlo: eval.monte_carlo.clone(),
        analytic: eval.analytic.clone(),
        discrepancy: eval.discrepancy.clone(),
        analysis: eval.windows.clone(),
        provenance: Provenance::new(&config),
        effective_config: config.clone(),
    };

    // Everything is computed before the first file is written.
    let mut files: Vec<(&str, Vec<u8>)> = Vec::new();
    if config.wants(Artifact::Histogram) {
        match &eval.histogram {
            Some(h) => files.push(("histogram.csv", histogram_csv(h)?)),
            None => log.line("histogram.csv skipped: analytic_only is set"),
        }
    }
    if config.wants(Artifact::Summary) {
        files.push(("summary.json", json_bytes(&summary)?));
    }
    ensure_dir(out_dir)?;
    for (name, bytes) in &files {
        write_atomic(&out_dir.join(name), bytes)?;
        log.line(format!("wrote {name}"));
    }
    if config.wants(Artifact::Log) {
        log.line("done");
        write_atomic(&out_dir.join("run.log"), &log.bytes())?;
    }

    let a = &eval.analytic;
    match &eval.monte_carlo {
        Some(m) => println!(
            "g2_indist = {:.4} ± {:.4} (analytic {:.4}); visibility = {:.4} ± {:.4} (analytic {:.4})",
            m.g2_indist, m.g2_error, a.g2_indist, m.visibility, m.visibility_error, a.visibility
        ),
        None => println!("g2_indist = {:.4}; visibility = {:.4} (analytic only)", a.g2_indist, a.visibility),
    }
    Ok(())
}
