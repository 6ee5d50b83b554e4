//! `homsim sweep`: one scenario parameter stepped over a range.

use std::path::Path;
use std::str::FromStr;

use clap::ValueEnum;
use homsim_core::montecarlo::Mode;

use super::evaluate::evaluate;
use crate::config::{Artifact, ScenarioConfig};
use crate::error::{CliError, CliResult};
use crate::output::{csv_bytes, ensure_dir, fixed, write_atomic, RunLog};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    /// Arrival offset of the two photons (ns).
    #[value(name = "delta_t")]
    DeltaT,
    /// Mean detuning (µeV).
    #[value(name = "detuning")]
    Detuning,
    /// Combined frequency jitter (rad/ns).
    #[value(name = "sigma_g")]
    SigmaG,
    /// Temperature (K), mapped linearly to the detuning.
    #[value(name = "temperature-proxy")]
    TemperatureProxy,
}

/// `start:stop:steps`, inclusive of both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl FromStr for SweepRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected start:stop:steps, got {s:?}"));
        }
        let num = |p: &str| p.trim().parse::<f64>().ok().filter(|v| v.is_finite());
        let (Some(start), Some(stop)) = (num(parts[0]), num(parts[1])) else {
            return Err(format!("start and stop must be numbers, got {s:?}"));
        };
        let steps: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| format!("steps must be a positive integer, got {:?}", parts[2]))?;
        if steps == 0 {
            return Err("steps must be at least 1".into());
        }
        if steps == 1 && start != stop {
            return Err("a single step needs start == stop".into());
        }
        Ok(Self { start, stop, steps })
    }
}

impl SweepRange {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let n = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| self.start + (self.stop - self.start) * i as f64 / n)
            .collect()
    }
}

/// The configuration with the axis set to `value`.
fn apply(config: &ScenarioConfig, axis: Axis, value: f64) -> CliResult<ScenarioConfig> {
    let mut c = config.clone();
    let s = &mut c.scenario;
    match axis {
        Axis::DeltaT => s.delta_tau_ns = value,
        Axis::Detuning => s.detuning_uev = value,
        Axis::SigmaG => {
            if !(value >= 0.0) {
                return Err(CliError::Input(format!(
                    "sigma_g values must be non-negative, got {value}"
                )));
            }
            s.sigma_g_rad_per_ns = value;
        }
        Axis::TemperatureProxy => {
            let slope = config.sweep.temperature_slope_uev_per_k.ok_or_else(|| {
                CliError::Input("the temperature-proxy axis needs sweep.temperature_slope_ueV_per_K in the config".into())
            })?;
            s.detuning_uev = config.scenario.detuning_uev
                + slope * (value - config.sweep.temperature_reference_k);
        }
    }
    if let Some(n) = config.sweep.pulses_per_point {
        s.n_pulses = n;
    }
    Ok(c)
}

fn check_axis(config: &ScenarioConfig, axis: Axis) -> CliResult<()> {
    let spectral = matches!(axis, Axis::Detuning | Axis::SigmaG | Axis::TemperatureProxy);
    if spectral && config.scenario.mode != Mode::RemoteEmitters {
        return Err(CliError::Input(format!(
            "axis {:?} needs two independent emitters (mode remote-emitters), config has {:?}",
            axis.to_possible_value()
                .map(|v| v.get_name().to_string())
                .unwrap_or_default(),
            config.scenario.mode
        )));
    }
    if axis == Axis::TemperatureProxy && config.sweep.temperature_slope_uev_per_k.is_none() {
        return Err(CliError::Input(
            "the temperature-proxy axis needs sweep.temperature_slope_ueV_per_K in the config"
                .into(),
        ));
    }
    Ok(())
}

pub fn run(
    config_path: &Path,
    axis: Axis,
    range: SweepRange,
    out_dir: &Path,
    seed: Option<u64>,
) -> CliResult<()> {
    let mut log = RunLog::default();
    log.line(format!(
        "sweep config={} axis={axis:?} range={range:?}",
        config_path.display()
    ));
    let mut config = ScenarioConfig::from_path(config_path)?;
    if let Some(seed) = seed {
        config.rng.seed = seed;
    }
    let config = config.effective();
    check_axis(&config, axis)?;
    let values = range.values();
    let points: Vec<ScenarioConfig> = values
        .iter()
        .map(|&v| apply(&config, axis, v))
        .collect::<CliResult<_>>()?;
    for p in &points {
        p.scenario().map_err(CliError::from)?;
    }
    let analytic_only = config.model_overrides.analytic_only;

    let mut rows = Vec::with_capacity(values.len());
    for (i, (value, point)) in values.iter().zip(&points).enumerate() {
        let scenario = point.scenario()?;
        let mut rng = point.rng();
        // Each point draws from its own stream.
        rng.stream_id = u32::try_from(i)
            .ok()
            .and_then(|i| rng.stream_id.checked_add(i))
            .ok_or_else(|| {
                CliError::Input("too many sweep points for the configured stream_id".into())
            })?;
        let eval = evaluate(&scenario, &point.peak_options(), &rng, analytic_only)?;
        let a = &eval.analytic;
        let (visibility, g2, err) = match &eval.monte_carlo {
            Some(m) => (m.visibility, m.g2_indist, m.g2_error),
            None => (a.visibility, a.g2_indist, 0.0),
        };
        log.line(format!(
            "{value} -> g2_indist={g2:.6} +- {err:.6}, analytic {:.6}",
            a.g2_indist
        ));
        rows.push(vec![
            fixed(*value),
            fixed(visibility),
            fixed(g2),
            fixed(err),
            fixed(a.visibility),
            fixed(a.g2_indist),
            fixed(a.visibility_model),
        ]);
    }
    let header = [
        "axis_value",
        "visibility",
        "g2_indist",
        "stat_error",
        "visibility_analytic",
        "g2_indist_analytic",
        "visibility_model",
    ];
    let bytes = csv_bytes(&header, rows)?;
    ensure_dir(out_dir)?;
    write_atomic(&out_dir.join("sweep.csv"), &bytes)?;
    log.line("wrote sweep.csv");
    if config.wants(Artifact::Log) {
        log.line("done");
        write_atomic(&out_dir.join("run.log"), &log.bytes())?;
    }
    println!(
        "{} sweep points written to {}",
        values.len(),
        out_dir.join("sweep.csv").display()
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parsing() {
        let r: SweepRange = "-3:3:7".parse().unwrap();
        assert_eq!(r.values(), vec![-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
        assert_eq!("2:2:1".parse::<SweepRange>().unwrap().values(), vec![2.0]);
        for bad in ["1:2", "a:2:3", "1:2:0", "1:2:x", "1:2:1", "1:nan:3"] {
            assert!(bad.parse::<SweepRange>().is_err(), "{bad}");
        }
    }
}
