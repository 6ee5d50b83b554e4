//! Scenario configuration files.
//!
//! JSON with explicit units in the field names. Every optional field has a
//! default, and [`ScenarioConfig::effective`] fills them in so the echoed
//! configuration reproduces a run on its own.

use std::path::Path;

use homsim_core::analysis::{default_window, PeakAreaOptions};
use homsim_core::model::{PairSpec, UEV_TO_RAD_PER_NS};
use homsim_core::montecarlo::{
    DetectorModel, HistogramSpec, InterferenceScenario, Mode, Polarization, RngSpec,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub analysis: AnalysisSection,
    #[serde(default)]
    pub model_overrides: ModelOverrides,
    #[serde(default = "all_outputs")]
    pub outputs: Vec<Artifact>,
    pub rng: RngSection,
    #[serde(default)]
    pub sweep: SweepSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub mode: Mode,
    pub tau_r_ns: f64,
    /// Homogeneous coherence time; omitted means Fourier limited.
    #[serde(default)]
    pub tau_c_ns: Option<f64>,
    #[serde(default)]
    pub delta_tau_ns: f64,
    /// Mean detuning between the two photons.
    #[serde(default, rename = "detuning_ueV")]
    pub detuning_uev: f64,
    /// Combined Gaussian frequency jitter of the pair.
    #[serde(default)]
    pub sigma_g_rad_per_ns: f64,
    /// Defaults to crossed for the cross-polarized control, parallel otherwise.
    #[serde(default)]
    pub polarization: Option<Polarization>,
    pub rep_period_ns: f64,
    #[serde(default)]
    pub intra_delay_ns: f64,
    #[serde(default)]
    pub emission_jitter_ns: f64,
    pub n_pulses: u64,
    #[serde(default)]
    pub detector: DetectorSection,
    #[serde(default)]
    pub histogram: HistogramSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSection {
    #[serde(default = "one")]
    pub efficiency: f64,
    #[serde(default)]
    pub timing_jitter_sigma_ns: f64,
    #[serde(default)]
    pub dark_rate_per_ns: f64,
}

impl Default for DetectorSection {
    fn default() -> Self {
        Self {
            efficiency: 1.0,
            timing_jitter_sigma_ns: 0.0,
            dark_rate_per_ns: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistogramSection {
    #[serde(default = "default_bin_width")]
    pub bin_width_ns: f64,
    /// Side peaks covered on each side of zero delay.
    #[serde(default = "default_periods")]
    pub periods: u32,
}

impl Default for HistogramSection {
    fn default() -> Self {
        let h = HistogramSpec::default();
        Self {
            bin_width_ns: h.bin_width,
            periods: h.periods,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    /// Defaults to 5·τr, clipped to stay clear of neighbouring peaks.
    #[serde(default)]
    pub window_halfwidth_ns: Option<f64>,
    #[serde(default = "default_side_peaks")]
    pub n_side_peaks: usize,
    #[serde(default)]
    pub subtract_baseline: bool,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        Self {
            window_halfwidth_ns: None,
            n_side_peaks: default_side_peaks(),
            subtract_baseline: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelOverrides {
    /// Skip the Monte Carlo run and report the analytic values only.
    #[serde(default)]
    pub analytic_only: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Artifact {
    Histogram,
    Summary,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RngSection {
    pub seed: u64,
    #[serde(default)]
    pub stream_id: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Detuning change per kelvin for the temperature-proxy axis.
    #[serde(default, rename = "temperature_slope_ueV_per_K")]
    pub temperature_slope_uev_per_k: Option<f64>,
    /// Temperature at which the detuning equals `scenario.detuning_ueV`.
    #[serde(default, rename = "temperature_reference_K")]
    pub temperature_reference_k: f64,
    /// Pulses per sweep point; defaults to `scenario.n_pulses`.
    #[serde(default)]
    pub pulses_per_point: Option<u64>,
}

fn one() -> f64 {
    1.0
}

fn default_bin_width() -> f64 {
    HistogramSpec::default().bin_width
}

fn default_periods() -> u32 {
    HistogramSpec::default().periods
}

fn default_side_peaks() -> usize {
    6
}

fn all_outputs() -> Vec<Artifact> {
    vec![Artifact::Histogram, Artifact::Summary, Artifact::Log]
}

/// `line N: ` prefix for the first occurrence of `"key"` in the raw text.
fn anchor(raw: &str, key: &str) -> String {
    let needle = format!("\"{key}\"");
    match raw.find(&needle) {
        Some(pos) => format!("line {}: ", raw[..pos].lines().count().max(1)),
        None => String::new(),
    }
}

impl ScenarioConfig {
    pub fn from_path(path: &Path) -> CliResult<Self> {
        let raw = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&raw).map_err(|e| match e {
            CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Parses and validates a configuration. Errors name the line of the
    /// offending field.
    pub fn parse(raw: &str) -> CliResult<Self> {
        if raw.trim().is_empty() {
            return Err(CliError::Input("configuration is empty".into()));
        }
        let config: Self = serde_json::from_str(raw).map_err(|e| {
            CliError::Input(format!("line {}, column {}: {e}", e.line(), e.column()))
        })?;
        config.validate(raw)?;
        Ok(config)
    }

    fn validate(&self, raw: &str) -> CliResult<()> {
        let fail = |key: &str, msg: String| {
            Err(CliError::Input(format!("{}{key}: {msg}", anchor(raw, key))))
        };
        if self.schema_version != SCHEMA_VERSION {
            return fail(
                "schema_version",
                format!(
                    "unsupported schema version {:?}, expected {SCHEMA_VERSION:?}",
                    self.schema_version
                ),
            );
        }
        let s = &self.scenario;
        let positive = |v: f64| v > 0.0 && v.is_finite();
        let non_negative = |v: f64| v >= 0.0 && v.is_finite();
        if !positive(s.tau_r_ns) {
            return fail("tau_r_ns", format!("must be positive, got {}", s.tau_r_ns));
        }
        if let Some(tc) = s.tau_c_ns {
            if !positive(tc) || tc > 2.0 * s.tau_r_ns * (1.0 + 1e-12) {
                return fail(
                    "tau_c_ns",
                    format!(
                        "must lie in (0, 2*tau_r_ns] = (0, {}], got {tc}",
                        2.0 * s.tau_r_ns
                    ),
                );
            }
        }
        if !s.delta_tau_ns.is_finite() {
            return fail("delta_tau_ns", "must be finite".into());
        }
        if !s.detuning_uev.is_finite() {
            return fail("detuning_ueV", "must be finite".into());
        }
        if !non_negative(s.sigma_g_rad_per_ns) {
            return fail(
                "sigma_g_rad_per_ns",
                format!("must be non-negative, got {}", s.sigma_g_rad_per_ns),
            );
        }
        if !positive(s.rep_period_ns) {
            return fail(
                "rep_period_ns",
                format!("must be positive, got {}", s.rep_period_ns),
            );
        }
        if !non_negative(s.intra_delay_ns) || s.intra_delay_ns >= s.rep_period_ns {
            return fail(
                "intra_delay_ns",
                format!(
                    "must lie in [0, rep_period_ns) = [0, {}), got {}",
                    s.rep_period_ns, s.intra_delay_ns
                ),
            );
        }
        if s.mode == Mode::DoublePulseSameEmitter && !(s.intra_delay_ns > 0.0) {
            return fail(
                "intra_delay_ns",
                "double-pulse mode needs a positive pulse spacing".into(),
            );
        }
        if s.mode == Mode::CrossPolarizedControl && s.polarization == Some(Polarization::Parallel) {
            return fail(
                "polarization",
                "the cross-polarized control cannot use parallel polarization".into(),
            );
        }
        if !non_negative(s.emission_jitter_ns) {
            return fail(
                "emission_jitter_ns",
                format!("must be non-negative, got {}", s.emission_jitter_ns),
            );
        }
        if s.n_pulses == 0 {
            return fail("n_pulses", "must be at least 1".into());
        }
        let d = &s.detector;
        if !(d.efficiency > 0.0 && d.efficiency <= 1.0) {
            return fail(
                "efficiency",
                format!("must lie in (0, 1], got {}", d.efficiency),
            );
        }
        if !non_negative(d.timing_jitter_sigma_ns) {
            return fail(
                "timing_jitter_sigma_ns",
                format!("must be non-negative, got {}", d.timing_jitter_sigma_ns),
            );
        }
        if !non_negative(d.dark_rate_per_ns) {
            return fail(
                "dark_rate_per_ns",
                format!("must be non-negative, got {}", d.dark_rate_per_ns),
            );
        }
        let h = &s.histogram;
        if !positive(h.bin_width_ns) || h.bin_width_ns > s.rep_period_ns {
            return fail(
                "bin_width_ns",
                format!("must lie in (0, rep_period_ns], got {}", h.bin_width_ns),
            );
        }
        if h.periods == 0 {
            return fail("periods", "must be at least 1".into());
        }
        let a = &self.analysis;
        if a.n_side_peaks < 2 || !a.n_side_peaks.is_multiple_of(2) {
            return fail(
                "n_side_peaks",
                format!("must be even and at least 2, got {}", a.n_side_peaks),
            );
        }
        if a.n_side_peaks / 2 > h.periods as usize {
            return fail(
                "n_side_peaks",
                format!(
                    "{} side peaks need histogram.periods >= {}",
                    a.n_side_peaks,
                    a.n_side_peaks / 2
                ),
            );
        }
        if let Some(w) = a.window_halfwidth_ns {
            if !positive(w) || 2.0 * w >= s.rep_period_ns {
                return fail(
                    "window_halfwidth_ns",
                    format!("must lie in (0, rep_period_ns/2), got {w}"),
                );
            }
            if s.mode == Mode::DoublePulseSameEmitter && 2.0 * w >= s.intra_delay_ns {
                return fail(
                    "window_halfwidth_ns",
                    format!(
                        "must stay below half the pulse spacing ({} ns), got {w}",
                        0.5 * s.intra_delay_ns
                    ),
                );
            }
        }
        if self.outputs.is_empty() {
            return fail("outputs", "request at least one artifact".into());
        }
        if let Some(k) = self.sweep.temperature_slope_uev_per_k {
            if !k.is_finite() {
                return fail("temperature_slope_ueV_per_K", "must be finite".into());
            }
        }
        if !self.sweep.temperature_reference_k.is_finite() {
            return fail("temperature_reference_K", "must be finite".into());
        }
        if self.sweep.pulses_per_point == Some(0) {
            return fail("pulses_per_point", "must be at least 1".into());
        }
        self.scenario()
            .map(|_| ())
            .map_err(|e| CliError::Input(e.to_string()))
    }

    pub fn polarization(&self) -> Polarization {
        self.scenario
            .polarization
            .unwrap_or(match self.scenario.mode {
                Mode::CrossPolarizedControl => Polarization::Crossed,
                _ => Polarization::Parallel,
            })
    }

    pub fn scenario(&self) -> homsim_core::Result<InterferenceScenario> {
        let s = &self.scenario;
        let scenario = InterferenceScenario {
            mode: s.mode,
            pair: PairSpec::new(
                s.tau_r_ns,
                s.delta_tau_ns,
                s.detuning_uev * UEV_TO_RAD_PER_NS,
                s.sigma_g_rad_per_ns,
            )?,
            tau_c: s.tau_c_ns,
            polarization: self.polarization(),
            rep_period: s.rep_period_ns,
            intra_delay: s.intra_delay_ns,
            emission_jitter: s.emission_jitter_ns,
            n_pulses: s.n_pulses,
            detector: DetectorModel {
                efficiency: s.detector.efficiency,
                timing_jitter_sigma: s.detector.timing_jitter_sigma_ns,
                dark_rate: s.detector.dark_rate_per_ns,
            },
            histogram: HistogramSpec {
                bin_width: s.histogram.bin_width_ns,
                periods: s.histogram.periods,
            },
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn rng(&self) -> RngSpec {
        RngSpec {
            seed: self.rng.seed,
            stream_id: self.rng.stream_id,
        }
    }

    /// Satellite spacing of double-pulse histograms.
    pub fn satellite_spacing(&self) -> Option<f64> {
        (self.scenario.mode == Mode::DoublePulseSameEmitter).then_some(self.scenario.intra_delay_ns)
    }

    pub fn window_halfwidth(&self) -> f64 {
        self.analysis.window_halfwidth_ns.unwrap_or_else(|| {
            default_window(
                self.scenario.tau_r_ns,
                self.scenario.rep_period_ns,
                self.satellite_spacing(),
            )
        })
    }

    pub fn peak_options(&self) -> PeakAreaOptions {
        PeakAreaOptions {
            window_halfwidth: self.window_halfwidth(),
            n_side_peaks: self.analysis.n_side_peaks,
            satellite_spacing: self.satellite_spacing(),
            subtract_baseline: self.analysis.subtract_baseline,
        }
    }

    /// The configuration with every default made explicit.
    pub fn effective(&self) -> Self {
        let mut c = self.clone();
        c.scenario.polarization = Some(self.polarization());
        c.analysis.window_halfwidth_ns = Some(self.window_halfwidth());
        c
    }

    pub fn wants(&self, artifact: Artifact) -> bool {
        self.outputs.contains(&artifact)
    }
}
