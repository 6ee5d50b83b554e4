use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::model::{InterferenceKernel, PairSpec};

/// How the two interfering photons are produced and routed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Photons from consecutive pulses of one emitter, brought to the final
    /// beam splitter from opposite inputs by a delay line matched to the
    /// repetition period.
    ConsecutiveSameEmitter,
    /// Two excitation pulses `intra_delay` apart per repetition, both photons
    /// sent through an unbalanced Mach-Zehnder interferometer whose long arm
    /// adds `intra_delay + δτ`.
    DoublePulseSameEmitter,
    /// One photon from each of two independent emitters.
    RemoteEmitters,
    /// Like [`Mode::RemoteEmitters`] with orthogonal polarizations.
    CrossPolarizedControl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarization {
    Parallel,
    Crossed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    pub efficiency: f64,
    /// Gaussian timing jitter of each detection (ns).
    pub timing_jitter_sigma: f64,
    /// Dark counts per ns on each detector.
    pub dark_rate: f64,
}

impl Default for DetectorModel {
    fn default() -> Self {
        Self {
            efficiency: 1.0,
            timing_jitter_sigma: 0.0,
            dark_rate: 0.0,
        }
    }
}

impl DetectorModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return domain(format!(
                "detector efficiency must lie in (0, 1], got {}",
                self.efficiency
            ));
        }
        if !(self.timing_jitter_sigma >= 0.0 && self.timing_jitter_sigma.is_finite()) {
            return domain("detector timing jitter must be non-negative");
        }
        if !(self.dark_rate >= 0.0 && self.dark_rate.is_finite()) {
            return domain("dark rate must be non-negative");
        }
        Ok(())
    }

    /// Standard deviation of the jitter on a delay between two detections.
    pub fn delay_sigma(&self) -> f64 {
        std::f64::consts::SQRT_2 * self.timing_jitter_sigma
    }
}

/// Seed and stream of the ChaCha8 generator; see [`crate::montecarlo`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSpec {
    pub seed: u64,
    pub stream_id: u32,
}

impl RngSpec {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream_id: 0 }
    }
}

/// Binning of the correlation histogram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramSpec {
    pub bin_width: f64,
    /// Number of side peaks covered on each side; the range extends half a
    /// period beyond the outermost one.
    pub periods: u32,
}

impl Default for HistogramSpec {
    fn default() -> Self {
        Self {
            bin_width: 0.128,
            periods: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferenceScenario {
    pub mode: Mode,
    pub pair: PairSpec,
    /// Homogeneous coherence time (ns); `None` means Fourier limited.
    pub tau_c: Option<f64>,
    pub polarization: Polarization,
    pub rep_period: f64,
    /// Spacing of the two excitation pulses in double-pulse mode (ns).
    pub intra_delay: f64,
    /// Gaussian spread of each photon's emission time (ns).
    pub emission_jitter: f64,
    pub n_pulses: u64,
    pub detector: DetectorModel,
    pub histogram: HistogramSpec,
}

impl InterferenceScenario {
    pub fn new(mode: Mode, pair: PairSpec, rep_period: f64, n_pulses: u64) -> Result<Self> {
        let s = Self {
            mode,
            pair,
            tau_c: None,
            polarization: if mode == Mode::CrossPolarizedControl {
                Polarization::Crossed
            } else {
                Polarization::Parallel
            },
            rep_period,
            intra_delay: 0.0,
            emission_jitter: 0.0,
            n_pulses,
            detector: DetectorModel::default(),
            histogram: HistogramSpec::default(),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.pair.validate()?;
        self.detector.validate()?;
        if !(self.rep_period > 0.0 && self.rep_period.is_finite()) {
            return domain(format!(
                "rep_period must be positive, got {}",
                self.rep_period
            ));
        }
        if !(self.intra_delay >= 0.0 && self.intra_delay < self.rep_period) {
            return domain(format!(
                "intra_delay must lie in [0, rep_period) = [0, {}), got {}",
                self.rep_period, self.intra_delay
            ));
        }
        if self.mode == Mode::DoublePulseSameEmitter && !(self.intra_delay > 0.0) {
            return domain("double-pulse mode needs a positive intra_delay");
        }
        if !(self.emission_jitter >= 0.0 && self.emission_jitter.is_finite()) {
            return domain("emission_jitter must be non-negative");
        }
        if self.n_pulses == 0 {
            return domain("n_pulses must be at least 1");
        }
        if let Some(tc) = self.tau_c {
            if !(tc > 0.0) || tc > 2.0 * self.pair.tau_r * (1.0 + 1e-12) {
                return domain(format!("tau_c must lie in (0, 2*tau_r], got {tc}"));
            }
        }
        if !(self.histogram.bin_width > 0.0) || self.histogram.periods == 0 {
            return Err(Error::Config(
                "histogram needs bin_width > 0 and at least one period".into(),
            ));
        }
        if self.histogram.bin_width > self.rep_period {
            return Err(Error::Config(
                "histogram bin_width exceeds the repetition period".into(),
            ));
        }
        Ok(())
    }

    pub fn coherence_time(&self) -> f64 {
        self.tau_c.unwrap_or(2.0 * self.pair.tau_r)
    }

    pub fn distinguishable(&self) -> bool {
        self.mode == Mode::CrossPolarizedControl || self.polarization == Polarization::Crossed
    }

    /// Interference kernel for two photons whose arrivals differ by `offset`.
    pub fn kernel_at(&self, offset: f64) -> InterferenceKernel {
        InterferenceKernel {
            pair: self.pair.with_delta_tau(offset),
            tau_c: self.coherence_time(),
            emission_jitter: self.emission_jitter,
            distinguishable: self.distinguishable(),
        }
    }

    /// Kernel of the interfering pair (arrival offset δτ).
    pub fn kernel(&self) -> InterferenceKernel {
        self.kernel_at(self.pair.delta_tau)
    }

    /// `g²_indist(0)` of fully distinguishable photons with unit side peaks:
    /// 1/2 for a single pair per repetition, 1/3 in double-pulse mode where
    /// the central sub-peak of every side peak holds 3/8 of a pair and the
    /// central peak 1/8.
    pub fn distinguishable_reference(&self) -> f64 {
        match self.mode {
            Mode::DoublePulseSameEmitter => 1.0 / 3.0,
            _ => 0.5,
        }
    }

    /// Visibility `1 − g²/g²_dist` for a measured or predicted `g²_indist(0)`.
    pub fn visibility_from_g2(&self, g2: f64) -> f64 {
        1.0 - g2 / self.distinguishable_reference()
    }

    /// Long-arm delay of the interferometer in double-pulse mode.
    pub fn long_arm(&self) -> f64 {
        self.intra_delay + self.pair.delta_tau
    }
}
