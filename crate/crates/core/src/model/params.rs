use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Angular frequency of a 1 µeV photon energy, `10⁻⁶ eV/ħ`, in rad/ns
/// (ħ = 6.582119569·10⁻¹⁶ eV·s).
pub const UEV_TO_RAD_PER_NS: f64 = 1.519_267_447_996_127_5;

/// Spectral and temporal properties of a single emitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmitterParams {
    /// Radiative decay time (ns).
    pub tau_r: f64,
    /// Pure dephasing time (ns); `None` for a Fourier-limited line.
    pub tau_deph: Option<f64>,
    /// Gaussian jitter scale of the center frequency (rad/ns).
    pub sigma: f64,
    /// Center frequency (rad/ns).
    pub omega0: f64,
    /// Fine-structure splitting (rad/ns), 0 if absent.
    pub fss: f64,
    /// Relative amplitudes of the two fine-structure components.
    pub fss_weights: (f64, f64),
}

impl EmitterParams {
    pub fn new(tau_r: f64) -> Result<Self> {
        let e = Self {
            tau_r,
            tau_deph: None,
            sigma: 0.0,
            omega0: 0.0,
            fss: 0.0,
            fss_weights: (1.0, 1.0),
        };
        e.validate()?;
        Ok(e)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau_r > 0.0 && self.tau_r.is_finite()) {
            return domain(format!("tau_r must be positive, got {}", self.tau_r));
        }
        if let Some(t) = self.tau_deph {
            if !(t > 0.0) {
                return domain(format!("tau_deph must be positive when present, got {t}"));
            }
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return domain(format!("sigma must be non-negative, got {}", self.sigma));
        }
        let (a1, a2) = self.fss_weights;
        if a1 < 0.0 || a2 < 0.0 {
            return domain("fine-structure weights must be non-negative");
        }
        if self.fss > 0.0 && !(a1 + a2 > 0.0) {
            return domain("fine-structure weights must not both vanish");
        }
        Ok(())
    }

    /// Homogeneous coherence time implied by `tau_r` and `tau_deph`.
    pub fn coherence_time(&self) -> Result<f64> {
        super::coherence_time(self.tau_r, self.tau_deph)
    }
}

/// Pair-level parameters entering the inhomogeneous correlation function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairSpec {
    /// Shared radiative lifetime (ns).
    pub tau_r: f64,
    /// Arrival-time offset between the two photons (ns).
    pub delta_tau: f64,
    /// Mean detuning ω02 − ω01 (rad/ns).
    pub delta0: f64,
    /// Combined jitter √(σ1² + σ2²) (rad/ns).
    pub sigma_g: f64,
}

impl PairSpec {
    pub fn new(tau_r: f64, delta_tau: f64, delta0: f64, sigma_g: f64) -> Result<Self> {
        let p = Self {
            tau_r,
            delta_tau,
            delta0,
            sigma_g,
        };
        p.validate()?;
        Ok(p)
    }

    /// Zero delay, zero detuning.
    pub fn resonant(tau_r: f64, sigma_g: f64) -> Result<Self> {
        Self::new(tau_r, 0.0, 0.0, sigma_g)
    }

    /// Combines two emitters; their lifetimes must agree.
    pub fn from_emitters(
        first: &EmitterParams,
        second: &EmitterParams,
        delta_tau: f64,
    ) -> Result<Self> {
        first.validate()?;
        second.validate()?;
        if (first.tau_r - second.tau_r).abs() > 1e-12 * first.tau_r {
            return domain("the two-photon model assumes a shared radiative lifetime");
        }
        Self::new(
            first.tau_r,
            delta_tau,
            second.omega0 - first.omega0,
            first.sigma.hypot(second.sigma),
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau_r > 0.0 && self.tau_r.is_finite()) {
            return domain(format!("tau_r must be positive, got {}", self.tau_r));
        }
        if !(self.sigma_g >= 0.0 && self.sigma_g.is_finite()) {
            return domain(format!(
                "sigma_g must be non-negative, got {}",
                self.sigma_g
            ));
        }
        if !self.delta_tau.is_finite() || !self.delta0.is_finite() {
            return domain("delta_tau and delta0 must be finite");
        }
        Ok(())
    }

    pub fn with_delta_tau(self, delta_tau: f64) -> Self {
        Self { delta_tau, ..self }
    }

    pub fn with_delta0(self, delta0: f64) -> Self {
        Self { delta0, ..self }
    }

    pub fn with_sigma_g(self, sigma_g: f64) -> Self {
        Self { sigma_g, ..self }
    }
}
