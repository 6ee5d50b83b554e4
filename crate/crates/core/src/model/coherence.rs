//! First-order coherence: mapping measured coherence times onto Gaussian
//! frequency jitter, and the fringe contrast of a two-line emitter.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::specfun::{erfcx, find_root};

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// `∫|g1(τ)|² dτ` for `g1(τ) = e^{−|τ|/(2τr)}·e^{−σ²τ²/2}`, which is
/// `(√π/σ)·erfcx(1/(2τrσ))` and `2τr` at σ = 0.
///
/// This integral is the operational coherence time: a purely exponential
/// `g1 = e^{−|τ|/τc}` gives back `τc`.
pub fn coherence_integral(tau_r: f64, sigma: f64) -> Result<f64> {
    if !(tau_r > 0.0) || !(sigma >= 0.0) {
        return domain(format!(
            "need tau_r > 0 and sigma >= 0, got {tau_r}, {sigma}"
        ));
    }
    if sigma == 0.0 {
        return Ok(2.0 * tau_r);
    }
    Ok(SQRT_PI / sigma * erfcx(1.0 / (2.0 * tau_r * sigma))?)
}

/// Gaussian jitter σ whose [`coherence_integral`] equals `tau_c_target`.
pub fn sigma_from_coherence(tau_r: f64, tau_c_target: f64) -> Result<f64> {
    if !(tau_r > 0.0) {
        return domain(format!("tau_r must be positive, got {tau_r}"));
    }
    if !(tau_c_target > 0.0) {
        return domain(format!(
            "target coherence time must be positive, got {tau_c_target}"
        ));
    }
    if tau_c_target >= 2.0 * tau_r {
        return domain(format!(
            "target coherence time {tau_c_target} is not below the Fourier limit {}; no jitter needed",
            2.0 * tau_r
        ));
    }
    // The integral falls monotonically from 2τr (σ → 0) to √π/σ (σ → ∞).
    let g = |log_s: f64| coherence_integral(tau_r, log_s.exp()).unwrap_or(f64::NAN) - tau_c_target;
    let lo = (1e-12 / tau_r).ln();
    let hi = (1e3 * SQRT_PI / tau_c_target).ln();
    find_root(g, lo, hi, 1e-14).map(f64::exp)
}

/// Two fine-structure components observed in a Michelson interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FineStructureLines {
    /// Amplitudes (a1, a2); equal weights when unspecified.
    pub weights: (f64, f64),
    /// Coherence times (τc1, τc2) in ns.
    pub coherence_times: (f64, f64),
    /// Splitting between the two components (rad/ns).
    pub splitting: f64,
}

impl FineStructureLines {
    pub fn new(tau_c1: f64, tau_c2: f64, splitting: f64) -> Result<Self> {
        let lines = Self {
            weights: (1.0, 1.0),
            coherence_times: (tau_c1, tau_c2),
            splitting,
        };
        lines.validate()?;
        Ok(lines)
    }

    pub fn with_weights(self, a1: f64, a2: f64) -> Result<Self> {
        let lines = Self {
            weights: (a1, a2),
            ..self
        };
        lines.validate()?;
        Ok(lines)
    }

    pub fn validate(&self) -> Result<()> {
        let (t1, t2) = self.coherence_times;
        if !(t1 > 0.0 && t2 > 0.0) {
            return domain("coherence times must be positive");
        }
        let (a1, a2) = self.weights;
        if a1 < 0.0 || a2 < 0.0 || !(a1 + a2 > 0.0) {
            return domain("weights must be non-negative and not both zero");
        }
        Ok(())
    }
}

/// Fringe contrast at path delay `dt ≥ 0`:
///
/// ```text
/// √(a1²e^{−2dt/τc1} + a2²e^{−2dt/τc2} + 2a1a2e^{−dt/τc1−dt/τc2}cos(fss·dt)) / (a1 + a2)
/// ```
pub fn michelson_contrast(dt: f64, lines: &FineStructureLines) -> Result<f64> {
    if !(dt >= 0.0) {
        return domain(format!("path delay must be non-negative, got {dt}"));
    }
    lines.validate()?;
    Ok(michelson_contrast_unchecked(dt, lines))
}

pub(crate) fn michelson_contrast_unchecked(dt: f64, lines: &FineStructureLines) -> f64 {
    let (a1, a2) = lines.weights;
    let (t1, t2) = lines.coherence_times;
    let e1 = a1 * (-dt / t1).exp();
    let e2 = a2 * (-dt / t2).exp();
    let sq = e1 * e1 + e2 * e2 + 2.0 * e1 * e2 * (lines.splitting * dt).cos();
    sq.max(0.0).sqrt() / (a1 + a2)
}

/// Visibility extracted from a measured `g²_indist(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VisibilityEstimate {
    pub value: f64,
    /// `g²_indist(0) > 0.5`: more opposite-port coincidences than for
    /// distinguishable photons.
    pub classical_excess: bool,
}

/// `v = 1 − 2·g²_indist(0)`.
pub fn visibility_from_g2(g2_indist: f64) -> Result<VisibilityEstimate> {
    if !(g2_indist >= 0.0) || !g2_indist.is_finite() {
        return domain(format!(
            "g2_indist must be a non-negative number, got {g2_indist}"
        ));
    }
    Ok(VisibilityEstimate {
        value: 1.0 - 2.0 * g2_indist,
        classical_excess: g2_indist > 0.5,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{integrate_1d, QuadratureSpec};
    use approx::assert_relative_eq;

    fn coherence_by_quadrature(tau_r: f64, sigma: f64) -> f64 {
        let spec = QuadratureSpec::default();
        let end = spec.exponential_cutoff(1.0 / tau_r);
        2.0 * integrate_1d(
            |t| (-t / tau_r - sigma * sigma * t * t).exp(),
            0.0,
            end,
            &spec,
        )
        .unwrap()
    }

    #[test]
    fn integral_closed_form_matches_quadrature() {
        for &(tr, s) in &[
            (0.67, 0.0),
            (0.67, 0.5),
            (0.67, 4.5),
            (1.0, 30.0),
            (0.1, 0.01),
        ] {
            assert_relative_eq!(
                coherence_integral(tr, s).unwrap(),
                coherence_by_quadrature(tr, s),
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn sigma_from_coherence_examples() {
        let s = sigma_from_coherence(1.0, 2.0 - 1e-9).unwrap();
        assert!(s < 1e-3, "{s}");
        let mut prev = 0.0;
        for tc in [1.9, 1.5, 1.0, 0.5, 0.1, 0.01] {
            let s = sigma_from_coherence(1.0, tc).unwrap();
            assert!(s > prev);
            prev = s;
        }
        let s = sigma_from_coherence(0.67, 0.33).unwrap();
        // mpmath root of the same integral.
        assert_relative_eq!(s, 4.496_548_607_537_548, max_relative = 1e-9);
        assert_relative_eq!(
            coherence_integral(0.67, s).unwrap(),
            0.33,
            max_relative = 1e-8
        );
        assert_relative_eq!(coherence_by_quadrature(0.67, s), 0.33, max_relative = 1e-8);
        assert!(sigma_from_coherence(0.67, 1.34).is_err());
        assert!(sigma_from_coherence(0.67, 2.0).is_err());
    }

    #[test]
    fn round_trip_over_range() {
        for tr in [0.1, 0.67, 2.0] {
            for frac in [0.001, 0.05, 0.3, 0.7, 0.99] {
                let tc = 2.0 * tr * frac;
                let s = sigma_from_coherence(tr, tc).unwrap();
                assert_relative_eq!(coherence_integral(tr, s).unwrap(), tc, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn michelson_examples() {
        let lines = FineStructureLines::new(0.33, 0.18, 20.0).unwrap();
        assert_relative_eq!(
            michelson_contrast(0.0, &lines).unwrap(),
            1.0,
            max_relative = 1e-15
        );
        let single = FineStructureLines::new(0.4, 0.4, 0.0).unwrap();
        for dt in [0.0, 0.1, 0.5, 2.0] {
            assert_relative_eq!(
                michelson_contrast(dt, &single).unwrap(),
                (-dt / 0.4f64).exp(),
                max_relative = 1e-12
            );
        }
        // Beating: the contrast dips near half a beat period and recovers.
        let half_beat = std::f64::consts::PI / 20.0;
        let dip = michelson_contrast(half_beat, &lines).unwrap();
        let recovered = michelson_contrast(2.0 * half_beat, &lines).unwrap();
        assert!(dip < recovered);
        assert!(michelson_contrast(-1.0, &lines).is_err());
    }

    #[test]
    fn visibility_from_g2_examples() {
        let v = visibility_from_g2(0.31).unwrap();
        assert_relative_eq!(v.value, 0.38, max_relative = 1e-12);
        assert!(!v.classical_excess);
        assert_eq!(visibility_from_g2(0.5).unwrap().value, 0.0);
        assert_eq!(visibility_from_g2(0.0).unwrap().value, 1.0);
        let excess = visibility_from_g2(0.6).unwrap();
        assert!(excess.classical_excess && excess.value < 0.0);
        assert!(visibility_from_g2(-0.1).is_err());
    }
}
