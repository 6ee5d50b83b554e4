//! Ensemble-averaged opposite-port coincidence density for a photon pair with
//! homogeneous dephasing, Gaussian frequency jitter and Gaussian
//! emission-time jitter all switched on at once.
//!
//! With dephasing rate `γ = 2/τc − 1/τr` and arrival offset `δ`:
//!
//! ```text
//! P(τ) = 1/(8τr)·(e^{−|δ−τ|/τr} + e^{−|δ+τ|/τr}
//!                  − 2cos(Δ₀τ)·e^{−(|δ|+|τ|)/τr}·e^{−σ_g²τ²}·e^{−γ|τ|})
//! ```
//!
//! averaged over `δ ~ N(δτ, 2σ_j²)`. Without jitter and dephasing this is
//! [`p_inhom`](super::p_inhom); at δτ = 0 without frequency jitter it is the
//! homogeneous central peak divided by `2τr`.

use serde::{Deserialize, Serialize};

use super::params::PairSpec;
use crate::error::{domain, Result};
use crate::specfun::{erfc, erfcx, integrate_piecewise, QuadratureSpec};

const SQRT_PI: f64 = 1.772_453_850_905_516;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferenceKernel {
    pub pair: PairSpec,
    /// Coherence time of each photon (ns); `2τr` when Fourier limited.
    pub tau_c: f64,
    /// Standard deviation of each photon's emission time (ns).
    pub emission_jitter: f64,
    /// Orthogonal polarizations: no interference term at all.
    pub distinguishable: bool,
}

impl InterferenceKernel {
    pub fn new(
        pair: PairSpec,
        tau_c: f64,
        emission_jitter: f64,
        distinguishable: bool,
    ) -> Result<Self> {
        let k = Self {
            pair,
            tau_c,
            emission_jitter,
            distinguishable,
        };
        k.validate()?;
        Ok(k)
    }

    pub fn fourier_limited(pair: PairSpec) -> Result<Self> {
        Self::new(pair, 2.0 * pair.tau_r, 0.0, false)
    }

    pub fn validate(&self) -> Result<()> {
        self.pair.validate()?;
        if !(self.tau_c > 0.0) || self.tau_c > 2.0 * self.pair.tau_r * (1.0 + 1e-12) {
            return domain(format!(
                "tau_c must lie in (0, 2*tau_r] = (0, {}], got {}",
                2.0 * self.pair.tau_r,
                self.tau_c
            ));
        }
        if !(self.emission_jitter >= 0.0 && self.emission_jitter.is_finite()) {
            return domain("emission jitter must be non-negative");
        }
        Ok(())
    }

    /// Extra decay of the interference term from pure dephasing.
    pub fn dephasing_rate(&self) -> f64 {
        (2.0 / self.tau_c - 1.0 / self.pair.tau_r).max(0.0)
    }

    /// `κ = 1/τr + γ = 2/τc`: total decay rate of the interference term.
    fn kappa(&self) -> f64 {
        1.0 / self.pair.tau_r + self.dephasing_rate()
    }

    /// Standard deviation of the relative arrival offset.
    pub fn offset_spread(&self) -> f64 {
        std::f64::consts::SQRT_2 * self.emission_jitter
    }

    /// Opposite-port probability for one pair with frequency difference
    /// `delta` and arrival offset `offset`:
    /// `½ − e^{−|δ|/τr}·κ/(2τr(κ² + Δ²))`.
    pub fn event_opposite_probability(&self, delta: f64, offset: f64) -> f64 {
        if self.distinguishable {
            return 0.5;
        }
        let tr = self.pair.tau_r;
        let k = self.kappa();
        (0.5 - (-offset.abs() / tr).exp() * k / (2.0 * tr * (k * k + delta * delta))).max(0.0)
    }

    /// Ensemble-averaged opposite-port density at delay `tau`.
    pub fn density(&self, tau: f64) -> f64 {
        let tr = self.pair.tau_r;
        let dt = self.pair.delta_tau;
        let s = self.offset_spread();
        let direct = laplace_gauss(dt - tau, s, tr) + laplace_gauss(dt + tau, s, tr);
        if self.distinguishable {
            return direct / (8.0 * tr);
        }
        let sg = self.pair.sigma_g;
        let interference = 2.0
            * (self.pair.delta0 * tau).cos()
            * laplace_gauss(dt, s, tr)
            * (-tau.abs() * self.kappa() - sg * sg * tau * tau).exp();
        (direct - interference) / (8.0 * tr)
    }

    /// `∫P(τ) dτ`, the mean opposite-port probability.
    pub fn opposite_probability(&self, spec: &QuadratureSpec) -> Result<f64> {
        if self.distinguishable {
            return Ok(0.5);
        }
        let tr = self.pair.tau_r;
        let overlap = laplace_gauss(self.pair.delta_tau, self.offset_spread(), tr);
        Ok(0.5 - overlap * self.mean_lorentzian(spec)? / (2.0 * tr))
    }

    /// `1 − 2∫P(τ) dτ`.
    pub fn visibility(&self, spec: &QuadratureSpec) -> Result<f64> {
        Ok(1.0 - 2.0 * self.opposite_probability(spec)?)
    }

    /// `E_Δ[κ/(κ² + Δ²)] = ∫₀^∞ e^{−κτ}·cos(Δ₀τ)·e^{−σ_g²τ²} dτ`.
    fn mean_lorentzian(&self, spec: &QuadratureSpec) -> Result<f64> {
        let k = self.kappa();
        let sg = self.pair.sigma_g;
        let d0 = self.pair.delta0;
        if sg == 0.0 {
            return Ok(k / (k * k + d0 * d0));
        }
        if d0 == 0.0 {
            return Ok(SQRT_PI / (2.0 * sg) * erfcx(k / (2.0 * sg))?);
        }
        let end = spec.exponential_cutoff(k);
        let period = 2.0 * std::f64::consts::PI / d0.abs();
        let n = ((end / period) as usize).min(4000);
        let mut points: Vec<f64> = (0..=n).map(|i| i as f64 * period).collect();
        points.push(end);
        integrate_piecewise(
            |t| (-k * t - sg * sg * t * t).exp() * (d0 * t).cos(),
            &points,
            spec,
        )
    }

    /// Probability mass of the opposite-port density inside `|τ| ≤ half_width`
    /// after convolution with a Gaussian timing response of standard deviation
    /// `timing_sigma` on the delay.
    pub fn window_probability(
        &self,
        half_width: f64,
        timing_sigma: f64,
        spec: &QuadratureSpec,
    ) -> Result<f64> {
        self.interval_probability(-half_width, half_width, timing_sigma, spec)
    }

    /// As [`window_probability`](Self::window_probability) for the interval `[lo, hi]`.
    pub fn interval_probability(
        &self,
        lo: f64,
        hi: f64,
        timing_sigma: f64,
        spec: &QuadratureSpec,
    ) -> Result<f64> {
        if !(lo < hi) || !(timing_sigma >= 0.0) {
            return domain(format!(
                "need lo < hi and timing_sigma >= 0, got [{lo}, {hi}], {timing_sigma}"
            ));
        }
        let dt = self.pair.delta_tau.abs();
        let reach = dt
            + 8.0 * (self.offset_spread() + timing_sigma)
            + spec.exponential_cutoff(1.0 / self.pair.tau_r);
        let (a, b) = if timing_sigma > 0.0 {
            (
                (lo - 8.0 * timing_sigma).max(-reach),
                (hi + 8.0 * timing_sigma).min(reach),
            )
        } else {
            (lo.max(-reach), hi.min(reach))
        };
        if a >= b {
            return Ok(0.0);
        }
        let weight = interval_weight(lo, hi, timing_sigma);
        integrate_piecewise(
            |t| self.density(t) * weight(t),
            &[a, lo, -dt, 0.0, dt, hi, b],
            spec,
        )
    }
}

/// Probability that `u + noise` falls inside `[lo, hi]` for Gaussian noise of
/// standard deviation `sigma`.
pub(crate) fn interval_weight(lo: f64, hi: f64, sigma: f64) -> impl Fn(f64) -> f64 {
    move |u: f64| {
        if sigma == 0.0 {
            if u >= lo && u <= hi {
                1.0
            } else {
                0.0
            }
        } else {
            let z = std::f64::consts::SQRT_2 * sigma;
            let cdf = |x: f64| 0.5 * erfc(-x / z).unwrap_or(0.0);
            cdf(hi - u) - cdf(lo - u)
        }
    }
}

/// `E[e^{−|m + ε|/a}]` for `ε ~ N(0, s²)`.
pub fn laplace_gauss(m: f64, s: f64, a: f64) -> f64 {
    if s == 0.0 {
        return (-m.abs() / a).exp();
    }
    // ½e^{s²/(2a²)}·[e^{−m/a}·erfc(u₋) + e^{m/a}·erfc(u₊)], u∓ = (s²/a ∓ m)/(√2 s)
    let half = |m: f64| {
        let u = (s * s / a - m) / (std::f64::consts::SQRT_2 * s);
        if u >= 0.0 {
            erfcx(u).unwrap_or(0.0) * (-m * m / (2.0 * s * s)).exp()
        } else {
            (s * s / (2.0 * a * a) - m / a).exp() * erfc(u).unwrap_or(2.0)
        }
    };
    0.5 * (half(m) + half(-m))
}
