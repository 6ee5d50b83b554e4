//! Fourier-limited single-photon wave packets and the same-polarization
//! two-photon correlation function built from them.

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use super::params::PairSpec;
use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairMember {
    First,
    Second,
}

/// One-sided exponential wave packet
/// `ξ(t) = τr^{-1/2} · exp(−(t − t_on)/(2τr) − i(ω + ω_off)t)` for `t > t_on`.
///
/// The amplitude prefactor `τr^{-1/2}` makes `∫|ξ|² dt = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotonWavePacket {
    pub tau_r: f64,
    pub omega: f64,
    /// `−Δ/2` for the first photon, `+Δ/2` for the second.
    pub frequency_offset: f64,
    /// Onset time: `+δτ/2` for the first photon, `−δτ/2` for the second.
    pub time_offset: f64,
    pub member: PairMember,
}

impl PhotonWavePacket {
    /// The two packets of a pair with frequency difference `delta` and
    /// arrival offset `delta_tau`.
    pub fn pair(tau_r: f64, omega: f64, delta: f64, delta_tau: f64) -> Result<(Self, Self)> {
        if !(tau_r > 0.0) {
            return domain(format!("tau_r must be positive, got {tau_r}"));
        }
        let first = Self {
            tau_r,
            omega,
            frequency_offset: -0.5 * delta,
            time_offset: 0.5 * delta_tau,
            member: PairMember::First,
        };
        let second = Self {
            frequency_offset: 0.5 * delta,
            time_offset: -0.5 * delta_tau,
            member: PairMember::Second,
            ..first
        };
        Ok((first, second))
    }

    pub fn amplitude(&self, t: f64) -> Complex<f64> {
        let s = t - self.time_offset;
        if s <= 0.0 {
            return Complex::new(0.0, 0.0);
        }
        let magnitude = (-s / (2.0 * self.tau_r)).exp() / self.tau_r.sqrt();
        Complex::from_polar(magnitude, -(self.omega + self.frequency_offset) * t)
    }

    /// `|ξ(t)|²`.
    pub fn intensity(&self, t: f64) -> f64 {
        let s = t - self.time_offset;
        if s <= 0.0 {
            0.0
        } else {
            (-s / self.tau_r).exp() / self.tau_r
        }
    }
}

/// `|ξ1(t0)ξ2(t0+τ) − ξ2(t0)ξ1(t0+τ)|² / 4` for Fourier-limited photons with
/// frequency difference `delta`.
pub fn g2_tl(t0: f64, tau: f64, pair: &PairSpec, delta: f64) -> f64 {
    let (first, second) = PhotonWavePacket::pair(pair.tau_r, 0.0, delta, pair.delta_tau)
        .expect("PairSpec guarantees tau_r > 0");
    let t1 = t0 + tau;
    let amp =
        first.amplitude(t0) * second.amplitude(t1) - second.amplitude(t0) * first.amplitude(t1);
    0.25 * amp.norm_sqr()
}
