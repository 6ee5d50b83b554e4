//! Per-repetition photon generation.
//!
//! Two photons entering the final beam splitter from opposite inputs are
//! sampled exactly by thinning. Candidate detection times are drawn from the
//! product of the single-photon intensities, one photon is assigned to each
//! output at random, and the candidate is kept as an opposite-port event with
//! probability
//!
//! ```text
//! ½(1 − 2XY·cos(Δ(v − u))·e^{−γ|v − u|} / (X² + Y²)),
//! X = |ξ₁(u)ξ₂(v)|,  Y = |ξ₂(u)ξ₁(v)|
//! ```
//!
//! for detections at `u` (output A) and `v` (output B). Otherwise both photons
//! leave through the same output, chosen with equal probability. The accepted
//! `(u, v)` follow `|ξ₁(u)ξ₂(v) − ξ₂(u)ξ₁(v)|²/4` with the dephasing factor, so
//! the delay `v − u` is distributed as the conditional density of the kernel
//! and the port outcome has exactly the per-event opposite-port probability.
//!
//! Photons that share an input, or that travel alone, leave through either
//! output with probability ½ each.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use super::layout::Layout;
use super::scenario::{InterferenceScenario, Mode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Channel {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PortOutcome {
    Opposite,
    Bunched(Channel),
}

/// One interfering photon pair at the final beam splitter, before detection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceEvent {
    /// Frequency difference of the two photons (rad/ns).
    pub delta: f64,
    /// Wave-packet onsets including emission jitter (ns).
    pub onsets: [f64; 2],
    /// Detection times of the two photons (ns).
    pub times: [f64; 2],
    pub channels: [Channel; 2],
    pub outcome: PortOutcome,
    /// Opposite-port probability of this pair given `delta` and `onsets`.
    pub opposite_probability: f64,
}

impl CoincidenceEvent {
    /// `t_B − t_A` for an opposite-port event.
    pub fn delay(&self) -> Option<f64> {
        match self.outcome {
            PortOutcome::Opposite => {
                let (a, b) = if self.channels[0] == Channel::A {
                    (0, 1)
                } else {
                    (1, 0)
                };
                Some(self.times[b] - self.times[a])
            }
            PortOutcome::Bunched(_) => None,
        }
    }
}

/// Scenario constants needed on every repetition.
#[derive(Debug, Clone)]
pub(crate) struct Emitter {
    tau_r: f64,
    dephasing: f64,
    delta: Option<Normal<f64>>,
    delta0: f64,
    emission_jitter: f64,
    interfere: bool,
    scenario: InterferenceScenario,
}

impl Emitter {
    pub fn new(s: &InterferenceScenario) -> Self {
        let sg = s.pair.sigma_g;
        Self {
            tau_r: s.pair.tau_r,
            dephasing: s.kernel().dephasing_rate(),
            delta: (sg > 0.0).then(|| {
                Normal::new(s.pair.delta0, std::f64::consts::SQRT_2 * sg).expect("finite sigma")
            }),
            delta0: s.pair.delta0,
            emission_jitter: s.emission_jitter,
            interfere: !s.distinguishable(),
            scenario: *s,
        }
    }

    fn exp<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let e: f64 = Exp1.sample(rng);
        self.tau_r * e
    }

    fn jitter<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.emission_jitter > 0.0 {
            let z: f64 = StandardNormal.sample(rng);
            self.emission_jitter * z
        } else {
            0.0
        }
    }

    fn channel<R: Rng + ?Sized>(rng: &mut R) -> Channel {
        if rng.random::<bool>() {
            Channel::A
        } else {
            Channel::B
        }
    }

    /// Intensity amplitude `|ξ(t)|` of a packet with onset `onset`.
    fn magnitude(&self, t: f64, onset: f64) -> f64 {
        if t <= onset {
            0.0
        } else {
            (-(t - onset) / (2.0 * self.tau_r)).exp()
        }
    }

    pub fn sample_pair<R: Rng + ?Sized>(&self, onsets: [f64; 2], rng: &mut R) -> CoincidenceEvent {
        let delta = match &self.delta {
            Some(d) => d.sample(rng),
            None => self.delta0,
        };
        let times = [onsets[0] + self.exp(rng), onsets[1] + self.exp(rng)];
        let first_to_a = rng.random::<bool>();
        let (ia, ib) = if first_to_a { (0, 1) } else { (1, 0) };
        let (u, v) = (times[ia], times[ib]);
        let ratio = if self.interfere {
            let x = self.magnitude(u, onsets[ia]) * self.magnitude(v, onsets[ib]);
            let y = self.magnitude(u, onsets[ib]) * self.magnitude(v, onsets[ia]);
            let gap = v - u;
            2.0 * x * y * (delta * gap).cos() * (-self.dephasing * gap.abs()).exp()
                / (x * x + y * y)
        } else {
            0.0
        };
        let accept = 0.5 * (1.0 - ratio);
        let (outcome, channels) = if rng.random::<f64>() < accept {
            let mut ch = [Channel::B; 2];
            ch[ia] = Channel::A;
            (PortOutcome::Opposite, ch)
        } else {
            let c = Self::channel(rng);
            (PortOutcome::Bunched(c), [c, c])
        };
        let opposite_probability = self
            .scenario
            .kernel()
            .event_opposite_probability(delta, onsets[0] - onsets[1]);
        CoincidenceEvent {
            delta,
            onsets,
            times,
            channels,
            outcome,
            opposite_probability,
        }
    }

    /// Appends the photons of one repetition as `(channel, time)` pairs.
    pub fn emit<R: Rng + ?Sized>(
        &self,
        layout: &Layout,
        rng: &mut R,
        out: &mut Vec<(Channel, f64)>,
    ) {
        let mut present = [(0u8, 0.0f64); 4];
        let mut n = 0;
        for photon in &layout.photons {
            if photon.presence < 1.0 && rng.random::<f64>() >= photon.presence {
                continue;
            }
            let jitter = self.jitter(rng);
            let route = if photon.arrivals.len() == 1 {
                photon.arrivals[0]
            } else {
                let mut r = rng.random::<f64>();
                let mut chosen = photon.arrivals[photon.arrivals.len() - 1];
                for a in &photon.arrivals {
                    if r < a.weight {
                        chosen = *a;
                        break;
                    }
                    r -= a.weight;
                }
                chosen
            };
            present[n] = (route.input, route.delay + jitter);
            n += 1;
        }
        if n == 2 && present[0].0 != present[1].0 {
            let ev = self.sample_pair([present[0].1, present[1].1], rng);
            out.push((ev.channels[0], ev.times[0]));
            out.push((ev.channels[1], ev.times[1]));
            return;
        }
        for &(_, onset) in &present[..n] {
            let t = onset + self.exp(rng);
            out.push((Self::channel(rng), t));
        }
    }
}

/// Draws one interfering pair: the two photons of a pair-mode repetition, or
/// the early-long / late-short combination in double-pulse mode.
pub fn sample_pair_event<R: Rng + ?Sized>(
    scenario: &InterferenceScenario,
    rng: &mut R,
) -> CoincidenceEvent {
    let emitter = Emitter::new(scenario);
    let nominal = match scenario.mode {
        Mode::DoublePulseSameEmitter => [scenario.long_arm(), scenario.intra_delay],
        _ => [
            0.5 * scenario.pair.delta_tau,
            -0.5 * scenario.pair.delta_tau,
        ],
    };
    let onsets = [
        nominal[0] + emitter.jitter(rng),
        nominal[1] + emitter.jitter(rng),
    ];
    emitter.sample_pair(onsets, rng)
}
