//! Pulse-train simulation and histogram accumulation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use rayon::prelude::*;

use super::histogram::CorrelationHistogram;
use super::layout::Layout;
use super::sampler::{Channel, Emitter};
use super::scenario::{InterferenceScenario, RngSpec};
use crate::error::{domain, Result};

/// Repetitions per random stream.
pub const BLOCK_PULSES: u64 = 4096;

/// Name of the generator and stream derivation, for provenance records.
pub const RNG_ALGORITHM: &str =
    "ChaCha8 (rand_chacha 0.9); key = SplitMix64 expansion of seed; stream = stream_id * 2^32 + block; block = 4096 pulses";

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for block `block` of the given stream.
pub fn block_rng(spec: &RngSpec, block: u64) -> ChaCha8Rng {
    let mut state = spec.seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(((spec.stream_id as u64) << 32) | (block & 0xFFFF_FFFF));
    rng
}

/// Detections of a run of consecutive repetitions, per channel, in
/// compressed-row form: `offsets[c][starts[c][r]..starts[c][r + 1]]` are the
/// times of repetition `r` on channel `c`, relative to the repetition start.
struct Detections {
    offsets: [Vec<f64>; 2],
    starts: [Vec<usize>; 2],
}

impl Detections {
    fn with_capacity(reps: usize) -> Self {
        let mut starts = [Vec::with_capacity(reps + 1), Vec::with_capacity(reps + 1)];
        starts[0].push(0);
        starts[1].push(0);
        Self {
            offsets: [Vec::with_capacity(2 * reps), Vec::with_capacity(2 * reps)],
            starts,
        }
    }

    fn reps(&self) -> usize {
        self.starts[0].len() - 1
    }

    fn rep(&self, channel: usize, r: usize) -> &[f64] {
        &self.offsets[channel][self.starts[channel][r]..self.starts[channel][r + 1]]
    }

    fn close_rep(&mut self) {
        self.starts[0].push(self.offsets[0].len());
        self.starts[1].push(self.offsets[1].len());
    }
}

/// Everything the engine needs besides the per-repetition source.
struct Run<'a> {
    rep_period: f64,
    n_pulses: u64,
    detector: super::scenario::DetectorModel,
    template: &'a CorrelationHistogram,
    /// Repetition lag beyond which no pair can land inside the histogram.
    max_lag: usize,
}

impl Run<'_> {
    fn generate<S>(
        &self,
        source: &S,
        rng: &mut ChaCha8Rng,
        reps: u64,
        out: &mut Detections,
        scratch: &mut Vec<(Channel, f64)>,
    ) where
        S: Fn(&mut ChaCha8Rng, &mut Vec<(Channel, f64)>),
    {
        let det = &self.detector;
        let dark = (det.dark_rate > 0.0)
            .then(|| Poisson::new(det.dark_rate * self.rep_period).expect("positive dark mean"));
        for _ in 0..reps {
            scratch.clear();
            source(rng, scratch);
            for &(ch, t) in scratch.iter() {
                if det.efficiency < 1.0 && rng.random::<f64>() >= det.efficiency {
                    continue;
                }
                let t = if det.timing_jitter_sigma > 0.0 {
                    let z: f64 = StandardNormal.sample(rng);
                    t + det.timing_jitter_sigma * z
                } else {
                    t
                };
                out.offsets[ch as usize].push(t);
            }
            if let Some(d) = &dark {
                for c in 0..2 {
                    let k = d.sample(rng) as u64;
                    for _ in 0..k {
                        out.offsets[c].push(rng.random::<f64>() * self.rep_period);
                    }
                }
            }
            out.close_rep();
        }
    }

    /// Histogram of all pairs whose earlier repetition lies in `block`.
    fn block<S>(&self, source: &S, rng_spec: &RngSpec, block: u64) -> CorrelationHistogram
    where
        S: Fn(&mut ChaCha8Rng, &mut Vec<(Channel, f64)>),
    {
        let first = block * BLOCK_PULSES;
        let own = BLOCK_PULSES.min(self.n_pulses - first);
        let head = (self.max_lag as u64).min(self.n_pulses - first - own);
        let mut dets = Detections::with_capacity((own + head) as usize);
        let mut scratch = Vec::with_capacity(8);
        self.generate(
            source,
            &mut block_rng(rng_spec, block),
            own,
            &mut dets,
            &mut scratch,
        );
        if head > 0 {
            // The first repetitions of the next block, regenerated from its own stream.
            self.generate(
                source,
                &mut block_rng(rng_spec, block + 1),
                head,
                &mut dets,
                &mut scratch,
            );
        }

        let mut hist = self.template.clone();
        let t = self.rep_period;
        let total = dets.reps();
        for r in 0..own as usize {
            hist.singles[0] += dets.rep(0, r).len() as u64;
            hist.singles[1] += dets.rep(1, r).len() as u64;
            let last = (r + self.max_lag).min(total - 1);
            for &ta in dets.rep(0, r) {
                for r2 in r..=last {
                    let shift = (r2 - r) as f64 * t;
                    for &tb in dets.rep(1, r2) {
                        hist.record(shift + tb - ta);
                    }
                }
            }
            for &tb in dets.rep(1, r) {
                for r2 in r + 1..=last {
                    let shift = (r2 - r) as f64 * t;
                    for &ta in dets.rep(0, r2) {
                        hist.record(tb - ta - shift);
                    }
                }
            }
        }
        hist
    }

    fn blocks(&self) -> u64 {
        self.n_pulses.div_ceil(BLOCK_PULSES)
    }

    fn parallel<S>(&self, source: &S, rng: &RngSpec) -> CorrelationHistogram
    where
        S: Fn(&mut ChaCha8Rng, &mut Vec<(Channel, f64)>) + Sync,
    {
        (0..self.blocks())
            .into_par_iter()
            .map(|b| self.block(source, rng, b))
            .reduce(
                || self.template.clone(),
                |mut a, b| {
                    a.merge(&b);
                    a
                },
            )
    }

    fn serial<S>(&self, source: &S, rng: &RngSpec) -> CorrelationHistogram
    where
        S: Fn(&mut ChaCha8Rng, &mut Vec<(Channel, f64)>),
    {
        let mut hist = self.template.clone();
        for b in 0..self.blocks() {
            hist.merge(&self.block(source, rng, b));
        }
        hist
    }
}

fn run_for<'a>(scenario: &InterferenceScenario, template: &'a CorrelationHistogram) -> Run<'a> {
    // Detections spread at most about one period beyond their repetition.
    let max_lag = (template.half_range / scenario.rep_period).ceil() as usize + 1;
    Run {
        rep_period: scenario.rep_period,
        n_pulses: scenario.n_pulses,
        detector: scenario.detector,
        template,
        max_lag,
    }
}

/// Coincidence histogram of the full pulse train, accumulated in parallel
/// over blocks of [`BLOCK_PULSES`] repetitions. Each block draws from its own
/// ChaCha8 stream, so the result depends only on the scenario and `rng`.
pub fn simulate_histogram(
    scenario: &InterferenceScenario,
    rng: &RngSpec,
) -> Result<CorrelationHistogram> {
    scenario.validate()?;
    let (emitter, layout, template) = prepare(scenario);
    let source = |r: &mut ChaCha8Rng, out: &mut Vec<(Channel, f64)>| emitter.emit(&layout, r, out);
    Ok(run_for(scenario, &template).parallel(&source, rng))
}

/// Single-threaded equivalent of [`simulate_histogram`] with the same stream
/// assignment; the counts agree bit for bit.
pub fn simulate_histogram_serial(
    scenario: &InterferenceScenario,
    rng: &RngSpec,
) -> Result<CorrelationHistogram> {
    scenario.validate()?;
    let (emitter, layout, template) = prepare(scenario);
    let source = |r: &mut ChaCha8Rng, out: &mut Vec<(Channel, f64)>| emitter.emit(&layout, r, out);
    Ok(run_for(scenario, &template).serial(&source, rng))
}

fn prepare(scenario: &InterferenceScenario) -> (Emitter, Layout, CorrelationHistogram) {
    let template =
        CorrelationHistogram::empty(&scenario.histogram, scenario.rep_period, scenario.n_pulses);
    (
        Emitter::new(scenario),
        Layout::for_scenario(scenario),
        template,
    )
}

/// Autocorrelation histogram of a source that emits a second, independent
/// photon with probability `multi_photon_prob` on each pulse. Both photons
/// enter one input of a 50:50 beam splitter. The scenario supplies lifetime,
/// emission jitter, pulse train and detectors.
pub fn simulate_hbt_purity(
    multi_photon_prob: f64,
    scenario: &InterferenceScenario,
    rng: &RngSpec,
) -> Result<CorrelationHistogram> {
    if !(0.0..=1.0).contains(&multi_photon_prob) {
        return domain(format!(
            "multi_photon_prob must lie in [0, 1], got {multi_photon_prob}"
        ));
    }
    scenario.validate()?;
    let template =
        CorrelationHistogram::empty(&scenario.histogram, scenario.rep_period, scenario.n_pulses);
    let emitter = Emitter::new(scenario);
    let layout = Layout::hbt(multi_photon_prob);
    let source = |r: &mut ChaCha8Rng, out: &mut Vec<(Channel, f64)>| emitter.emit(&layout, r, out);
    Ok(run_for(scenario, &template).parallel(&source, rng))
}

/// `g²(0) = 2p/(1 + p)²` of the source in [`simulate_hbt_purity`].
pub fn hbt_g2(multi_photon_prob: f64) -> f64 {
    let p = multi_photon_prob;
    2.0 * p / ((1.0 + p) * (1.0 + p))
}

/// Two-photon probability that gives the requested `g²(0)` in
/// [`simulate_hbt_purity`]; the smaller root of `g(1 + p)² = 2p`.
pub fn multi_photon_prob_for_g2(g2: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&g2) {
        return domain(format!("g2 must lie in [0, 0.5] for this source, got {g2}"));
    }
    if g2 == 0.0 {
        return Ok(0.0);
    }
    // p = ((1 − g) − √(1 − 2g))/g, written to avoid cancellation at small g.
    let root = (1.0 - 2.0 * g2).sqrt();
    Ok(g2 / ((1.0 - g2) + root))
}
