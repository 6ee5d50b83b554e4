//! Monte Carlo generation of coincidence histograms for pulsed two-photon
//! interference and autocorrelation experiments.
//!
//! Random numbers come from ChaCha8 streams: the 64-bit seed is expanded to a
//! key with SplitMix64 and each block of [`BLOCK_PULSES`] repetitions uses
//! stream `stream_id·2³² + block`. Results therefore depend only on the
//! scenario and the [`RngSpec`], not on the number of worker threads.

mod engine;
mod histogram;
mod layout;
mod reference;
mod sampler;
mod scenario;

pub use engine::{
    block_rng, hbt_g2, multi_photon_prob_for_g2, simulate_hbt_purity, simulate_histogram,
    simulate_histogram_serial, BLOCK_PULSES, RNG_ALGORITHM,
};
pub use histogram::CorrelationHistogram;
pub use reference::{expected_counts, expected_ratio, laplace_interval_probability, Source};
pub use sampler::{sample_pair_event, Channel, CoincidenceEvent, PortOutcome};
pub use scenario::{
    DetectorModel, HistogramSpec, InterferenceScenario, Mode, Polarization, RngSpec,
};
