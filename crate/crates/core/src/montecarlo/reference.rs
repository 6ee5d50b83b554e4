//! Expected coincidence counts of a simulated pulse train, for comparison
//! with Monte Carlo histograms integrated over the same delay windows.

use super::layout::Layout;
use super::scenario::InterferenceScenario;
use crate::error::{domain, Result};
use crate::model::{interval_weight, InterferenceKernel};
use crate::specfun::{integrate_piecewise, QuadratureSpec};

/// Source of photons for [`expected_counts`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Source {
    Interference,
    /// Autocorrelation with the given two-photon probability.
    Hbt(f64),
}

/// Probability that `X + center + noise` lies in `[lo, hi]`, with `X` the
/// difference of two independent exponentials of mean `tau_r` and Gaussian
/// noise of standard deviation `sigma`.
pub fn laplace_interval_probability(
    center: f64,
    tau_r: f64,
    sigma: f64,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if !(lo < hi) {
        return domain(format!("need lo < hi, got [{lo}, {hi}]"));
    }
    if sigma == 0.0 {
        let cdf = |x: f64| {
            let z = x - center;
            if z < 0.0 {
                0.5 * (z / tau_r).exp()
            } else {
                1.0 - 0.5 * (-z / tau_r).exp()
            }
        };
        return Ok(cdf(hi) - cdf(lo));
    }
    let reach = spec.exponential_cutoff(1.0 / tau_r);
    let a = (center - reach).max(lo - 10.0 * sigma);
    let b = (center + reach).min(hi + 10.0 * sigma);
    if a >= b {
        return Ok(0.0);
    }
    let weight = interval_weight(lo, hi, sigma);
    integrate_piecewise(
        |u| (-(u - center).abs() / tau_r).exp() / (2.0 * tau_r) * weight(u),
        &[a, lo, center, hi, b],
        spec,
    )
}

/// Expected number of coincidences with delay in `[lo, hi]` over the whole
/// pulse train, including detector efficiency, timing jitter and dark counts.
///
/// Photons of different repetitions, and photons of one repetition that do
/// not meet at the final beam splitter from opposite inputs, are
/// uncorrelated; their delays follow the difference of two exponentials
/// around the difference of their nominal onsets. Photons meeting from
/// opposite inputs follow the interference kernel.
pub fn expected_counts(
    scenario: &InterferenceScenario,
    source: Source,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    scenario.validate()?;
    let layout = match source {
        Source::Interference => Layout::for_scenario(scenario),
        Source::Hbt(p) => Layout::hbt(p),
    };
    let tr = scenario.pair.tau_r;
    let period = scenario.rep_period;
    let timing = scenario.detector.delay_sigma();
    let photon_spread = std::f64::consts::SQRT_2 * scenario.emission_jitter;
    let uncorrelated = (photon_spread * photon_spread + timing * timing).sqrt();
    let n = scenario.n_pulses as f64;

    let mid = 0.5 * (lo + hi);
    let k_center = (mid / period).round() as i64;
    let span = ((hi - lo) / period).ceil() as i64 + 2;
    let mut total = 0.0;
    for k in (k_center - span)..=(k_center + span) {
        let pairs_of_reps = n - k.unsigned_abs() as f64;
        if pairs_of_reps <= 0.0 {
            continue;
        }
        let shift = k as f64 * period;
        let mut per_pair = 0.0;
        if k == 0 {
            for (i, a, j, b, w) in layout.route_pairs() {
                if a.input != b.input {
                    // Opposite inputs: each unordered pair contributes its
                    // full kernel once.
                    if i < j {
                        let kernel = InterferenceKernel {
                            pair: scenario.pair.with_delta_tau(a.delay - b.delay),
                            ..scenario.kernel()
                        };
                        per_pair += w * kernel.interval_probability(lo, hi, timing, spec)?;
                    }
                } else {
                    // i in A, j in B with probability ¼.
                    per_pair += 0.25
                        * w
                        * laplace_interval_probability(
                            b.delay - a.delay,
                            tr,
                            uncorrelated,
                            lo,
                            hi,
                            spec,
                        )?;
                }
            }
        } else {
            for pa in &layout.photons {
                for pb in &layout.photons {
                    for a in &pa.arrivals {
                        for b in &pb.arrivals {
                            let w = 0.25 * pa.presence * pb.presence * a.weight * b.weight;
                            let c = shift + b.delay - a.delay;
                            per_pair += w * laplace_interval_probability(
                                c,
                                tr,
                                uncorrelated,
                                lo,
                                hi,
                                spec,
                            )?;
                        }
                    }
                }
            }
        }
        total += pairs_of_reps * per_pair;
    }
    let eta = scenario.detector.efficiency;
    let mut expected = eta * eta * total;
    let dark = scenario.detector.dark_rate;
    if dark > 0.0 {
        let per_channel = 0.5 * eta * layout.mean_photons();
        expected += n * (hi - lo) * (2.0 * dark * per_channel + dark * dark * period);
    }
    Ok(expected)
}

/// Ratio of expected counts in `central` to the mean over `sides`.
pub fn expected_ratio(
    scenario: &InterferenceScenario,
    source: Source,
    central: (f64, f64),
    sides: &[(f64, f64)],
    spec: &QuadratureSpec,
) -> Result<f64> {
    if sides.is_empty() {
        return domain("need at least one side window");
    }
    let c = expected_counts(scenario, source, central.0, central.1, spec)?;
    let mut s = 0.0;
    for &(lo, hi) in sides {
        s += expected_counts(scenario, source, lo, hi, spec)?;
    }
    Ok(c / (s / sides.len() as f64))
}
