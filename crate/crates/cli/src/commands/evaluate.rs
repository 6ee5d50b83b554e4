//! Monte Carlo run, peak analysis and analytic reference for one scenario.

use homsim_core::analysis::{peak_areas_with, PeakAreaOptions, PeakAreaReport};
use homsim_core::montecarlo::{
    expected_counts, simulate_histogram, CorrelationHistogram, InterferenceScenario, RngSpec,
    Source,
};
use homsim_core::specfun::QuadratureSpec;
use serde::Serialize;

use crate::error::CliResult;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub g2_indist: f64,
    pub g2_error: f64,
    pub visibility: f64,
    pub visibility_error: f64,
    pub central_area: f64,
    pub side_areas: Vec<f64>,
    pub side_average: f64,
    pub satellite_areas: Option<[f64; 2]>,
    pub baseline_per_bin: Option<f64>,
    pub total_coincidences: u64,
    pub singles: [u64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticReference {
    /// Expected ratio over exactly the bins used for the Monte Carlo estimate.
    pub g2_indist: f64,
    pub visibility: f64,
    /// Expected counts in the central window over the whole run.
    pub central_area: f64,
    pub side_average: f64,
    /// Pair visibility `1 − 2∫P(τ)dτ` with unbounded integration window.
    pub visibility_model: f64,
    pub opposite_port_probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discrepancy {
    /// Monte Carlo minus analytic.
    pub g2_indist: f64,
    /// Difference in units of the Monte Carlo standard error.
    pub g2_indist_sigmas: f64,
    pub visibility: f64,
    pub central_area_relative: f64,
    pub side_average_relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Windows {
    pub window_halfwidth_ns: f64,
    pub n_side_peaks: usize,
    pub central_window_ns: (f64, f64),
    pub side_windows_ns: Vec<(f64, f64)>,
    pub satellite_windows_ns: Option<[(f64, f64); 2]>,
    pub distinguishable_reference: f64,
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub histogram: Option<CorrelationHistogram>,
    pub monte_carlo: Option<MonteCarloEstimate>,
    pub analytic: AnalyticReference,
    pub discrepancy: Option<Discrepancy>,
    pub windows: Windows,
}

pub fn evaluate(
    scenario: &InterferenceScenario,
    options: &PeakAreaOptions,
    rng: &RngSpec,
    analytic_only: bool,
) -> CliResult<Evaluation> {
    let histogram = if analytic_only {
        None
    } else {
        Some(simulate_histogram(scenario, rng)?)
    };
    let template;
    let hist_for_windows = match &histogram {
        Some(h) => h,
        None => {
            template = CorrelationHistogram::empty(
                &scenario.histogram,
                scenario.rep_period,
                scenario.n_pulses,
            );
            &template
        }
    };
    let report = peak_areas_with(hist_for_windows, options)?;
    let windows = Windows {
        window_halfwidth_ns: report.window_halfwidth,
        n_side_peaks: report.n_side_peaks,
        central_window_ns: report.central_window,
        side_windows_ns: report.side_windows.clone(),
        satellite_windows_ns: report.satellite_windows,
        distinguishable_reference: scenario.distinguishable_reference(),
    };
    let analytic = analytic_reference(scenario, &report, options.subtract_baseline)?;
    let monte_carlo = histogram.as_ref().map(|h| estimate(scenario, h, &report));
    let discrepancy = monte_carlo.as_ref().map(|m| Discrepancy {
        g2_indist: m.g2_indist - analytic.g2_indist,
        g2_indist_sigmas: (m.g2_indist - analytic.g2_indist) / m.g2_error,
        visibility: m.visibility - analytic.visibility,
        central_area_relative: m.central_area / analytic.central_area - 1.0,
        side_average_relative: m.side_average / analytic.side_average - 1.0,
    });
    Ok(Evaluation {
        histogram,
        monte_carlo,
        analytic,
        discrepancy,
        windows,
    })
}

fn estimate(
    scenario: &InterferenceScenario,
    hist: &CorrelationHistogram,
    r: &PeakAreaReport,
) -> MonteCarloEstimate {
    MonteCarloEstimate {
        g2_indist: r.g2_indist,
        g2_error: r.g2_error,
        visibility: scenario.visibility_from_g2(r.g2_indist),
        visibility_error: r.g2_error / scenario.distinguishable_reference(),
        central_area: r.central_area,
        side_areas: r.side_areas.clone(),
        side_average: r.side_average,
        satellite_areas: r.satellite_areas,
        baseline_per_bin: r.baseline_per_bin,
        total_coincidences: hist.total_events,
        singles: hist.singles,
    }
}

fn analytic_reference(
    scenario: &InterferenceScenario,
    r: &PeakAreaReport,
    subtract_baseline: bool,
) -> CliResult<AnalyticReference> {
    let spec = QuadratureSpec::default();
    let mut reference = *scenario;
    if subtract_baseline {
        // The subtracted baseline removes the flat dark-count floor.
        reference.detector.dark_rate = 0.0;
    }
    let counts =
        |(lo, hi): (f64, f64)| expected_counts(&reference, Source::Interference, lo, hi, &spec);
    let central = counts(r.central_window)?;
    let mut side_sum = 0.0;
    for &w in &r.side_windows {
        side_sum += counts(w)?;
    }
    let side_average = side_sum / r.side_windows.len() as f64;
    let g2 = central / side_average;
    let kernel = scenario.kernel();
    Ok(AnalyticReference {
        g2_indist: g2,
        visibility: scenario.visibility_from_g2(g2),
        central_area: central,
        side_average,
        visibility_model: kernel.visibility(&spec)?,
        opposite_port_probability: kernel.opposite_probability(&spec)?,
    })
}
