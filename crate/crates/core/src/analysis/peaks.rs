//! Peak-area evaluation of pulsed correlation histograms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::montecarlo::CorrelationHistogram;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakAreaOptions {
    pub window_halfwidth: f64,
    /// Even number of side peaks, half on each side: 6 means ±1, ±2, ±3 periods.
    pub n_side_peaks: usize,
    /// Spacing of the satellite peaks in double-pulse histograms. Side
    /// windows then cover only the central sub-peak of each period, and the
    /// areas of the first satellites at ±spacing are reported.
    pub satellite_spacing: Option<f64>,
    /// Subtract a flat background estimated from bins far from every peak.
    pub subtract_baseline: bool,
}

impl PeakAreaOptions {
    pub fn new(window_halfwidth: f64, n_side_peaks: usize) -> Self {
        Self {
            window_halfwidth,
            n_side_peaks,
            satellite_spacing: None,
            subtract_baseline: false,
        }
    }
}

/// `5·τr`, clipped to stay clear of neighbouring peaks and satellites.
pub fn default_window(tau_r: f64, rep_period: f64, satellite_spacing: Option<f64>) -> f64 {
    let mut w = 5.0 * tau_r;
    w = w.min(0.5 * rep_period * (1.0 - 1e-9));
    if let Some(d) = satellite_spacing {
        w = w.min(0.5 * d * (1.0 - 1e-9));
    }
    w
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakAreaReport {
    pub central_area: f64,
    pub side_areas: Vec<f64>,
    /// Peak index k of each side area (center at k·rep_period).
    pub side_indices: Vec<i64>,
    pub side_average: f64,
    pub g2_indist: f64,
    /// Poisson standard error of `g2_indist`.
    pub g2_error: f64,
    pub n_side_peaks: usize,
    pub window_halfwidth: f64,
    /// Delay intervals actually covered by the selected bins.
    pub central_window: (f64, f64),
    pub side_windows: Vec<(f64, f64)>,
    /// Satellite areas at −spacing and +spacing when requested.
    pub satellite_areas: Option<[f64; 2]>,
    pub satellite_windows: Option<[(f64, f64); 2]>,
    /// Background counts per bin that were subtracted.
    pub baseline_per_bin: Option<f64>,
}

struct Area {
    value: f64,
    variance: f64,
    window: (f64, f64),
}

/// Peak areas with the default options for the given window and side-peak count.
pub fn peak_areas(
    hist: &CorrelationHistogram,
    window_halfwidth: f64,
    n_side_peaks: usize,
) -> Result<PeakAreaReport> {
    peak_areas_with(hist, &PeakAreaOptions::new(window_halfwidth, n_side_peaks))
}

/// Sums counts in windows around zero delay and around ±k repetition
/// periods, and returns `g²_indist(0) = central / mean(side)`. A bin belongs
/// to a window when its center lies inside it.
pub fn peak_areas_with(
    hist: &CorrelationHistogram,
    opts: &PeakAreaOptions,
) -> Result<PeakAreaReport> {
    let w = opts.window_halfwidth;
    let t = hist.rep_period;
    if !(w > 0.0) {
        return Err(Error::Config(format!(
            "window half-width must be positive, got {w}"
        )));
    }
    if 2.0 * w >= t {
        return Err(Error::Config(format!(
            "window half-width {w} ns makes neighbouring peak windows overlap (rep period {t} ns)"
        )));
    }
    if let Some(d) = opts.satellite_spacing {
        if !(d > 0.0) || 2.0 * w >= d {
            return Err(Error::Config(format!(
                "window half-width {w} ns overlaps satellite peaks spaced {d} ns"
            )));
        }
    }
    if opts.n_side_peaks < 2 || !opts.n_side_peaks.is_multiple_of(2) {
        return Err(Error::Config(format!(
            "n_side_peaks must be even and at least 2, got {}",
            opts.n_side_peaks
        )));
    }
    let k_max = (opts.n_side_peaks / 2) as i64;
    if k_max as f64 * t + w > hist.half_range {
        return Err(Error::Config(format!(
            "side peak at {k_max} periods lies outside the histogram range ±{} ns",
            hist.half_range
        )));
    }

    let baseline = if opts.subtract_baseline {
        Some(estimate_baseline(hist, opts)?)
    } else {
        None
    };
    let area = |center: f64| -> Result<Area> {
        let (range, window) = hist.bins_within(center - w, center + w).ok_or_else(|| {
            Error::Config(format!("no bins inside the window around {center} ns"))
        })?;
        let bins = range.len() as f64;
        let raw: u64 = hist.counts[range].iter().sum();
        let raw = raw as f64;
        Ok(match baseline {
            Some((b, var_b)) => Area {
                value: raw - b * bins,
                variance: raw + bins * bins * var_b,
                window,
            },
            None => Area {
                value: raw,
                variance: raw,
                window,
            },
        })
    };

    let central = area(0.0)?;
    let mut sides = Vec::new();
    let mut side_indices = Vec::new();
    for k in (-k_max..=k_max).filter(|k| *k != 0) {
        sides.push(area(k as f64 * t)?);
        side_indices.push(k);
    }
    let n = sides.len() as f64;
    let side_average = sides.iter().map(|a| a.value).sum::<f64>() / n;
    let side_var = sides.iter().map(|a| a.variance).sum::<f64>() / (n * n);
    let g2 = central.value / side_average;
    let rel2 = if central.value != 0.0 {
        central.variance / central.value.powi(2)
    } else {
        0.0
    } + side_var / side_average.powi(2);
    let g2_error = if central.value != 0.0 {
        g2.abs() * rel2.sqrt()
    } else {
        // No central counts: one count's worth of uncertainty.
        central.variance.max(1.0).sqrt() / side_average
    };
    let satellites = match opts.satellite_spacing {
        Some(d) => Some([area(-d)?, area(d)?]),
        None => None,
    };
    Ok(PeakAreaReport {
        central_area: central.value,
        side_areas: sides.iter().map(|a| a.value).collect(),
        side_indices,
        side_average,
        g2_indist: g2,
        g2_error,
        n_side_peaks: opts.n_side_peaks,
        window_halfwidth: w,
        central_window: central.window,
        side_windows: sides.iter().map(|a| a.window).collect(),
        satellite_areas: satellites.as_ref().map(|s| [s[0].value, s[1].value]),
        satellite_windows: satellites.as_ref().map(|s| [s[0].window, s[1].window]),
        baseline_per_bin: baseline.map(|b| b.0),
    })
}

/// Mean counts per bin, and its variance, over bins at least two window
/// widths from every peak and satellite center.
fn estimate_baseline(hist: &CorrelationHistogram, opts: &PeakAreaOptions) -> Result<(f64, f64)> {
    let t = hist.rep_period;
    let guard = 2.0 * opts.window_halfwidth;
    let mut sum = 0u64;
    let mut bins = 0u64;
    for (i, &c) in hist.counts.iter().enumerate() {
        let x = hist.bin_center(i);
        let k = (x / t).round();
        let mut r = x - k * t;
        if let Some(d) = opts.satellite_spacing {
            // Distance to the nearest of 0, ±d, ±2d around the period center.
            r = [-2.0, -1.0, 0.0, 1.0, 2.0]
                .iter()
                .map(|m| (r - m * d).abs())
                .fold(f64::INFINITY, f64::min);
        }
        if r.abs() >= guard {
            sum += c;
            bins += 1;
        }
    }
    if bins == 0 {
        return Err(Error::Config(
            "no histogram bins are far enough from the peaks to estimate a baseline".into(),
        ));
    }
    let mean = sum as f64 / bins as f64;
    Ok((mean, mean / bins as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::HistogramSpec;

    fn synthetic(central: u64, side: u64, background: u64) -> CorrelationHistogram {
        let mut h = CorrelationHistogram::empty(
            &HistogramSpec {
                bin_width: 0.1,
                periods: 4,
            },
            10.0,
            1,
        );
        for i in 0..h.n_bins() {
            let x = h.bin_center(i);
            let k = (x / 10.0).round();
            let near = (x - 10.0 * k).abs() < 0.55;
            h.counts[i] = background
                + if near {
                    if k == 0.0 {
                        central
                    } else {
                        side
                    }
                } else {
                    0
                };
        }
        h.total_events = h.counts.iter().sum();
        h
    }

    #[test]
    fn distinguishable_ratio_is_half() {
        let h = synthetic(500, 1000, 0);
        let r = peak_areas(&h, 1.0, 6).unwrap();
        assert_eq!(r.g2_indist, 0.5);
        assert_eq!(r.side_areas.len(), 6);
        assert!(r.g2_error > 0.0);
        let r4 = peak_areas(&h, 1.0, 4).unwrap();
        assert_eq!(r4.g2_indist, r.g2_indist);
    }

    #[test]
    fn ratio_invariant_under_rescaling() {
        let a = peak_areas(&synthetic(31, 100, 0), 1.0, 6).unwrap();
        let b = peak_areas(&synthetic(310, 1000, 0), 1.0, 6).unwrap();
        assert!((a.g2_indist - b.g2_indist).abs() < 1e-15);
    }

    #[test]
    fn baseline_subtraction_removes_flat_background() {
        let h = synthetic(310, 1000, 7);
        let raw = peak_areas(&h, 1.0, 6).unwrap();
        assert!(raw.g2_indist > 0.31);
        let opts = PeakAreaOptions {
            subtract_baseline: true,
            ..PeakAreaOptions::new(1.0, 6)
        };
        let r = peak_areas_with(&h, &opts).unwrap();
        assert!((r.g2_indist - 0.31).abs() < 1e-12, "{}", r.g2_indist);
        assert_eq!(r.baseline_per_bin, Some(7.0));
    }

    #[test]
    fn configuration_errors() {
        let h = synthetic(1, 1, 0);
        assert!(matches!(peak_areas(&h, 5.0, 6), Err(Error::Config(_))));
        assert!(matches!(peak_areas(&h, 1.0, 3), Err(Error::Config(_))));
        assert!(matches!(peak_areas(&h, 1.0, 10), Err(Error::Config(_))));
        let opts = PeakAreaOptions {
            satellite_spacing: Some(1.5),
            ..PeakAreaOptions::new(1.0, 6)
        };
        assert!(matches!(peak_areas_with(&h, &opts), Err(Error::Config(_))));
    }

    #[test]
    fn default_window_is_clipped() {
        assert_eq!(default_window(0.67, 12.2, None), 5.0 * 0.67);
        assert!(default_window(0.67, 12.2, Some(2.0)) < 1.0);
        assert!(default_window(3.0, 12.2, None) < 6.1);
    }
}
