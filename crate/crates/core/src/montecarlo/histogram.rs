use serde::{Deserialize, Serialize};

use super::scenario::HistogramSpec;

/// Start-multistop coincidence histogram of `t_B − t_A`.
///
/// Bins are `bin_width` wide with one bin centered on zero delay; the range is
/// symmetric, `[−half_range, half_range)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationHistogram {
    pub bin_width: f64,
    pub half_range: f64,
    pub counts: Vec<u64>,
    /// Coincidences that landed inside the range (the sum of `counts`).
    pub total_events: u64,
    pub rep_period: f64,
    pub n_pulses: u64,
    /// Single detections on outputs A and B.
    pub singles: [u64; 2],
}

impl CorrelationHistogram {
    pub fn empty(spec: &HistogramSpec, rep_period: f64, n_pulses: u64) -> Self {
        let half = (spec.periods as f64 + 0.5) * rep_period;
        let half_bins = (half / spec.bin_width - 0.5).ceil().max(0.0) as usize;
        let n = 2 * half_bins + 1;
        Self {
            bin_width: spec.bin_width,
            half_range: 0.5 * n as f64 * spec.bin_width,
            counts: vec![0; n],
            total_events: 0,
            rep_period,
            n_pulses,
            singles: [0, 0],
        }
    }

    pub fn n_bins(&self) -> usize {
        self.counts.len()
    }

    #[inline]
    pub fn bin_of(&self, delay: f64) -> Option<usize> {
        let x = (delay + self.half_range) / self.bin_width;
        if x >= 0.0 && x < self.counts.len() as f64 {
            Some(x as usize)
        } else {
            None
        }
    }

    #[inline]
    pub(crate) fn record(&mut self, delay: f64) {
        if let Some(i) = self.bin_of(delay) {
            self.counts[i] += 1;
            self.total_events += 1;
        }
    }

    pub fn bin_start(&self, i: usize) -> f64 {
        -self.half_range + i as f64 * self.bin_width
    }

    pub fn bin_center(&self, i: usize) -> f64 {
        self.bin_start(i) + 0.5 * self.bin_width
    }

    /// Bins whose centers lie in `[lo, hi]`, as an index range together with
    /// the covered interval `[first bin start, last bin end]`.
    pub fn bins_within(&self, lo: f64, hi: f64) -> Option<(std::ops::Range<usize>, (f64, f64))> {
        let first = ((lo + self.half_range) / self.bin_width - 0.5)
            .ceil()
            .max(0.0) as usize;
        let last = ((hi + self.half_range) / self.bin_width - 0.5).floor();
        if last < 0.0 {
            return None;
        }
        let last = (last as usize).min(self.counts.len().saturating_sub(1));
        if first > last {
            return None;
        }
        Some((
            first..last + 1,
            (self.bin_start(first), self.bin_start(last + 1)),
        ))
    }

    /// Adds another histogram with identical binning.
    pub fn merge(&mut self, other: &Self) {
        assert_eq!(
            self.counts.len(),
            other.counts.len(),
            "histograms must share binning"
        );
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += *b;
        }
        self.total_events += other.total_events;
        self.singles[0] += other.singles[0];
        self.singles[1] += other.singles[1];
    }
}
