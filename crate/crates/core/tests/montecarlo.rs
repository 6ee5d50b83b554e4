use homsim_core::analysis::{default_window, peak_areas, peak_areas_with, PeakAreaOptions};
use homsim_core::model::{solve_sigma_g, PairSpec, VisibilityConvention};
use homsim_core::montecarlo::{
    expected_counts, expected_ratio, multi_photon_prob_for_g2, sample_pair_event,
    simulate_hbt_purity, simulate_histogram, simulate_histogram_serial, CorrelationHistogram,
    DetectorModel, InterferenceScenario, Mode, RngSpec, Source,
};
use homsim_core::specfun::QuadratureSpec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const T: f64 = 12.2;

fn remote(n: u64) -> InterferenceScenario {
    let sg = solve_sigma_g(0.67, 0.364, VisibilityConvention::Direct).unwrap();
    InterferenceScenario::new(
        Mode::RemoteEmitters,
        PairSpec::resonant(0.67, sg).unwrap(),
        T,
        n,
    )
    .unwrap()
}

fn double_pulse(n: u64, mode: Mode) -> InterferenceScenario {
    let initial = if mode == Mode::CrossPolarizedControl {
        mode
    } else {
        Mode::RemoteEmitters
    };
    let mut s = InterferenceScenario::new(initial, PairSpec::resonant(0.25, 0.0).unwrap(), 12.5, n)
        .unwrap();
    s.mode = Mode::DoublePulseSameEmitter;
    s.intra_delay = 2.0;
    s
}

/// MC ratio and its analytic counterpart over the same bins.
fn ratio_vs_reference(
    s: &InterferenceScenario,
    source: Source,
    hist: &CorrelationHistogram,
    w: f64,
) -> (f64, f64, f64) {
    let r = peak_areas(hist, w, 6).unwrap();
    let expected = expected_ratio(
        s,
        source,
        r.central_window,
        &r.side_windows,
        &QuadratureSpec::default(),
    )
    .unwrap();
    (r.g2_indist, r.g2_error, expected)
}

#[test]
fn same_seed_gives_identical_histograms() {
    let s = remote(20_000);
    let rng = RngSpec::new(7);
    let a = simulate_histogram(&s, &rng).unwrap();
    let b = simulate_histogram(&s, &rng).unwrap();
    assert_eq!(a, b);
    let c = simulate_histogram(&s, &RngSpec::new(8)).unwrap();
    assert_ne!(a.counts, c.counts);
    let d = simulate_histogram(
        &s,
        &RngSpec {
            seed: 7,
            stream_id: 1,
        },
    )
    .unwrap();
    assert_ne!(a.counts, d.counts);
}

#[test]
fn parallel_and_serial_agree_bitwise() {
    for mut s in [
        remote(30_001),
        double_pulse(30_001, Mode::DoublePulseSameEmitter),
    ] {
        s.detector = DetectorModel {
            efficiency: 0.6,
            timing_jitter_sigma: 0.03,
            dark_rate: 1e-3,
        };
        s.emission_jitter = 0.05;
        let rng = RngSpec::new(11);
        let par = simulate_histogram(&s, &rng).unwrap();
        let ser = simulate_histogram_serial(&s, &rng).unwrap();
        assert_eq!(par, ser);
        assert!(par.total_events > 0);
    }
}

fn scenarios() -> Vec<(&'static str, InterferenceScenario)> {
    let mut consecutive = InterferenceScenario::new(
        Mode::ConsecutiveSameEmitter,
        PairSpec::new(0.67, 0.1, 0.0, 0.0).unwrap(),
        T,
        1,
    )
    .unwrap();
    consecutive.tau_c = Some(0.9246);
    let mut wetting = consecutive;
    wetting.tau_c = Some(0.2);
    wetting.emission_jitter = 0.15;
    let mut dephased_double = double_pulse(1, Mode::DoublePulseSameEmitter);
    dephased_double.tau_c = Some(0.4);
    dephased_double.pair.delta_tau = 0.1;
    let detuned = {
        let mut s = remote(1);
        s.pair.delta0 = 3.0;
        s
    };
    vec![
        ("remote", remote(1)),
        ("remote-detuned", detuned),
        ("consecutive", consecutive),
        ("wetting-layer", wetting),
        ("double-pulse", dephased_double),
        (
            "cross-polarized",
            double_pulse(1, Mode::CrossPolarizedControl),
        ),
    ]
}

/// Largest per-bin z-score and the RMS deviation of the empirical
/// opposite-port delay distribution from the analytic density.
fn density_deviation(s: &InterferenceScenario, n: usize, seed: u64) -> (f64, f64) {
    let spec = QuadratureSpec::default();
    let kernel = s.kernel();
    let center = s.pair.delta_tau.abs();
    let reach = center + 4.0 * s.pair.tau_r;
    let edges: Vec<f64> = (0..=16)
        .map(|i| -reach + 2.0 * reach * i as f64 / 16.0)
        .collect();
    let mut counts = [0u64; 16];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n {
        if let Some(d) = sample_pair_event(s, &mut rng).delay() {
            if let Some(i) = edges.windows(2).position(|e| d >= e[0] && d < e[1]) {
                counts[i] += 1;
            }
        }
    }
    let mut zmax = 0.0f64;
    let mut sq = 0.0;
    for (i, e) in edges.windows(2).enumerate() {
        let p = kernel.interval_probability(e[0], e[1], 0.0, &spec).unwrap();
        let f = counts[i] as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt().max(1.0 / n as f64);
        zmax = zmax.max(((f - p) / se).abs());
        sq += (f - p) * (f - p);
    }
    (zmax, sq.sqrt())
}

#[test]
fn sampled_delays_follow_the_analytic_density() {
    for (name, s) in scenarios() {
        let (zmax, _) = density_deviation(&s, 1_000_000, 3);
        assert!(zmax < 4.5, "{name}: max z = {zmax}");
    }
}

#[test]
fn density_error_shrinks_as_inverse_root_n() {
    for (name, s) in scenarios() {
        let scaled: Vec<f64> = [10_000usize, 100_000, 1_000_000]
            .iter()
            .enumerate()
            .map(|(k, &n)| density_deviation(&s, n, 100 + k as u64).1 * (n as f64).sqrt())
            .collect();
        let (lo, hi) = scaled
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        assert!(hi / lo < 4.0, "{name}: sqrt(N)-scaled errors {scaled:?}");
    }
}

#[test]
fn opposite_fraction_matches_kernel_probability() {
    let spec = QuadratureSpec::default();
    for (name, s) in scenarios() {
        let p = s.kernel().opposite_probability(&spec).unwrap();
        let n = 400_000;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let k = (0..n)
            .filter(|_| sample_pair_event(&s, &mut rng).delay().is_some())
            .count();
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!(
            (k as f64 / n as f64 - p).abs() < 4.0 * se,
            "{name}: {} vs {p}",
            k as f64 / n as f64
        );
    }
}

#[test]
fn remote_emitter_ratio_matches_reference() {
    let s = remote(200_000);
    let hist = simulate_histogram(&s, &RngSpec::new(21)).unwrap();
    let (g2, se, expected) = ratio_vs_reference(
        &s,
        Source::Interference,
        &hist,
        default_window(0.67, T, None),
    );
    assert!(
        (g2 - expected).abs() < 3.0 * se,
        "{g2} ± {se} vs {expected}"
    );
    assert!((0.30..0.33).contains(&expected), "{expected}");
}

#[test]
fn ideal_double_pulse_central_peak_is_suppressed() {
    let s = double_pulse(300_000, Mode::DoublePulseSameEmitter);
    let hist = simulate_histogram(&s, &RngSpec::new(4)).unwrap();
    let w = default_window(0.25, 12.5, Some(2.0));
    let opts = PeakAreaOptions {
        satellite_spacing: Some(2.0),
        ..PeakAreaOptions::new(w, 6)
    };
    let r = peak_areas_with(&hist, &opts).unwrap();
    assert!(r.central_area / r.side_average < 0.01, "{r:?}");
    let expected = expected_ratio(
        &s,
        Source::Interference,
        r.central_window,
        &r.side_windows,
        &QuadratureSpec::default(),
    )
    .unwrap();
    assert!(
        (r.g2_indist - expected).abs() < 3.0 * r.g2_error + 1e-3,
        "{} vs {expected}",
        r.g2_indist
    );
    // Satellites hold 1/8 of a repetition's coincidences against 3/8 in the side sub-peaks.
    let sat = r.satellite_areas.unwrap();
    for a in sat {
        assert!((a / r.side_average - 1.0 / 3.0).abs() < 0.02, "{sat:?}");
    }
    assert!(s.visibility_from_g2(r.g2_indist) > 0.95);
}

#[test]
fn cross_polarized_central_peak_matches_satellites() {
    let s = double_pulse(300_000, Mode::CrossPolarizedControl);
    let hist = simulate_histogram(&s, &RngSpec::new(5)).unwrap();
    let opts = PeakAreaOptions {
        satellite_spacing: Some(2.0),
        ..PeakAreaOptions::new(default_window(0.25, 12.5, Some(2.0)), 6)
    };
    let r = peak_areas_with(&hist, &opts).unwrap();
    let sat = r.satellite_areas.unwrap();
    for a in sat {
        let se = (a + r.central_area).sqrt();
        assert!(
            (a - r.central_area).abs() < 4.0 * se,
            "{} vs {sat:?}",
            r.central_area
        );
    }
    assert!(
        (r.g2_indist - 1.0 / 3.0).abs() < 4.0 * r.g2_error,
        "{}",
        r.g2_indist
    );
    assert!(s.visibility_from_g2(r.g2_indist).abs() < 0.05);
}

#[test]
fn hbt_admixture_is_recovered() {
    let s = remote(1_000_000);
    let w = default_window(0.67, T, None);
    let empty = simulate_hbt_purity(0.0, &s, &RngSpec::new(1)).unwrap();
    assert_eq!(peak_areas(&empty, w, 6).unwrap().central_area, 0.0);
    let p = multi_photon_prob_for_g2(0.05).unwrap();
    let hist = simulate_hbt_purity(p, &s, &RngSpec::new(2)).unwrap();
    let (g2, se, expected) = ratio_vs_reference(&s, Source::Hbt(p), &hist, w);
    assert!(
        (g2 - expected).abs() < 3.0 * se,
        "{g2} ± {se} vs {expected}"
    );
    assert!((expected - 0.05).abs() < 1e-3);
}

#[test]
fn detector_effects_match_expected_counts() {
    let mut s = remote(200_000);
    s.detector = DetectorModel {
        efficiency: 0.5,
        timing_jitter_sigma: 0.05,
        dark_rate: 2e-3,
    };
    s.emission_jitter = 0.04;
    let hist = simulate_histogram(&s, &RngSpec::new(9)).unwrap();
    let spec = QuadratureSpec::default();
    for (lo, hi) in [
        (-1.0, 1.0),
        (-6.0, -3.0),
        (T - 2.0, T + 2.0),
        (2.0 * T - 6.0, 2.0 * T - 3.0),
    ] {
        let (range, (a, b)) = hist.bins_within(lo, hi).unwrap();
        let observed: u64 = hist.counts[range].iter().sum();
        let expected = expected_counts(&s, Source::Interference, a, b, &spec).unwrap();
        let z = (observed as f64 - expected) / expected.sqrt();
        assert!(z.abs() < 4.0, "[{a}, {b}]: {observed} vs {expected}");
    }
}

#[test]
fn side_peak_count_does_not_bias_the_ratio() {
    let s = remote(300_000);
    let hist = simulate_histogram(&s, &RngSpec::new(13)).unwrap();
    let w = default_window(0.67, T, None);
    let six = peak_areas(&hist, w, 6).unwrap();
    let four = peak_areas(&hist, w, 4).unwrap();
    let combined = (six.g2_error.powi(2) + four.g2_error.powi(2)).sqrt();
    assert!(
        (six.g2_indist - four.g2_indist).abs() < combined,
        "{six:?} {four:?}"
    );
}
