use homsim_core::analysis::{
    fit_exponential_decay, fit_hom_dip_weighted, fit_michelson, hom_dip_model,
};
use homsim_core::model::{michelson_contrast, FineStructureLines};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};

fn mean_sd(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    (
        m,
        (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt(),
    )
}

#[test]
fn poisson_decay_recovers_lifetime_within_two_percent() {
    let mut rng = ChaCha8Rng::seed_from_u64(376);
    let (peak, tau) = (1e4, 0.67);
    for _ in 0..50 {
        let pts: Vec<(f64, f64)> = (0..100)
            .map(|i| 0.05 * i as f64)
            .map(|t| {
                let mean: f64 = peak * (-t / tau).exp();
                let n = Poisson::new(mean).unwrap().sample(&mut rng);
                (t, n.max(1.0))
            })
            .collect();
        let fit = fit_exponential_decay(&pts).unwrap();
        let got = fit.get("tau_r").unwrap();
        assert!(fit.converged);
        assert!((got / tau - 1.0).abs() < 0.02, "tau_r {got}");
    }
}

#[test]
fn michelson_recovers_coherence_times_at_three_percent_noise() {
    let mut rng = ChaCha8Rng::seed_from_u64(385);
    let unit = Normal::new(0.0, 1.0).unwrap();
    let lines = FineStructureLines::new(0.33, 0.18, 20.0).unwrap();
    for _ in 0..20 {
        let pts: Vec<(f64, f64)> = (0..81)
            .map(|i| 1.2 * i as f64 / 80.0)
            .map(|dt| {
                let c = michelson_contrast(dt, &lines).unwrap();
                (
                    dt,
                    (c * (1.0 + 0.03 * unit.sample(&mut rng))).clamp(0.0, 1.0),
                )
            })
            .collect();
        let fit = fit_michelson(&pts).unwrap();
        let (t1, t2) = (fit.get("tau_c1").unwrap(), fit.get("tau_c2").unwrap());
        assert!((t1 / 0.33 - 1.0).abs() < 0.05, "tau_c1 {t1}");
        assert!((t2 / 0.18 - 1.0).abs() < 0.05, "tau_c2 {t2}");
    }
}

#[test]
fn weighted_dip_errors_match_the_scatter() {
    let mut rng = ChaCha8Rng::seed_from_u64(366);
    let unit = Normal::new(0.0, 1.0).unwrap();
    let (v, tau_m) = (0.69, 0.63);
    let x: Vec<f64> = (0..21).map(|i| -2.0 + 0.2 * i as f64).collect();
    let sigma: Vec<f64> = x
        .iter()
        .map(|&t| 0.05 * hom_dip_model(t, v, tau_m))
        .collect();
    let (mut vs, mut ts, mut se_v, mut se_t) = (vec![], vec![], 0.0, 0.0);
    let trials = 300;
    for _ in 0..trials {
        let pts: Vec<(f64, f64)> = x
            .iter()
            .zip(&sigma)
            .map(|(&t, &s)| (t, hom_dip_model(t, v, tau_m) + s * unit.sample(&mut rng)))
            .collect();
        let fit = fit_hom_dip_weighted(&pts, Some(&sigma)).unwrap();
        vs.push(fit.get("v").unwrap());
        ts.push(fit.get("tau_m").unwrap());
        se_v += fit.error("v").unwrap() / trials as f64;
        se_t += fit.error("tau_m").unwrap() / trials as f64;
    }
    let (mv, sv) = mean_sd(&vs);
    let (mt, st) = mean_sd(&ts);
    assert!(
        (mv - v).abs() < 4.0 * sv / (trials as f64).sqrt(),
        "v bias {mv}"
    );
    assert!(
        (mt - tau_m).abs() < 4.0 * st / (trials as f64).sqrt(),
        "tau_m bias {mt}"
    );
    assert!(
        (se_v / sv - 1.0).abs() < 0.25,
        "v: se {se_v} vs scatter {sv}"
    );
    assert!(
        (se_t / st - 1.0).abs() < 0.25,
        "tau_m: se {se_t} vs scatter {st}"
    );
}
