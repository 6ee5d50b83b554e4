//! Model fits used on measured curves: HOM dip, lifetime trace, Michelson
//! fringe contrast.

use super::nlls::{nlls_detailed, Data, FitResult, NllsOptions};
use crate::error::{domain, Result};
use crate::model::{michelson_contrast, FineStructureLines};

fn split(points: &[(f64, f64)]) -> (Vec<f64>, Vec<f64>) {
    points.iter().copied().unzip()
}

fn data<'a>(x: &'a [f64], y: &'a [f64], sigma: Option<&'a [f64]>) -> Data<'a> {
    match sigma {
        Some(s) => Data::new(x, y).with_sigma(s),
        None => Data::new(x, y),
    }
}

/// `g²(Δt) = ½(1 − v·e^{−|Δt|/τ_m})`.
pub fn hom_dip_model(dt: f64, v: f64, tau_m: f64) -> f64 {
    0.5 * (1.0 - v * (-dt.abs() / tau_m).exp())
}

/// Fits [`hom_dip_model`] and returns parameters `v` and `tau_m`.
///
/// Initial guesses: `v` from the point closest to zero delay, `τ_m` from the
/// delay where the dip depth first falls below `1/e` of that value. When the
/// dip is absent `τ_m` cannot be determined; the fit then carries an infinite
/// standard error for it and a `tau_m_unidentifiable` flag.
pub fn fit_hom_dip(points: &[(f64, f64)]) -> Result<FitResult> {
    fit_hom_dip_weighted(points, None)
}

/// [`fit_hom_dip`] with per-point standard deviations.
pub fn fit_hom_dip_weighted(points: &[(f64, f64)], sigma: Option<&[f64]>) -> Result<FitResult> {
    if points.len() < 5 {
        return domain(format!(
            "HOM dip fit needs at least 5 points, got {}",
            points.len()
        ));
    }
    if !(points.iter().any(|p| p.0 < 0.0) && points.iter().any(|p| p.0 > 0.0)) {
        return domain("HOM dip data must span both signs of the delay");
    }
    let (x, y) = split(points);
    let center = points
        .iter()
        .min_by(|a, b| a.0.abs().total_cmp(&b.0.abs()))
        .expect("at least five points");
    let v0 = 1.0 - 2.0 * center.1;
    let mut by_delay: Vec<(f64, f64)> = points.iter().map(|&(t, g)| (t.abs(), 0.5 - g)).collect();
    by_delay.sort_by(|a, b| a.0.total_cmp(&b.0));
    let span = by_delay
        .last()
        .map(|p| p.0)
        .unwrap_or(1.0)
        .max(f64::MIN_POSITIVE);
    let threshold = 0.5 * v0 / std::f64::consts::E;
    let tau0 = by_delay
        .iter()
        .find(|(_, depth)| depth.abs() < threshold.abs())
        .map(|p| p.0)
        .filter(|t| *t > 0.0)
        .unwrap_or(0.25 * span);

    let options = NllsOptions {
        bounds: Some(vec![(-10.0, 10.0), (1e-6 * span, 1e6 * span)]),
        ..Default::default()
    };
    let d = nlls_detailed(
        |t, p| hom_dip_model(t, p[0], p[1]),
        data(&x, &y, sigma),
        &[v0, tau0],
        &["v", "tau_m"],
        &options,
    )?;
    let mut fit = d.result;
    if let Some(msg) = d.singular {
        fit.flags.push(format!("tau_m_unidentifiable: {msg}"));
        fit.standard_errors[1] = f64::INFINITY;
    } else if fit.standard_errors[1] > fit.parameters[1].abs() * 1e3 {
        fit.flags.push("tau_m_unidentifiable: standard error exceeds the estimate by three orders of magnitude".into());
    }
    Ok(fit)
}

/// Fits `amplitude·e^{−t/τ_r}` with Poisson weights `σᵢ = √yᵢ`; returns
/// `amplitude` and `tau_r`. The starting point is a log-linear regression.
pub fn fit_exponential_decay(points: &[(f64, f64)]) -> Result<FitResult> {
    fit_exponential_decay_weighted(points, None)
}

/// [`fit_exponential_decay`] with explicit standard deviations in place of
/// the Poisson weights.
pub fn fit_exponential_decay_weighted(
    points: &[(f64, f64)],
    sigma: Option<&[f64]>,
) -> Result<FitResult> {
    if points.len() < 3 {
        return domain(format!(
            "decay fit needs at least 3 points, got {}",
            points.len()
        ));
    }
    if let Some(p) = points.iter().find(|p| !(p.1 > 0.0)) {
        return domain(format!(
            "intensities must be positive, got {} at t = {}",
            p.1, p.0
        ));
    }
    let (x, y) = split(points);
    let n = x.len() as f64;
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = x.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    if !(slope < 0.0) {
        return domain("intensities do not decay; cannot estimate a lifetime");
    }
    let tau0 = -1.0 / slope;
    let amp0 = (my - slope * mx).exp();
    let poisson: Vec<f64> = y.iter().map(|v| v.sqrt()).collect();
    let d = nlls_detailed(
        |t, p| p[0] * (-t / p[1]).exp(),
        Data::new(&x, &y).with_sigma(sigma.unwrap_or(&poisson)),
        &[amp0, tau0],
        &["amplitude", "tau_r"],
        &NllsOptions {
            bounds: Some(vec![(0.0, f64::INFINITY), (1e-9 * tau0, 1e9 * tau0)]),
            ..Default::default()
        },
    )?;
    let mut fit = d.result;
    if let Some(msg) = d.singular {
        fit.flags.push(format!("singular: {msg}"));
    }
    Ok(fit)
}

fn sigmoid(s: f64) -> f64 {
    1.0 / (1.0 + (-s).exp())
}

/// Contrast with internal parameters `(logit a1, ln τc1, ln τc2, fss)` and
/// `a1 + a2 = 1`.
fn michelson_internal(dt: f64, p: &[f64]) -> f64 {
    let lines = FineStructureLines {
        weights: (sigmoid(p[0]), 1.0 - sigmoid(p[0])),
        coherence_times: (p[1].exp(), p[2].exp()),
        splitting: p[3],
    };
    michelson_contrast(dt.abs(), &lines).unwrap_or(f64::NAN)
}

/// Fits the two-line contrast model and returns `a1`, `a2` (normalised to
/// `a1 + a2 = 1`), `tau_c1 ≥ tau_c2` and `fss`.
///
/// Coherence times are fitted on a log scale and the weight through a
/// logistic map, so both stay in range. The splitting enters through a
/// cosine and has many local minima, so the fit is started from a grid of
/// splittings up to the Nyquist frequency of the delay sampling and the best
/// result is kept. A `coherence_times_degenerate` flag is raised when the
/// weight and coherence-time parameters are correlated beyond 0.99, when they
/// are not separately identifiable, or when one line carries almost no weight.
pub fn fit_michelson(points: &[(f64, f64)]) -> Result<FitResult> {
    fit_michelson_weighted(points, None)
}

/// [`fit_michelson`] with per-point standard deviations.
pub fn fit_michelson_weighted(points: &[(f64, f64)], sigma: Option<&[f64]>) -> Result<FitResult> {
    if points.len() < 8 {
        return domain(format!(
            "Michelson fit needs at least 8 points, got {}",
            points.len()
        ));
    }
    if let Some(p) = points.iter().find(|p| !(0.0..=1.0).contains(&p.1)) {
        return domain(format!(
            "contrast must lie in [0, 1], got {} at dt = {}",
            p.1, p.0
        ));
    }
    if let Some(p) = points.iter().find(|p| p.0 < 0.0) {
        return domain(format!("path delays must be non-negative, got {}", p.0));
    }
    let (x, y) = split(points);

    // 1/e point of the envelope sets the coherence-time scale.
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let span = sorted.last().expect("non-empty").0.max(f64::MIN_POSITIVE);
    let tau_scale = sorted
        .iter()
        .find(|p| p.1 < 1.0 / std::f64::consts::E)
        .map(|p| p.0)
        .filter(|t| *t > 0.0)
        .unwrap_or(0.3 * span);
    let mut gaps: Vec<f64> = sorted
        .windows(2)
        .map(|w| w[1].0 - w[0].0)
        .filter(|g| *g > 0.0)
        .collect();
    gaps.sort_by(f64::total_cmp);
    let spacing = gaps.get(gaps.len() / 2).copied().unwrap_or(span);
    let nyquist = std::f64::consts::PI / spacing;

    let bound_s = 12.0;
    let (lo_t, hi_t) = ((1e-3 * spacing).ln(), (1e3 * span).ln());
    let options = NllsOptions {
        bounds: Some(vec![
            (-bound_s, bound_s),
            (lo_t, hi_t),
            (lo_t, hi_t),
            (0.0, 2.0 * nyquist),
        ]),
        ..Default::default()
    };
    let n_grid = 48;
    let mut best: Option<(f64, super::nlls::Detailed)> = None;
    for k in 0..=n_grid {
        let fss0 = nyquist * k as f64 / n_grid as f64;
        for &(s0, r1, r2) in &[(0.0, 1.4, 0.7), (0.8, 1.2, 0.5), (-0.8, 1.8, 0.9)] {
            let start = [s0, (tau_scale * r1).ln(), (tau_scale * r2).ln(), fss0];
            let Ok(d) = nlls_detailed(
                michelson_internal,
                data(&x, &y, sigma),
                &start,
                &["s", "l1", "l2", "fss"],
                &options,
            ) else {
                continue;
            };
            let chi2 = d.result.residual_norm.powi(2);
            if best.as_ref().is_none_or(|(b, _)| chi2 < *b) {
                best = Some((chi2, d));
            }
        }
    }
    let (_, d) = best.ok_or(crate::error::Error::Convergence {
        estimate: f64::NAN,
        error: f64::NAN,
        steps: 0,
    })?;
    let inner = d.result;
    let p = &inner.parameters;
    let se = &inner.standard_errors;
    let w = sigmoid(p[0]);
    let (mut t1, mut t2) = (p[1].exp(), p[2].exp());
    let (mut a1, mut a2) = (w, 1.0 - w);
    let se_w = w * (1.0 - w) * se[0];
    let (mut se_t1, mut se_t2) = (t1 * se[1], t2 * se[2]);
    if t2 > t1 {
        std::mem::swap(&mut t1, &mut t2);
        std::mem::swap(&mut a1, &mut a2);
        std::mem::swap(&mut se_t1, &mut se_t2);
    }
    let mut flags = inner.flags.clone();
    let strongest = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .filter_map(|&(i, k)| inner.correlation.get(i).and_then(|r| r.get(k)).copied())
        .fold(0.0f64, |m, c| if c.abs() > m.abs() { c } else { m });
    if let Some(msg) = &d.singular {
        flags.push(format!("coherence_times_degenerate: {msg}"));
    } else if strongest.abs() > 0.99 {
        flags.push(format!(
            "coherence_times_degenerate: parameter correlation {strongest:.4}"
        ));
    } else if a1.min(a2) < 0.01 {
        flags.push(format!(
            "coherence_times_degenerate: one component carries weight {:.2e}",
            a1.min(a2)
        ));
    }
    // Reorder the correlation matrix to the reported parameters; the monotone
    // maps preserve correlations, and a1, a2 move together.
    let correlation = if inner.correlation.is_empty() {
        Vec::new()
    } else {
        let swapped = p[2].exp() > p[1].exp();
        let c = &inner.correlation;
        let (i1, i2) = if swapped { (2, 1) } else { (1, 2) };
        let sign = if swapped { -1.0 } else { 1.0 };
        let idx = [0usize, 0, i1, i2, 3];
        let sgn = [sign, -sign, 1.0, 1.0, 1.0];
        (0..5)
            .map(|i| {
                (0..5)
                    .map(|k| {
                        if i == k {
                            1.0
                        } else {
                            sgn[i] * sgn[k] * c[idx[i]][idx[k]]
                        }
                    })
                    .collect()
            })
            .collect()
    };
    Ok(FitResult {
        names: ["a1", "a2", "tau_c1", "tau_c2", "fss"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        parameters: vec![a1, a2, t1, t2, p[3]],
        standard_errors: vec![se_w, se_w, se_t1, se_t2, se[3]],
        residual_norm: inner.residual_norm,
        converged: inner.converged,
        iterations: inner.iterations,
        history: inner.history,
        correlation,
        flags,
    })
}
