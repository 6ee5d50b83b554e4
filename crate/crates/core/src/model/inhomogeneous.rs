//! Two-photon interference between independent, inhomogeneously broadened
//! ensembles of Fourier-limited photons.
//!
//! The frequency difference Δ of the two photons is Gaussian with mean Δ₀ and
//! variance 2σ_g². Averaging the Fourier-limited correlation function over Δ
//! and over the detection time t0 gives the closed form [`p_inhom`], which is
//! checked against the brute-force double integral [`p_inhom_quadrature`].

use serde::{Deserialize, Serialize};

use super::params::PairSpec;
use super::wavepacket::g2_tl;
use crate::error::{domain, Result};
use crate::specfun::{erfcx, find_root, integrate_1d, integrate_piecewise, QuadratureSpec};

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Density of the frequency difference,
/// `f(Δ) = 1/(2√π σ_g) · exp(−(Δ − Δ₀)²/(4σ_g²))`.
pub fn delta_distribution(delta: f64, pair: &PairSpec) -> Result<f64> {
    if !(pair.sigma_g > 0.0) {
        return domain("sigma_g = 0 makes f(Δ) a delta function; use the Fourier-limited path");
    }
    let s = pair.sigma_g;
    let d = delta - pair.delta0;
    Ok((-d * d / (4.0 * s * s)).exp() / (2.0 * SQRT_PI * s))
}

/// Probability density for a detection at `t0 + τ` in one output given a
/// detection at `t0` in the other, integrated over `t0`:
///
/// ```text
/// 1/(8τr)·(e^{−|δτ−τ|/τr} + e^{−|δτ+τ|/τr} − 2cos(Δ₀τ)·e^{−(|δτ|+|τ|)/τr}·e^{−σ_g²τ²})
/// ```
pub fn p_inhom(tau: f64, pair: &PairSpec) -> f64 {
    let tr = pair.tau_r;
    let dt = pair.delta_tau;
    let interference = 2.0
        * (pair.delta0 * tau).cos()
        * (-(dt.abs() + tau.abs()) / tr).exp()
        * (-pair.sigma_g * pair.sigma_g * tau * tau).exp();
    ((-(dt - tau).abs() / tr).exp() + (-(dt + tau).abs() / tr).exp() - interference) / (8.0 * tr)
}

/// `∫dt0 g2_tl(t0, τ; Δ)` by adaptive quadrature with break points at the
/// four packet onsets.
fn t0_integral(tau: f64, pair: &PairSpec, delta: f64, spec: &QuadratureSpec) -> Result<f64> {
    let h = 0.5 * pair.delta_tau;
    let onsets = [h, -h, h - tau, -h - tau];
    let lo = onsets.iter().copied().fold(f64::INFINITY, f64::min);
    let hi_kink = onsets.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // Every term carries exp(−2t0/τr) beyond the last onset.
    let hi = hi_kink + spec.exponential_cutoff(2.0 / pair.tau_r) + pair.tau_r;
    let mut points = vec![lo];
    points.extend_from_slice(&onsets);
    points.push(hi);
    integrate_piecewise(|t0| g2_tl(t0, tau, pair, delta), &points, spec)
}

/// Brute-force `∫dΔ f(Δ) ∫dt0 g2_tl(t0, τ; Δ)`; reduces to the t0 integral at
/// Δ = Δ₀ when σ_g = 0.
pub fn p_inhom_quadrature(tau: f64, pair: &PairSpec, spec: &QuadratureSpec) -> Result<f64> {
    pair.validate()?;
    if pair.sigma_g == 0.0 {
        return t0_integral(tau, pair, pair.delta0, spec);
    }
    let width = spec.gaussian_cutoff() * std::f64::consts::SQRT_2 * pair.sigma_g;
    let inner_spec = QuadratureSpec {
        abs_tol: spec.abs_tol * 1e-2,
        ..*spec
    };
    let failure = std::cell::Cell::new(None);
    let value = integrate_1d(
        |delta| {
            let weight = delta_distribution(delta, pair).unwrap_or(0.0);
            match t0_integral(tau, pair, delta, &inner_spec) {
                Ok(v) => weight * v,
                Err(e) => {
                    failure.set(Some(e));
                    0.0
                }
            }
        },
        pair.delta0 - width,
        pair.delta0 + width,
        spec,
    )?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

/// `x = 1/(2τrσ_g)`.
fn broadening_ratio(tau_r: f64, sigma_g: f64) -> Result<f64> {
    if !(tau_r > 0.0) || !(sigma_g > 0.0) {
        return domain(format!(
            "need tau_r > 0 and sigma_g > 0, got {tau_r}, {sigma_g}"
        ));
    }
    Ok(1.0 / (2.0 * tau_r * sigma_g))
}

/// The closed-form visibility expression as it is usually quoted for
/// Gaussian broadening,
///
/// ```text
/// 1 − (1/(τrσ_g))·(2τrσ_g − e^{1/(4τr²σ_g²)}·√π·erfc(1/(2τrσ_g)))
/// ```
///
/// evaluated verbatim. Algebraically this is `2V − 1` with `V` from
/// [`visibility_inhom_direct`]; it agrees with the normalized peak-area
/// visibility only in the σ_g → 0 limit.
pub fn visibility_inhom_closed(tau_r: f64, sigma_g: f64) -> Result<f64> {
    let x = broadening_ratio(tau_r, sigma_g)?;
    let ts = tau_r * sigma_g;
    Ok(1.0 - (2.0 * ts - SQRT_PI * erfcx(x)?) / ts)
}

/// Peak-area visibility `1 − 2∫P dτ = √π·x·erfcx(x)` at δτ = 0, Δ₀ = 0,
/// obtained by integrating [`p_inhom`] in closed form. Equals 1 at σ_g = 0.
pub fn visibility_inhom_direct(tau_r: f64, sigma_g: f64) -> Result<f64> {
    if sigma_g == 0.0 && tau_r > 0.0 {
        return Ok(1.0);
    }
    let x = broadening_ratio(tau_r, sigma_g)?;
    Ok(SQRT_PI * x * erfcx(x)?)
}

/// `1 − 2∫p_inhom(τ) dτ` by adaptive quadrature of the closed-form density.
/// Handles any Δ₀ and δτ.
pub fn visibility_inhom_quadrature(pair: &PairSpec, spec: &QuadratureSpec) -> Result<f64> {
    Ok(1.0 - 2.0 * opposite_port_probability_quadrature(pair, spec)?)
}

/// `∫p_inhom(τ) dτ`, the probability that the two photons leave through
/// different ports.
pub fn opposite_port_probability_quadrature(pair: &PairSpec, spec: &QuadratureSpec) -> Result<f64> {
    pair.validate()?;
    let dt = pair.delta_tau.abs();
    let half = dt + spec.exponential_cutoff(1.0 / pair.tau_r);
    let mut points = vec![-half, -dt, 0.0, dt];
    // Detuning fringes: give the adaptive rule a few anchors per period.
    if pair.delta0 != 0.0 {
        let period = 2.0 * std::f64::consts::PI / pair.delta0.abs();
        let n = ((2.0 * half / period) as usize).min(2000);
        points.extend((1..n).map(|k| -half + k as f64 * period));
    }
    points.push(half);
    integrate_piecewise(|t| p_inhom(t, pair), &points, spec)
}

/// Which visibility expression to invert in [`solve_sigma_g`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VisibilityConvention {
    /// [`visibility_inhom_closed`].
    Closed,
    /// [`visibility_inhom_direct`], which the quadrature reproduces.
    Direct,
}

/// Jitter σ_g at which the chosen visibility expression equals `target`.
pub fn solve_sigma_g(tau_r: f64, target: f64, convention: VisibilityConvention) -> Result<f64> {
    let (lo_target, f): (f64, fn(f64, f64) -> Result<f64>) = match convention {
        VisibilityConvention::Closed => (-1.0, visibility_inhom_closed),
        VisibilityConvention::Direct => (0.0, visibility_inhom_direct),
    };
    if !(target > lo_target && target < 1.0) {
        return domain(format!(
            "target visibility {target} is outside ({lo_target}, 1)"
        ));
    }
    // Search in log σ_g over a range wide enough for any representable target.
    let g = |log_s: f64| f(tau_r, log_s.exp()).unwrap_or(f64::NAN) - target;
    let lo = (1e-8 / tau_r).ln();
    let hi = (1e8 / tau_r).ln();
    find_root(g, lo, hi, 1e-15).map(f64::exp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn tight() -> QuadratureSpec {
        QuadratureSpec {
            abs_tol: 1e-11,
            rel_tol: 1e-10,
            max_subdivisions: 4000,
        }
    }

    #[test]
    fn delta_distribution_moments() {
        let pair = PairSpec::new(1.0, 0.0, 0.7, 1.3).unwrap();
        let spec = tight();
        let w = 40.0;
        let mass = integrate_1d(
            |d| delta_distribution(d, &pair).unwrap(),
            0.7 - w,
            0.7 + w,
            &spec,
        )
        .unwrap();
        assert!((mass - 1.0).abs() < 1e-10);
        let var = integrate_1d(
            |d| (d - 0.7).powi(2) * delta_distribution(d, &pair).unwrap(),
            0.7 - w,
            0.7 + w,
            &spec,
        )
        .unwrap();
        assert_relative_eq!(var, 2.0 * 1.3 * 1.3, max_relative = 1e-9);
        let peak = delta_distribution(0.7, &pair).unwrap();
        assert!(peak > delta_distribution(0.7 + 1e-3, &pair).unwrap());
        assert!(peak > delta_distribution(0.7 - 1e-3, &pair).unwrap());
        assert!(delta_distribution(0.0, &pair.with_sigma_g(0.0)).is_err());
    }

    #[test]
    fn p_inhom_limits() {
        let ideal = PairSpec::new(0.67, 0.0, 0.0, 0.0).unwrap();
        for tau in [-3.0, -0.2, 0.0, 0.1, 2.0] {
            assert!(p_inhom(tau, &ideal).abs() < 1e-16);
        }
        let broad = ideal.with_sigma_g(1e9);
        for tau in [-3.0, -0.2, 0.1, 2.0] {
            let want = (-f64::abs(tau) / 0.67).exp() / (4.0 * 0.67);
            assert_relative_eq!(p_inhom(tau, &broad), want, max_relative = 1e-12);
        }
    }

    #[test]
    fn p_inhom_matches_double_integral_at_generic_point() {
        let pair = PairSpec::new(0.67, 0.15, 0.8, 1.7).unwrap();
        for tau in [-0.9, 0.05, 0.4, 1.6] {
            let closed = p_inhom(tau, &pair);
            let quad = p_inhom_quadrature(tau, &pair, &tight()).unwrap();
            assert!(
                (closed - quad).abs() < 1e-7,
                "tau {tau}: {closed} vs {quad}"
            );
        }
    }

    #[test]
    fn quadrature_degenerate_and_symmetric_cases() {
        let spec = tight();
        let pair = PairSpec::new(1.0, 0.4, 0.0, 0.0).unwrap();
        let q = p_inhom_quadrature(0.7, &pair, &spec).unwrap();
        assert!((q - p_inhom(0.7, &pair)).abs() < 1e-9);
        let sym = PairSpec::new(1.0, 0.0, 0.3, 0.8).unwrap();
        let a = p_inhom_quadrature(0.6, &sym, &spec).unwrap();
        let b = p_inhom_quadrature(-0.6, &sym, &spec).unwrap();
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn closed_form_is_twice_direct_minus_one() {
        for ts in [0.01, 0.1, 0.5, 1.0, 5.0, 20.0] {
            let tau_r = 0.67;
            let s = ts / tau_r;
            let closed = visibility_inhom_closed(tau_r, s).unwrap();
            let direct = visibility_inhom_direct(tau_r, s).unwrap();
            assert_relative_eq!(closed, 2.0 * direct - 1.0, epsilon = 1e-12);
            let quad =
                visibility_inhom_quadrature(&PairSpec::resonant(tau_r, s).unwrap(), &tight())
                    .unwrap();
            assert!((quad - direct).abs() < 1e-9, "ts {ts}: {quad} vs {direct}");
        }
    }

    #[test]
    fn fourier_limited_asymptote() {
        let v = visibility_inhom_closed(1.0, 1e-4).unwrap();
        assert!((v - 1.0).abs() < 1e-3);
        assert_eq!(visibility_inhom_direct(1.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn visibility_limits() {
        let spec = tight();
        let broad = PairSpec::resonant(1.0, 1e4).unwrap();
        assert!(visibility_inhom_quadrature(&broad, &spec).unwrap() < 1e-3);
        let detuned = PairSpec::new(1.0, 0.0, 500.0, 0.5).unwrap();
        assert!(visibility_inhom_quadrature(&detuned, &spec).unwrap().abs() < 1e-4);
    }

    #[test]
    fn sigma_inversion_round_trips() {
        for conv in [VisibilityConvention::Closed, VisibilityConvention::Direct] {
            let s = solve_sigma_g(0.67, 0.364, conv).unwrap();
            let v = match conv {
                VisibilityConvention::Closed => visibility_inhom_closed(0.67, s).unwrap(),
                VisibilityConvention::Direct => visibility_inhom_direct(0.67, s).unwrap(),
            };
            assert!((v - 0.364).abs() < 1e-12);
        }
        // mpmath root of sqrt(pi) x erfcx(x) = 0.364, x = 1/(2·0.67·σ).
        let s = solve_sigma_g(0.67, 0.364, VisibilityConvention::Direct).unwrap();
        assert_relative_eq!(s, 2.739_988_093_187_572, max_relative = 1e-10);
        let s = solve_sigma_g(0.67, 0.364, VisibilityConvention::Closed).unwrap();
        assert_relative_eq!(s, 0.969_001_190_129_480_3, max_relative = 1e-10);
        assert!(solve_sigma_g(0.67, 1.2, VisibilityConvention::Direct).is_err());
    }

    #[test]
    fn visibility_monotone_in_broadening_and_detuning() {
        let spec = tight();
        let mut prev = 1.0 + 1e-12;
        for s in [0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0] {
            let v =
                visibility_inhom_quadrature(&PairSpec::resonant(0.67, s).unwrap(), &spec).unwrap();
            assert!(v < prev && (0.0..=1.0).contains(&v));
            prev = v;
        }
        let base = PairSpec::resonant(0.67, 2.74).unwrap();
        let mut prev = 1.0;
        for d in [0.0, 0.5, 1.0, 2.0, 4.0, 8.0] {
            let v = visibility_inhom_quadrature(&base.with_delta0(d), &spec).unwrap();
            let mirrored = visibility_inhom_quadrature(&base.with_delta0(-d), &spec).unwrap();
            assert!((v - mirrored).abs() < 1e-10);
            assert!(v < prev);
            prev = v;
        }
    }
}
