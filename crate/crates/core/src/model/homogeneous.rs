//! Homogeneously broadened emitters: the central-peak correlation function
//! for two photons of identical frequency with exponential coherence decay.

use crate::error::{domain, Result};
use crate::specfun::{integrate_piecewise, QuadratureSpec};

/// Coherence time from `1/τc = 1/(2τr) + 1/τdeph`; `2τr` without dephasing.
pub fn coherence_time(tau_r: f64, tau_deph: Option<f64>) -> Result<f64> {
    if !(tau_r > 0.0) {
        return domain(format!("tau_r must be positive, got {tau_r}"));
    }
    match tau_deph {
        None => Ok(2.0 * tau_r),
        Some(t) if t > 0.0 => Ok(1.0 / (0.5 / tau_r + 1.0 / t)),
        Some(t) => domain(format!("tau_deph must be positive, got {t}")),
    }
}

/// Inverse of [`coherence_time`]: the pure dephasing time that reduces the
/// coherence time to `tau_c`. `None` when `tau_c == 2·tau_r`.
pub fn dephasing_time(tau_r: f64, tau_c: f64) -> Result<Option<f64>> {
    check_coherence(tau_r, tau_c)?;
    let rate = 1.0 / tau_c - 0.5 / tau_r;
    Ok(if rate <= 0.0 { None } else { Some(1.0 / rate) })
}

fn check_coherence(tau_r: f64, tau_c: f64) -> Result<()> {
    if !(tau_r > 0.0) {
        return domain(format!("tau_r must be positive, got {tau_r}"));
    }
    if !(tau_c > 0.0) {
        return domain(format!("tau_c must be positive, got {tau_c}"));
    }
    // Allow rounding noise from callers that compute 2·tau_r themselves.
    if tau_c > 2.0 * tau_r * (1.0 + 1e-12) {
        return domain(format!(
            "tau_c = {tau_c} exceeds the Fourier limit 2*tau_r = {}",
            2.0 * tau_r
        ));
    }
    Ok(())
}

/// Central-peak correlation function
///
/// ```text
/// ¼e^{−|τ−δτ|/τr} + ¼e^{−|τ+δτ|/τr} − ½e^{−(2/τc − 1/τr)|τ| − |τ−δτ|/(2τr) − |τ+δτ|/(2τr)}
/// ```
pub fn g2_hom_peak(tau: f64, delta_tau: f64, tau_r: f64, tau_c: f64) -> Result<f64> {
    check_coherence(tau_r, tau_c)?;
    Ok(g2_hom_peak_unchecked(tau, delta_tau, tau_r, tau_c))
}

pub(crate) fn g2_hom_peak_unchecked(tau: f64, delta_tau: f64, tau_r: f64, tau_c: f64) -> f64 {
    let minus = (tau - delta_tau).abs();
    let plus = (tau + delta_tau).abs();
    let decay = (2.0 / tau_c - 1.0 / tau_r).max(0.0);
    0.25 * (-minus / tau_r).exp() + 0.25 * (-plus / tau_r).exp()
        - 0.5 * (-decay * tau.abs() - minus / (2.0 * tau_r) - plus / (2.0 * tau_r)).exp()
}

/// Area of the central peak at δτ = 0, normalized so that fully
/// distinguishable photons give 0.5: `½(1 − τc/(2τr))`.
pub fn central_peak_area_hom(tau_r: f64, tau_c: f64) -> Result<f64> {
    check_coherence(tau_r, tau_c)?;
    Ok((0.5 * (1.0 - tau_c / (2.0 * tau_r))).max(0.0))
}

/// Same area by direct quadrature of [`g2_hom_peak`] at δτ = 0.
pub fn central_peak_area_hom_quadrature(
    tau_r: f64,
    tau_c: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    check_coherence(tau_r, tau_c)?;
    let half = spec.exponential_cutoff(1.0 / tau_r);
    // Both terms are even in τ at δτ = 0; integrate one side.
    let one_side = integrate_piecewise(
        |t| g2_hom_peak_unchecked(t, 0.0, tau_r, tau_c),
        &[0.0, tau_c.min(half), half],
        spec,
    )?;
    Ok(2.0 * one_side / (2.0 * tau_r))
}

/// Two-photon interference visibility `τc/(2τr)` of a homogeneous line.
pub fn visibility_hom(tau_r: f64, tau_c: f64) -> Result<f64> {
    check_coherence(tau_r, tau_c)?;
    Ok((tau_c / (2.0 * tau_r)).min(1.0))
}
