//! Levenberg-Marquardt least squares with finite-difference Jacobians.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Outcome of a fit. Standard errors come from `s²(JᵀJ)⁻¹` at the optimum
/// with `s² = χ²/(n − p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub names: Vec<String>,
    pub parameters: Vec<f64>,
    pub standard_errors: Vec<f64>,
    /// `√χ²` of the (weighted) residuals at the returned parameters.
    pub residual_norm: f64,
    pub converged: bool,
    /// Accepted damped steps.
    pub iterations: usize,
    /// `χ²` after every accepted step, starting with the initial point.
    pub history: Vec<f64>,
    /// Parameter correlation matrix, row-major; empty when the normal
    /// equations are singular.
    pub correlation: Vec<Vec<f64>>,
    /// Diagnostics such as unidentifiable parameters.
    pub flags: Vec<String>,
}

impl FitResult {
    fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.index(name).map(|i| self.parameters[i])
    }

    pub fn error(&self, name: &str) -> Option<f64> {
        self.index(name).map(|i| self.standard_errors[i])
    }

    pub fn correlation_between(&self, a: &str, b: &str) -> Option<f64> {
        let (i, j) = (self.index(a)?, self.index(b)?);
        self.correlation.get(i).and_then(|row| row.get(j)).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NllsOptions {
    pub max_iterations: usize,
    /// Converged once every step component satisfies `|δᵢ| ≤ tol·(|pᵢ| + tol)`.
    pub step_tolerance: f64,
    /// Optional `(lower, upper)` per parameter; steps are projected onto the box.
    pub bounds: Option<Vec<(f64, f64)>>,
}

impl Default for NllsOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            step_tolerance: 1e-12,
            bounds: None,
        }
    }
}

/// Data for [`nlls`]: abscissae, ordinates and optional standard deviations.
#[derive(Debug, Clone, Copy)]
pub struct Data<'a> {
    pub x: &'a [f64],
    pub y: &'a [f64],
    pub sigma: Option<&'a [f64]>,
}

impl<'a> Data<'a> {
    pub fn new(x: &'a [f64], y: &'a [f64]) -> Self {
        Self { x, y, sigma: None }
    }

    pub fn with_sigma(self, sigma: &'a [f64]) -> Self {
        Self {
            sigma: Some(sigma),
            ..self
        }
    }

    fn validate(&self, n_params: usize) -> Result<()> {
        if self.x.len() != self.y.len() {
            return domain(format!(
                "x has {} points but y has {}",
                self.x.len(),
                self.y.len()
            ));
        }
        if let Some(s) = self.sigma {
            if s.len() != self.x.len() {
                return domain("sigma must have one entry per point");
            }
            if s.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return domain("sigma entries must be positive");
            }
        }
        if self.x.len() < n_params {
            return domain(format!(
                "{} points cannot determine {n_params} parameters",
                self.x.len()
            ));
        }
        if self.x.iter().chain(self.y).any(|v| !v.is_finite()) {
            return domain("data contain non-finite values");
        }
        Ok(())
    }
}

/// Fit that stopped with singular normal equations at the optimum, kept
/// for callers that report unidentifiable parameters instead of failing.
pub(crate) struct Detailed {
    pub result: FitResult,
    pub singular: Option<String>,
}

/// Levenberg-Marquardt minimisation of `Σ((yᵢ − model(xᵢ, p))/σᵢ)²`.
///
/// Each iteration first tries the undamped Gauss-Newton step, so models
/// linear in their parameters converge in one accepted step. Fails with
/// [`Error::Singular`] when `JᵀJ` is rank deficient at the optimum.
pub fn nlls<M>(
    model: M,
    data: Data<'_>,
    initial: &[f64],
    names: &[&str],
    options: &NllsOptions,
) -> Result<FitResult>
where
    M: Fn(f64, &[f64]) -> f64,
{
    let d = nlls_detailed(model, data, initial, names, options)?;
    match d.singular {
        Some(msg) => Err(Error::Singular(msg)),
        None => Ok(d.result),
    }
}

pub(crate) fn nlls_detailed<M>(
    model: M,
    data: Data<'_>,
    initial: &[f64],
    names: &[&str],
    options: &NllsOptions,
) -> Result<Detailed>
where
    M: Fn(f64, &[f64]) -> f64,
{
    let np = initial.len();
    if names.len() != np {
        return domain("one name per parameter required");
    }
    if np == 0 {
        return domain("no parameters to fit");
    }
    data.validate(np)?;
    if let Some(b) = &options.bounds {
        if b.len() != np || b.iter().any(|(lo, hi)| !(lo <= hi)) {
            return domain("bounds must give lower <= upper for every parameter");
        }
    }
    let project = |p: &mut DVector<f64>| {
        if let Some(b) = &options.bounds {
            for (v, (lo, hi)) in p.iter_mut().zip(b) {
                *v = v.clamp(*lo, *hi);
            }
        }
    };
    let n = data.x.len();
    let inv_sigma: Vec<f64> = match data.sigma {
        Some(s) => s.iter().map(|v| 1.0 / v).collect(),
        None => vec![1.0; n],
    };
    let residuals = |p: &DVector<f64>| -> DVector<f64> {
        DVector::from_iterator(
            n,
            (0..n).map(|i| (data.y[i] - model(data.x[i], p.as_slice())) * inv_sigma[i]),
        )
    };
    let cost = |r: &DVector<f64>| r.norm_squared();
    // Jacobian of the weighted model values (= −∂r/∂p) by central differences.
    let jacobian = |p: &DVector<f64>| -> DMatrix<f64> {
        let mut j = DMatrix::zeros(n, np);
        let mut work = p.clone();
        for k in 0..np {
            let h = 1e-6 * p[k].abs().max(1e-6);
            work[k] = p[k] + h;
            let up: Vec<f64> = data.x.iter().map(|&x| model(x, work.as_slice())).collect();
            work[k] = p[k] - h;
            for i in 0..n {
                let down = model(data.x[i], work.as_slice());
                j[(i, k)] = (up[i] - down) / (2.0 * h) * inv_sigma[i];
            }
            work[k] = p[k];
        }
        j
    };

    let mut p = DVector::from_column_slice(initial);
    project(&mut p);
    let mut r = residuals(&p);
    let mut chi2 = cost(&r);
    if !chi2.is_finite() {
        return domain("model is not finite at the initial parameters");
    }
    let mut history = vec![chi2];
    let mut lambda = 0.0f64;
    let mut iterations = 0;
    let mut converged = false;
    let mut evaluations = 0;

    'outer: while evaluations < options.max_iterations {
        let j = jacobian(&p);
        let a = j.transpose() * &j;
        let g = j.transpose() * &r;
        let max_diag = a.diagonal().max().max(f64::MIN_POSITIVE);
        loop {
            evaluations += 1;
            let mut damped = a.clone();
            for k in 0..np {
                damped[(k, k)] += lambda * a[(k, k)].max(1e-12 * max_diag);
            }
            let step = match solve(&damped, &g) {
                Some(s) => s,
                None => {
                    lambda = if lambda == 0.0 { 1e-3 } else { lambda * 10.0 };
                    if lambda > 1e16 || evaluations >= options.max_iterations {
                        break 'outer;
                    }
                    continue;
                }
            };
            let small = step.iter().zip(p.iter()).all(|(s, v)| {
                s.abs() <= options.step_tolerance * (v.abs() + options.step_tolerance)
            });
            // A tiny step only signals convergence when it is close to the Gauss-Newton step.
            if (small && lambda < 1.0) || chi2 == 0.0 {
                converged = true;
                break 'outer;
            }
            let mut trial = &p + &step;
            project(&mut trial);
            let r_trial = residuals(&trial);
            let chi2_trial = cost(&r_trial);
            if chi2_trial.is_finite() && chi2_trial < chi2 {
                let relative_gain = (chi2 - chi2_trial) / chi2;
                p = trial;
                r = r_trial;
                chi2 = chi2_trial;
                history.push(chi2);
                iterations += 1;
                lambda = if lambda < 1e-9 { 0.0 } else { lambda / 10.0 };
                if relative_gain < 1e-15 {
                    converged = true;
                    break 'outer;
                }
                break;
            }
            lambda = if lambda == 0.0 { 1e-3 } else { lambda * 10.0 };
            if lambda > 1e16 {
                // No descent direction left: p is a stationary point to working precision.
                converged = true;
                break 'outer;
            }
            if evaluations >= options.max_iterations {
                break 'outer;
            }
        }
    }

    let j = jacobian(&p);
    let a = j.transpose() * &j;
    let dof = (n - np).max(1) as f64;
    let s2 = chi2 / dof;
    let (standard_errors, correlation, singular) = match covariance(&a) {
        Ok(cov) => {
            let se: Vec<f64> = (0..np)
                .map(|k| (s2 * cov[(k, k)]).max(0.0).sqrt())
                .collect();
            let corr = (0..np)
                .map(|i| {
                    (0..np)
                        .map(|k| cov[(i, k)] / (cov[(i, i)] * cov[(k, k)]).sqrt())
                        .collect()
                })
                .collect();
            (se, corr, None)
        }
        Err(msg) => (vec![f64::INFINITY; np], Vec::new(), Some(msg)),
    };
    Ok(Detailed {
        result: FitResult {
            names: names.iter().map(|s| s.to_string()).collect(),
            parameters: p.iter().copied().collect(),
            standard_errors,
            residual_norm: chi2.sqrt(),
            converged,
            iterations,
            history,
            correlation,
            flags: Vec::new(),
        },
        singular,
    })
}

fn solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let chol = a.clone().cholesky()?;
    let x = chol.solve(b);
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// `(JᵀJ)⁻¹`, or a diagnostic naming the near-null direction.
fn covariance(a: &DMatrix<f64>) -> std::result::Result<DMatrix<f64>, String> {
    let np = a.nrows();
    let diag: Vec<f64> = (0..np).map(|k| a[(k, k)]).collect();
    if let Some(k) = diag.iter().position(|d| !(*d > 0.0)) {
        return Err(format!("parameter {k} does not affect the model"));
    }
    // Condition of the scaled matrix D^{-1/2} A D^{-1/2}.
    let scaled = DMatrix::from_fn(np, np, |i, k| a[(i, k)] / (diag[i] * diag[k]).sqrt());
    let eig = SymmetricEigen::new(scaled.clone());
    let (min_i, min) =
        eig.eigenvalues
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |acc, (i, v)| if v < acc.1 { (i, v) } else { acc },
            );
    if min < 1e-12 {
        let v = eig.eigenvectors.column(min_i);
        let involved: Vec<String> = v
            .iter()
            .enumerate()
            .filter(|(_, c)| c.abs() > 0.1)
            .map(|(i, _)| i.to_string())
            .collect();
        return Err(format!(
            "normal equations are rank deficient (scaled eigenvalue {min:.3e}); parameters [{}] are not separately identifiable",
            involved.join(", ")
        ));
    }
    let inv = scaled
        .try_inverse()
        .ok_or_else(|| "normal equations could not be inverted".to_string())?;
    Ok(DMatrix::from_fn(np, np, |i, k| {
        inv[(i, k)] / (diag[i] * diag[k]).sqrt()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn linear_model_converges_in_one_step() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 - 0.5 * v).collect();
        let fit = nlls(
            |x, p| p[0] + p[1] * x,
            Data::new(&x, &y),
            &[0.0, 0.0],
            &["a", "b"],
            &NllsOptions::default(),
        )
        .unwrap();
        assert!(fit.converged);
        assert_eq!(fit.iterations, 1);
        assert_relative_eq!(fit.parameters[0], 3.0, max_relative = 1e-10);
        assert_relative_eq!(fit.parameters[1], -0.5, max_relative = 1e-10);
        assert!(fit.residual_norm < 1e-9);
    }

    #[test]
    fn rosenbrock_valley() {
        // Residuals 10(p₁ − p₀²) and 1 − p₀; the minimum is (1, 1).
        let x = [0.0, 1.0];
        let y = [0.0, 1.0];
        let model = |x: f64, p: &[f64]| {
            if x == 0.0 {
                -10.0 * (p[1] - p[0] * p[0])
            } else {
                p[0]
            }
        };
        let fit = nlls(
            model,
            Data::new(&x, &y),
            &[-1.2, 1.0],
            &["x", "y"],
            &NllsOptions::default(),
        )
        .unwrap();
        assert!(fit.converged);
        assert!((fit.parameters[0] - 1.0).abs() < 1e-8);
        assert!((fit.parameters[1] - 1.0).abs() < 1e-8);
        for w in fit.history.windows(2) {
            assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn overparameterized_model_is_singular() {
        let x: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 1.0 + 2.0 * v).collect();
        let err = nlls(
            |x, p| p[0] + (p[1] + p[2]) * x,
            Data::new(&x, &y),
            &[0.0, 1.0, 1.0],
            &["a", "b", "c"],
            &NllsOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Singular(_)), "{err}");
    }

    #[test]
    fn weighted_errors_scale_with_sigma() {
        let x: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = x
            .iter()
            .enumerate()
            .map(|(i, v)| 2.0 * v + if i % 2 == 0 { 0.01 } else { -0.01 })
            .collect();
        let s1 = vec![0.01; 20];
        let fit = nlls(
            |x, p| p[0] * x,
            Data::new(&x, &y).with_sigma(&s1),
            &[1.0],
            &["k"],
            &NllsOptions::default(),
        )
        .unwrap();
        assert!(fit.standard_errors[0] > 0.0 && fit.standard_errors[0] < 0.01);
        assert_eq!(fit.correlation.len(), 1);
        assert_relative_eq!(fit.correlation[0][0], 1.0, max_relative = 1e-12);
    }

    #[test]
    fn bounds_are_respected() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| -2.0 * v).collect();
        let opts = NllsOptions {
            bounds: Some(vec![(0.0, 10.0)]),
            ..Default::default()
        };
        let fit = nlls(|x, p| p[0] * x, Data::new(&x, &y), &[1.0], &["k"], &opts).unwrap();
        assert_eq!(fit.parameters[0], 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        let x = [1.0, 2.0];
        let y = [1.0];
        assert!(nlls(
            |_, p| p[0],
            Data::new(&x, &y),
            &[0.0],
            &["a"],
            &NllsOptions::default()
        )
        .is_err());
        let y = [1.0, 2.0];
        assert!(nlls(
            |_, p| p[0] + p[1] + p[2],
            Data::new(&x, &y),
            &[0.0; 3],
            &["a", "b", "c"],
            &NllsOptions::default()
        )
        .is_err());
    }
}
