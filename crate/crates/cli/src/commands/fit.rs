//! `homsim fit`: model fits to two- or three-column CSV data.

use std::collections::BTreeMap;
use std::path::Path;

use clap::ValueEnum;
use homsim_core::analysis::{
    fit_exponential_decay_weighted, fit_hom_dip_weighted, fit_michelson_weighted, FitResult,
};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::output::{ensure_dir, json_bytes, write_atomic};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// `½(1 − v·e^{−|Δt|/τ_m})`.
    #[value(name = "hom_dip")]
    HomDip,
    /// `amplitude·e^{−t/τ_r}`.
    #[value(name = "exp_decay")]
    ExpDecay,
    /// Two-line fringe contrast.
    #[value(name = "michelson")]
    Michelson,
}

/// Columns `x, y` and optionally `y_error`, after a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveData {
    pub points: Vec<(f64, f64)>,
    pub y_error: Option<Vec<f64>>,
}

pub fn read_curve(text: &str) -> CliResult<CurveData> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CliError::Input(format!("header: {e}")))?
        .clone();
    if headers.is_empty() {
        return Err(CliError::Input("file is empty".into()));
    }
    let width = headers.len();
    if !(2..=3).contains(&width) {
        return Err(CliError::Input(format!(
            "expected 2 or 3 columns (x, y[, y_error]), header has {width}"
        )));
    }
    let mut points = Vec::new();
    let mut errors = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Input(e.to_string()))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let mut row = [0.0; 3];
        for (c, field) in record.iter().enumerate() {
            row[c] = field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    CliError::Input(format!(
                        "line {line}, column {} ({}): cannot parse {field:?} as a finite number",
                        c + 1,
                        &headers[c]
                    ))
                })?;
        }
        if width == 3 && !(row[2] > 0.0) {
            return Err(CliError::Input(format!(
                "line {line}, column 3 ({}): errors must be positive",
                &headers[2]
            )));
        }
        points.push((row[0], row[1]));
        errors.push(row[2]);
    }
    if points.is_empty() {
        return Err(CliError::Input("no data rows".into()));
    }
    Ok(CurveData {
        points,
        y_error: (width == 3).then_some(errors),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ParameterEstimate {
    pub value: f64,
    /// `null` when the parameter is not identifiable.
    pub standard_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitOutput {
    pub model: FitModel,
    pub n_points: usize,
    pub weighted: bool,
    pub parameters: BTreeMap<String, ParameterEstimate>,
    pub fit: FitResult,
}

pub fn fit_curve(model: FitModel, data: &CurveData) -> CliResult<FitOutput> {
    let sigma = data.y_error.as_deref();
    let fit = match model {
        FitModel::HomDip => fit_hom_dip_weighted(&data.points, sigma),
        FitModel::ExpDecay => fit_exponential_decay_weighted(&data.points, sigma),
        FitModel::Michelson => fit_michelson_weighted(&data.points, sigma),
    }?;
    let parameters = fit
        .names
        .iter()
        .zip(fit.parameters.iter().zip(&fit.standard_errors))
        .map(|(n, (&value, &standard_error))| {
            (
                n.clone(),
                ParameterEstimate {
                    value,
                    standard_error,
                },
            )
        })
        .collect();
    Ok(FitOutput {
        model,
        n_points: data.points.len(),
        weighted: sigma.is_some(),
        parameters,
        fit,
    })
}

pub fn run(model: FitModel, data_path: &Path, out_path: &Path) -> CliResult<()> {
    let text = std::fs::read_to_string(data_path).map_err(|e| CliError::io(data_path, e))?;
    let data = read_curve(&text).map_err(|e| match e {
        CliError::Input(m) => CliError::Input(format!("{}: {m}", data_path.display())),
        other => other,
    })?;
    let output = fit_curve(model, &data)?;
    let bytes = json_bytes(&output)?;
    if let Some(dir) = out_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        ensure_dir(dir)?;
    }
    write_atomic(out_path, &bytes)?;
    for (name, p) in &output.parameters {
        println!("{name} = {:.6} ± {:.2e}", p.value, p.standard_error);
    }
    if !output.fit.converged {
        println!("warning: fit did not converge");
    }
    for flag in &output.fit.flags {
        println!("flag: {flag}");
    }
    Ok(())
}
