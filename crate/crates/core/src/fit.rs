//! Straight-line regression for log-log scaling fits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Outcome of a power-law fit over a window of scales.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub exponent: f64,
    pub stderr: f64,
    pub window: (f64, f64),
    pub r_squared: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub r_squared: f64,
    pub reduced_chi2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weights<'a> {
    Uniform,
    /// Inverse variances of the ordinates.
    InverseVariance(&'a [f64]),
}

/// Least-squares line through `(x, y)`. With inverse-variance weights the slope
/// error comes from the covariance matrix, inflated by the reduced χ² when the
/// scatter exceeds the stated variances; uniform weights use the residual
/// variance.
pub fn fit_line(x: &[f64], y: &[f64], weights: Weights) -> Result<LineFit> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::InsufficientData("abscissa and ordinate lengths differ".into()));
    }
    if n < 2 {
        return Err(Error::InsufficientData(format!("need at least 2 points, got {n}")));
    }
    let w: Vec<f64> = match weights {
        Weights::Uniform => vec![1.0; n],
        Weights::InverseVariance(w) => w.to_vec(),
    };
    let sw: f64 = w.iter().sum();
    let mx = x.iter().zip(&w).map(|(a, w)| a * w).sum::<f64>() / sw;
    let my = y.iter().zip(&w).map(|(a, w)| a * w).sum::<f64>() / sw;
    let sxx: f64 = x.iter().zip(&w).map(|(a, w)| w * (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).zip(&w).map(|((a, b), w)| w * (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().zip(&w).map(|(b, w)| w * (b - my).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InsufficientData("abscissas do not vary".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let chi2: f64 = x
        .iter()
        .zip(y)
        .zip(&w)
        .map(|((a, b), w)| w * (b - intercept - slope * a).powi(2))
        .sum();
    let dof = n.saturating_sub(2);
    let reduced_chi2 = if dof > 0 { chi2 / dof as f64 } else { 0.0 };
    let slope_var = match weights {
        Weights::Uniform => reduced_chi2 / sxx,
        Weights::InverseVariance(_) => reduced_chi2.max(1.0) / sxx,
    };
    let r_squared = if syy > 0.0 { 1.0 - chi2 / syy } else { 1.0 };
    Ok(LineFit { slope, intercept, slope_stderr: slope_var.sqrt(), r_squared, reduced_chi2 })
}
