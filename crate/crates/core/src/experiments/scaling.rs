//! Threshold scaling functions and fits of measured critical lengths.

use std::fmt;

use crate::error::{Error, Result};

/// `λᵢ(p)`: `p^{−i}` when `a₂ = a₁`, `p^{−i}(ln p)²` when `a₂ > a₁`.
pub fn lambda(p: f64, i: u32, a1: usize, a2: usize) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::NumericDomain(format!("λ needs 0 < p < 1, got {p}")));
    }
    if i == 0 {
        return Err(Error::NumericDomain("λ needs i ≥ 1".into()));
    }
    if a1 == 0 || a1 > a2 {
        return Err(Error::NumericDomain(format!("λ needs 1 ≤ a₁ ≤ a₂, got ({a1}, {a2})")));
    }
    let base = p.powi(-(i as i32));
    Ok(if a2 == a1 { base } else { base * p.ln().powi(2) })
}

/// `exp_{(k)}(x)`: `k`-fold iterated exponential, `exp_{(0)}(x) = x`.
pub fn exp_iter(k: u32, x: f64) -> f64 {
    (0..k).fold(x, |acc, _| acc.exp())
}

/// `log_{(k)}(x)`: `k`-fold iterated natural logarithm. Errors when an
/// intermediate argument is not positive.
pub fn log_iter(k: u32, x: f64) -> Result<f64> {
    (0..k).try_fold(x, |acc, step| {
        if acc > 0.0 {
            Ok(acc.ln())
        } else {
            Err(Error::NumericDomain(format!(
                "log_({k}) undefined: iterate {step} is {acc}"
            )))
        }
    })
}

/// One measured (or synthetic) critical length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingPoint {
    pub p: f64,
    /// Critical length, `≥ 1`. Measured values are integers; synthetic
    /// checks may use any real.
    pub lc: f64,
    /// `λᵢ(p)` for the model under test.
    pub lambda: f64,
}

impl ScalingPoint {
    pub fn new(p: f64, lc: f64, lambda: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParameter(format!("p = {p} outside (0, 1)")));
        }
        if lc.is_nan() || lc < 1.0 || !lc.is_finite() {
            return Err(Error::InvalidParameter(format!("critical length {lc} must be ≥ 1")));
        }
        if lambda.is_nan() || lambda <= 0.0 || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("λ = {lambda} must be positive")));
        }
        Ok(Self { p, lc, lambda })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitModel {
    /// `ln ln L_c = c + α·ln(1/p)`; `α` is the exponent.
    PurePower,
    /// `ln L_c = c + β·λ`.
    PowerLog2,
}

impl fmt::Display for FitModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FitModel::PurePower => "pure_power",
            FitModel::PowerLog2 => "power_log2",
        })
    }
}

impl std::str::FromStr for FitModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pure_power" => Ok(FitModel::PurePower),
            "power_log2" => Ok(FitModel::PowerLog2),
            other => Err(Error::InvalidParameter(format!("unknown fit model {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub model: FitModel,
    /// Exponent `α` (pure power) or coefficient `β` (power-log²).
    pub slope: f64,
    pub intercept: f64,
    /// Residuals in the regression's own response variable.
    pub residuals: Vec<f64>,
    pub rss: f64,
    /// Residual sum of squares of `ln L_c`, comparable across models.
    pub log_lc_rss: f64,
    /// `ln L_c / λ` per point.
    pub ratios: Vec<f64>,
    /// `max(ratios) / min(ratios)`.
    pub ratio_spread: f64,
}

fn least_squares(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx <= f64::EPSILON * mx.abs().max(1.0) {
        return Err(Error::DegenerateFit("regressor has no spread".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Fits `points` under `model`. Needs at least three points with distinct `p`.
pub fn scaling_fit(points: &[ScalingPoint], model: FitModel) -> Result<FitReport> {
    if points.len() < 3 {
        return Err(Error::DegenerateFit(format!("need ≥ 3 points, got {}", points.len())));
    }
    for (i, a) in points.iter().enumerate() {
        if points[i + 1..].iter().any(|b| b.p == a.p) {
            return Err(Error::DegenerateFit(format!("repeated p = {}", a.p)));
        }
    }
    let log_lc: Vec<f64> = points.iter().map(|pt| pt.lc.ln()).collect();
    let (x, y): (Vec<f64>, Vec<f64>) = match model {
        FitModel::PurePower => {
            if log_lc.iter().any(|&v| v <= 0.0) {
                return Err(Error::DegenerateFit("ln ln L_c needs every L_c > 1".into()));
            }
            (
                points.iter().map(|pt| (1.0 / pt.p).ln()).collect(),
                log_lc.iter().map(|v| v.ln()).collect(),
            )
        }
        FitModel::PowerLog2 => (points.iter().map(|pt| pt.lambda).collect(), log_lc.clone()),
    };
    let (slope, intercept) = least_squares(&x, &y)?;
    let fitted: Vec<f64> = x.iter().map(|v| intercept + slope * v).collect();
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let rss = residuals.iter().map(|r| r * r).sum();
    let log_lc_rss = match model {
        FitModel::PurePower => log_lc.iter().zip(&fitted).map(|(a, f)| (a - f.exp()).powi(2)).sum(),
        FitModel::PowerLog2 => rss,
    };
    let ratios: Vec<f64> = log_lc.iter().zip(points).map(|(l, pt)| l / pt.lambda).collect();
    let max = ratios.iter().copied().fold(f64::MIN, f64::max);
    let min = ratios.iter().copied().fold(f64::MAX, f64::min);
    Ok(FitReport {
        model,
        slope,
        intercept,
        residuals,
        rss,
        log_lc_rss,
        ratio_spread: max / min,
        ratios,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelComparison {
    pub pure_power: FitReport,
    pub power_log2: FitReport,
    /// Model with the smaller `ln L_c` residual sum.
    pub preferred: FitModel,
}

pub fn compare_models(points: &[ScalingPoint]) -> Result<ModelComparison> {
    let pure_power = scaling_fit(points, FitModel::PurePower)?;
    let power_log2 = scaling_fit(points, FitModel::PowerLog2)?;
    let preferred = if pure_power.log_lc_rss <= power_log2.log_lc_rss {
        FitModel::PurePower
    } else {
        FitModel::PowerLog2
    };
    Ok(ModelComparison {
        pure_power,
        power_log2,
        preferred,
    })
}
