//! Least-squares power-law fits in log-log space.

use crate::bounds::clamped_log;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LogCorrection {
    #[default]
    None,
    /// Divide `y` by `log^{1/2} x` before fitting.
    HalfLog,
    /// Divide `y` by `log^{3/2} x` before fitting.
    ThreeHalfLog,
}

impl LogCorrection {
    fn power(&self) -> f64 {
        match self {
            LogCorrection::None => 0.0,
            LogCorrection::HalfLog => 0.5,
            LogCorrection::ThreeHalfLog => 1.5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    /// Largest `|ln y′ − (slope·ln x + intercept)|` over the points.
    pub max_abs_residual: f64,
    pub points_used: usize,
}

pub fn fit_exponent(points: &[(f64, f64)], correction: LogCorrection) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(Error::DegenerateFit(format!("need at least 3 points, got {}", points.len())));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(Error::DegenerateFit("points must be positive and finite".into()));
    }
    if points.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::DegenerateFit("x must be strictly increasing".into()));
    }
    let k = correction.power();
    let logs: Vec<(f64, f64)> = points
        .iter()
        .map(|&(x, y)| (x.ln(), y.ln() - k * clamped_log(x).ln()))
        .collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_abs_residual = logs
        .iter()
        .map(|&(lx, ly)| (ly - slope * lx - intercept).abs())
        .fold(0.0, f64::max);
    Ok(FitResult {
        slope,
        intercept,
        max_abs_residual,
        points_used: points.len(),
    })
}
