//! Power-law fits of error against degree.

use crate::error::{Result, StudyError};
use serde::Serialize;

/// Errors at or below this are roundoff and take no part in a fit.
pub const ERROR_FLOOR: f64 = 1e-14;
pub const MIN_POINTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub points: usize,
}

/// Least squares of `log err` on `log n` over `window` (inclusive).
pub fn fit_rate(samples: &[(usize, f64)], window: (usize, usize)) -> Result<RateFit> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(n, e)| *n >= window.0 && *n <= window.1 && *n > 0 && e.is_finite() && *e > ERROR_FLOOR)
        .map(|&(n, e)| ((n as f64).ln(), e.ln()))
        .collect();
    let m = pts.len();
    if m < MIN_POINTS {
        return Err(StudyError::InsufficientData { have: m });
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m as f64;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(StudyError::InsufficientData { have: 1 });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let stderr = (ssr / (m - 2) as f64 / sxx).sqrt();
    Ok(RateFit { slope, stderr, intercept, points: m })
}
