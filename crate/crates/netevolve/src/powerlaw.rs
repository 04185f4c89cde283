//! Least-squares power-law fit of a degree distribution on log-log axes.
//!
//! Each occupied degree `k >= 1` becomes one point
//! `(log10 k, log10 count)`; no binning, no pseudocounts. The exponent is
//! the negated slope of the ordinary least-squares line through those
//! points, and `r_squared` is its coefficient of determination.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    /// Negated slope of the log-log line.
    pub lambda: f64,
    /// Intercept in log10 space.
    pub intercept: f64,
    pub r_squared: f64,
    /// Distinct degrees that entered the fit.
    pub n_points: usize,
}

impl PowerLawFit {
    /// Fitted log10 frequency at log10 degree `x`.
    pub fn predict(&self, x: f64) -> f64 {
        self.intercept - self.lambda * x
    }
}

/// `(log10 degree, log10 count)` for every degree >= 1 with a nonzero count,
/// ascending by degree.
pub fn loglog_points(hist: &BTreeMap<usize, usize>) -> Result<Vec<(f64, f64)>> {
    let points: Vec<(f64, f64)> = hist
        .iter()
        .filter(|&(&k, &count)| k >= 1 && count >= 1)
        .map(|(&k, &count)| ((k as f64).log10(), (count as f64).log10()))
        .collect();
    if points.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} usable log-log point(s), need 2",
            points.len()
        )));
    }
    Ok(points)
}

/// Fits the degree histogram; see the module docs.
pub fn fit_powerlaw(hist: &BTreeMap<usize, usize>) -> Result<PowerLawFit> {
    fit_loglog(&loglog_points(hist)?)
}

/// Ordinary least squares on precomputed log-log points. The result does
/// not depend on the order of `points`.
pub fn fit_loglog(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let n = pts.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!("{n} log-log point(s), need 2")));
    }
    let nf = n as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in &pts {
        let (dx, dy) = (x - mean_x, y - mean_y);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all points share one degree".into()));
    }
    let flat = pts.iter().all(|p| p.1 == pts[0].1);
    let (slope, r_squared) = if flat {
        // a horizontal line fits a constant series perfectly
        (0.0, 1.0)
    } else {
        (sxy / sxx, ((sxy * sxy) / (sxx * syy)).min(1.0))
    };
    let intercept = if flat { pts[0].1 } else { mean_y - slope * mean_x };
    Ok(PowerLawFit {
        lambda: -slope + 0.0,
        intercept,
        r_squared,
        n_points: n,
    })
}
