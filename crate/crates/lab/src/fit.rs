//! Least-squares power laws in log–log coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

pub const MIN_SAMPLES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub slope: f64,
    pub intercept: f64,
    /// RMS residual in `ln` space.
    pub residual: f64,
    pub samples: usize,
}

impl PowerFit {
    pub fn eval(&self, t: f64) -> f64 {
        (self.intercept + self.slope * t.ln()).exp()
    }
}

/// Fit `value ≈ e^b t^a` to the samples with `t` in `[lo, hi]`.
pub fn fit_power_law(series: &[(f64, f64)], window: (f64, f64)) -> Result<PowerFit> {
    let (lo, hi) = window;
    let pts: Vec<(f64, f64)> = series.iter().copied().filter(|(t, _)| *t >= lo && *t <= hi).collect();
    if pts.len() < MIN_SAMPLES {
        return Err(LabError::Fit(format!(
            "{} samples in [{lo}, {hi}], need at least {MIN_SAMPLES}",
            pts.len()
        )));
    }
    if let Some((t, v)) = pts.iter().find(|(t, v)| !(*t > 0.0 && *v > 0.0)) {
        return Err(LabError::Fit(format!("non-positive sample ({t}, {v})")));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(LabError::Fit("all samples at one time".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Ok(PowerFit {
        slope,
        intercept,
        residual: (ss / n).sqrt(),
        samples: pts.len(),
    })
}
