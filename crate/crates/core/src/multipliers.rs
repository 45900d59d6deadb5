//! Fourier multipliers `M`, `M₁`, the time weight `(1 + ν^{1/3} t M)^θ` and the dyadic
//! time partition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_THETA: f64 = 1.0 / 32.0;

/// Cut-off `χ`: 1 on `|k| ≤ 1/2`, 0 on `|k| ≥ 1`, cubic smoothstep in between:
/// `χ = 1 - (3s² - 2s³)` with `s = 2|k| - 1`.
pub fn chi(k: f64) -> f64 {
    let a = k.abs();
    if a <= 0.5 {
        1.0
    } else if a >= 1.0 {
        0.0
    } else {
        let s = 2.0 * a - 1.0;
        1.0 - s * s * (3.0 - 2.0 * s)
    }
}

/// `M(k) = |k|^{2/3} χ + 1 - χ`.
pub fn multiplier_m(k: f64) -> f64 {
    let c = chi(k);
    k.abs().powf(2.0 / 3.0) * c + 1.0 - c
}

/// `M₁(k) = |k|^{1/2} + |k|`.
pub fn multiplier_m1(k: f64) -> f64 {
    k.abs().sqrt() + k.abs()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub nu: f64,
    pub theta: f64,
}

impl WeightSpec {
    pub fn new(nu: f64, theta: f64) -> Result<Self> {
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::InvalidArgument(format!("ν = {nu} must be positive")));
        }
        if !(0.0..1.0 / 16.0).contains(&theta) {
            return Err(Error::InvalidArgument(format!("θ = {theta} outside [0, 1/16)")));
        }
        Ok(Self { nu, theta })
    }

    pub fn unweighted(nu: f64) -> Self {
        Self { nu, theta: 0.0 }
    }

    /// `(1 + ν^{1/3} t M(k))^θ`.
    pub fn weight(&self, t: f64, k: f64) -> f64 {
        if self.theta == 0.0 {
            return 1.0;
        }
        (1.0 + self.nu.cbrt() * t * multiplier_m(k)).powf(self.theta)
    }
}

/// Times `T_0 = ν^{-1/6}`, `T_j = 2^j ν^{-1/3}` for `1 ≤ j ≤ j_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DyadicPartition {
    pub nu: f64,
    pub times: Vec<f64>,
}

impl DyadicPartition {
    pub fn new(nu: f64, j_max: usize) -> Result<Self> {
        if !(nu > 0.0 && nu < 1.0) {
            return Err(Error::Partition(format!("ν = {nu} outside (0, 1)")));
        }
        if j_max == 0 {
            return Err(Error::Partition("j_max must be at least 1".into()));
        }
        let mut times = vec![nu.powf(-1.0 / 6.0)];
        for j in 1..=j_max {
            times.push(2f64.powi(j as i32) / nu.cbrt());
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Partition(format!("times not increasing: {times:?}")));
        }
        Ok(Self { nu, times })
    }

    /// Smallest partition covering `[T_0, t_end]`.
    pub fn covering(nu: f64, t_end: f64) -> Result<Self> {
        let base = nu.powf(-1.0 / 3.0);
        let j_max = ((t_end / base).log2().ceil().max(1.0)) as usize;
        Self::new(nu, j_max)
    }

    pub fn j_max(&self) -> usize {
        self.times.len() - 1
    }

    pub fn t(&self, j: usize) -> f64 {
        self.times[j]
    }

    /// `χ_j(t) = 1` iff `t ∈ (T_{j-1}, T_j]`.
    pub fn chi_j(&self, t: f64, j: usize) -> bool {
        j >= 1 && j <= self.j_max() && t > self.times[j - 1] && t <= self.times[j]
    }

    /// The `j` with `χ_j(t) = 1`, if any.
    pub fn active(&self, t: f64) -> Option<usize> {
        (1..=self.j_max()).find(|&j| self.chi_j(t, j))
    }
}
