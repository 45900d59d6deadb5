//! Run configuration and its flat `key = value` file format.
//!
//! Lines are `key = value`; `#` starts a comment. Recognized keys:
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `nu` | viscosity, in (0, 1) | `1e-2` |
//! | `theta` | weight exponent θ, in [0, 1/16) | `1/32` |
//! | `lx` | box length | `2π/ν` |
//! | `lx_scaled` | box length in units of `2π/ν` (overrides `lx`) | |
//! | `nx`, `ny` | Fourier modes, Chebyshev nodes | `512`, `65` |
//! | `t_final` | end time | `50 ν^{-1/3}` |
//! | `t_final_scaled` | end time in units of `ν^{-1/3}` (overrides `t_final`) | |
//! | `dt` | step size or `auto` | `auto` |
//! | `amplitude` | `A ≥ 0` | `1` |
//! | `e0_scale` | if set, `A` is chosen so that `E₀ = e0_scale · ν^{1/3}` | |
//! | `sigma` | Gaussian width in `x` | `4` |
//! | `profile` | `cos` for `cos(πy/2)`, `sin2` for `sin²(πy)` | `cos` |
//! | `samples` | number of samples | `40` |
//! | `fit_lo`, `fit_hi` | fit window in units of `ν^{-1/3}` | `5`, `100` |
//! | `decomposition` | also step `ω_e`, `ω₁`, `ω₂`, `ω_{2,j}` | `false` |
//! | `seed` | seed of randomized suites | `20261015` |

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Seed at which the catalogued constants of the verification suite were measured.
pub const DEFAULT_SEED: u64 = 20_261_015;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum YProfile {
    /// `cos(πy/2)`
    Cos,
    /// `sin²(πy)`
    Sin2,
}

impl YProfile {
    pub fn eval(self, y: f64) -> f64 {
        match self {
            YProfile::Cos => (PI * y / 2.0).cos(),
            YProfile::Sin2 => (PI * y).sin().powi(2),
        }
    }

    fn name(self) -> &'static str {
        match self {
            YProfile::Cos => "cos",
            YProfile::Sin2 => "sin2",
        }
    }
}

impl FromStr for YProfile {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cos" => Ok(YProfile::Cos),
            "sin2" => Ok(YProfile::Sin2),
            other => Err(LabError::Config(format!("unknown profile `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub nu: f64,
    pub theta: f64,
    pub lx: f64,
    pub nx: usize,
    pub ny: usize,
    pub t_final: f64,
    /// `None` selects the default policy `min(0.5/k_max, 0.1)` with halving.
    pub dt: Option<f64>,
    pub amplitude: f64,
    pub e0_scale: Option<f64>,
    pub sigma: f64,
    pub profile: YProfile,
    pub samples: usize,
    pub fit_lo: f64,
    pub fit_hi: f64,
    pub decomposition: bool,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        let nu = 1e-2;
        Self {
            nu,
            theta: couette_core::multipliers::DEFAULT_THETA,
            lx: 2.0 * PI / nu,
            nx: 512,
            ny: 65,
            t_final: 50.0 * nu.powf(-1.0 / 3.0),
            dt: None,
            amplitude: 1.0,
            e0_scale: None,
            sigma: 4.0,
            profile: YProfile::Cos,
            samples: 40,
            fit_lo: 5.0,
            fit_hi: 100.0,
            decomposition: false,
            seed: DEFAULT_SEED,
        }
    }
}

impl SimConfig {
    /// `ν^{-1/3}`, the enhanced-dissipation time scale.
    pub fn time_unit(&self) -> f64 {
        self.nu.powf(-1.0 / 3.0)
    }

    /// Closed-form decay runs at `ν = 10⁻³`: `k_min = ν/4`, fit window `[5, 100] ν^{-1/3}`.
    pub fn linear_decay_preset() -> Self {
        let nu = 1e-3;
        Self {
            nu,
            lx: 4.0 * 2.0 * PI / nu,
            nx: 32768,
            ny: 65,
            t_final: 100.0 * nu.powf(-1.0 / 3.0),
            sigma: 2.0,
            samples: 64,
            ..Self::default()
        }
    }

    /// Nonlinear runs at `ν = 10⁻²` with `E₀ = 0.05 ν^{1/3}`.
    pub fn stability_preset() -> Self {
        Self {
            e0_scale: Some(0.05),
            samples: 200,
            ..Self::default()
        }
    }

    /// The same setup at another `ν`: box, mode count and horizon keep their scaled values.
    pub fn rescaled(&self, nu: f64) -> Self {
        let r = self.nu / nu;
        let nx = ((self.nx as f64 * r).round() as usize).max(2);
        Self {
            nu,
            lx: self.lx * r,
            nx: nx + nx % 2,
            t_final: self.t_final * r.cbrt(),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(LabError::Config(m));
        if !(self.nu > 0.0 && self.nu < 1.0) {
            return bad(format!("nu = {} outside (0, 1)", self.nu));
        }
        if !(0.0..1.0 / 16.0).contains(&self.theta) {
            return bad(format!("theta = {} outside [0, 1/16)", self.theta));
        }
        // A = 0 is admitted as the degenerate zero-data run
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return bad(format!("amplitude = {} must be non-negative", self.amplitude));
        }
        if let Some(s) = self.e0_scale {
            if !(s >= 0.0 && s.is_finite()) {
                return bad(format!("e0_scale = {s} must be non-negative"));
            }
        }
        if !(self.lx > 0.0 && self.lx.is_finite()) {
            return bad(format!("lx = {} must be positive", self.lx));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return bad(format!("t_final = {} must be positive", self.t_final));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return bad(format!("dt = {dt} must be positive"));
            }
        }
        if !(self.sigma > 0.0) {
            return bad(format!("sigma = {} must be positive", self.sigma));
        }
        if self.samples < 2 {
            return bad("samples must be at least 2".into());
        }
        if !(self.fit_lo > 0.0 && self.fit_hi > self.fit_lo) {
            return bad(format!("fit window [{}, {}] is empty", self.fit_lo, self.fit_hi));
        }
        couette_core::Grid::new(self.lx, self.nx, self.ny)?;
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut lx_scaled = None;
        let mut lx = None;
        let mut t_scaled = None;
        let mut t_final = None;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| LabError::Config(format!("line {}: expected `key = value`", n + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| -> Result<f64> {
                v.parse::<f64>()
                    .map_err(|_| LabError::Config(format!("line {}: `{key}` needs a number, got `{v}`", n + 1)))
            };
            let int = |v: &str| -> Result<usize> {
                v.parse::<usize>()
                    .map_err(|_| LabError::Config(format!("line {}: `{key}` needs an integer, got `{v}`", n + 1)))
            };
            match key {
                "nu" => cfg.nu = num(value)?,
                "theta" => cfg.theta = num(value)?,
                "lx" => lx = Some(num(value)?),
                "lx_scaled" => lx_scaled = Some(num(value)?),
                "nx" => cfg.nx = int(value)?,
                "ny" => cfg.ny = int(value)?,
                "t_final" => t_final = Some(num(value)?),
                "t_final_scaled" => t_scaled = Some(num(value)?),
                "dt" => cfg.dt = if value == "auto" { None } else { Some(num(value)?) },
                "amplitude" => cfg.amplitude = num(value)?,
                "e0_scale" => cfg.e0_scale = Some(num(value)?),
                "sigma" => cfg.sigma = num(value)?,
                "profile" => cfg.profile = value.parse()?,
                "samples" => cfg.samples = int(value)?,
                "fit_lo" => cfg.fit_lo = num(value)?,
                "fit_hi" => cfg.fit_hi = num(value)?,
                "decomposition" => {
                    cfg.decomposition = value
                        .parse()
                        .map_err(|_| LabError::Config(format!("line {}: `decomposition` needs true/false", n + 1)))?
                }
                "seed" => {
                    cfg.seed = value
                        .parse()
                        .map_err(|_| LabError::Config(format!("line {}: `seed` needs an integer", n + 1)))?
                }
                other => return Err(LabError::Config(format!("line {}: unknown key `{other}`", n + 1))),
            }
        }
        // ν-relative defaults follow the parsed ν
        cfg.lx = match (lx_scaled, lx) {
            (Some(s), _) => s * 2.0 * PI / cfg.nu,
            (None, Some(v)) => v,
            (None, None) => 2.0 * PI / cfg.nu,
        };
        cfg.t_final = match (t_scaled, t_final) {
            (Some(s), _) => s * cfg.time_unit(),
            (None, Some(v)) => v,
            (None, None) => 50.0 * cfg.time_unit(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Render in the file format; `parse(to_text())` reproduces the config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "nu = {:e}", self.nu);
        let _ = writeln!(s, "theta = {:e}", self.theta);
        let _ = writeln!(s, "lx = {:e}", self.lx);
        let _ = writeln!(s, "nx = {}", self.nx);
        let _ = writeln!(s, "ny = {}", self.ny);
        let _ = writeln!(s, "t_final = {:e}", self.t_final);
        match self.dt {
            Some(dt) => writeln!(s, "dt = {dt:e}"),
            None => writeln!(s, "dt = auto"),
        }
        .ok();
        let _ = writeln!(s, "amplitude = {:e}", self.amplitude);
        if let Some(e) = self.e0_scale {
            let _ = writeln!(s, "e0_scale = {e:e}");
        }
        let _ = writeln!(s, "sigma = {:e}", self.sigma);
        let _ = writeln!(s, "profile = {}", self.profile.name());
        let _ = writeln!(s, "samples = {}", self.samples);
        let _ = writeln!(s, "fit_lo = {:e}", self.fit_lo);
        let _ = writeln!(s, "fit_hi = {:e}", self.fit_hi);
        let _ = writeln!(s, "decomposition = {}", self.decomposition);
        let _ = writeln!(s, "seed = {}", self.seed);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        SimConfig::default().validate().unwrap();
        SimConfig::linear_decay_preset().validate().unwrap();
        SimConfig::stability_preset().validate().unwrap();
    }

    #[test]
    fn parse_scaled_keys_and_comments() {
        let cfg = SimConfig::parse("nu = 1e-3 # small\n\nlx_scaled = 2\nt_final_scaled = 10\ndt = 0.05\nprofile = sin2\n").unwrap();
        assert_eq!(cfg.nu, 1e-3);
        assert!((cfg.lx - 4.0 * PI * 1e3).abs() < 1e-9);
        assert!((cfg.t_final - 100.0).abs() < 1e-9);
        assert_eq!(cfg.dt, Some(0.05));
        assert_eq!(cfg.profile, YProfile::Sin2);
    }

    #[test]
    fn text_round_trip() {
        let mut cfg = SimConfig::stability_preset();
        cfg.dt = Some(0.025);
        cfg.decomposition = true;
        assert_eq!(SimConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn rejects_out_of_range_values() {
        for bad in ["nu = 1.5", "nu = 0", "theta = 0.0625", "amplitude = -1", "nx = 7", "colour = red", "nu 0.1"] {
            assert!(SimConfig::parse(bad).is_err(), "{bad}");
        }
    }
}
