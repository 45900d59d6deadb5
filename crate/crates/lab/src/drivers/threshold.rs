//! Stability-threshold sweep: bisection on the data size at each `ν`, then a power-law
//! fit of the boundary against `ν`.
//!
//! The data size is bisected through `e0_scale` (`E₀ = e0_scale · ν^{1/3}`); the boundary
//! is reported as the amplitude `A*` of the canonical profile. A run is stable when
//! `sup_t ‖ω‖/‖ω^in‖ ≤ G_stab`, unstable when it exceeds `G_unst` or the solver fails,
//! and intermediate otherwise. Intermediate runs count as not stable for the bisection.

use std::time::Instant as Clock;

use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::drivers::simulate::{evolve, RunOptions, G_STAB, G_UNST};
use crate::error::{LabError, Result};
use crate::fit::PowerFit;
use crate::manifest::{Check, FitRecord, Limit, Resolution, RunManifest, TimeSeries};

pub const GAMMA_TARGET: f64 = 1.0 / 3.0;
pub const GAMMA_ACCEPT: [f64; 2] = [0.2, 0.5];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudePolicy {
    /// Initial bracket in `e0_scale`.
    pub lo: f64,
    pub hi: f64,
    pub bisections: usize,
    /// How often each end may be pushed outwards by `widen_factor` to find a bracket.
    pub max_widenings: usize,
    pub widen_factor: f64,
}

impl Default for AmplitudePolicy {
    fn default() -> Self {
        Self {
            lo: 0.05,
            hi: 5.0,
            bisections: 6,
            max_widenings: 3,
            widen_factor: 10.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Class {
    Stable,
    Intermediate,
    Unstable,
}

impl Class {
    pub fn of(growth: f64, failed: bool) -> Self {
        if failed || !(growth <= G_UNST) {
            Class::Unstable
        } else if growth <= G_STAB {
            Class::Stable
        } else {
            Class::Intermediate
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub e0_scale: f64,
    pub amplitude: f64,
    pub growth: f64,
    pub class: Class,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Boundary {
    pub nu: f64,
    /// Geometric mean of the final bracket; NaN when no bracket was found.
    pub a_star: f64,
    pub bracket: Option<(Probe, Probe)>,
    pub history: Vec<Probe>,
    /// Set when the classes along the history were not monotone in the data size.
    pub violation: Option<String>,
    pub note: Option<String>,
}

/// One nonlinear run classified.
pub fn probe(cfg: &SimConfig) -> Result<Probe> {
    let out = evolve(
        cfg,
        &RunOptions {
            stop_above: Some(G_UNST),
            ..RunOptions::default()
        },
    )?;
    Ok(Probe {
        e0_scale: cfg.e0_scale.unwrap_or(f64::NAN),
        amplitude: out.amplitude,
        growth: out.growth,
        class: Class::of(out.growth, out.failure.is_some()),
        failure: out.failure,
    })
}

/// First violation of "no stable run above a non-stable one".
fn monotonicity_violation(history: &[Probe]) -> Option<String> {
    let mut sorted: Vec<&Probe> = history.iter().collect();
    sorted.sort_by(|a, b| a.e0_scale.total_cmp(&b.e0_scale));
    let first_bad = sorted.iter().position(|p| p.class != Class::Stable)?;
    sorted[first_bad..].iter().find(|p| p.class == Class::Stable).map(|p| {
        format!(
            "stable at e0_scale {:e} above a {:?} run at {:e}",
            p.e0_scale, sorted[first_bad].class, sorted[first_bad].e0_scale
        )
    })
}

/// Bracket and bisect the stable/not-stable boundary with `run` as the classifier.
pub fn bisect_boundary(
    nu: f64,
    policy: &AmplitudePolicy,
    mut run: impl FnMut(f64) -> Result<Probe>,
) -> Result<Boundary> {
    if !(policy.lo > 0.0 && policy.hi > policy.lo && policy.widen_factor > 1.0) {
        return Err(LabError::Bisection(format!("invalid policy {policy:?}")));
    }
    let mut history = Vec::new();
    let mut call = |s: f64, history: &mut Vec<Probe>| -> Result<Probe> {
        let p = run(s)?;
        history.push(p.clone());
        Ok(p)
    };
    let mut lo = call(policy.lo, &mut history)?;
    for _ in 0..policy.max_widenings {
        if lo.class == Class::Stable {
            break;
        }
        lo = call(lo.e0_scale / policy.widen_factor, &mut history)?;
    }
    let mut hi = call(policy.hi, &mut history)?;
    for _ in 0..policy.max_widenings {
        if hi.class != Class::Stable {
            break;
        }
        hi = call(hi.e0_scale * policy.widen_factor, &mut history)?;
    }
    let unbracketed = |history: Vec<Probe>, why: String| Boundary {
        nu,
        a_star: f64::NAN,
        bracket: None,
        violation: monotonicity_violation(&history),
        history,
        note: Some(why),
    };
    if lo.class != Class::Stable {
        return Ok(unbracketed(history, format!("not bracketed: unstable down to e0_scale {:e}", lo.e0_scale)));
    }
    if hi.class == Class::Stable {
        return Ok(unbracketed(
            history,
            format!("not bracketed: stable up to e0_scale {:e} (growth {:.4})", hi.e0_scale, hi.growth),
        ));
    }
    for _ in 0..policy.bisections {
        let mid = call((lo.e0_scale * hi.e0_scale).sqrt(), &mut history)?;
        if mid.class == Class::Stable {
            lo = mid;
        } else {
            hi = mid;
        }
        if let Some(v) = monotonicity_violation(&history) {
            return Ok(Boundary {
                violation: Some(v),
                ..unbracketed(history, "aborted: classifier not monotone in the data size".into())
            });
        }
    }
    Ok(Boundary {
        nu,
        a_star: (lo.amplitude * hi.amplitude).sqrt(),
        violation: monotonicity_violation(&history),
        bracket: Some((lo, hi)),
        history,
        note: None,
    })
}

/// Least squares of `ln a` on `ln ν`; unlike the decay fits two points suffice.
pub fn fit_exponent(points: &[(f64, f64)]) -> Result<PowerFit> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|(x, y)| x.is_finite() && y.is_finite()).copied().collect();
    if pts.len() < 2 {
        return Err(LabError::Fit(format!("{} finite points, need 2", pts.len())));
    }
    if pts.iter().any(|(x, y)| *x <= 0.0 || *y <= 0.0) {
        return Err(LabError::Fit("non-positive value".into()));
    }
    let n = pts.len() as f64;
    let lx: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(LabError::Fit("all ν equal".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (lx.iter().zip(&ly).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum::<f64>() / n).sqrt();
    Ok(PowerFit {
        slope,
        intercept,
        residual,
        samples: pts.len(),
    })
}

/// Worker count from `COUETTE_WORKERS`, else 1.
pub fn workers_from_env() -> usize {
    std::env::var("COUETTE_WORKERS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|n| *n > 0)
        .unwrap_or(1)
}

/// Bisect at every `ν` (jobs on a pool of `workers` threads), then fit `A* ∝ ν^γ`.
pub fn run_threshold_sweep(
    base: &SimConfig,
    nus: &[f64],
    policy: &AmplitudePolicy,
    workers: usize,
) -> Result<RunManifest> {
    let clock = Clock::now();
    base.validate()?;
    let mut nus = nus.to_vec();
    nus.sort_by(f64::total_cmp);
    nus.dedup();
    let configs: Vec<SimConfig> = nus.iter().map(|&nu| base.rescaled(nu)).collect();
    for c in &configs {
        c.validate()?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| LabError::Config(format!("worker pool: {e}")))?;
    let jobs: Vec<Result<Boundary>> = pool.install(|| {
        use rayon::prelude::*;
        configs
            .par_iter()
            .map(|c| {
                bisect_boundary(c.nu, policy, |s| {
                    probe(&SimConfig {
                        e0_scale: Some(s),
                        ..c.clone()
                    })
                })
            })
            .collect()
    });
    let boundaries: Vec<Boundary> = jobs.into_iter().collect::<Result<_>>()?;
    let mut m = threshold_manifest(base, &configs, &boundaries, policy)?;
    m.wall_clock_s = clock.elapsed().as_secs_f64();
    Ok(m)
}

fn threshold_manifest(
    base: &SimConfig,
    configs: &[SimConfig],
    boundaries: &[Boundary],
    policy: &AmplitudePolicy,
) -> Result<RunManifest> {
    let mut m = RunManifest::new("threshold", Some(base));
    m.resolution = None;
    m.notes.push(format!(
        "G_stab = {G_STAB}, G_unst = {G_UNST}; policy {policy:?}; desk-scale grids, the boundary is a \
         numerical observation at this resolution"
    ));
    let mut s = TimeSeries::new(
        "threshold",
        &[
            ("a_star", "boundary amplitude A*"),
            ("e0_scale_lo", "largest stable E0/ν^(1/3)"),
            ("e0_scale_hi", "smallest non-stable E0/ν^(1/3)"),
            ("max_stable_growth", "largest sup ‖ω‖/‖ω^in‖ among stable runs"),
            ("runs", "simulations"),
        ],
    );
    s.time_unit = "ν".into();
    for (c, b) in configs.iter().zip(boundaries) {
        let (lo, hi) = b
            .bracket
            .as_ref()
            .map_or((f64::NAN, f64::NAN), |(l, h)| (l.e0_scale, h.e0_scale));
        let g = b
            .history
            .iter()
            .filter(|p| p.class == Class::Stable)
            .fold(f64::NAN, |a, p| a.max(p.growth));
        s.push(b.nu, &[b.a_star, lo, hi, g, b.history.len() as f64])?;
        if let Some(f) = Resolution::of(c).k_min_flag(c.nu) {
            m.flags.push(format!("ν = {:e}: {f}", c.nu));
        }
        if let Some(v) = &b.violation {
            m.flags.push(format!("ν = {:e}: {v}; resolution suspect", c.nu));
        }
        if let Some(n) = &b.note {
            m.notes.push(format!("ν = {:e}: {n}", c.nu));
        }
        for p in &b.history {
            m.notes.push(format!(
                "ν = {:e}: e0_scale {:e}, A {:e}, growth {:.4}, {:?}{}",
                c.nu,
                p.e0_scale,
                p.amplitude,
                p.growth,
                p.class,
                p.failure.as_deref().map(|f| format!(" ({f})")).unwrap_or_default()
            ));
        }
    }
    let pts: Vec<(f64, f64)> = boundaries.iter().map(|b| (b.nu, b.a_star)).collect();
    let window = [
        pts.first().map_or(f64::NAN, |p| p.0),
        pts.last().map_or(f64::NAN, |p| p.0),
    ];
    let gamma = match fit_exponent(&pts) {
        Ok(fit) => {
            let pass = fit.slope >= GAMMA_ACCEPT[0] && fit.slope <= GAMMA_ACCEPT[1];
            m.fits.push(FitRecord {
                series: s.name.clone(),
                column: "a_star".into(),
                window,
                fit,
                target: Some(GAMMA_TARGET),
                accept: Some(GAMMA_ACCEPT),
                pass: Some(pass),
            });
            fit.slope
        }
        Err(e) => {
            m.notes.push(format!("γ not fitted: {e}"));
            f64::NAN
        }
    };
    m.checks.push(Check::new(
        "gamma",
        gamma,
        Limit::Range(GAMMA_ACCEPT),
        "A* ∝ ν^γ over the bracketed ν",
    ));
    m.series.push(s);
    Ok(m)
}
