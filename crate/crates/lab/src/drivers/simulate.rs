//! Full nonlinear runs: stability bounds, the weighted inviscid-damping integral, and
//! optionally the `ω_L + ω_e` decomposition with its companions.

use std::sync::Arc;
use std::time::Instant as Clock;

use couette_core::elliptic::HelmholtzSolver;
use couette_core::linear::LinearState;
use couette_core::multipliers::{DyadicPartition, WeightSpec};
use couette_core::nonlinear::{ErrorState, SimState};
use couette_core::spacetime::SpaceTimeAccumulator;
use couette_core::Field;

use crate::checkpoint::SimCheckpoint;
use crate::config::SimConfig;
use crate::error::Result;
use crate::init::{grid_of, initial_data};
use crate::manifest::{Check, Limit, Resolution, RunManifest, TimeSeries};
use crate::weights::weighted;

pub const G_STAB: f64 = 10.0;
pub const G_UNST: f64 = 100.0;
/// Bound on the weighted sup norm, in units of `E₀`.
pub const WEIGHTED_BOUND: f64 = 10.0;
pub const SUPERPOSITION_TOL: f64 = 1e-6;
/// Allowed relative growth of the inviscid integral when the horizon doubles.
pub const PLATEAU_TOL: f64 = 0.10;

/// What a nonlinear run produced, independent of the manifest layout.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub e0: f64,
    pub amplitude: f64,
    pub t_reached: f64,
    /// `sup_t ‖ω(t)‖ / ‖ω^in‖`
    pub growth: f64,
    /// `sup_t ‖(1 + ν^{1/3} t M)^θ ω(t)‖`
    pub weighted_sup: f64,
    /// `‖(1 + ν^{1/3} t M)^θ M₁ u‖_{L²L²}` at each requested mark.
    pub inviscid_marks: Vec<(f64, f64)>,
    pub failure: Option<String>,
    pub steps: usize,
    pub halvings: usize,
    pub dt: f64,
    pub series: Vec<TimeSeries>,
    pub decomposition: Option<DecompositionSummary>,
    pub final_state: Option<SimCheckpoint>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct DecompositionSummary {
    pub worst_recomposition: f64,
    pub worst_companions: f64,
    pub worst_full_gap: f64,
}

pub struct RunOptions<'a> {
    pub marks: Vec<f64>,
    pub resume: Option<&'a SimCheckpoint>,
    /// Give up after this many steps; `None` for no limit.
    pub max_steps: Option<usize>,
    /// Stop once `‖ω‖/‖ω^in‖` exceeds this.
    pub stop_above: Option<f64>,
}

impl Default for RunOptions<'_> {
    fn default() -> Self {
        Self {
            marks: Vec::new(),
            resume: None,
            max_steps: None,
            stop_above: None,
        }
    }
}

fn sample_times(cfg: &SimConfig, start: f64, marks: &[f64]) -> Vec<f64> {
    let n = cfg.samples;
    let mut ts: Vec<f64> = (1..=n)
        .map(|i| start + (cfg.t_final - start) * i as f64 / n as f64)
        .chain(marks.iter().copied().filter(|m| *m > start && *m < cfg.t_final))
        .collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    ts
}

/// Evolve the full equation, sampling norms on the configured cadence.
pub fn evolve(cfg: &SimConfig, opts: &RunOptions) -> Result<Outcome> {
    cfg.validate()?;
    let grid = grid_of(cfg)?;
    let (w_in, amp, e0) = initial_data(&grid, cfg)?;
    let solver = Arc::new(HelmholtzSolver::for_grid(&grid));
    let mut sim = match opts.resume {
        Some(c) => c.to_sim(&grid, solver.clone())?,
        None => SimState::new(&w_in, cfg.nu, cfg.dt, solver.clone())?,
    };
    let start = sim.t;
    let n0 = sim.omega.norm_l2();
    let spec = WeightSpec::new(cfg.nu, cfg.theta)?;
    let mut acc = SpaceTimeAccumulator::new(spec);
    acc.accumulate(start, &sim.omega, &solver.streamfunction(&sim.omega)?)?;

    let mut norms = TimeSeries::new(
        "norms",
        &[
            ("l2_ratio", "‖ω‖/‖ω^in‖"),
            ("l2_w_over_e0", "‖(1+ν^(1/3)tM)^θ ω‖/E0"),
            ("y_norm", "running ‖ω‖_Y"),
            ("x_norm", "running ‖ω‖_X"),
            ("x_theta_norm", "running ‖ω‖_Xθ"),
            ("inviscid_over_e0", "running ‖(1+ν^(1/3)tM)^θ M1 u‖_L2L2 / E0"),
            ("enhanced_over_e0", "running ν^(1/3)‖M(1+ν^(1/3)tM)^θ ω‖_L1L2 / E0"),
        ],
    );
    let over = |v: f64| if e0 > 0.0 { v / e0 } else { 0.0 };
    let ratio0 = |v: f64| if n0 > 0.0 { v / n0 } else { 0.0 };

    let mut decomposition = if cfg.decomposition {
        let lin = Arc::new(LinearState::new(&w_in, cfg.nu)?);
        match opts.resume.map(|c| c.to_error(lin.clone(), solver.clone())).transpose()?.flatten() {
            Some(es) => Some(es),
            None => {
                let part = DyadicPartition::covering(cfg.nu, cfg.t_final)?;
                let mut es = ErrorState::new(lin, solver.clone(), Some(part), cfg.dt)?;
                es.advance_to(start)?;
                Some(es)
            }
        }
    } else {
        None
    };
    let mut dseries = decomposition.as_ref().map(|es| {
        let names: Vec<String> = (1..=es.omega_2j.len()).map(|j| format!("omega_2_{j}")).collect();
        let mut cols: Vec<(String, String)> = vec![
            ("recomposition_rel".into(), "‖ω_e − (ω₁+Σω_2j)‖ / max(‖ω_e‖, E0)".into()),
            ("companions_rel".into(), "‖Σω_2j − ω₂‖ / ‖ω₂‖".into()),
            ("full_gap_over_e0".into(), "‖ω_L + ω_e − ω‖ / E0".into()),
            ("omega_e".into(), "‖ω_e‖".into()),
            ("omega_1".into(), "‖ω₁‖".into()),
            ("omega_2".into(), "‖ω₂‖".into()),
        ];
        cols.extend(names.into_iter().map(|n| (n, "‖ω_2j‖".to_string())));
        let c: Vec<(&str, &str)> = cols.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        TimeSeries::new("decomposition", &c)
    });
    let mut summary = DecompositionSummary::default();

    let mut growth: f64 = if n0 > 0.0 { 1.0 } else { 0.0 };
    let mut weighted_sup = weighted(&sim.omega, &spec, start).norm_l2();
    let mut inviscid_marks = Vec::new();
    let mut failure = None;
    let marks: Vec<f64> = opts.marks.clone();

    'outer: for t_s in sample_times(cfg, start, &marks) {
        while sim.t < t_s - 1e-9 {
            if let Some(limit) = opts.max_steps {
                if sim.steps >= limit {
                    failure = Some(format!("step budget {limit} exhausted at t = {}", sim.t));
                    break 'outer;
                }
            }
            if let Err(e) = sim.step_towards(t_s) {
                failure = Some(e.to_string());
                break 'outer;
            }
            let psi = solver.streamfunction(&sim.omega)?;
            acc.accumulate(sim.t, &sim.omega, &psi)?;
            growth = growth.max(ratio0(sim.omega.norm_l2()));
            weighted_sup = weighted_sup.max(weighted(&sim.omega, &spec, sim.t).norm_l2());
            if opts.stop_above.is_some_and(|g| growth > g) {
                break 'outer;
            }
        }
        let inv = acc.weighted.int_m1u_sq.sqrt();
        if marks.iter().any(|m| (m - t_s).abs() < 1e-9) || (t_s - cfg.t_final).abs() < 1e-9 {
            inviscid_marks.push((t_s, inv));
        }
        norms.push(
            t_s,
            &[
                ratio0(sim.omega.norm_l2()),
                over(weighted(&sim.omega, &spec, sim.t).norm_l2()),
                acc.y_norm(),
                acc.x_norm(),
                acc.x_theta_norm(),
                over(inv),
                over(acc.weighted.enhanced(cfg.nu)),
            ],
        )?;
        if let (Some(es), Some(ds)) = (decomposition.as_mut(), dseries.as_mut()) {
            if let Err(e) = es.advance_to(t_s) {
                failure = Some(format!("error equation: {e}"));
                break 'outer;
            }
            let gap = es.superposition_gap()?;
            let rec = gap.recomposition / gap.norm_e.max(e0).max(f64::MIN_POSITIVE);
            let comp = if gap.norm_2 > 0.0 { gap.companions / gap.norm_2 } else { gap.companions };
            let full = over(es.total()?.sub(&sim.omega)?.norm_l2());
            summary.worst_recomposition = summary.worst_recomposition.max(rec);
            summary.worst_companions = summary.worst_companions.max(comp);
            summary.worst_full_gap = summary.worst_full_gap.max(full);
            let mut row = vec![rec, comp, full, gap.norm_e, es.omega_1.norm_l2(), gap.norm_2];
            row.extend(es.omega_2j.iter().map(Field::norm_l2));
            ds.push(t_s, &row)?;
        }
    }

    let mut snapshot = SimCheckpoint::capture(&sim, cfg.nu);
    if let Some(es) = &decomposition {
        snapshot = snapshot.with_error(es);
    }
    let mut series = vec![norms];
    series.extend(dseries);
    Ok(Outcome {
        e0,
        amplitude: amp,
        t_reached: sim.t,
        growth,
        weighted_sup,
        inviscid_marks,
        failure,
        steps: sim.steps,
        halvings: sim.control.halvings(),
        dt: sim.control.dt(),
        series,
        decomposition: decomposition.map(|_| summary),
        final_state: Some(snapshot),
    })
}

fn base_manifest(kind: &str, cfg: &SimConfig, out: &Outcome) -> RunManifest {
    let mut m = RunManifest::new(kind, Some(cfg));
    m.notes.push(format!("amplitude {:e}, E0 {:e}", out.amplitude, out.e0));
    let res = m.resolution.get_or_insert_with(|| Resolution::of(cfg));
    res.dt = Some(out.dt);
    res.halvings = out.halvings;
    res.steps = out.steps;
    if let Some(f) = res.k_min_flag(cfg.nu) {
        m.flags.push(f);
    }
    m.checks.push(Check::new(
        "completed",
        if out.failure.is_none() { 1.0 } else { 0.0 },
        Limit::Range([1.0, 1.0]),
        out.failure.clone().unwrap_or_else(|| format!("reached t = {}", out.t_reached)),
    ));
    m
}

/// Nonlinear run: growth and weighted bounds, space-time norms, and the decomposition
/// checks when `cfg.decomposition` is set.
pub fn run_simulation(cfg: &SimConfig) -> Result<RunManifest> {
    run_simulation_with(cfg, &RunOptions::default()).map(|(m, _)| m)
}

pub fn run_simulation_with(cfg: &SimConfig, opts: &RunOptions) -> Result<(RunManifest, Outcome)> {
    let clock = Clock::now();
    let mut out = evolve(cfg, opts)?;
    let mut m = base_manifest("simulate", cfg, &out);
    m.checks.push(Check::new(
        "growth",
        out.growth,
        Limit::Max(G_STAB),
        "sup_t ‖ω(t)‖/‖ω^in‖",
    ));
    let wb = if out.e0 > 0.0 { out.weighted_sup / out.e0 } else { 0.0 };
    m.checks.push(Check::new(
        "weighted_sup_over_e0",
        wb,
        Limit::Max(WEIGHTED_BOUND),
        "sup_t ‖(1+ν^(1/3)tM)^θ ω(t)‖ / E0",
    ));
    if let Some(s) = out.decomposition {
        m.checks.push(Check::new(
            "superposition_recomposition",
            s.worst_recomposition,
            Limit::Max(SUPERPOSITION_TOL),
            "max_t ‖ω_e − (ω₁+Σω_2j)‖ / max(‖ω_e‖, E0)",
        ));
        m.checks.push(Check::new(
            "superposition_companions",
            s.worst_companions,
            Limit::Max(SUPERPOSITION_TOL),
            "max_t ‖Σω_2j − ω₂‖ / ‖ω₂‖",
        ));
        m.constants.push(Check::new(
            "decomposition_vs_full",
            s.worst_full_gap,
            Limit::None,
            "max_t ‖ω_L + ω_e − ω‖ / E0 (time-splitting difference of two integrators)",
        ));
    }
    m.series = std::mem::take(&mut out.series);
    m.wall_clock_s = clock.elapsed().as_secs_f64();
    Ok((m, out))
}

/// Weighted `M₁u` integral over `[0, T]` and `[0, T/2]`; passes when doubling the horizon
/// raises the ratio to `E₀` by at most 10%. Also reports the closed-form linear variant.
pub fn run_inviscid_damping(cfg: &SimConfig) -> Result<RunManifest> {
    let clock = Clock::now();
    let half = 0.5 * cfg.t_final;
    let mut out = evolve(
        cfg,
        &RunOptions {
            marks: vec![half],
            ..RunOptions::default()
        },
    )?;
    let mut m = base_manifest("inviscid", cfg, &out);
    let at = |t: f64| {
        out.inviscid_marks
            .iter()
            .find(|(s, _)| (s - t).abs() < 1e-9)
            .map(|p| p.1)
            .unwrap_or(f64::NAN)
    };
    let (i_half, i_full) = (at(half), at(cfg.t_final));
    let over = |v: f64| if out.e0 > 0.0 { v / out.e0 } else { 0.0 };
    m.constants.push(Check::new("inviscid_half_over_e0", over(i_half), Limit::None, format!("T = {half}")));
    m.constants.push(Check::new("inviscid_full_over_e0", over(i_full), Limit::None, format!("T = {}", cfg.t_final)));
    let rel = if i_half > 0.0 { i_full / i_half - 1.0 } else { 0.0 };
    m.checks.push(Check::new(
        "inviscid_plateau",
        rel,
        Limit::Max(PLATEAU_TOL),
        "relative increase of the integral when T doubles",
    ));

    let (lin_half, lin_full) = linear_inviscid(cfg, out.dt, half)?;
    m.constants.push(Check::new("linear_inviscid_half_over_e0", over(lin_half), Limit::None, "u = u_L"));
    m.constants.push(Check::new("linear_inviscid_full_over_e0", over(lin_full), Limit::None, "u = u_L"));
    m.series = std::mem::take(&mut out.series);
    m.wall_clock_s = clock.elapsed().as_secs_f64();
    Ok(m)
}

/// The integral for the closed-form `u_L`, sampled every `dt`.
fn linear_inviscid(cfg: &SimConfig, dt: f64, half: f64) -> Result<(f64, f64)> {
    let grid = grid_of(cfg)?;
    let (w_in, _, _) = initial_data(&grid, cfg)?;
    let lin = LinearState::new(&w_in, cfg.nu)?;
    let solver = HelmholtzSolver::for_grid(&grid);
    let mut acc = SpaceTimeAccumulator::new(WeightSpec::new(cfg.nu, cfg.theta)?);
    let n = (cfg.t_final / dt).ceil() as usize;
    let mut at_half = 0.0;
    for i in 0..=n {
        let t = cfg.t_final * i as f64 / n as f64;
        let wl = lin.propagate(t);
        acc.accumulate(t, &wl, &solver.streamfunction(&wl)?)?;
        if t <= half {
            at_half = acc.weighted.int_m1u_sq.sqrt();
        }
    }
    Ok((at_half, acc.weighted.int_m1u_sq.sqrt()))
}
