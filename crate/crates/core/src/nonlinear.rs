//! Time integration of the full vorticity equation
//! `∂_t ω + u·∇ω - νΔω + y∂_x ω = 0`, of the error equation for `ω_e = ω - ω_L`,
//! and of the `ω₁`, `ω₂`, `ω_{2,j}` companions.
//!
//! The error equation is stepped with the combined source
//! `F = u·∇(ω_L + ω_e) + E_{r_L}`, which equals `u·∇ω_e + u_e·∇ω_L + E_r`.
//! The reaction term is `R = t u_e^{(2)} ∂_x ω_L`; `ω₂` is forced by `+R` after `T_0`,
//! each `ω_{2,j}` by `χ_j(t) R`, and `ω₁` by `-(F + R)`.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::elliptic::{velocity_from_psi, HelmholtzSolver};
use crate::error::{Error, Result};
use crate::field::{Axis2, Field, Frame};
use crate::grid::Grid;
use crate::linear::{e_rl_of, LinearState};
use crate::multipliers::DyadicPartition;
use crate::scheme::{cfl_limit, default_dt, Scheme};
use crate::transport::{max_speed, nonlinear_term, product};

/// Above this magnitude a run is declared blown up.
pub const BLOWUP: f64 = 1e100;

const MAX_HALVINGS: usize = 30;

/// Landing tolerance: steps shorter than this are merged into the previous one.
const LAND_EPS: f64 = 1e-9;

/// Step-size control shared by the integrators: nominal `dt`, halving on advective
/// limit violations, shortened steps to land on requested times, and a scheme cache.
#[derive(Debug)]
pub struct TimeControl {
    grid: Arc<Grid>,
    nu: f64,
    dt: f64,
    halvings: usize,
    schemes: HashMap<u64, Arc<Scheme>>,
}

impl TimeControl {
    pub fn new(grid: &Arc<Grid>, nu: f64, dt: Option<f64>) -> Result<Self> {
        let dt = dt.unwrap_or_else(|| default_dt(grid.k_max_active()));
        if !(dt > 0.0) {
            return Err(Error::InvalidArgument(format!("dt = {dt} must be positive")));
        }
        Ok(Self {
            grid: grid.clone(),
            nu,
            dt,
            halvings: 0,
            schemes: HashMap::new(),
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn halvings(&self) -> usize {
        self.halvings
    }

    pub fn scheme(&mut self, dt: f64) -> Result<Arc<Scheme>> {
        let key = dt.to_bits();
        if let Some(s) = self.schemes.get(&key) {
            return Ok(s.clone());
        }
        // landing steps are one-offs; keep the cache small
        if self.schemes.len() > 8 {
            let nominal = self.dt.to_bits();
            self.schemes.retain(|k, _| *k == nominal);
        }
        let s = Arc::new(Scheme::new(&self.grid, self.nu, dt)?);
        self.schemes.insert(key, s.clone());
        Ok(s)
    }

    /// Step size from `t` towards `target`, after enforcing the advective limit for `max_u`.
    pub fn next_dt(&mut self, t: f64, target: f64, max_u: f64) -> Result<f64> {
        let limit = cfl_limit(self.grid.k_max_active(), max_u);
        while self.dt > limit {
            if self.halvings >= MAX_HALVINGS {
                return Err(Error::StepRejected(self.halvings));
            }
            self.dt *= 0.5;
            self.halvings += 1;
        }
        let remaining = target - t;
        if remaining <= self.dt * (1.0 + LAND_EPS) {
            Ok(remaining)
        } else if remaining - self.dt < LAND_EPS * self.dt.max(1.0) {
            Ok(remaining)
        } else {
            Ok(self.dt)
        }
    }
}

fn check_finite(f: &Field, t: f64) -> Result<()> {
    if !f.is_finite() || f.max_abs() > BLOWUP {
        return Err(Error::Blowup(t));
    }
    Ok(())
}

/// Project onto the 2/3 band in the spectral frame.
pub fn band_project(f: &Field) -> Field {
    let mut s = f.to_spectral();
    s.dealias().expect("spectral frame");
    s
}

/// State of the full nonlinear simulation.
#[derive(Debug)]
pub struct SimState {
    pub t: f64,
    pub omega: Field,
    pub control: TimeControl,
    solver: Arc<HelmholtzSolver>,
    pub steps: usize,
}

impl SimState {
    pub fn new(omega_in: &Field, nu: f64, dt: Option<f64>, solver: Arc<HelmholtzSolver>) -> Result<Self> {
        let omega = band_project(omega_in);
        Ok(Self {
            t: 0.0,
            control: TimeControl::new(omega.grid(), nu, dt)?,
            omega,
            solver,
            steps: 0,
        })
    }

    pub fn solver(&self) -> &Arc<HelmholtzSolver> {
        &self.solver
    }

    pub fn velocity(&self) -> Result<(Field, Field)> {
        self.solver.velocity(&self.omega)
    }

    /// `u·∇ω` of the current state.
    pub fn nonlinear(&self, omega: &Field) -> Result<Field> {
        let (u1, u2) = self.solver.velocity(omega)?;
        nonlinear_term(omega, &u1, &u2)
    }

    /// Advance by one step, not beyond `target`.
    pub fn step_towards(&mut self, target: f64) -> Result<f64> {
        let (u1, u2) = self.velocity()?;
        let dt = self.control.next_dt(self.t, target, max_speed(&u1, &u2))?;
        let scheme = self.control.scheme(dt)?;
        let solver = self.solver.clone();
        let next = scheme.step(&self.omega, self.t, |_, w| {
            let (u1, u2) = solver.velocity(w)?;
            nonlinear_term(w, &u1, &u2)
        })?;
        self.t += dt;
        self.steps += 1;
        check_finite(&next, self.t)?;
        self.omega = next;
        Ok(dt)
    }

    /// One nominal step.
    pub fn step_full(&mut self) -> Result<f64> {
        let target = self.t + self.control.dt();
        self.step_towards(target)
    }

    pub fn advance_to(&mut self, target: f64) -> Result<()> {
        while self.t < target - LAND_EPS {
            self.step_towards(target)?;
        }
        Ok(())
    }
}

/// `S(t, s) h`: the homogeneous problem stepped from `s` to `t` with step `dt`.
pub fn solve_homogeneous(h: &Field, s: f64, t: f64, nu: f64, dt: f64) -> Result<Field> {
    if t < s {
        return Err(Error::InvalidArgument(format!("t = {t} before s = {s}")));
    }
    let mut control = TimeControl::new(h.grid(), nu, Some(dt))?;
    let mut f = band_project(h);
    let mut now = s;
    while now < t - LAND_EPS {
        let step = control.next_dt(now, t, 0.0)?;
        f = control.scheme(step)?.step_linear(&f);
        now += step;
    }
    Ok(f)
}

/// Error-equation state with optional dyadic companions.
#[derive(Debug)]
pub struct ErrorState {
    pub t: f64,
    pub omega_e: Field,
    pub omega_1: Field,
    pub omega_2: Field,
    pub omega_2j: Vec<Field>,
    pub partition: Option<DyadicPartition>,
    pub control: TimeControl,
    lin: Arc<LinearState>,
    solver: Arc<HelmholtzSolver>,
    pub steps: usize,
}

/// Quantities of one error-equation stage.
struct Stage {
    f: Field,
    r: Field,
}

impl ErrorState {
    /// `ω_e(0) = 0`. With a partition, `ω₂` and the `ω_{2,j}` are tracked.
    pub fn new(
        lin: Arc<LinearState>,
        solver: Arc<HelmholtzSolver>,
        partition: Option<DyadicPartition>,
        dt: Option<f64>,
    ) -> Result<Self> {
        let g = lin.grid().clone();
        let zero = Field::zeros(&g, Frame::Spectral);
        let nj = partition.as_ref().map_or(0, |p| p.j_max());
        Ok(Self {
            t: 0.0,
            omega_e: zero.clone(),
            omega_1: zero.clone(),
            omega_2: zero.clone(),
            omega_2j: vec![zero; nj],
            partition,
            control: TimeControl::new(&g, lin.nu(), dt)?,
            lin,
            solver,
            steps: 0,
        })
    }

    pub fn linear(&self) -> &Arc<LinearState> {
        &self.lin
    }

    /// `ω_L + ω_e` at the current time.
    pub fn total(&self) -> Result<Field> {
        self.lin.propagate(self.t).add(&self.omega_e)
    }

    /// `ω₁ + Σ_j ω_{2,j}`.
    pub fn recomposed(&self) -> Result<Field> {
        let mut s = self.omega_1.clone();
        for f in &self.omega_2j {
            s.axpy(1.0, f)?;
        }
        Ok(s)
    }

    pub fn companion_sum(&self) -> Result<Field> {
        let mut s = Field::zeros(self.omega_e.grid(), Frame::Spectral);
        for f in &self.omega_2j {
            s.axpy(1.0, f)?;
        }
        Ok(s)
    }

    fn next_landing(&self, target: f64) -> f64 {
        let mut next = target;
        if let Some(p) = &self.partition {
            for &tj in &p.times {
                if tj > self.t + LAND_EPS && tj < next {
                    next = tj;
                }
            }
        }
        next
    }

    fn stage(&self, tm: f64, wl: &Field, psi_l: &Field, erl: &Field, wl_x: &Field, we: &Field) -> Result<Stage> {
        let psi_e = self.solver.streamfunction(we)?;
        let psi = psi_l.add(&psi_e)?;
        let (u1, u2) = velocity_from_psi(&psi);
        let total = wl.add(we)?;
        let mut f = nonlinear_term(&total, &u1, &u2)?;
        f.axpy(1.0, erl)?;
        let r = if self.partition.is_some() {
            let (_, u2e) = velocity_from_psi(&psi_e);
            product(&u2e, wl_x)?.scaled(tm)
        } else {
            Field::zeros(we.grid(), Frame::Spectral)
        };
        Ok(Stage { f, r })
    }

    /// Advance by one step, not beyond `target` or the next partition time.
    pub fn step_towards(&mut self, target: f64) -> Result<f64> {
        let land = self.next_landing(target);
        let wl_now = self.lin.propagate(self.t);
        let total_now = wl_now.add(&self.omega_e)?;
        let (u1, u2) = self.solver.velocity(&total_now)?;
        let dt = self.control.next_dt(self.t, land, max_speed(&u1, &u2))?;
        let scheme = self.control.scheme(dt)?;
        let tm = self.t + 0.5 * dt;

        let wl = self.lin.propagate(tm);
        let erl = e_rl_of(&wl, self.lin.nu(), tm);
        let psi_l = self.solver.streamfunction(&wl)?;
        let wl_x = wl.derivative(Axis2::X, 1)?;

        let mut we = self.omega_e.clone();
        scheme.half_phase(&mut we);
        let s0 = self.stage(tm, &wl, &psi_l, &erl, &wl_x, &we)?;
        let half = scheme.predictor(&we, 0.5 * dt, &s0.f);
        let s1 = self.stage(tm, &wl, &psi_l, &erl, &wl_x, &half)?;
        let mut next_e = scheme.corrector(&we, dt, &s1.f);
        scheme.half_phase(&mut next_e);

        if let Some(p) = self.partition.clone() {
            let gate = if tm > p.t(0) { 1.0 } else { 0.0 };
            let mut src1 = s1.f.clone();
            src1.axpy(gate, &s1.r)?;
            let mut w1 = self.omega_1.clone();
            scheme.half_phase(&mut w1);
            let mut n1 = scheme.corrector(&w1, dt, &src1);
            scheme.half_phase(&mut n1);
            self.omega_1 = n1;

            let neg_r = s1.r.scaled(-1.0);
            let mut w2 = self.omega_2.clone();
            scheme.half_phase(&mut w2);
            let mut n2 = scheme.corrector(&w2, dt, &neg_r.scaled(gate));
            scheme.half_phase(&mut n2);
            self.omega_2 = n2;

            for (idx, f) in self.omega_2j.iter_mut().enumerate() {
                let j = idx + 1;
                let chi = if p.chi_j(tm, j) { 1.0 } else { 0.0 };
                let mut w = f.clone();
                scheme.half_phase(&mut w);
                let mut n = scheme.corrector(&w, dt, &neg_r.scaled(chi));
                scheme.half_phase(&mut n);
                *f = n;
            }
        } else {
            self.omega_1 = next_e.clone();
        }

        self.t += dt;
        self.steps += 1;
        check_finite(&next_e, self.t)?;
        self.omega_e = next_e;
        Ok(dt)
    }

    pub fn advance_to(&mut self, target: f64) -> Result<()> {
        while self.t < target - LAND_EPS {
            self.step_towards(target)?;
        }
        Ok(())
    }
}

/// Superposition defects at one time.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SuperpositionGap {
    /// `‖ω_e - (ω₁ + Σ_j ω_{2,j})‖`
    pub recomposition: f64,
    /// `‖Σ_j ω_{2,j} - ω₂‖`
    pub companions: f64,
    pub norm_e: f64,
    pub norm_2: f64,
}

impl ErrorState {
    pub fn superposition_gap(&self) -> Result<SuperpositionGap> {
        let rec = self.omega_e.sub(&self.recomposed()?)?.norm_l2();
        let sum = self.companion_sum()?;
        Ok(SuperpositionGap {
            recomposition: rec,
            companions: sum.sub(&self.omega_2)?.norm_l2(),
            norm_e: self.omega_e.norm_l2(),
            norm_2: self.omega_2.norm_l2(),
        })
    }
}
