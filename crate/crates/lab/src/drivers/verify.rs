//! Numerical checks of the linear estimates on seeded random inputs.
//!
//! Catalog ids:
//!
//! | id | measured quantity | limit |
//! |---|---|---|
//! | `poisson` | manufactured-solution error; Green vs direct gap | 1e-8; 1e-6 |
//! | `jk` | symmetry defect on 20 pairs; `‖J_k‖ / min(1, k)` | 1e-6; historical |
//! | `hypocoercivity` | per-step relative increase of `Φ_k`; comparator excess | 1e-8; 0 |
//! | `enhan1` | `‖k f(t)‖ (νt)^{1/2} (1+t) / ‖f(0)‖` | historical |
//! | `enhan2` | `‖f(t)‖ (1+νt+νk²t³)^{1/2} / ‖f(0)‖` | historical, at most 10 |
//! | `enhan2-window` | the same at ν = 1e-3 over `[0, 2000]`, tail by certificate | 3 |
//! | `fY` | `‖f‖²_Y / (‖f(0)‖² + ν⁻¹∫‖∇Δ⁻¹g‖²)` | historical |
//! | `fX` | `‖f‖_X / (‖f(0)‖ + ‖g‖_{L¹L²})` | historical |
//! | `fg` | `‖W(fg)‖ / (‖Wf‖ ‖Wg‖_∞)`, `W = (1+ν^{1/3}tM)^θ` | historical |
//! | `ErL2` | `‖E_r(t)‖` over its envelope | historical |
//! | `psi` | streamfunction decay ratios on sheared profiles | historical |
//! | `convergence` | dt-halving error ratio | `[3.5, 4.5]` |
//!
//! "historical" means at most 1.5 times the constant in [`HISTORICAL`]; change those only
//! by re-baselining.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant as Clock;

use couette_core::elliptic::{green_solve, HelmholtzSolver};
use couette_core::grid::ChebyshevY;
use couette_core::jk::{apply_jk, jk_operator_norm};
use couette_core::linear::{phi_functional, LinearState};
use couette_core::multipliers::WeightSpec;
use couette_core::nonlinear::SimState;
use couette_core::psi::{check_psi_inequalities, resolvable_kt};
use couette_core::scheme::{ModeStepper, Scheme};
use couette_core::spacetime::SpaceTimeAccumulator;
use couette_core::{Field, Frame, Grid};
use num_complex::Complex64;
use rand::Rng;

use crate::config::SimConfig;
use crate::drivers::linear::envelopes;
use crate::error::{LabError, Result};
use crate::manifest::{Check, Limit, RunManifest};
use crate::random::{random_field, random_profile, rng};
use crate::weights::{sup_norm, weighted};

pub const SUITES: [&str; 12] = [
    "poisson",
    "jk",
    "hypocoercivity",
    "enhan1",
    "enhan2",
    "enhan2-window",
    "fY",
    "fX",
    "fg",
    "ErL2",
    "psi",
    "convergence",
];

/// Measured constants at [`crate::config::DEFAULT_SEED`].
pub const HISTORICAL: [(&str, f64); 8] = [
    ("jk.norm", 1.22),
    ("enhan1", 0.78),
    ("enhan2", 1.02),
    ("fY", 1.06),
    ("fX", 1.27),
    ("fg", 0.52),
    ("ErL2", 0.0098),
    ("psi", 0.61),
];

pub const HISTORICAL_FACTOR: f64 = 1.5;
const ENHAN2_CAP: f64 = 10.0;
const WINDOW_BOUND: f64 = 3.0;

pub fn historical(name: &str) -> Option<f64> {
    HISTORICAL.iter().find(|(n, _)| *n == name).map(|p| p.1)
}

fn against_history(name: &str, value: f64, detail: impl Into<String>) -> Check {
    let h = historical(name).expect("catalogued constant");
    Check::new(name, value, Limit::Max(HISTORICAL_FACTOR * h), detail)
}

/// `lhs / rhs`, or `None` for a vacuous row with both sides zero.
pub fn row_ratio(lhs: f64, rhs: f64) -> Option<f64> {
    if lhs == 0.0 && rhs == 0.0 {
        None
    } else if rhs == 0.0 {
        Some(f64::INFINITY)
    } else {
        Some(lhs / rhs)
    }
}

/// Running maximum over rows, counting vacuous ones.
#[derive(Clone, Copy, Debug, Default)]
struct Worst {
    value: f64,
    rows: usize,
    vacuous: usize,
}

impl Worst {
    fn add(&mut self, r: Option<f64>) {
        match r {
            Some(v) => {
                self.rows += 1;
                // NaN must stick
                if v.is_nan() || v > self.value {
                    self.value = v;
                }
            }
            None => self.vacuous += 1,
        }
    }

    fn detail(&self, what: &str) -> String {
        format!("{what}; {} rows, {} vacuous skipped", self.rows, self.vacuous)
    }
}

fn poisson(seed: u64) -> Result<Vec<Check>> {
    let cheb = Arc::new(ChebyshevY::new(64)?);
    let s = HelmholtzSolver::new(cheb.clone());
    let exact: Vec<Complex64> = cheb.nodes().iter().map(|y| Complex64::new(-(PI * y).sin(), 0.0)).collect();
    let w: Vec<Complex64> = exact.iter().map(|p| -p * (PI * PI + 1.0)).collect();
    let psi = s.solve(&w, 1.0)?;
    let err: Vec<Complex64> = psi.iter().zip(&exact).map(|(a, b)| a - b).collect();
    let manufactured = cheb.norm(&err) / cheb.norm(&exact);

    let mut r = rng(seed);
    let mut green = 0.0f64;
    for i in 0..8 {
        let k = 10f64.powf(r.gen_range(-3.0..1.0));
        let w = random_profile(cheb.nodes(), seed.wrapping_add(i));
        let direct = s.solve(&w, k)?;
        let quad = green_solve(&cheb, &w, k, 64);
        let d: Vec<Complex64> = direct.iter().zip(&quad).map(|(a, b)| a - b).collect();
        green = green.max(cheb.norm(&d) / cheb.norm(&direct));
    }
    Ok(vec![
        Check::new(
            "poisson.manufactured",
            manufactured,
            Limit::Max(1e-8),
            "k = 1, ψ = -sin(πy), n_y = 64, relative L² error",
        ),
        Check::new(
            "poisson.green",
            green,
            Limit::Max(1e-6),
            "8 random profiles, k log-uniform in [1e-3, 10], relative gap",
        ),
    ])
}

fn jk(seed: u64) -> Result<Vec<Check>> {
    let cheb = ChebyshevY::new(33)?;
    let mut sym = 0.0f64;
    for pair in 0..20u64 {
        let k = [1e-3, 0.1, 1.0, 10.0][pair as usize % 4] * if pair % 2 == 0 { 1.0 } else { -1.0 };
        let f = random_profile(cheb.nodes(), seed.wrapping_add(2 * pair));
        let g = random_profile(cheb.nodes(), seed.wrapping_add(2 * pair + 1));
        let jf = apply_jk(&cheb, &f, k)?;
        let jg = apply_jk(&cheb, &g, k)?;
        let defect = (cheb.inner(&f, &jg) - cheb.inner(&jf, &g)).norm();
        sym = sym.max(defect / (cheb.norm(&f) * cheb.norm(&g)));
    }
    let big = ChebyshevY::new(64)?;
    let mut c = 0.0f64;
    for k in [1e-3, 1e-2, 1e-1, 1.0, 10.0] {
        c = c.max(jk_operator_norm(&big, k)? / k.min(1.0));
    }
    Ok(vec![
        Check::new("jk.symmetry", sym, Limit::Max(1e-6), "|⟨f, Jg⟩ - ⟨Jf, g⟩| / ‖f‖‖g‖ on 20 random pairs"),
        against_history("jk.norm", c, "max_k ‖J_k‖ / min(1, k), k ∈ {1e-3, 1e-2, 0.1, 1, 10}, n_y = 64"),
    ])
}

fn hypocoercivity(seed: u64) -> Result<Vec<Check>> {
    let n = 129;
    let cheb = ChebyshevY::new(n)?;
    let horizon = resolvable_kt(n);
    let mut slack = 0.0f64;
    let mut excess = f64::NEG_INFINITY;
    let mut samples = 0usize;
    for (i, nu) in [1e-2, 1e-4].into_iter().enumerate() {
        for (l, k) in [0.01, 0.1, 1.0, 10.0].into_iter().enumerate() {
            let dt = 0.05f64.min(0.5 / k);
            let st = ModeStepper::new(&cheb, nu, dt, k)?;
            let mut f = random_profile(cheb.nodes(), seed.wrapping_add((4 * i + l) as u64));
            let p0 = phi_functional(&cheb, &f, k, 0.0, nu).value;
            let mut prev = p0;
            let mut t = 0.0;
            loop {
                st.step(&mut f);
                t += dt;
                samples += 1;
                let p = phi_functional(&cheb, &f, k, t, nu);
                slack = slack.max((p.value - prev) / prev);
                excess = excess.max((p.comparator - p.value) / p.value);
                prev = p.value;
                if p.value < 1e-20 * p0 || k * t > horizon || t >= 1e4 {
                    break;
                }
            }
        }
    }
    Ok(vec![
        Check::new(
            "hypocoercivity.slack",
            slack,
            Limit::Max(1e-8),
            format!("max per-step (Φ_(n+1) - Φ_n)/Φ_n over {samples} steps, n_y = {n}"),
        ),
        Check::new(
            "hypocoercivity.comparator",
            excess,
            Limit::Max(0.0),
            "max (comparator - Φ)/Φ at every step",
        ),
    ])
}

/// Step one mode from a random profile and hand `(t, ‖f(t)‖/‖f(0)‖)` to `visit` until
/// it returns false, `kt` leaves the resolved range or `t` reaches `t_end`.
fn mode_decay(
    cheb: &ChebyshevY,
    nu: f64,
    k: f64,
    f: &mut Vec<Complex64>,
    t_end: f64,
    mut visit: impl FnMut(f64, f64) -> bool,
) -> Result<f64> {
    let dt = 0.05f64.min(0.5 / k);
    let st = ModeStepper::new(cheb, nu, dt, k)?;
    let n0 = cheb.norm(f);
    let horizon = resolvable_kt(cheb.len()) / k;
    let mut t = 0.0;
    while t + dt <= t_end.min(horizon) + 1e-9 {
        st.step(f);
        t += dt;
        if !visit(t, cheb.norm(f) / n0) {
            break;
        }
    }
    Ok(t)
}

fn enhan1(seed: u64) -> Result<Vec<Check>> {
    let cheb = ChebyshevY::new(129)?;
    let mut worst = Worst::default();
    let mut id = 0;
    for nu in [1e-2, 1e-3] {
        for k in [0.5, 1.0, 2.0] {
            let mut f = random_profile(cheb.nodes(), seed.wrapping_add(id));
            id += 1;
            mode_decay(&cheb, nu, k, &mut f, 1e4, |t, r| {
                worst.add(row_ratio(k * r * (nu * t).sqrt() * (1.0 + t), 1.0));
                r > 1e-12
            })?;
        }
    }
    Ok(vec![against_history(
        "enhan1",
        worst.value,
        worst.detail("max ‖kf(t)‖(νt)^(1/2)(1+t)/‖f(0)‖, k ∈ {0.5, 1, 2}, ν ∈ {1e-2, 1e-3}"),
    )])
}

fn envelope2(nu: f64, k: f64, t: f64) -> f64 {
    (1.0 + nu * t + nu * k * k * t.powi(3)).sqrt()
}

fn enhan2(seed: u64) -> Result<Vec<Check>> {
    let cheb = ChebyshevY::new(257)?;
    let mut worst = Worst::default();
    let mut id = 0;
    for nu in [1e-2, 1e-4] {
        for k in [0.01, 0.1, 1.0, 10.0] {
            let mut f = random_profile(cheb.nodes(), seed.wrapping_add(id));
            id += 1;
            mode_decay(&cheb, nu, k, &mut f, 2000.0, |t, r| {
                worst.add(Some(r * envelope2(nu, k, t)));
                r > 1e-12
            })?;
        }
    }
    let h = historical("enhan2").expect("catalogued");
    Ok(vec![Check::new(
        "enhan2",
        worst.value,
        Limit::Max((HISTORICAL_FACTOR * h).min(ENHAN2_CAP)),
        worst.detail("max ‖f(t)‖(1+νt+νk²t³)^(1/2)/‖f(0)‖, k ∈ {0.01, 0.1, 1, 10}, ν ∈ {1e-2, 1e-4}"),
    )])
}

/// Measured ratio up to the resolved horizon; beyond it the energy is non-increasing and
/// the envelope is decreasing, so `‖f(t_stop)‖ (1+νT+νk²T³)^{1/2}` bounds the rest of `[t_stop, T]`.
fn enhan2_window(seed: u64) -> Result<Vec<Check>> {
    let (nu, t_end) = (1e-3, 2000.0);
    let cheb = ChebyshevY::new(257)?;
    let mut measured = 0.0f64;
    let mut certificate = 0.0f64;
    let mut rise = 0.0f64;
    let mut reached = Vec::new();
    for k in [0.1f64, 1.0] {
        let canonical: Vec<Complex64> =
            cheb.nodes().iter().map(|y| Complex64::new((PI * y / 2.0).cos(), 0.0)).collect();
        for mut f in [canonical, random_profile(cheb.nodes(), seed.wrapping_add(k.to_bits()))] {
            let mut last = 1.0;
            let t_stop = mode_decay(&cheb, nu, k, &mut f, t_end, |t, r| {
                measured = measured.max(r * envelope2(nu, k, t));
                rise = rise.max(r / last - 1.0);
                last = r;
                true
            })?;
            if t_stop < t_end {
                certificate = certificate.max(last * envelope2(nu, k, t_end));
            }
            reached.push(format!("k={k}: t_stop={t_stop:.0}"));
        }
    }
    // without monotone energy the tail certificate says nothing
    let value = if rise > 1e-12 { f64::NAN } else { measured.max(certificate) };
    Ok(vec![Check::new(
        "enhan2-window",
        value,
        Limit::Max(WINDOW_BOUND),
        format!(
            "ν = 1e-3, k ∈ {{0.1, 1}}, t ∈ [0, 2000]: measured {measured:.4}, tail certificate {certificate:.3e}, \
             max step energy rise {rise:.1e}; {}",
            reached.join(", ")
        ),
    )])
}

/// Forced linear problem `∂_t f + y∂_x f - νΔf = g` with random `f(0)` and `g(t) = G cos(t/4)`.
struct Forced {
    y_sq: f64,
    x: f64,
    f0: f64,
    g_l1: f64,
    g_vel_sq: f64,
    nu: f64,
}

fn forced_run(grid: &Arc<Grid>, nu: f64, f0: &Field, g: &Field, t_end: f64) -> Result<Forced> {
    let dt = 0.05;
    let solver = HelmholtzSolver::for_grid(grid);
    let scheme = Scheme::new(grid, nu, dt)?;
    let mut acc = SpaceTimeAccumulator::new(WeightSpec::unweighted(nu));
    let mut f = f0.to_spectral();
    acc.accumulate(0.0, &f, &solver.streamfunction(&f)?)?;
    let (gu1, gu2) = solver.velocity(g)?;
    let g_vel = (gu1.norm_sq() + gu2.norm_sq()).sqrt();
    let gn = g.norm_l2();
    let amp = |t: f64| (0.25 * t).cos();
    let (mut g_l1, mut g_vel_sq) = (0.0, 0.0);
    let steps = (t_end / dt).round() as usize;
    for i in 0..steps {
        let t = i as f64 * dt;
        f = scheme.step(&f, t, |s, _| Ok(g.scaled(-amp(s))))?;
        let t1 = t + dt;
        acc.accumulate(t1, &f, &solver.streamfunction(&f)?)?;
        g_l1 += 0.5 * dt * gn * (amp(t).abs() + amp(t1).abs());
        g_vel_sq += 0.5 * dt * g_vel * g_vel * (amp(t).powi(2) + amp(t1).powi(2));
    }
    Ok(Forced {
        y_sq: acc.y_norm().powi(2),
        x: acc.x_norm(),
        f0: f0.norm_l2(),
        g_l1,
        g_vel_sq,
        nu,
    })
}

/// Shared draws for `fY` and `fX`: the zero input, then three random `(f₀, g)` per ν.
fn forced_draws(seed: u64) -> Result<Vec<Forced>> {
    let grid = Grid::new(4.0 * PI, 16, 33)?;
    let zero = Field::zeros(&grid, Frame::Spectral);
    let mut out = vec![forced_run(&grid, 1e-2, &zero, &zero, 1.0)?];
    for (i, nu) in [1e-2, 1e-3].into_iter().enumerate() {
        for d in 0..3u64 {
            let s = seed.wrapping_add(10 * i as u64 + 2 * d);
            let mut f0 = random_field(&grid, 5, s);
            let g = random_field(&grid, 5, s + 1);
            if d == 2 {
                // purely forced
                f0 = Field::zeros(&grid, Frame::Spectral);
            }
            out.push(forced_run(&grid, nu, &f0, &g, 40.0)?);
        }
    }
    Ok(out)
}

fn f_y(draws: &[Forced]) -> Vec<Check> {
    let mut worst = Worst::default();
    for d in draws {
        worst.add(row_ratio(d.y_sq, d.f0 * d.f0 + d.g_vel_sq / d.nu));
    }
    vec![against_history(
        "fY",
        worst.value,
        worst.detail("‖f‖²_Y / (‖f(0)‖² + ν⁻¹∫‖∇Δ⁻¹g‖²), T = 40, ν ∈ {1e-2, 1e-3}"),
    )]
}

fn f_x(draws: &[Forced]) -> Vec<Check> {
    let mut worst = Worst::default();
    for d in draws {
        worst.add(row_ratio(d.x, d.f0 + d.g_l1));
    }
    vec![against_history(
        "fX",
        worst.value,
        worst.detail("‖f‖_X / (‖f(0)‖ + ‖g‖_L1L2), T = 40, ν ∈ {1e-2, 1e-3}"),
    )]
}

/// Pointwise product through physical space, without truncation; inputs are band-limited
/// well inside the grid so nothing aliases.
fn exact_product(a: &Field, b: &Field) -> Result<Field> {
    let pa = a.to_physical();
    let pb = b.to_physical();
    let mut p = Field::zeros(a.grid(), Frame::Physical);
    for ((o, x), y) in p.data_mut().iter_mut().zip(pa.data()).zip(pb.data()) {
        *o = Complex64::new(x.re * y.re, 0.0);
    }
    Ok(p.to_spectral())
}

fn fg(cfg: &SimConfig, seed: u64) -> Result<Vec<Check>> {
    let grid = Grid::new(8.0 * PI, 32, 33)?;
    let spec = WeightSpec::new(cfg.nu, cfg.theta)?;
    let mut worst = Worst::default();
    let zero = Field::zeros(&grid, Frame::Spectral);
    let mut pairs = vec![(zero.clone(), zero)];
    pairs.extend((0..6u64).map(|d| {
        (
            random_field(&grid, 7, seed.wrapping_add(2 * d)),
            random_field(&grid, 7, seed.wrapping_add(2 * d + 1)),
        )
    }));
    for (f, g) in &pairs {
        let fgp = exact_product(f, g)?;
        for t in [0.0, 1e2, 1e4, 1e6] {
            let lhs = weighted(&fgp, &spec, t).norm_l2();
            let rhs = weighted(f, &spec, t).norm_l2() * sup_norm(&weighted(g, &spec, t));
            worst.add(row_ratio(lhs, rhs));
        }
    }
    Ok(vec![against_history(
        "fg",
        worst.value,
        worst.detail(&format!(
            "‖W(fg)‖ / (‖Wf‖ ‖Wg‖_∞), W = (1+ν^(1/3)tM)^θ, ν = {}, θ = {}, t ∈ {{0, 1e2, 1e4, 1e6}}",
            cfg.nu, cfg.theta
        )),
    )])
}

fn er_l2(seed: u64) -> Result<Vec<Check>> {
    let ny = 65;
    let grid = Grid::new(8.0 * PI, 16, ny)?;
    let solver = HelmholtzSolver::for_grid(&grid);
    let k_max = 3.0 * grid.k_min();
    let t_max = resolvable_kt(ny) / k_max;
    let mut worst = Worst::default();
    let zero = LinearState::new(&Field::zeros(&grid, Frame::Spectral), 1e-2)?;
    worst.add(row_ratio(zero.compute_er(1.0, &solver)?.norm_l2(), 0.0));
    let mut id = 0;
    for nu in [1e-2, 1e-3] {
        for amp in [1e-3, 1e-1] {
            let w = random_field(&grid, 4, seed.wrapping_add(id)).scaled(amp);
            id += 1;
            let e0 = w.to_physical().compute_e0()?;
            let lin = LinearState::new(&w, nu)?;
            for i in 0..24 {
                let t = 0.1 * (t_max / 0.1).powf(i as f64 / 23.0);
                let er = lin.compute_er(t, &solver)?.norm_l2();
                worst.add(row_ratio(er, envelopes(nu, e0, t)[4]));
            }
        }
    }
    Ok(vec![against_history(
        "ErL2",
        worst.value,
        worst.detail(&format!("max ‖E_r(t)‖ / envelope, t ∈ [0.1, {t_max:.1}], ν ∈ {{1e-2, 1e-3}}")),
    )])
}

fn psi(seed: u64) -> Result<Vec<Check>> {
    let n = 129;
    let cheb = Arc::new(ChebyshevY::new(n)?);
    let s = HelmholtzSolver::new(cheb.clone());
    let mut worst = Worst::default();
    let mut inputs = vec![vec![Complex64::new(0.0, 0.0); n]];
    inputs.extend((0..4).map(|i| random_profile(cheb.nodes(), seed.wrapping_add(i))));
    inputs.push(cheb.nodes().iter().map(|y| Complex64::new((PI * y).sin(), 0.0)).collect());
    for h in &inputs {
        for k in [0.1, 2.0] {
            for t in [0.0, 10.0, 100.0] {
                if k * t > resolvable_kt(n) {
                    continue;
                }
                let rep = check_psi_inequalities(&s, h, k, t)?;
                worst.add(match rep {
                    couette_core::psi::PsiReport::Vacuous => None,
                    r => Some(r.max_ratio()),
                });
            }
        }
    }
    Ok(vec![against_history(
        "psi",
        worst.value,
        worst.detail("max streamfunction decay ratio, k ∈ {0.1, 2}, t ∈ {0, 10, 100} within resolution, n_y = 129"),
    )])
}

/// Error ratio of successive dt halvings; 4 for a second-order scheme.
pub fn convergence_ratio(nu: f64, dts: [f64; 3], t_end: f64) -> Result<f64> {
    let grid = Grid::new(4.0 * PI, 32, 33)?;
    let lx = grid.lx();
    let w = Field::from_fn(&grid, move |x, y| {
        0.5 * (PI * y / 2.0).cos() * ((2.0 * PI * x / lx).cos() + 0.5 * (4.0 * PI * x / lx).sin())
    });
    let solver = Arc::new(HelmholtzSolver::for_grid(&grid));
    let mut out = Vec::new();
    for dt in dts {
        let mut st = SimState::new(&w, nu, Some(dt), solver.clone())?;
        st.advance_to(t_end)?;
        if st.control.halvings() > 0 {
            // a halved step breaks the refinement sequence
            return Ok(f64::NAN);
        }
        out.push(st.omega);
    }
    Ok(out[0].sub(&out[1])?.norm_l2() / out[1].sub(&out[2])?.norm_l2())
}

fn convergence() -> Result<Vec<Check>> {
    let r = convergence_ratio(1e-2, [0.04, 0.02, 0.01], 2.0)?;
    Ok(vec![Check::new(
        "convergence",
        r,
        Limit::Range([3.5, 4.5]),
        "‖ω_dt - ω_dt/2‖ / ‖ω_dt/2 - ω_dt/4‖, ν = 1e-2, dt = 0.04, T = 2, L_x = 4π, 32 × 33",
    )])
}

fn run_suite(id: &str, cfg: &SimConfig, seed: u64, forced: &mut Option<Vec<Forced>>) -> Result<Vec<Check>> {
    if matches!(id, "fY" | "fX") && forced.is_none() {
        *forced = Some(forced_draws(seed)?);
    }
    match id {
        "poisson" => poisson(seed),
        "jk" => jk(seed),
        "hypocoercivity" => hypocoercivity(seed),
        "enhan1" => enhan1(seed),
        "enhan2" => enhan2(seed),
        "enhan2-window" => enhan2_window(seed),
        "fY" => Ok(f_y(forced.as_deref().expect("drawn above"))),
        "fX" => Ok(f_x(forced.as_deref().expect("drawn above"))),
        "fg" => fg(cfg, seed),
        "ErL2" => er_l2(seed),
        "psi" => psi(seed),
        "convergence" => convergence(),
        other => Err(LabError::UnknownSuite(other.into())),
    }
}

/// Run the listed suites (all of them when `ids` is empty). Unknown ids fail before any work.
pub fn verify_inequality_suite(cfg: &SimConfig, ids: &[String], seed: u64) -> Result<RunManifest> {
    let clock = Clock::now();
    let ids: Vec<String> = if ids.is_empty() {
        SUITES.iter().map(|s| s.to_string()).collect()
    } else {
        ids.to_vec()
    };
    if let Some(bad) = ids.iter().find(|i| !SUITES.contains(&i.as_str())) {
        return Err(LabError::UnknownSuite(bad.clone()));
    }
    let mut m = RunManifest::new("verify", Some(cfg));
    m.resolution = None;
    m.notes.push(format!("seed {seed}; suites {}", ids.join(",")));
    let mut forced = None;
    for id in &ids {
        m.checks.extend(run_suite(id, cfg, seed, &mut forced)?);
    }
    m.wall_clock_s = clock.elapsed().as_secs_f64();
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuous_rows_are_skipped() {
        assert_eq!(row_ratio(0.0, 0.0), None);
        assert_eq!(row_ratio(1.0, 0.0), Some(f64::INFINITY));
        let mut w = Worst::default();
        w.add(None);
        w.add(Some(0.5));
        w.add(Some(0.25));
        assert_eq!((w.value, w.rows, w.vacuous), (0.5, 2, 1));
        w.add(Some(f64::NAN));
        assert!(w.value.is_nan());
    }

    #[test]
    fn unknown_id_is_an_error() {
        let e = verify_inequality_suite(&SimConfig::default(), &["nope".into()], 1).unwrap_err();
        assert!(matches!(e, LabError::UnknownSuite(ref s) if s == "nope"));
    }

    #[test]
    fn catalog_is_consistent() {
        for (name, c) in HISTORICAL {
            assert!(c > 0.0 && c.is_finite(), "{name}");
        }
        assert_eq!(SUITES.len(), 12);
    }

    #[test]
    fn cheap_suites_pass() {
        let m = verify_inequality_suite(&SimConfig::default(), &["poisson".into(), "jk".into()], 3).unwrap();
        assert_eq!(m.checks.len(), 4);
        assert!(m.checks.iter().all(|c| c.pass), "{:?}", m.checks);
    }
}
