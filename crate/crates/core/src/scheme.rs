//! Strang-split time step for `∂_t f + iky f = ν(∂²_y - k²) f - F`:
//! exact half-step phase `e^{-iky dt/2}`, a Crank–Nicolson/midpoint stage for the
//! viscous operator and the explicit term `F`, and a second half-step phase.
//!
//! With `L = ∂²_y - k²`, `A = I - (dt/2)νL` and `B = A⁻¹(I + (dt/2)νL)` on interior nodes,
//! the middle stage is
//! `f_{1/2} = A⁻¹(f* - (dt/2) F(t_mid, f*))`, `f** = B f* - dt A⁻¹ F(t_mid, f_{1/2})`.

use std::collections::HashMap;
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::elliptic::{apply_interior, interior_inverse};
use crate::error::{Error, Result};
use crate::field::{Field, Frame};
use crate::grid::{matvec, ChebyshevY, Grid};

/// Advective stability constant in `dt ≤ C_cfl / (k_max max|u| + k_max)`.
pub const C_CFL: f64 = 0.5;

/// Default step `min(0.5 / k_max, 0.1)`.
pub fn default_dt(k_max: f64) -> f64 {
    if k_max > 0.0 {
        (0.5 / k_max).min(0.1)
    } else {
        0.1
    }
}

pub fn cfl_limit(k_max: f64, max_u: f64) -> f64 {
    C_CFL / (k_max * max_u + k_max)
}

/// Interior operators `A⁻¹` and `B` for one `|k|`.
#[derive(Debug)]
pub struct ModeOps {
    pub ainv: Array2<f64>,
    pub bm: Array2<f64>,
}

impl ModeOps {
    pub fn new(cheb: &ChebyshevY, nu: f64, dt: f64, k: f64) -> Result<Self> {
        let c = 0.5 * dt * nu;
        let ainv = interior_inverse(cheb, 1.0, -c, k)?;
        let n = cheb.len();
        let m = n - 2;
        let d2 = cheb.d2();
        let plus = Array2::from_shape_fn((m, m), |(i, j)| {
            let diag = if i == j { 1.0 - c * k * k } else { 0.0 };
            diag + c * d2[[i + 1, j + 1]]
        });
        let bm = ainv.dot(&plus);
        Ok(Self { ainv, bm })
    }

    /// `out = A⁻¹ rhs` with zero walls.
    pub fn solve_a(&self, rhs: &[Complex64], out: &mut [Complex64]) {
        apply_interior(&self.ainv, rhs, out);
    }

    /// `out = B f - s A⁻¹ g` with zero walls.
    pub fn b_minus(&self, f: &[Complex64], s: f64, g: &[Complex64], out: &mut [Complex64]) {
        let n = f.len();
        let mut bf = vec![Complex64::new(0.0, 0.0); n - 2];
        matvec(&self.bm, &f[1..n - 1], &mut bf);
        let mut ag = vec![Complex64::new(0.0, 0.0); n - 2];
        matvec(&self.ainv, &g[1..n - 1], &mut ag);
        out[0] = Complex64::new(0.0, 0.0);
        out[n - 1] = Complex64::new(0.0, 0.0);
        for ((o, b), a) in out[1..n - 1].iter_mut().zip(&bf).zip(&ag) {
            *o = b - a * s;
        }
    }

    /// `out = B f`.
    pub fn apply_b(&self, f: &[Complex64], out: &mut [Complex64]) {
        let n = f.len();
        out[0] = Complex64::new(0.0, 0.0);
        out[n - 1] = Complex64::new(0.0, 0.0);
        matvec(&self.bm, &f[1..n - 1], &mut out[1..n - 1]);
    }
}

/// Homogeneous stepper for a single wavenumber (`F = 0`).
#[derive(Debug)]
pub struct ModeStepper {
    ops: ModeOps,
    phase: Vec<Complex64>,
    dt: f64,
}

impl ModeStepper {
    pub fn new(cheb: &ChebyshevY, nu: f64, dt: f64, k: f64) -> Result<Self> {
        let phase = cheb
            .nodes()
            .iter()
            .map(|y| Complex64::from_polar(1.0, -k * y * dt / 2.0))
            .collect();
        Ok(Self {
            ops: ModeOps::new(cheb, nu, dt, k)?,
            phase,
            dt,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn step(&self, f: &mut [Complex64]) {
        for (v, p) in f.iter_mut().zip(&self.phase) {
            *v *= p;
        }
        let mut out = vec![Complex64::new(0.0, 0.0); f.len()];
        self.ops.apply_b(f, &mut out);
        for ((v, o), p) in f.iter_mut().zip(&out).zip(&self.phase) {
            *v = o * p;
        }
    }
}

/// Operators of one step size for every active mode of a grid.
#[derive(Debug)]
pub struct Scheme {
    grid: Arc<Grid>,
    nu: f64,
    dt: f64,
    ops: Vec<Option<Arc<ModeOps>>>,
    phase: Vec<Vec<Complex64>>,
}

impl Scheme {
    pub fn new(grid: &Arc<Grid>, nu: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt = {dt} must be positive")));
        }
        let nx = grid.nx();
        let cheb = grid.cheb().clone();
        let mut keys: Vec<(u64, f64)> = (0..nx)
            .filter(|&j| grid.is_active(j))
            .map(|j| (grid.k(j).abs().to_bits(), grid.k(j).abs()))
            .collect();
        keys.sort_by_key(|p| p.0);
        keys.dedup_by_key(|p| p.0);
        let built: Vec<Result<(u64, Arc<ModeOps>)>> = keys
            .par_iter()
            .map(|&(b, k)| Ok((b, Arc::new(ModeOps::new(&cheb, nu, dt, k)?))))
            .collect();
        let mut map = HashMap::new();
        for r in built {
            let (b, o) = r?;
            map.insert(b, o);
        }
        let ops = (0..nx)
            .map(|j| {
                if grid.is_active(j) {
                    Some(map[&grid.k(j).abs().to_bits()].clone())
                } else {
                    None
                }
            })
            .collect();
        let ys = grid.y_nodes();
        let phase = (0..nx)
            .map(|j| {
                ys.iter()
                    .map(|y| Complex64::from_polar(1.0, -grid.k(j) * y * dt / 2.0))
                    .collect()
            })
            .collect();
        Ok(Self {
            grid: grid.clone(),
            nu,
            dt,
            ops,
            phase,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Multiply by `e^{-iky dt/2}` and zero inactive modes.
    pub fn half_phase(&self, f: &mut Field) {
        f.rows_mut().into_par_iter().enumerate().for_each(|(j, row)| {
            if self.ops[j].is_none() {
                row.fill(Complex64::new(0.0, 0.0));
                return;
            }
            for (v, p) in row.iter_mut().zip(&self.phase[j]) {
                *v *= p;
            }
        });
    }

    /// `A⁻¹(f - s g)`.
    pub fn predictor(&self, f: &Field, s: f64, g: &Field) -> Field {
        let mut out = Field::zeros(&self.grid, Frame::Spectral);
        out.rows_mut().into_par_iter().enumerate().for_each(|(j, row)| {
            if let Some(op) = &self.ops[j] {
                let rhs: Vec<Complex64> = f.row(j).iter().zip(g.row(j)).map(|(a, b)| a - b * s).collect();
                op.solve_a(&rhs, row);
            }
        });
        out
    }

    /// `B f - s A⁻¹ g`.
    pub fn corrector(&self, f: &Field, s: f64, g: &Field) -> Field {
        let mut out = Field::zeros(&self.grid, Frame::Spectral);
        out.rows_mut().into_par_iter().enumerate().for_each(|(j, row)| {
            if let Some(op) = &self.ops[j] {
                op.b_minus(f.row(j), s, g.row(j), row);
            }
        });
        out
    }

    /// One step of the homogeneous problem (`F = 0`).
    pub fn step_linear(&self, omega: &Field) -> Field {
        let mut star = omega.to_spectral();
        self.half_phase(&mut star);
        let mut out = Field::zeros(&self.grid, Frame::Spectral);
        out.rows_mut().into_par_iter().enumerate().for_each(|(j, row)| {
            if let Some(op) = &self.ops[j] {
                op.apply_b(star.row(j), row);
            }
        });
        self.half_phase(&mut out);
        out
    }

    /// One full step from time `t`. `forcing(t_mid, state)` returns `F` in the spectral frame.
    pub fn step(
        &self,
        omega: &Field,
        t: f64,
        mut forcing: impl FnMut(f64, &Field) -> Result<Field>,
    ) -> Result<Field> {
        let dt = self.dt;
        let tm = t + 0.5 * dt;
        let mut star = omega.to_spectral();
        self.half_phase(&mut star);
        let f0 = forcing(tm, &star)?;
        let mid = self.predictor(&star, 0.5 * dt, &f0);
        let f1 = forcing(tm, &mid)?;
        let mut out = self.corrector(&star, dt, &f1);
        self.half_phase(&mut out);
        Ok(out)
    }
}
