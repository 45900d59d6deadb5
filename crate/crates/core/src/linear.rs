//! Closed-form linear part `ω_L` and its source `E_r`.
//!
//! Mode by mode, `ŵ_L(t, k, y) = e^{-νt - νk²t³/3} e^{-ikyt} ŵ_in(k, y)`, applied at the
//! collocation nodes exactly.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::elliptic::{velocity_from_psi, HelmholtzSolver};
use crate::error::{Error, Result};
use crate::field::{Field, Frame};
use crate::psi::stacked_norm;
use crate::transport::nonlinear_term;

/// Modes whose amplitude factor times `‖ŵ_in‖` falls below this fraction of the largest
/// mode are skipped when propagating.
const NEGLIGIBLE: f64 = 1e-32;

#[derive(Clone, Debug)]
pub struct LinearState {
    omega_in: Field,
    nu: f64,
    /// `A_j(k) = ‖(∂_y, k)^j ŵ_in‖` for `j = 0..=3`, in FFT order.
    pub a: Vec<[f64; 4]>,
    max_mode: f64,
}

/// `e^{-νt - νk²t³/3}`.
pub fn amplitude_factor(nu: f64, k: f64, t: f64) -> f64 {
    (-nu * t - nu * k * k * t * t * t / 3.0).exp()
}

impl LinearState {
    /// `omega_in` may be in either frame; its wall trace must vanish.
    pub fn new(omega_in: &Field, nu: f64) -> Result<Self> {
        let trace = omega_in.boundary_trace();
        let scale = omega_in.max_abs().max(1e-300);
        if trace > 1e-10 * scale.max(1.0) {
            return Err(Error::BoundaryTrace { value: trace, tol: 1e-10 });
        }
        let w = omega_in.to_spectral();
        let g = w.grid().clone();
        let cheb = g.cheb().clone();
        let a: Vec<[f64; 4]> = (0..g.nx())
            .into_par_iter()
            .map(|j| {
                let r = w.row(j);
                let k = g.k(j).abs();
                [0, 1, 2, 3].map(|p| stacked_norm(&cheb, r, k, p))
            })
            .collect();
        let max_mode = a.iter().fold(0.0f64, |m, v| m.max(v[0]));
        Ok(Self {
            omega_in: w,
            nu,
            a,
            max_mode,
        })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn omega_in(&self) -> &Field {
        &self.omega_in
    }

    pub fn grid(&self) -> &Arc<crate::grid::Grid> {
        self.omega_in.grid()
    }

    fn negligible(&self, j: usize, factor: f64) -> bool {
        factor * self.a[j][0] <= NEGLIGIBLE * self.max_mode
    }

    /// Apply `m(j, factor, y)` times `ŵ_in` mode by mode, where `factor` is the amplitude factor.
    fn map_modes(&self, t: f64, f: impl Fn(usize, f64, &[Complex64], &mut [Complex64]) + Sync) -> Field {
        let g = self.grid().clone();
        let mut out = Field::zeros(&g, Frame::Spectral);
        out.rows_mut().into_par_iter().enumerate().for_each(|(j, row)| {
            let fac = amplitude_factor(self.nu, g.k(j), t);
            if self.negligible(j, fac) {
                return;
            }
            f(j, fac, self.omega_in.row(j), row);
        });
        out
    }

    /// `ω_L(t)` in the spectral frame.
    pub fn propagate(&self, t: f64) -> Field {
        let g = self.grid().clone();
        let ys = g.y_nodes().to_vec();
        self.map_modes(t, |j, fac, w, out| {
            let k = g.k(j);
            for ((o, v), y) in out.iter_mut().zip(w).zip(&ys) {
                *o = v * Complex64::from_polar(fac, -k * y * t);
            }
        })
    }

    /// `(∂_y + t∂_x) ω_L = e^{-ikyt} · factor · ∂_y ŵ_in`, exact at the nodes.
    pub fn shear_derivative(&self, t: f64) -> Field {
        let g = self.grid().clone();
        let cheb = g.cheb().clone();
        let ys = g.y_nodes().to_vec();
        self.map_modes(t, |j, fac, w, out| {
            let k = g.k(j);
            let dw = cheb.d1_of(w);
            for ((o, v), y) in out.iter_mut().zip(&dw).zip(&ys) {
                *o = v * Complex64::from_polar(fac, -k * y * t);
            }
        })
    }

    /// `Ê_{r_L} = -ν(1 + t²k²) ŵ_L - ν(∂²_y - k²) ŵ_L`.
    pub fn e_rl(&self, t: f64) -> Field {
        let wl = self.propagate(t);
        e_rl_of(&wl, self.nu, t)
    }

    /// `E_r = E_{r_L} + u_L·∇ω_L`, spectral frame.
    pub fn compute_er(&self, t: f64, solver: &HelmholtzSolver) -> Result<Field> {
        let wl = self.propagate(t);
        let mut er = e_rl_of(&wl, self.nu, t);
        let psi = solver.streamfunction(&wl)?;
        let (u1, u2) = velocity_from_psi(&psi);
        let adv = nonlinear_term(&wl, &u1, &u2)?;
        er.axpy(1.0, &adv)?;
        Ok(er)
    }
}

/// `E_{r_L}` for a given `ω_L(t)`.
pub fn e_rl_of(wl: &Field, nu: f64, t: f64) -> Field {
    let g = wl.grid().clone();
    let cheb = g.cheb().clone();
    let mut out = Field::zeros(&g, Frame::Spectral);
    out.rows_mut().into_par_iter().enumerate().for_each(|(j, row)| {
        let w = wl.row(j);
        if w.iter().all(|v| v.norm_sqr() == 0.0) {
            return;
        }
        let k = g.k(j);
        let d2 = cheb.derivative(w, 2).expect("order 2");
        let c0 = -nu * (1.0 + t * t * k * k) + nu * k * k;
        for ((o, v), d) in row.iter_mut().zip(w).zip(&d2) {
            *o = v * c0 - d * nu;
        }
    });
    out
}

/// Hypocoercivity functional and its lower comparator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Phi {
    pub value: f64,
    pub comparator: f64,
}

pub const GAMMA0: f64 = 1.0 / 600.0;
pub const ALPHA0: f64 = 12.0 * GAMMA0;
pub const BETA0: f64 = 5.0 * GAMMA0;

/// `Φ_k = (1 + γ₀νk²t³)‖f‖² + α₀νt‖(∂_y,k)f‖² + β₀νt² Re⟨ikf, ∂_y f⟩`.
pub fn phi_functional(cheb: &crate::grid::ChebyshevY, f: &[Complex64], k: f64, t: f64, nu: f64) -> Phi {
    let n0 = cheb.norm_sq(f);
    let df = cheb.d1_of(f);
    let grad = cheb.norm_sq(&df) + k * k * n0;
    let ikf: Vec<Complex64> = f.iter().map(|v| v * Complex64::new(0.0, k)).collect();
    let cross = cheb.inner(&ikf, &df).re;
    let value = (1.0 + GAMMA0 * nu * k * k * t.powi(3)) * n0 + ALPHA0 * nu * t * grad + BETA0 * nu * t * t * cross;
    let comparator = (1.0 + GAMMA0 * nu * k * k * t.powi(3) / 4.0) * n0 + ALPHA0 * nu * t * grad / 4.0;
    Phi { value, comparator }
}
