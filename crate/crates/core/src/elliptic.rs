//! Streamfunction solves `(∂²_y - k²)ψ = w`, `ψ(±1) = 0`, velocity recovery, the Green's
//! function `G_k` and the boundary harmonics `γ_{±1}`.
//!
//! Sign convention: [`HelmholtzSolver::solve`] returns `ψ` with `(∂²_y - k²)ψ = w`, so
//! `ψ = Δ⁻¹ω` mode by mode and `u = (∂_y ψ, -∂_x ψ)`.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use nalgebra::DMatrix;
use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{Field, Frame};
use crate::grid::{gauss_legendre, matvec, ChebyshevY, Grid};

/// Inverse of `a·I + b·(D² - k²)` restricted to interior nodes, as an `(n-2)²` matrix.
pub fn interior_inverse(cheb: &ChebyshevY, a: f64, b: f64, k: f64) -> Result<Array2<f64>> {
    let n = cheb.len();
    let m = n - 2;
    let d2 = cheb.d2();
    let mat = DMatrix::from_fn(m, m, |i, j| {
        let diag = if i == j { a - b * k * k } else { 0.0 };
        diag + b * d2[[i + 1, j + 1]]
    });
    let inv = mat.try_inverse().ok_or(Error::Singular(k))?;
    Ok(Array2::from_shape_fn((m, m), |(i, j)| inv[(i, j)]))
}

/// Apply an interior inverse to `rhs`, writing zeros on the walls.
pub fn apply_interior(inv: &Array2<f64>, rhs: &[Complex64], out: &mut [Complex64]) {
    let n = rhs.len();
    out[0] = Complex64::new(0.0, 0.0);
    out[n - 1] = Complex64::new(0.0, 0.0);
    matvec(inv, &rhs[1..n - 1], &mut out[1..n - 1]);
}

/// Cache of factorized `(D² - k²)` per `|k|`, shared across threads.
#[derive(Debug)]
pub struct HelmholtzSolver {
    cheb: Arc<ChebyshevY>,
    cache: RwLock<HashMap<u64, Arc<Array2<f64>>>>,
}

impl HelmholtzSolver {
    pub fn new(cheb: Arc<ChebyshevY>) -> Self {
        Self {
            cheb,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn for_grid(grid: &Grid) -> Self {
        Self::new(grid.cheb().clone())
    }

    pub fn cheb(&self) -> &Arc<ChebyshevY> {
        &self.cheb
    }

    fn inverse(&self, k: f64) -> Result<Arc<Array2<f64>>> {
        let key = k.abs().to_bits();
        if let Some(m) = self.cache.read().expect("cache lock").get(&key) {
            return Ok(m.clone());
        }
        let mut w = self.cache.write().expect("cache lock");
        if let Some(m) = w.get(&key) {
            return Ok(m.clone());
        }
        let m = Arc::new(interior_inverse(&self.cheb, 0.0, 1.0, k.abs())?);
        w.insert(key, m.clone());
        Ok(m)
    }

    /// `ψ` with `(∂²_y - k²)ψ = w` at interior nodes and `ψ(±1) = 0`.
    pub fn solve(&self, w: &[Complex64], k: f64) -> Result<Vec<Complex64>> {
        let inv = self.inverse(k)?;
        let mut out = vec![Complex64::new(0.0, 0.0); w.len()];
        apply_interior(&inv, w, &mut out);
        Ok(out)
    }

    /// Streamfunction of a spectral-frame field, mode by mode.
    pub fn streamfunction(&self, omega: &Field) -> Result<Field> {
        if omega.frame() != Frame::Spectral {
            return Err(Error::FrameMismatch {
                expected: Frame::Spectral,
                found: omega.frame(),
            });
        }
        let g = omega.grid().clone();
        let mut psi = Field::zeros(&g, Frame::Spectral);
        let rows: Vec<Result<()>> = psi
            .rows_mut()
            .into_par_iter()
            .enumerate()
            .map(|(j, row)| {
                let w = omega.row(j);
                if w.iter().all(|v| *v == Complex64::new(0.0, 0.0)) {
                    return Ok(());
                }
                let inv = self.inverse(g.k(j))?;
                apply_interior(&inv, w, row);
                Ok(())
            })
            .collect();
        rows.into_iter().collect::<Result<()>>()?;
        Ok(psi)
    }

    /// `(u1, u2) = (∂_y ψ, -ik ψ)` in the spectral frame.
    pub fn velocity(&self, omega: &Field) -> Result<(Field, Field)> {
        let psi = self.streamfunction(omega)?;
        Ok(velocity_from_psi(&psi))
    }
}

pub fn velocity_from_psi(psi: &Field) -> (Field, Field) {
    let g = psi.grid().clone();
    let cheb = g.cheb().clone();
    let mut u1 = Field::zeros(&g, Frame::Spectral);
    let mut u2 = Field::zeros(&g, Frame::Spectral);
    u1.rows_mut()
        .into_par_iter()
        .zip(u2.rows_mut().into_par_iter())
        .enumerate()
        .for_each(|(j, (r1, r2))| {
            let p = psi.row(j);
            matvec(cheb.d1(), p, r1);
            let mik = Complex64::new(0.0, -g.k(j));
            for (o, v) in r2.iter_mut().zip(p) {
                *o = mik * v;
            }
        });
    (u1, u2)
}

/// `sinh(a) sinh(b) / sinh(c)` for `0 ≤ a, b` and `a + b ≤ c`, without overflow.
fn sinh_ratio(a: f64, b: f64, c: f64) -> f64 {
    (a + b - c).exp() * (-2.0 * a).exp_m1() * (-2.0 * b).exp_m1() / (-2.0 * (-2.0 * c).exp_m1())
}

/// Green's function of `∂²_y - k²` with Dirichlet walls:
/// `G_k(y, y') = -sinh(k(1 - y_>)) sinh(k(1 + y_<)) / (k sinh 2k)`.
pub fn green(k: f64, y: f64, yp: f64) -> f64 {
    let (lo, hi) = if y <= yp { (y, yp) } else { (yp, y) };
    let k = k.abs();
    if k == 0.0 {
        return -(1.0 - hi) * (1.0 + lo) / 2.0;
    }
    -sinh_ratio(k * (1.0 - hi), k * (1.0 + lo), 2.0 * k) / k
}

/// Solve `(∂²_y - k²)ψ = w` through `ψ(y) = ∫ G_k(y, y') w(y') dy'`, splitting the
/// integral at `y` and using Gauss–Legendre on each side with the Chebyshev interpolant of `w`.
pub fn green_solve(cheb: &ChebyshevY, w: &[Complex64], k: f64, order: usize) -> Vec<Complex64> {
    let (gx, gw) = gauss_legendre(order);
    cheb.nodes()
        .iter()
        .map(|&y| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, b) in [(-1.0, y), (y, 1.0)] {
                let h = 0.5 * (b - a);
                if h <= 0.0 {
                    continue;
                }
                for (x, wq) in gx.iter().zip(&gw) {
                    let z = a + h * (x + 1.0);
                    acc += cheb.interpolate(w, z) * (green(k, y, z) * wq * h);
                }
            }
            acc
        })
        .collect()
}

/// Boundary harmonic `γ_j(y) = sinh(k(y + j)) / (j sinh 2k)`, `j = ±1`, with the
/// affine limit `(y + j)/(2j)` at `k = 0`.
pub fn boundary_harmonic(k: f64, j: i32, y: f64) -> Result<f64> {
    if j != 1 && j != -1 {
        return Err(Error::InvalidArgument(format!("j = {j} must be ±1")));
    }
    let jf = j as f64;
    let k = k.abs();
    // distance from the wall where γ_j vanishes, in [0, 2]
    let a = (y + jf) * jf;
    if k == 0.0 {
        return Ok(a / 2.0);
    }
    let (ka, kc) = (k * a, 2.0 * k);
    Ok((ka - kc).exp() * (-2.0 * ka).exp_m1() / (-2.0 * kc).exp_m1())
}

pub fn boundary_harmonic_profile(cheb: &ChebyshevY, k: f64, j: i32) -> Result<Vec<f64>> {
    cheb.nodes().iter().map(|&y| boundary_harmonic(k, j, y)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn manufactured_solution() {
        let cheb = Arc::new(ChebyshevY::new(64).unwrap());
        let s = HelmholtzSolver::new(cheb.clone());
        let w: Vec<_> = cheb.nodes().iter().map(|y| c((PI * PI + 1.0) * (PI * y).sin())).collect();
        let psi = s.solve(&w, 1.0).unwrap();
        let exact: Vec<_> = cheb.nodes().iter().map(|y| c(-(PI * y).sin())).collect();
        let err: Vec<_> = psi.iter().zip(&exact).map(|(a, b)| a - b).collect();
        assert!(cheb.norm(&err) / cheb.norm(&exact) < 1e-8);
        assert!(psi[0].norm() <= 1e-12 && psi[63].norm() <= 1e-12);
    }

    #[test]
    fn green_spot_value_and_symmetry() {
        let want = -(1f64.sinh().powi(2)) / 2f64.sinh();
        assert!((green(1.0, 0.0, 0.0) - want).abs() < 1e-15);
        assert!((green(1.0, 0.0, 0.0) + 0.380_797).abs() < 1e-6);
        for &(y, yp) in &[(0.3, -0.2), (-0.9, 0.7), (0.1, 0.1)] {
            for &k in &[1e-3, 0.5, 10.0, 300.0] {
                assert!((green(k, y, yp) - green(k, yp, y)).abs() < 1e-12);
                assert_eq!(green(k, 1.0, yp), 0.0);
                assert_eq!(green(k, -1.0, yp), 0.0);
            }
        }
        assert!((green(0.0, 0.0, 0.0) + 0.5).abs() < 1e-15);
        assert!((green(1e-9, 0.2, 0.4) - green(0.0, 0.2, 0.4)).abs() < 1e-12);
    }

    #[test]
    fn boundary_harmonic_values() {
        assert!((boundary_harmonic(1.0, 1, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(boundary_harmonic(1.0, 1, -1.0).unwrap(), 0.0);
        assert!((boundary_harmonic(1.0, -1, -1.0).unwrap() - 1.0).abs() < 1e-15);
        let want = 1f64.sinh() / 2f64.sinh();
        assert!((boundary_harmonic(1.0, 1, 0.0).unwrap() - want).abs() < 1e-15);
        assert!((want - 0.324_027).abs() < 1e-6);
        assert!((boundary_harmonic(0.0, -1, 0.5).unwrap() - 0.25).abs() < 1e-15);
        assert!(boundary_harmonic(1.0, 2, 0.0).is_err());
    }

    #[test]
    fn energy_identity() {
        let cheb = Arc::new(ChebyshevY::new(48).unwrap());
        let s = HelmholtzSolver::new(cheb.clone());
        let k = 0.7;
        let w: Vec<_> = cheb
            .nodes()
            .iter()
            .map(|y| Complex64::new((1.0 - y * y) * (2.0 * y).exp(), (1.0 - y * y) * y))
            .collect();
        let psi = s.solve(&w, k).unwrap();
        let lhs = -cheb.inner(&psi, &w);
        let rhs = cheb.norm_sq(&cheb.d1_of(&psi)) + k * k * cheb.norm_sq(&psi);
        assert!((lhs.re - rhs).abs() < 1e-8 * rhs && lhs.im.abs() < 1e-8 * rhs);
    }
}
