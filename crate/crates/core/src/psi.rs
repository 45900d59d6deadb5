//! Numerical checks of the streamfunction decay inequalities for sheared profiles.
//!
//! Input is the sheared-frame profile `h = e^{ikyt} w`, so the right-hand sides
//! `‖(∂_y, κ)^j (e^{ikyt} w)‖` are norms of `h` and the solve runs on `w = e^{-ikyt} h`.
//! Here `ψ = -(∂²_y - k²)⁻¹ w`, the opposite sign of [`HelmholtzSolver::solve`].
//!
//! Norms of stacked operators: `‖(∂_y, κ)^j g‖² = Σ_i C(j, i) κ^{2(j-i)} ‖∂^i_y g‖²`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elliptic::HelmholtzSolver;
use crate::error::Result;
use crate::grid::ChebyshevY;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PsiRatio {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub enum PsiReport {
    Vacuous,
    Ratios { k: f64, t: f64, rows: Vec<PsiRatio> },
}

impl PsiReport {
    pub fn max_ratio(&self) -> f64 {
        match self {
            PsiReport::Vacuous => 0.0,
            PsiReport::Ratios { rows, .. } => rows.iter().fold(0.0, |m, r| m.max(r.ratio)),
        }
    }
}

/// `‖(∂_y, κ)^j g‖`.
pub fn stacked_norm(cheb: &ChebyshevY, g: &[Complex64], kappa: f64, j: usize) -> f64 {
    let binom = [[1.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0], [1.0, 2.0, 1.0, 0.0], [1.0, 3.0, 3.0, 1.0]];
    let mut d = g.to_vec();
    let mut total = 0.0;
    for i in 0..=j {
        if i > 0 {
            d = cheb.d1_of(&d);
        }
        total += binom[j][i] * kappa.powi(2 * (j - i) as i32) * cheb.norm_sq(&d);
    }
    total.sqrt()
}

pub fn check_psi_inequalities(
    solver: &HelmholtzSolver,
    h: &[Complex64],
    k: f64,
    t: f64,
) -> Result<PsiReport> {
    let cheb = solver.cheb().clone();
    if cheb.norm(h) == 0.0 {
        return Ok(PsiReport::Vacuous);
    }
    let ys = cheb.nodes();
    let w: Vec<Complex64> = h
        .iter()
        .zip(ys)
        .map(|(v, y)| v * Complex64::from_polar(1.0, -k * y * t))
        .collect();
    let psi: Vec<Complex64> = solver.solve(&w, k)?.into_iter().map(|v| -v).collect();
    let ikt = Complex64::new(0.0, k * t);
    let dpsi = cheb.d1_of(&psi);
    // ∂_y ψ + ikt ψ
    let shear: Vec<Complex64> = dpsi.iter().zip(&psi).map(|(d, p)| d + ikt * p).collect();

    let ka = k.abs();
    let mut rows = Vec::new();
    let mut push = |name: &str, lhs: f64, rhs: f64| {
        rows.push(PsiRatio {
            name: name.to_string(),
            lhs,
            rhs,
            ratio: if rhs > 0.0 { lhs / rhs } else { f64::INFINITY },
        })
    };
    if ka >= 1.0 {
        let d1 = 1.0 / (1.0 + t);
        let d2 = d1 * d1;
        push(
            "k2_grad_psi",
            ka.powi(2) * stacked_norm(&cheb, &psi, ka, 1),
            d1 * stacked_norm(&cheb, h, ka, 1),
        );
        push(
            "k2_grad_shear_psi",
            ka.powi(2) * stacked_norm(&cheb, &shear, ka, 1),
            d1 * stacked_norm(&cheb, h, ka, 2),
        );
        push("k4_psi", ka.powi(4) * cheb.norm(&psi), d2 * stacked_norm(&cheb, h, ka, 2));
        push("k4_shear_psi", ka.powi(4) * cheb.norm(&shear), d2 * stacked_norm(&cheb, h, ka, 3));
    }
    if ka <= 1.0 {
        let d1 = 1.0 / (1.0 + ka * t);
        let d2 = d1 * d1;
        push("grad_psi", stacked_norm(&cheb, &psi, 1.0, 1), d1 * stacked_norm(&cheb, h, 1.0, 1));
        push(
            "grad_shear_psi",
            stacked_norm(&cheb, &shear, 1.0, 1),
            d1 * stacked_norm(&cheb, h, 1.0, 2),
        );
        push("psi", cheb.norm(&psi), d2 * stacked_norm(&cheb, h, 1.0, 2));
        push("shear_psi", cheb.norm(&shear), d2 * stacked_norm(&cheb, h, 1.0, 3));
    }
    Ok(PsiReport::Ratios { k, t, rows })
}

/// Largest `|k t|` the `n`-node grid resolves for these checks.
pub fn resolvable_kt(n: usize) -> f64 {
    (n as f64 - 32.0).max(0.0) / 1.5
}
