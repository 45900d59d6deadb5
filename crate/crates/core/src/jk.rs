//! The singular operator
//! `J_k[f](y) = (k / 2i) p.v. ∫ G_k(y, y') f(y') / (y - y') dy'`.
//!
//! The principal value is split as
//! `G_k(y,y) H[f](y) + ∫ (G_k(y,y') - G_k(y,y)) / (y - y') f(y') dy'`, where
//! `H[f](y) = p.v. ∫ f(y') / (y - y') dy' = f(y) ln((1+y)/(1-y)) + ∫ (f(y') - f(y)) / (y - y') dy'`
//! is the finite Hilbert transform. Both remaining integrands are bounded.

use ndarray::Array2;
use num_complex::Complex64;

use crate::elliptic::green;
use crate::error::{Error, Result};
use crate::grid::{gauss_legendre, ChebyshevY};

/// Quadrature orders for the two pieces.
#[derive(Clone, Copy, Debug)]
pub struct JkQuadrature {
    pub hilbert: usize,
    pub smooth: usize,
}

impl JkQuadrature {
    pub fn for_nodes(n: usize) -> Self {
        Self {
            hilbert: 2 * (n + 8),
            smooth: 2 * n.max(48),
        }
    }
}

/// Real row `r` with `J_k[f](y) = (-ik/2) Σ_m r_m f_m` for the nodal interpolant `f`.
/// Returns zeros at the walls.
pub fn jk_row(cheb: &ChebyshevY, k: f64, y: f64, q: JkQuadrature) -> Vec<f64> {
    let n = cheb.len();
    let mut row = vec![0.0; n];
    if y >= 1.0 || y <= -1.0 {
        return row;
    }
    let gyy = green(k, y, y);

    // diagonal part: G(y,y) H[f](y)
    let l_here = cheb.lagrange_row(y);
    let logfac = ((1.0 + y) / (1.0 - y)).ln();
    for m in 0..n {
        row[m] += gyy * logfac * l_here[m];
    }
    let (hx, hw) = gauss_legendre(q.hilbert);
    for (z, wq) in hx.iter().zip(&hw) {
        let d = y - z;
        if d.abs() < 1e-12 {
            // removable point: (p(z) - p(y)) / (y - z) → -p'(y)
            let dl = derivative_row(cheb, y);
            for m in 0..n {
                row[m] -= gyy * wq * dl[m];
            }
            continue;
        }
        let l = cheb.lagrange_row(*z);
        for m in 0..n {
            row[m] += gyy * wq * (l[m] - l_here[m]) / d;
        }
    }

    // bounded difference quotient, split at the kink z = y
    let (sx, sw) = gauss_legendre(q.smooth);
    for (a, b) in [(-1.0, y), (y, 1.0)] {
        let h = 0.5 * (b - a);
        for (x, wq) in sx.iter().zip(&sw) {
            let z = a + h * (x + 1.0);
            let kern = (green(k, y, z) - gyy) / (y - z);
            let l = cheb.lagrange_row(z);
            for m in 0..n {
                row[m] += kern * wq * h * l[m];
            }
        }
    }
    row
}

/// Lagrange-basis derivatives at an arbitrary point, from the nodal derivative matrix.
fn derivative_row(cheb: &ChebyshevY, y: f64) -> Vec<f64> {
    let l = cheb.lagrange_row(y);
    let d = cheb.d1();
    let n = cheb.len();
    (0..n)
        .map(|m| (0..n).map(|i| l[i] * d[[i, m]]).sum())
        .collect()
}

/// Dense real matrix `R` with `J_k = (-ik/2) R` on the nodes.
pub fn jk_real_matrix(cheb: &ChebyshevY, k: f64) -> Result<Array2<f64>> {
    if k == 0.0 {
        return Err(Error::ZeroWavenumber);
    }
    let n = cheb.len();
    let q = JkQuadrature::for_nodes(n);
    let mut r = Array2::zeros((n, n));
    for (i, &y) in cheb.nodes().iter().enumerate() {
        let row = jk_row(cheb, k, y, q);
        for m in 0..n {
            r[[i, m]] = row[m];
        }
    }
    Ok(r)
}

/// `J_k[f]` at the nodes.
pub fn apply_jk(cheb: &ChebyshevY, f: &[Complex64], k: f64) -> Result<Vec<Complex64>> {
    let r = jk_real_matrix(cheb, k)?;
    let mut out = vec![Complex64::new(0.0, 0.0); f.len()];
    crate::grid::matvec(&r, f, &mut out);
    let fac = Complex64::new(0.0, -k / 2.0);
    Ok(out.into_iter().map(|v| v * fac).collect())
}

/// `J_k[f]` at arbitrary points `ys`.
pub fn apply_jk_at(cheb: &ChebyshevY, f: &[Complex64], k: f64, ys: &[f64]) -> Result<Vec<Complex64>> {
    if k == 0.0 {
        return Err(Error::ZeroWavenumber);
    }
    let q = JkQuadrature::for_nodes(cheb.len());
    let fac = Complex64::new(0.0, -k / 2.0);
    Ok(ys
        .iter()
        .map(|&y| {
            let row = jk_row(cheb, k, y, q);
            row.iter().zip(f).map(|(r, v)| v * *r).sum::<Complex64>() * fac
        })
        .collect())
}

/// Operator norm of `J_k` in `L²` on the interior nodes: largest singular value of
/// `W^{1/2} J W^{-1/2}` with Clenshaw–Curtis weights `W`.
pub fn jk_operator_norm(cheb: &ChebyshevY, k: f64) -> Result<f64> {
    let r = jk_real_matrix(cheb, k)?;
    let n = cheb.len();
    let w = cheb.weights();
    let m = n - 2;
    let scaled = nalgebra::DMatrix::from_fn(m, m, |i, j| {
        w[i + 1].sqrt() * r[[i + 1, j + 1]] / w[j + 1].sqrt()
    });
    let sv = scaled.singular_values();
    Ok(0.5 * k.abs() * sv.max())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_input_and_zero_wavenumber() {
        let cheb = ChebyshevY::new(16).unwrap();
        let z = vec![Complex64::new(0.0, 0.0); 16];
        assert!(apply_jk(&cheb, &z, 0.5).unwrap().iter().all(|v| v.norm() == 0.0));
        assert!(matches!(apply_jk(&cheb, &z, 0.0), Err(Error::ZeroWavenumber)));
    }

    #[test]
    fn hilbert_of_constant_is_log() {
        // k → 0 limit is not used here; check the diagonal piece through a constant input
        let cheb = ChebyshevY::new(24).unwrap();
        let q = JkQuadrature::for_nodes(24);
        let y = 0.37;
        let row = jk_row(&cheb, 1.0, y, q);
        let got: f64 = row.iter().sum();
        // ∫ G(y,y')/(y-y') dy' for f ≡ 1, by brute-force symmetric exclusion
        let (gx, gw) = gauss_legendre(4000);
        let mut want = 0.0;
        for (a, b) in [(-1.0, y), (y, 1.0)] {
            let h = 0.5 * (b - a);
            for (x, w) in gx.iter().zip(&gw) {
                let z = a + h * (x + 1.0);
                want += w * h * (green(1.0, y, z) - green(1.0, y, y)) / (y - z);
            }
        }
        want += green(1.0, y, y) * ((1.0 + y) / (1.0 - y)).ln();
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    }
}
