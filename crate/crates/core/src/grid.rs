//! Discretization of the channel: a periodic box in `x` and Chebyshev–Gauss–Lobatto
//! collocation in `y`.
//!
//! Spectral-x data is stored in FFT order: row `j` carries wavenumber
//! `2π m / L_x` with `m = j` for `j < n_x/2` and `m = j - n_x` otherwise.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Chebyshev–Gauss–Lobatto nodes on `[-1, 1]` with Clenshaw–Curtis weights and dense
/// differentiation matrices.
pub struct ChebyshevY {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    bary: Vec<f64>,
    d1: Array2<f64>,
    d2: Array2<f64>,
    d3: Array2<f64>,
}

impl fmt::Debug for ChebyshevY {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChebyshevY").field("n", &self.len()).finish()
    }
}

impl ChebyshevY {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidGrid(format!("n_y = {n} is too small")));
        }
        let nn = (n - 1) as f64;
        // sin form keeps the nodes exactly antisymmetric and hits y = 0 exactly
        let nodes: Vec<f64> = (0..n)
            .map(|m| (PI * (nn - 2.0 * m as f64) / (2.0 * nn)).sin())
            .collect();
        let weights = clenshaw_curtis_weights(n);
        let bary: Vec<f64> = (0..n)
            .map(|m| {
                let s = if m % 2 == 0 { 1.0 } else { -1.0 };
                if m == 0 || m == n - 1 {
                    0.5 * s
                } else {
                    s
                }
            })
            .collect();
        let d1 = cheb_diff_matrix(n);
        let d2 = with_zero_row_sums(d1.dot(&d1));
        let d3 = with_zero_row_sums(d2.dot(&d1));
        Ok(Self {
            nodes,
            weights,
            bary,
            d1,
            d2,
            d3,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes `cos(π m / (n-1))`, strictly decreasing from `1` to `-1`.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn d1(&self) -> &Array2<f64> {
        &self.d1
    }

    pub fn d2(&self) -> &Array2<f64> {
        &self.d2
    }

    /// Differentiation matrix of the given order (1, 2 or 3).
    pub fn diff_matrix(&self, order: usize) -> Result<&Array2<f64>> {
        match order {
            1 => Ok(&self.d1),
            2 => Ok(&self.d2),
            3 => Ok(&self.d3),
            o => Err(Error::UnsupportedOrder(o)),
        }
    }

    /// `order`-th derivative of nodal values.
    pub fn derivative(&self, v: &[Complex64], order: usize) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        if order == 0 {
            out.copy_from_slice(v);
            return Ok(out);
        }
        matvec(self.diff_matrix(order)?, v, &mut out);
        Ok(out)
    }

    pub fn d1_of(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        matvec(&self.d1, v, &mut out);
        out
    }

    /// `∫ a conj(b) dy` by Clenshaw–Curtis.
    pub fn inner(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for ((w, x), y) in self.weights.iter().zip(a).zip(b) {
            acc += x * y.conj() * *w;
        }
        acc
    }

    pub fn norm_sq(&self, a: &[Complex64]) -> f64 {
        self.weights
            .iter()
            .zip(a)
            .map(|(w, x)| w * x.norm_sqr())
            .sum()
    }

    pub fn norm(&self, a: &[Complex64]) -> f64 {
        self.norm_sq(a).sqrt()
    }

    /// Lagrange basis values `ℓ_m(z)` of the nodal interpolant, via the barycentric formula.
    pub fn lagrange_row(&self, z: f64) -> Vec<f64> {
        let mut row = vec![0.0; self.len()];
        for (m, &y) in self.nodes.iter().enumerate() {
            if (z - y).abs() < 1e-15 {
                row[m] = 1.0;
                return row;
            }
        }
        let mut denom = 0.0;
        for (m, (&y, &b)) in self.nodes.iter().zip(&self.bary).enumerate() {
            let c = b / (z - y);
            row[m] = c;
            denom += c;
        }
        for r in &mut row {
            *r /= denom;
        }
        row
    }

    /// Evaluate the polynomial interpolant of nodal values at `z`.
    pub fn interpolate(&self, v: &[Complex64], z: f64) -> Complex64 {
        self.lagrange_row(z)
            .iter()
            .zip(v)
            .map(|(l, x)| x * *l)
            .sum()
    }
}

/// Dense real matrix times complex vector.
pub fn matvec(m: &Array2<f64>, x: &[Complex64], out: &mut [Complex64]) {
    let n = x.len();
    debug_assert_eq!(m.ncols(), n);
    for (i, o) in out.iter_mut().enumerate() {
        let row = m.row(i);
        let row = row.as_slice().expect("row-major matrix");
        let (mut re, mut im) = (0.0, 0.0);
        for (a, v) in row.iter().zip(x) {
            re += a * v.re;
            im += a * v.im;
        }
        *o = Complex64::new(re, im);
    }
}

fn cheb_diff_matrix(n: usize) -> Array2<f64> {
    let nn = (n - 1) as f64;
    let theta = |i: usize| PI * i as f64 / nn;
    let c = |i: usize| {
        let s = if i % 2 == 0 { 1.0 } else { -1.0 };
        if i == 0 || i == n - 1 {
            2.0 * s
        } else {
            s
        }
    };
    let mut d = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            if i != j {
                // x_i - x_j = 2 sin((θ_i+θ_j)/2) sin((θ_j-θ_i)/2), free of cancellation
                let diff = 2.0 * ((theta(i) + theta(j)) / 2.0).sin() * ((theta(j) - theta(i)) / 2.0).sin();
                d[[i, j]] = c(i) / c(j) / diff;
            }
        }
    }
    with_zero_row_sums(d)
}

/// Replace the diagonal by minus the off-diagonal row sum, so constants map to zero.
fn with_zero_row_sums(mut d: Array2<f64>) -> Array2<f64> {
    let n = d.nrows();
    for i in 0..n {
        let mut s = 0.0;
        for j in 0..n {
            if i != j {
                s += d[[i, j]];
            }
        }
        d[[i, i]] = -s;
    }
    d
}

/// Clenshaw–Curtis weights on the `n` Chebyshev–Gauss–Lobatto nodes of `[-1, 1]`.
pub fn clenshaw_curtis_weights(n: usize) -> Vec<f64> {
    let nn = n - 1;
    let nf = nn as f64;
    let mut w = vec![0.0; n];
    if nn == 0 {
        w[0] = 2.0;
        return w;
    }
    let mut v = vec![1.0; nn.saturating_sub(1)];
    if nn % 2 == 0 {
        w[0] = 1.0 / (nf * nf - 1.0);
        w[nn] = w[0];
        for k in 1..nn / 2 {
            for (i, vi) in v.iter_mut().enumerate() {
                let th = PI * (i + 1) as f64 / nf;
                *vi -= 2.0 * (2.0 * k as f64 * th).cos() / (4.0 * (k * k) as f64 - 1.0);
            }
        }
        for (i, vi) in v.iter_mut().enumerate() {
            let th = PI * (i + 1) as f64 / nf;
            *vi -= (nf * th).cos() / (nf * nf - 1.0);
        }
    } else {
        w[0] = 1.0 / (nf * nf);
        w[nn] = w[0];
        for k in 1..=(nn - 1) / 2 {
            for (i, vi) in v.iter_mut().enumerate() {
                let th = PI * (i + 1) as f64 / nf;
                *vi -= 2.0 * (2.0 * k as f64 * th).cos() / (4.0 * (k * k) as f64 - 1.0);
            }
        }
    }
    for (i, vi) in v.iter().enumerate() {
        w[i + 1] = 2.0 * vi / nf;
    }
    w
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Newton iteration on `P_n`).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Periodic box in `x` times Chebyshev collocation in `y`.
pub struct Grid {
    lx: f64,
    nx: usize,
    k: Vec<f64>,
    cheb: Arc<ChebyshevY>,
    fft_fwd: Arc<dyn Fft<f64>>,
    fft_inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("lx", &self.lx)
            .field("nx", &self.nx)
            .field("ny", &self.ny())
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.lx == other.lx && self.nx == other.nx && self.ny() == other.ny()
    }
}

impl Grid {
    pub fn new(lx: f64, nx: usize, ny: usize) -> Result<Arc<Self>> {
        if !(lx > 0.0 && lx.is_finite()) {
            return Err(Error::InvalidGrid(format!("L_x = {lx} must be positive")));
        }
        if nx % 2 != 0 {
            return Err(Error::InvalidGrid(format!("n_x = {nx} must be even")));
        }
        if nx < 8 {
            return Err(Error::InvalidGrid(format!("n_x = {nx} must be at least 8")));
        }
        if ny < 8 {
            return Err(Error::InvalidGrid(format!("n_y = {ny} must be at least 8")));
        }
        let k = (0..nx)
            .map(|j| 2.0 * PI * signed_index(j, nx) as f64 / lx)
            .collect();
        let mut planner = FftPlanner::new();
        Ok(Arc::new(Self {
            lx,
            nx,
            k,
            cheb: Arc::new(ChebyshevY::new(ny)?),
            fft_fwd: planner.plan_fft_forward(nx),
            fft_inv: planner.plan_fft_inverse(nx),
        }))
    }

    pub fn lx(&self) -> f64 {
        self.lx
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.cheb.len()
    }

    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    /// Wavenumbers in FFT order.
    pub fn k_values(&self) -> &[f64] {
        &self.k
    }

    pub fn k(&self, j: usize) -> f64 {
        self.k[j]
    }

    pub fn k_min(&self) -> f64 {
        2.0 * PI / self.lx
    }

    /// Signed mode index `m` of FFT row `j`.
    pub fn mode(&self, j: usize) -> i64 {
        signed_index(j, self.nx)
    }

    /// Largest retained mode index under the 2/3 rule: `3 m_cut < n_x`.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.nx as i64 - 1) / 3
    }

    pub fn is_active(&self, j: usize) -> bool {
        self.mode(j).abs() <= self.dealias_cutoff()
    }

    /// Largest |k| kept by the dealiasing rule.
    pub fn k_max_active(&self) -> f64 {
        2.0 * PI * self.dealias_cutoff() as f64 / self.lx
    }

    pub fn x_nodes(&self) -> Vec<f64> {
        (0..self.nx).map(|j| j as f64 * self.dx()).collect()
    }

    pub fn y_nodes(&self) -> &[f64] {
        self.cheb.nodes()
    }

    pub fn cheb(&self) -> &Arc<ChebyshevY> {
        &self.cheb
    }

    pub(crate) fn fft_forward(&self) -> &Arc<dyn Fft<f64>> {
        &self.fft_fwd
    }

    pub(crate) fn fft_inverse(&self) -> &Arc<dyn Fft<f64>> {
        &self.fft_inv
    }
}

fn signed_index(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_decrease_from_one_to_minus_one() {
        let c = ChebyshevY::new(17).unwrap();
        let y = c.nodes();
        assert_eq!(y[0], 1.0);
        assert_eq!(y[16], -1.0);
        assert!(y.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [8, 9, 33, 64, 65, 129] {
            let s: f64 = clenshaw_curtis_weights(n).iter().sum();
            assert!((s - 2.0).abs() < 1e-12, "n={n}: {s}");
        }
    }

    #[test]
    fn clenshaw_curtis_integrates_polynomials() {
        let c = ChebyshevY::new(21).unwrap();
        // ∫ y^6 = 2/7
        let v: f64 = c.nodes().iter().zip(c.weights()).map(|(y, w)| w * y.powi(6)).sum();
        assert!((v - 2.0 / 7.0).abs() < 1e-14);
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        for n in [8, 48, 65, 129] {
            let c = ChebyshevY::new(n).unwrap();
            let one = vec![Complex64::new(1.0, 0.0); n];
            let d = c.derivative(&one, 1).unwrap();
            assert!(d.iter().all(|z| z.norm() < 1e-10), "n={n}");
            // higher orders: zero up to round-off relative to the entry scale
            for order in 2..=3 {
                let scale = c.diff_matrix(order).unwrap().iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let d = c.derivative(&one, order).unwrap();
                assert!(d.iter().all(|z| z.norm() < 1e-13 * scale), "n={n} order={order}");
            }
        }
    }

    #[test]
    fn derivative_of_sine_matches_analytic() {
        let c = ChebyshevY::new(48).unwrap();
        let v: Vec<Complex64> = c.nodes().iter().map(|y| Complex64::new((PI * y).sin(), 0.0)).collect();
        let d = c.derivative(&v, 1).unwrap();
        let err = c
            .nodes()
            .iter()
            .zip(&d)
            .map(|(y, z)| (z.re - PI * (PI * y).cos()).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "max error {err}");
    }

    #[test]
    fn gauss_legendre_is_exact_for_high_degree() {
        let (x, w) = gauss_legendre(12);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(22)).sum();
        assert!((s - 2.0 / 23.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn interpolation_reproduces_polynomials() {
        let c = ChebyshevY::new(12).unwrap();
        let v: Vec<Complex64> = c.nodes().iter().map(|y| Complex64::new(y.powi(5) - y, 0.0)).collect();
        let z = 0.3141;
        let p = c.interpolate(&v, z);
        assert!((p.re - (z.powi(5) - z)).abs() < 1e-13);
    }

    #[test]
    fn make_grid_examples() {
        let g = Grid::new(2.0 * PI, 8, 9).unwrap();
        let mut ks: Vec<i64> = g.k_values().iter().map(|k| k.round() as i64).collect();
        ks.sort();
        assert_eq!(ks, vec![-4, -3, -2, -1, 0, 1, 2, 3]);

        let g = Grid::new(2.0 * PI * 1000.0, 256, 65).unwrap();
        let kmin = g
            .k_values()
            .iter()
            .filter(|k| **k != 0.0)
            .fold(f64::INFINITY, |m, k| m.min(k.abs()));
        assert!((kmin - 0.001).abs() < 1e-15);

        assert!(matches!(Grid::new(2.0 * PI, 7, 9), Err(Error::InvalidGrid(_))));
        assert!(Grid::new(0.0, 8, 9).is_err());
        assert!(Grid::new(1.0, 8, 4).is_err());
        assert!(Grid::new(1.0, 6, 9).is_err());
    }

    #[test]
    fn dealias_band_satisfies_two_thirds_rule() {
        let g = Grid::new(1.0, 512, 9).unwrap();
        assert_eq!(g.dealias_cutoff(), 170);
        assert!(3 * g.dealias_cutoff() < 512);
    }
}
