//! Complex arrays on a [`Grid`], tagged with their x-representation.
//!
//! Transform normalization follows the continuous pair
//! `f̂(k) = ∫ e^{-ikx} f dx`, `f(x) = (1/L_x) Σ_k f̂(k) e^{ikx}`:
//! forward is `Δx · FFT`, inverse is `(1/L_x) · IFFT` (unnormalized IFFT). With this
//! choice the physical pairing `Δx Σ_x ∫ f ḡ dy` equals the spectral pairing
//! `(1/L_x) Σ_k ∫ f̂ conj(ĝ) dy`.
//!
//! Inner products are conjugate-linear in the second argument.

use std::sync::Arc;

use ndarray::{Array2, Axis};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{matvec, Grid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    Physical,
    Spectral,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis2 {
    X,
    Y,
}

/// Boundary-trace tolerance accepted by [`Field::compute_e0`].
pub const E0_TRACE_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct Field {
    grid: Arc<Grid>,
    frame: Frame,
    data: Array2<Complex64>,
}

impl Field {
    pub fn zeros(grid: &Arc<Grid>, frame: Frame) -> Self {
        Self {
            grid: grid.clone(),
            frame,
            data: Array2::zeros((grid.nx(), grid.ny())),
        }
    }

    pub fn from_array(grid: &Arc<Grid>, frame: Frame, data: Array2<Complex64>) -> Result<Self> {
        if data.dim() != (grid.nx(), grid.ny()) {
            return Err(Error::InvalidArgument(format!(
                "data shape {:?} does not match grid ({}, {})",
                data.dim(),
                grid.nx(),
                grid.ny()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            frame,
            data: data.as_standard_layout().into_owned(),
        })
    }

    /// Sample a real function of `(x, y)` on the physical nodes.
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(f64, f64) -> f64) -> Self {
        let xs = grid.x_nodes();
        let ys = grid.y_nodes();
        let data = Array2::from_shape_fn((grid.nx(), grid.ny()), |(i, m)| {
            Complex64::new(f(xs[i], ys[m]), 0.0)
        });
        Self {
            grid: grid.clone(),
            frame: Frame::Physical,
            data,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn data(&self) -> &Array2<Complex64> {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut Array2<Complex64> {
        &mut self.data
    }

    /// Row `j`: the y-profile at x-node `j` (physical) or wavenumber index `j` (spectral).
    pub fn row(&self, j: usize) -> &[Complex64] {
        let n = self.grid.ny();
        &self.data.as_slice().expect("standard layout")[j * n..(j + 1) * n]
    }

    pub fn row_mut(&mut self, j: usize) -> &mut [Complex64] {
        let n = self.grid.ny();
        &mut self.data.as_slice_mut().expect("standard layout")[j * n..(j + 1) * n]
    }

    pub fn rows_mut(&mut self) -> Vec<&mut [Complex64]> {
        let n = self.grid.ny();
        self.data
            .as_slice_mut()
            .expect("standard layout")
            .chunks_mut(n)
            .collect()
    }

    fn same_grid(&self, other: &Field) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    fn expect_frame(&self, frame: Frame) -> Result<()> {
        if self.frame == frame {
            Ok(())
        } else {
            Err(Error::FrameMismatch {
                expected: frame,
                found: self.frame,
            })
        }
    }

    pub fn transform_x(&self, direction: Direction) -> Result<Field> {
        let (src, dst) = match direction {
            Direction::Forward => (Frame::Physical, Frame::Spectral),
            Direction::Inverse => (Frame::Spectral, Frame::Physical),
        };
        self.expect_frame(src)?;
        let g = &self.grid;
        let (nx, ny) = (g.nx(), g.ny());
        let (fft, scale) = match direction {
            Direction::Forward => (g.fft_forward().clone(), g.dx()),
            Direction::Inverse => (g.fft_inverse().clone(), 1.0 / g.lx()),
        };
        let mut cols: Vec<Vec<Complex64>> = (0..ny)
            .map(|m| self.data.column(m).to_vec())
            .collect();
        cols.par_iter_mut().for_each(|c| {
            fft.process(c);
            for v in c.iter_mut() {
                *v *= scale;
            }
        });
        let mut data = Array2::zeros((nx, ny));
        for (m, c) in cols.iter().enumerate() {
            for (j, v) in c.iter().enumerate() {
                data[[j, m]] = *v;
            }
        }
        Ok(Field {
            grid: g.clone(),
            frame: dst,
            data,
        })
    }

    pub fn to_spectral(&self) -> Field {
        match self.frame {
            Frame::Spectral => self.clone(),
            Frame::Physical => self.transform_x(Direction::Forward).expect("frame checked"),
        }
    }

    pub fn to_physical(&self) -> Field {
        match self.frame {
            Frame::Physical => self.clone(),
            Frame::Spectral => self.transform_x(Direction::Inverse).expect("frame checked"),
        }
    }

    pub fn derivative(&self, axis: Axis2, order: usize) -> Result<Field> {
        if !(1..=3).contains(&order) {
            return Err(Error::UnsupportedOrder(order));
        }
        match axis {
            Axis2::X => {
                self.expect_frame(Frame::Spectral)?;
                let mut out = self.clone();
                let g = self.grid.clone();
                out.rows_mut().into_iter().enumerate().for_each(|(j, row)| {
                    let ik = Complex64::new(0.0, g.k(j)).powi(order as i32);
                    for v in row.iter_mut() {
                        *v *= ik;
                    }
                });
                Ok(out)
            }
            Axis2::Y => {
                let d = self.grid.cheb().diff_matrix(order)?;
                let mut out = Field::zeros(&self.grid, self.frame);
                let ny = self.grid.ny();
                out.data
                    .as_slice_mut()
                    .expect("standard layout")
                    .par_chunks_mut(ny)
                    .zip(self.data.as_slice().expect("standard layout").par_chunks(ny))
                    .for_each(|(o, v)| matvec(d, v, o));
                Ok(out)
            }
        }
    }

    /// Quadrature-weighted `L²` pairing over the box, conjugating `other`.
    pub fn inner_product(&self, other: &Field) -> Result<Complex64> {
        self.same_grid(other)?;
        if self.frame != other.frame {
            return Err(Error::FrameMismatch {
                expected: self.frame,
                found: other.frame,
            });
        }
        let cheb = self.grid.cheb();
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..self.grid.nx() {
            acc += cheb.inner(self.row(j), other.row(j));
        }
        Ok(acc * self.x_measure())
    }

    fn x_measure(&self) -> f64 {
        match self.frame {
            Frame::Physical => self.grid.dx(),
            Frame::Spectral => 1.0 / self.grid.lx(),
        }
    }

    pub fn norm_sq(&self) -> f64 {
        let cheb = self.grid.cheb();
        let mut acc = 0.0;
        for j in 0..self.grid.nx() {
            acc += cheb.norm_sq(self.row(j));
        }
        acc * self.x_measure()
    }

    pub fn norm_l2(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Per-mode `‖f̂_k‖²_{L²_y}` in FFT order.
    pub fn mode_norms_sq(&self) -> Vec<f64> {
        let s = self.to_spectral();
        let cheb = self.grid.cheb();
        (0..self.grid.nx()).map(|j| cheb.norm_sq(s.row(j))).collect()
    }

    /// `H^s` norm summing every mixed derivative `∂_x^a ∂_y^b` with `a + b ≤ s` once.
    pub fn sobolev_norm(&self, s: usize) -> Result<f64> {
        if s > 3 {
            return Err(Error::SobolevIndex(s));
        }
        let spec = self.to_spectral();
        let g = &self.grid;
        let cheb = g.cheb();
        let per_mode: Vec<f64> = (0..g.nx())
            .into_par_iter()
            .map(|j| {
                let k2 = g.k(j) * g.k(j);
                let row = spec.row(j);
                let mut total = 0.0;
                for b in 0..=s {
                    let db = cheb.derivative(row, b).expect("order ≤ 3");
                    let nb = cheb.norm_sq(&db);
                    let xfac: f64 = (0..=(s - b)).map(|a| k2.powi(a as i32)).sum();
                    total += xfac * nb;
                }
                total
            })
            .collect();
        let sum: f64 = per_mode.iter().sum();
        Ok((sum / g.lx()).sqrt())
    }

    /// Largest modulus on the walls `y = ±1`.
    pub fn boundary_trace(&self) -> f64 {
        let ny = self.grid.ny();
        let mut m: f64 = 0.0;
        for j in 0..self.grid.nx() {
            let r = self.row(j);
            m = m.max(r[0].norm()).max(r[ny - 1].norm());
        }
        m
    }

    /// `‖ω‖_{H³} + ∫ ‖ω(x,·)‖_{H³_y} dx`.
    pub fn compute_e0(&self) -> Result<f64> {
        self.expect_frame(Frame::Physical)?;
        let trace = self.boundary_trace();
        if trace > E0_TRACE_TOL {
            return Err(Error::BoundaryTrace {
                value: trace,
                tol: E0_TRACE_TOL,
            });
        }
        let h3 = self.sobolev_norm(3)?;
        let cheb = self.grid.cheb();
        let cols: Vec<f64> = (0..self.grid.nx())
            .into_par_iter()
            .map(|j| {
                let row = self.row(j);
                let mut s = 0.0;
                for b in 0..=3 {
                    s += cheb.norm_sq(&cheb.derivative(row, b).expect("order ≤ 3"));
                }
                s.sqrt()
            })
            .collect();
        let l1: f64 = cols.iter().sum::<f64>() * self.grid.dx();
        Ok(h3 + l1)
    }

    /// Largest `|f̂(-k) - conj f̂(k)|`, skipping the unpaired Nyquist row.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let s = self.to_spectral();
        let nx = self.grid.nx();
        let mut m: f64 = 0.0;
        for j in 1..nx / 2 {
            for (a, b) in s.row(j).iter().zip(s.row(nx - j)) {
                m = m.max((a - b.conj()).norm());
            }
        }
        m
    }

    pub fn scale(&mut self, a: f64) {
        self.data.mapv_inplace(|v| v * a);
    }

    pub fn scaled(&self, a: f64) -> Field {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    /// `self += a · other`.
    pub fn axpy(&mut self, a: f64, other: &Field) -> Result<()> {
        self.same_grid(other)?;
        if self.frame != other.frame {
            return Err(Error::FrameMismatch {
                expected: self.frame,
                found: other.frame,
            });
        }
        self.data.zip_mut_with(&other.data, |x, y| *x += y * a);
        Ok(())
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        let mut out = self.clone();
        out.axpy(1.0, other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    /// Zero all modes outside the 2/3 band (spectral frame only).
    pub fn dealias(&mut self) -> Result<()> {
        self.expect_frame(Frame::Spectral)?;
        let g = self.grid.clone();
        for j in 0..g.nx() {
            if !g.is_active(j) {
                self.row_mut(j).fill(Complex64::new(0.0, 0.0));
            }
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Rows as owned profiles, for per-mode processing.
    pub fn profiles(&self) -> Vec<Vec<Complex64>> {
        self.data.axis_iter(Axis(0)).map(|r| r.to_vec()).collect()
    }

    pub fn to_file(&self) -> FieldFile {
        FieldFile {
            format: FIELD_FORMAT.to_string(),
            version: 1,
            lx: self.grid.lx(),
            nx: self.grid.nx(),
            ny: self.grid.ny(),
            frame: self.frame,
            data: self.data.iter().flat_map(|v| [v.re, v.im]).collect(),
        }
    }

    pub fn from_file(file: &FieldFile, grid: Option<&Arc<Grid>>) -> Result<Field> {
        if file.format != FIELD_FORMAT {
            return Err(Error::InvalidArgument(format!("unknown format tag {:?}", file.format)));
        }
        let grid = match grid {
            Some(g) if g.lx() == file.lx && g.nx() == file.nx && g.ny() == file.ny => g.clone(),
            Some(_) => return Err(Error::GridMismatch),
            None => Grid::new(file.lx, file.nx, file.ny)?,
        };
        if file.data.len() != 2 * file.nx * file.ny {
            return Err(Error::InvalidArgument("data length does not match shape".into()));
        }
        let vals: Vec<Complex64> = file
            .data
            .chunks(2)
            .map(|c| Complex64::new(c[0], c[1]))
            .collect();
        let data = Array2::from_shape_vec((file.nx, file.ny), vals)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok(Field {
            grid,
            frame: file.frame,
            data,
        })
    }
}

pub const FIELD_FORMAT: &str = "couette-field";

/// On-disk field container. `data` is row-major over `(row, y)` with interleaved
/// real and imaginary parts: `[re(0,0), im(0,0), re(0,1), ...]`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FieldFile {
    pub format: String,
    pub version: u32,
    pub lx: f64,
    pub nx: usize,
    pub ny: usize,
    pub frame: Frame,
    pub data: Vec<f64>,
}
