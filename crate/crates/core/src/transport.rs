//! Pseudo-spectral advection `u·∇ω` with 2/3-rule dealiasing in `x`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Axis2, Field, Frame};

fn band_limited(f: &Field) -> Field {
    let mut g = f.clone();
    g.dealias().expect("spectral frame");
    g
}

/// `u·∇ω` for spectral-frame inputs, returned in the spectral frame with modes outside
/// the 2/3 band zeroed. Products in `y` are taken at the collocation nodes.
pub fn nonlinear_term(omega: &Field, u1: &Field, u2: &Field) -> Result<Field> {
    for f in [omega, u1, u2] {
        if f.frame() != Frame::Spectral {
            return Err(Error::FrameMismatch {
                expected: Frame::Spectral,
                found: f.frame(),
            });
        }
    }
    let omega = band_limited(omega);
    let wx = omega.derivative(Axis2::X, 1)?.to_physical();
    let wy = omega.derivative(Axis2::Y, 1)?.to_physical();
    let u1 = band_limited(u1).to_physical();
    let u2 = band_limited(u2).to_physical();
    let mut prod = Field::zeros(omega.grid(), Frame::Physical);
    ndarray::Zip::from(prod.data_mut())
        .and(u1.data())
        .and(wx.data())
        .and(u2.data())
        .and(wy.data())
        .for_each(|p, a, b, c, d| *p = Complex64::new(a.re * b.re + c.re * d.re, 0.0));
    let mut out = prod.to_spectral();
    out.dealias()?;
    Ok(out)
}

/// Dealiased pointwise product `a b` of spectral-frame fields.
pub fn product(a: &Field, b: &Field) -> Result<Field> {
    let pa = band_limited(a).to_physical();
    let pb = band_limited(b).to_physical();
    let mut prod = Field::zeros(a.grid(), Frame::Physical);
    ndarray::Zip::from(prod.data_mut())
        .and(pa.data())
        .and(pb.data())
        .for_each(|p, x, y| *p = Complex64::new(x.re * y.re, 0.0));
    let mut out = prod.to_spectral();
    out.dealias()?;
    Ok(out)
}

/// Largest pointwise speed `|u|` of a spectral-frame velocity.
pub fn max_speed(u1: &Field, u2: &Field) -> f64 {
    let p1 = u1.to_physical();
    let p2 = u2.to_physical();
    p1.data()
        .iter()
        .zip(p2.data().iter())
        .fold(0.0, |m, (a, b)| m.max(a.re.hypot(b.re)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::HelmholtzSolver;
    use crate::grid::Grid;
    use std::f64::consts::PI;

    #[test]
    fn frozen_advection() {
        let g = Grid::new(2.0 * PI, 16, 17).unwrap();
        let w = Field::from_fn(&g, |x, y| (2.0 * x).sin() * (1.0 - y * y)).to_spectral();
        let u1 = Field::from_fn(&g, |_, _| 1.0).to_spectral();
        let u2 = Field::zeros(&g, Frame::Spectral);
        let n = nonlinear_term(&w, &u1, &u2).unwrap();
        let want = w.derivative(Axis2::X, 1).unwrap();
        assert!(n.sub(&want).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn skew_symmetry() {
        let g = Grid::new(2.0 * PI, 32, 33).unwrap();
        let w = Field::from_fn(&g, |x, y| {
            (1.0 - y * y) * (x.cos() + 0.5 * (2.0 * x + y).sin() + 0.3 * y)
        })
        .to_spectral();
        let s = HelmholtzSolver::for_grid(&g);
        let (u1, u2) = s.velocity(&w).unwrap();
        let n = nonlinear_term(&w, &u1, &u2).unwrap();
        let ip = n.inner_product(&w).unwrap();
        assert!(ip.norm() < 1e-8 * w.norm_sq(), "{ip}");
    }
}
