//! Running space-time norms `X`, `Y` and their weighted `X_θ` versions.
//!
//! `‖f‖_X = ‖f‖_{L∞L²} + ν^{1/2}‖∇f‖_{L²L²} + ‖M₁∇Δ⁻¹f‖_{L²L²} + ν^{1/2}‖∂_x f‖_{L¹L²}`;
//! `Y` drops the last term. Time integrals use the trapezoid rule over the samples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::multipliers::{multiplier_m, multiplier_m1, WeightSpec};

/// Squared spatial norms of one sample, before time integration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Instant {
    /// `‖f‖²`
    pub l2: f64,
    /// `‖∇f‖²`
    pub grad: f64,
    /// `‖M₁∇Δ⁻¹f‖²`
    pub m1u: f64,
    /// `‖∂_x f‖²`
    pub dx: f64,
    /// `‖M f‖²`
    pub m: f64,
}

impl Instant {
    /// Evaluate on a spectral-frame `f` and its streamfunction `ψ` with `(∂²_y - k²)ψ = f`.
    /// `spec` supplies the per-mode weight; pass `θ = 0` for the plain norms.
    pub fn measure(f: &Field, psi: &Field, spec: &WeightSpec, t: f64) -> Self {
        let g = f.grid();
        let cheb = g.cheb();
        let mut out = Instant::default();
        for j in 0..g.nx() {
            let k = g.k(j);
            let w = f.row(j);
            let p = psi.row(j);
            let wt = spec.weight(t, k).powi(2);
            let n0 = cheb.norm_sq(w);
            if n0 == 0.0 {
                continue;
            }
            let dw = cheb.norm_sq(&cheb.d1_of(w));
            let np = cheb.norm_sq(p);
            let dp = cheb.norm_sq(&cheb.d1_of(p));
            let k2 = k * k;
            out.l2 += wt * n0;
            out.grad += wt * (dw + k2 * n0);
            out.m1u += wt * multiplier_m1(k).powi(2) * (dp + k2 * np);
            out.dx += wt * k2 * n0;
            out.m += wt * multiplier_m(k).powi(2) * n0;
        }
        let s = 1.0 / g.lx();
        Instant {
            l2: out.l2 * s,
            grad: out.grad * s,
            m1u: out.m1u * s,
            dx: out.dx * s,
            m: out.m * s,
        }
    }
}

/// Time-integrated components; all non-decreasing as samples accrue.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Components {
    /// `sup_t ‖f‖`
    pub linf_l2: f64,
    /// `∫ ‖∇f‖² dt`
    pub int_grad_sq: f64,
    /// `∫ ‖M₁∇Δ⁻¹f‖² dt`
    pub int_m1u_sq: f64,
    /// `∫ ‖∂_x f‖ dt`
    pub int_dx: f64,
    /// `∫ ‖M f‖ dt`
    pub int_m: f64,
}

impl Components {
    fn extend(&mut self, prev: Option<(f64, &Instant)>, t: f64, cur: &Instant) {
        self.linf_l2 = self.linf_l2.max(cur.l2.sqrt());
        if let Some((t0, p)) = prev {
            let h = 0.5 * (t - t0);
            self.int_grad_sq += h * (p.grad + cur.grad);
            self.int_m1u_sq += h * (p.m1u + cur.m1u);
            self.int_dx += h * (p.dx.sqrt() + cur.dx.sqrt());
            self.int_m += h * (p.m.sqrt() + cur.m.sqrt());
        }
    }

    pub fn y_norm(&self, nu: f64) -> f64 {
        self.linf_l2 + (nu * self.int_grad_sq).sqrt() + self.int_m1u_sq.sqrt()
    }

    pub fn x_norm(&self, nu: f64) -> f64 {
        self.y_norm(nu) + nu.sqrt() * self.int_dx
    }

    /// `ν^{1/3} ‖M f‖_{L¹L²}`
    pub fn enhanced(&self, nu: f64) -> f64 {
        nu.cbrt() * self.int_m
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpaceTimeAccumulator {
    pub spec: WeightSpec,
    pub plain: Components,
    pub weighted: Components,
    last: Option<(f64, Instant, Instant)>,
    pub times: Vec<f64>,
}

impl SpaceTimeAccumulator {
    pub fn new(spec: WeightSpec) -> Self {
        Self {
            spec,
            plain: Components::default(),
            weighted: Components::default(),
            last: None,
            times: Vec::new(),
        }
    }

    pub fn nu(&self) -> f64 {
        self.spec.nu
    }

    /// Add a sample at time `t`. `psi` is the streamfunction of `omega`.
    pub fn accumulate(&mut self, t: f64, omega: &Field, psi: &Field) -> Result<()> {
        if let Some(&prev) = self.times.last() {
            if t <= prev {
                return Err(Error::NonMonotoneTime { t, prev });
            }
        }
        let omega = omega.to_spectral();
        let psi = psi.to_spectral();
        let plain = Instant::measure(&omega, &psi, &WeightSpec::unweighted(self.spec.nu), t);
        let weighted = Instant::measure(&omega, &psi, &self.spec, t);
        self.push(t, plain, weighted);
        Ok(())
    }

    /// Add a sample from precomputed instants.
    pub fn push(&mut self, t: f64, plain: Instant, weighted: Instant) {
        let prev = self.last.as_ref().map(|(t0, p, w)| (*t0, *p, *w));
        self.plain.extend(prev.as_ref().map(|(t0, p, _)| (*t0, p)), t, &plain);
        self.weighted.extend(prev.as_ref().map(|(t0, _, w)| (*t0, w)), t, &weighted);
        self.last = Some((t, plain, weighted));
        self.times.push(t);
    }

    pub fn x_norm(&self) -> f64 {
        self.plain.x_norm(self.spec.nu)
    }

    pub fn y_norm(&self) -> f64 {
        self.plain.y_norm(self.spec.nu)
    }

    pub fn x_theta_norm(&self) -> f64 {
        self.weighted.x_norm(self.spec.nu)
    }
}
