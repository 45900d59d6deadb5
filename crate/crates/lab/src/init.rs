//! Initial data `A · exp(-x²/2σ²) · φ(y)`, centred at `x = 0` of the periodic box.

use std::sync::Arc;

use couette_core::{Field, Grid};

use crate::config::SimConfig;
use crate::error::Result;

pub fn grid_of(cfg: &SimConfig) -> Result<Arc<Grid>> {
    Ok(Grid::new(cfg.lx, cfg.nx, cfg.ny)?)
}

fn unit_profile(grid: &Arc<Grid>, cfg: &SimConfig) -> Field {
    let lx = grid.lx();
    let (s, p) = (cfg.sigma, cfg.profile);
    Field::from_fn(grid, move |x, y| {
        let d = if x > lx / 2.0 { x - lx } else { x };
        (-d * d / (2.0 * s * s)).exp() * p.eval(y)
    })
}

/// Physical-frame initial vorticity, its amplitude and `E₀`.
pub fn initial_data(grid: &Arc<Grid>, cfg: &SimConfig) -> Result<(Field, f64, f64)> {
    let unit = unit_profile(grid, cfg);
    let amp = match cfg.e0_scale {
        Some(s) => s * cfg.nu.cbrt() / unit.compute_e0()?,
        None => cfg.amplitude,
    };
    let w = unit.scaled(amp);
    let e0 = w.compute_e0()?;
    Ok((w, amp, e0))
}
