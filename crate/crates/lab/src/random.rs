//! Seeded smooth inputs for the randomized checks.

use std::f64::consts::PI;
use std::sync::Arc;

use couette_core::{Field, Grid};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A few x-harmonics `m < max_mode` times `(1 - y²)` times a random cubic, scaled to unit `L²` norm.
pub fn random_field(grid: &Arc<Grid>, max_mode: usize, seed: u64) -> Field {
    let mut r = rng(seed);
    let lx = grid.lx();
    let terms: Vec<(f64, f64, f64, [f64; 4])> = (0..5)
        .map(|_| {
            (
                r.gen_range(0..max_mode) as f64,
                r.gen_range(0.0..2.0 * PI),
                r.gen_range(-1.0..1.0),
                [0; 4].map(|_| r.gen_range(-1.0..1.0)),
            )
        })
        .collect();
    let f = Field::from_fn(grid, move |x, y| {
        let wall = 1.0 - y * y;
        terms
            .iter()
            .map(|(m, ph, a, c)| {
                let p = c[0] + y * (c[1] + y * (c[2] + y * c[3]));
                a * (2.0 * PI * m * x / lx + ph).cos() * wall * p
            })
            .sum()
    })
    .to_spectral();
    let n = f.norm_l2();
    if n > 0.0 {
        f.scaled(1.0 / n)
    } else {
        f
    }
}

/// Complex sine series `Σ_{n≤5} c_n sin(nπ(y+1)/2)` on the nodes.
pub fn random_profile(nodes: &[f64], seed: u64) -> Vec<Complex64> {
    let mut r = rng(seed);
    let c: Vec<(f64, f64)> = (0..5).map(|_| (r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect();
    nodes
        .iter()
        .map(|&y| {
            c.iter().enumerate().fold(Complex64::new(0.0, 0.0), |acc, (n, (a, b))| {
                let s = (PI * (n + 1) as f64 * (y + 1.0) / 2.0).sin();
                acc + Complex64::new(a * s, b * s)
            })
        })
        .collect()
}
