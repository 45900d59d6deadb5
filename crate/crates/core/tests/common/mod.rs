#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use couette_core::{Field, Grid};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Smooth random field vanishing on the walls: a few low x-harmonics times
/// `(1 - y²)` times a random cubic.
pub fn random_field(grid: &Arc<Grid>, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lx = grid.lx();
    let terms: Vec<(f64, f64, f64, [f64; 4])> = (0..4)
        .map(|_| {
            let m = rng.gen_range(0..4) as f64;
            (
                m,
                rng.gen_range(0.0..2.0 * PI),
                rng.gen_range(-1.0..1.0),
                [0; 4].map(|_| rng.gen_range(-1.0..1.0)),
            )
        })
        .collect();
    Field::from_fn(grid, move |x, y| {
        let wall = 1.0 - y * y;
        terms
            .iter()
            .map(|(m, ph, a, c)| {
                let p = c[0] + y * (c[1] + y * (c[2] + y * c[3]));
                a * (2.0 * PI * m * x / lx + ph).cos() * wall * p
            })
            .sum()
    })
}

/// Random smooth profile on the nodes with zero wall values.
pub fn random_profile(nodes: &[f64], seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c: Vec<(f64, f64)> = (0..5).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    nodes
        .iter()
        .map(|&y| {
            let mut re = 0.0;
            let mut im = 0.0;
            for (n, (a, b)) in c.iter().enumerate() {
                let s = (PI * (n + 1) as f64 * (y + 1.0) / 2.0).sin();
                re += a * s;
                im += b * s;
            }
            Complex64::new(re, im)
        })
        .collect()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}
