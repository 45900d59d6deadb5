//! Mode-wise application of the time weight `(1 + ν^{1/3} t M)^θ`.

use couette_core::multipliers::WeightSpec;
use couette_core::Field;

/// `(1 + ν^{1/3} t M(k))^θ f̂_k` for a spectral-frame `f`.
pub fn weighted(f: &Field, spec: &WeightSpec, t: f64) -> Field {
    let g = f.grid().clone();
    let mut out = f.to_spectral();
    for (j, row) in out.rows_mut().into_iter().enumerate() {
        let w = spec.weight(t, g.k(j));
        for v in row.iter_mut() {
            *v *= w;
        }
    }
    out
}

/// Largest nodal modulus of the physical field.
pub fn sup_norm(f: &Field) -> f64 {
    f.to_physical().max_abs()
}
