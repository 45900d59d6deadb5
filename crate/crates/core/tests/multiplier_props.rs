mod common;

use std::f64::consts::PI;

use common::random_field;
use couette_core::elliptic::HelmholtzSolver;
use couette_core::multipliers::{chi, multiplier_m, multiplier_m1, DyadicPartition, WeightSpec, DEFAULT_THETA};
use couette_core::spacetime::SpaceTimeAccumulator;
use couette_core::Grid;
use proptest::prelude::*;

proptest! {
    #[test]
    fn m_is_dominated_by_three_k_two_thirds(k in -50.0f64..50.0) {
        prop_assert!(multiplier_m(k) <= 3.0 * k.abs().powf(2.0 / 3.0) + 1e-15);
        prop_assert!(multiplier_m(k) <= 1.0 + 1e-15);
        prop_assert_eq!(multiplier_m(k), multiplier_m(-k));
    }

    #[test]
    fn chi_plateaus(k in -5.0f64..5.0) {
        let c = chi(k);
        prop_assert!((0.0..=1.0).contains(&c));
        if k.abs() <= 0.5 { prop_assert_eq!(c, 1.0); }
        if k.abs() >= 1.0 { prop_assert_eq!(c, 0.0); }
    }

    #[test]
    fn m1_dominates_sqrt_and_linear(k in -20.0f64..20.0) {
        let m1 = multiplier_m1(k);
        prop_assert!(m1 >= k.abs().sqrt() && m1 >= k.abs());
    }

    #[test]
    fn weight_is_at_least_one_and_grows_in_time(t in 0.0f64..1e4, dt in 0.0f64..1e3, k in -10.0f64..10.0) {
        let w = WeightSpec::new(1e-3, DEFAULT_THETA).unwrap();
        prop_assert!(w.weight(t, k) >= 1.0);
        prop_assert!(w.weight(t + dt, k) >= w.weight(t, k));
    }
}

/// Largest `weight(t,k) / (weight(t,k-l) weight(t,l))` over a sample grid.
fn splitting_constant(spec: &WeightSpec) -> f64 {
    let ks: Vec<f64> = (-60..=60).map(|i| i as f64 * 0.05).collect();
    let mut c: f64 = 0.0;
    for &t in &[0.0, 1.0, 10.0, 1e2, 1e3, 1e4] {
        for &k in &ks {
            for &l in &ks {
                let r = spec.weight(t, k) / (spec.weight(t, k - l) * spec.weight(t, l));
                c = c.max(r);
            }
        }
    }
    c
}

#[test]
fn weight_splitting_constant_is_finite() {
    for nu in [1e-2, 1e-4] {
        let spec = WeightSpec::new(nu, DEFAULT_THETA).unwrap();
        let c = splitting_constant(&spec);
        // M is quasi-subadditive with constant 2, so C ≤ 2^θ
        assert!(c.is_finite() && c <= 2f64.powf(DEFAULT_THETA) + 1e-12, "C = {c}");
    }
}

#[test]
fn partition_covers_requested_horizon() {
    let nu = 1e-2;
    let p = DyadicPartition::covering(nu, 100.0).unwrap();
    assert!(p.t(p.j_max()) >= 100.0);
    for t in [p.t(0) + 1e-9, 10.0, 50.0, 99.0] {
        let j = p.active(t).unwrap();
        assert!(p.t(j - 1) < t && t <= p.t(j));
        assert_eq!((1..=p.j_max()).filter(|&i| p.chi_j(t, i)).count(), 1);
    }
    assert!(DyadicPartition::new(1.5, 3).is_err());
}

fn sampled(theta: f64, seed: u64, n: usize) -> SpaceTimeAccumulator {
    let g = Grid::new(2.0 * PI, 16, 17).unwrap();
    let s = HelmholtzSolver::for_grid(&g);
    let mut acc = SpaceTimeAccumulator::new(WeightSpec::new(1e-2, theta).unwrap());
    for i in 0..n {
        let f = random_field(&g, seed.wrapping_add(i as u64)).to_spectral();
        let psi = s.streamfunction(&f).unwrap();
        acc.accumulate(i as f64 * 0.7, &f, &psi).unwrap();
    }
    acc
}

#[test]
fn unweighted_x_theta_equals_x() {
    let acc = sampled(0.0, 3, 6);
    assert_eq!(acc.plain, acc.weighted);
    assert_eq!(acc.x_theta_norm(), acc.x_norm());
    assert!(acc.x_norm() >= acc.y_norm());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn accumulator_components_are_monotone(seed in any::<u64>()) {
        let g = Grid::new(2.0 * PI, 16, 17).unwrap();
        let s = HelmholtzSolver::for_grid(&g);
        let mut acc = SpaceTimeAccumulator::new(WeightSpec::new(1e-2, DEFAULT_THETA).unwrap());
        let mut prev = acc.weighted;
        let mut prev_plain = acc.plain;
        for i in 0..5 {
            let f = random_field(&g, seed.wrapping_add(i)).to_spectral();
            let psi = s.streamfunction(&f).unwrap();
            acc.accumulate(i as f64 * 3.0, &f, &psi).unwrap();
            for (a, b) in [(prev, acc.weighted), (prev_plain, acc.plain)] {
                prop_assert!(b.linf_l2 >= a.linf_l2);
                prop_assert!(b.int_grad_sq >= a.int_grad_sq);
                prop_assert!(b.int_m1u_sq >= a.int_m1u_sq);
                prop_assert!(b.int_dx >= a.int_dx);
                prop_assert!(b.int_m >= a.int_m);
            }
            prop_assert!(acc.weighted.linf_l2 >= acc.plain.linf_l2);
            prev = acc.weighted;
            prev_plain = acc.plain;
        }
    }
}
