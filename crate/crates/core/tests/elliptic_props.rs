mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use common::{random_field, random_profile};
use couette_core::elliptic::{boundary_harmonic_profile, green, green_solve, HelmholtzSolver};
use couette_core::grid::ChebyshevY;
use couette_core::jk::{apply_jk, jk_operator_norm};
use couette_core::psi::{check_psi_inequalities, resolvable_kt, PsiReport};
use couette_core::{Axis2, Field, Frame, Grid};
use num_complex::Complex64;
use proptest::prelude::*;

/// Norm constant for `J_k`, pinned from the measured worst case ≈ 1.22 at `k = 10`.
const JK_C: f64 = 2.0;

/// Bound on the ψ-inequality ratios; the measured worst case is 0.61 (k = 2, t = 10).
const PSI_C: f64 = 1.0;

fn helmholtz_residual(cheb: &ChebyshevY, psi: &[Complex64], w: &[Complex64], k: f64) -> f64 {
    let d2 = cheb.derivative(psi, 2).unwrap();
    let n = psi.len();
    let r: Vec<Complex64> = (0..n)
        .map(|i| if i == 0 || i == n - 1 { Complex64::new(0.0, 0.0) } else { d2[i] - psi[i] * (k * k) - w[i] })
        .collect();
    cheb.norm(&r)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn green_path_matches_direct_solve(seed in any::<u64>(), lk in -3.0f64..1.0) {
        let k = 10f64.powf(lk);
        let cheb = Arc::new(ChebyshevY::new(33).unwrap());
        let s = HelmholtzSolver::new(cheb.clone());
        let w = random_profile(cheb.nodes(), seed);
        let direct = s.solve(&w, k).unwrap();
        let quad = green_solve(&cheb, &w, k, 64);
        let diff: Vec<Complex64> = direct.iter().zip(&quad).map(|(a, b)| a - b).collect();
        prop_assert!(cheb.norm(&diff) <= 1e-6 * cheb.norm(&direct));
    }

    #[test]
    fn solves_have_small_residual_and_dirichlet_walls(seed in any::<u64>(), k in 0.0f64..20.0) {
        let cheb = Arc::new(ChebyshevY::new(41).unwrap());
        let s = HelmholtzSolver::new(cheb.clone());
        let w = random_profile(cheb.nodes(), seed);
        let psi = s.solve(&w, k).unwrap();
        prop_assert!(helmholtz_residual(&cheb, &psi, &w, k) <= 1e-9 * cheb.norm(&w));
        prop_assert!(psi[0].norm() <= 1e-12 && psi[40].norm() <= 1e-12);
        let lhs = -cheb.inner(&psi, &w);
        let rhs = cheb.norm_sq(&cheb.d1_of(&psi)) + k * k * cheb.norm_sq(&psi);
        prop_assert!((lhs.re - rhs).abs() <= 1e-8 * rhs.max(1e-300));
    }

    #[test]
    fn green_is_symmetric_and_vanishes_on_walls(k in 1e-4f64..50.0, y in -1.0f64..1.0, yp in -1.0f64..1.0) {
        prop_assert!((green(k, y, yp) - green(k, yp, y)).abs() <= 1e-12);
        prop_assert_eq!(green(k, 1.0, yp), 0.0);
        prop_assert_eq!(green(k, -1.0, yp), 0.0);
        prop_assert!(green(k, y, yp) <= 0.0);
    }

    #[test]
    fn velocity_is_divergence_free(seed in any::<u64>()) {
        let g = Grid::new(2.0 * PI, 16, 25).unwrap();
        let w = random_field(&g, seed).to_spectral();
        let (u1, u2) = HelmholtzSolver::for_grid(&g).velocity(&w).unwrap();
        let div = u1.derivative(Axis2::X, 1).unwrap().add(&u2.derivative(Axis2::Y, 1).unwrap()).unwrap();
        prop_assert!(div.max_abs() <= 1e-8);
        let ny = g.ny();
        for j in 0..g.nx() {
            prop_assert!(u2.row(j)[0].norm() <= 1e-12 && u2.row(j)[ny - 1].norm() <= 1e-12);
        }
        prop_assert!(u2.row(0).iter().all(|v| v.norm() == 0.0));
    }
}

#[test]
fn zero_vorticity_gives_zero_velocity() {
    let g = Grid::new(2.0 * PI, 8, 9).unwrap();
    let (u1, u2) = HelmholtzSolver::for_grid(&g).velocity(&Field::zeros(&g, Frame::Spectral)).unwrap();
    assert_eq!(u1.max_abs() + u2.max_abs(), 0.0);
}

#[test]
fn boundary_harmonics_are_harmonic() {
    let cheb = ChebyshevY::new(33).unwrap();
    for k in [0.0, 0.1, 1.0, 5.0] {
        for j in [1, -1] {
            let g = boundary_harmonic_profile(&cheb, k, j).unwrap();
            let gc: Vec<Complex64> = g.iter().map(|v| Complex64::new(*v, 0.0)).collect();
            let d2 = cheb.derivative(&gc, 2).unwrap();
            for i in 1..32 {
                assert!((d2[i].re - k * k * g[i]).abs() < 1e-8, "k={k} j={j} i={i}");
            }
            let (at_j, at_other) = if j == 1 { (g[0], g[32]) } else { (g[32], g[0]) };
            assert_eq!(at_j, 1.0);
            assert_eq!(at_other, 0.0);
        }
    }
}

#[test]
fn jk_is_symmetric_on_random_pairs() {
    let cheb = ChebyshevY::new(33).unwrap();
    for pair in 0..20u64 {
        let k = [1e-3, 0.1, 1.0, 10.0][pair as usize % 4] * if pair % 2 == 0 { 1.0 } else { -1.0 };
        let f = random_profile(cheb.nodes(), 2 * pair);
        let g = random_profile(cheb.nodes(), 2 * pair + 1);
        let jf = apply_jk(&cheb, &f, k).unwrap();
        let jg = apply_jk(&cheb, &g, k).unwrap();
        let defect = (cheb.inner(&f, &jg) - cheb.inner(&jf, &g)).norm();
        assert!(defect <= 1e-6 * cheb.norm(&f) * cheb.norm(&g), "pair {pair}: {defect:e}");
    }
}

#[test]
fn jk_norm_scales_like_min_one_k() {
    let cheb = ChebyshevY::new(64).unwrap();
    for k in [1e-3, 1e-2, 1e-1, 1.0, 10.0] {
        let n = jk_operator_norm(&cheb, k).unwrap();
        assert!(n <= JK_C * k.min(1.0), "k={k}: {n}");
    }
}

#[test]
fn psi_inequalities_hold_with_a_stable_constant() {
    let cheb = Arc::new(ChebyshevY::new(129).unwrap());
    let s = HelmholtzSolver::new(cheb.clone());
    let h: Vec<Complex64> = cheb.nodes().iter().map(|y| Complex64::new((PI * y).sin(), 0.0)).collect();
    for k in [0.1, 2.0] {
        for t in [0.0, 10.0, 100.0] {
            if k * t > resolvable_kt(129) {
                continue;
            }
            let rep = check_psi_inequalities(&s, &h, k, t).unwrap();
            let PsiReport::Ratios { rows, .. } = &rep else { panic!("not vacuous") };
            assert_eq!(rows.len(), 4);
            assert!(rep.max_ratio() <= PSI_C, "k={k} t={t}: {rows:?}");
        }
    }
    let z = vec![Complex64::new(0.0, 0.0); 129];
    assert_eq!(check_psi_inequalities(&s, &z, 1.0, 1.0).unwrap(), PsiReport::Vacuous);
}
