mod common;

use std::f64::consts::PI;

use common::{random_field, rel};
use couette_core::{Axis2, Direction, Field, Frame, Grid};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn parseval_between_frames(seed in any::<u64>(), nx in prop::sample::select(vec![8usize, 16, 32]), ny in 9usize..34) {
        let g = Grid::new(2.0 * PI, nx, ny).unwrap();
        let f = random_field(&g, seed);
        let s = f.to_spectral();
        prop_assert!(rel(f.norm_sq(), s.norm_sq()) < 1e-12);
        let back = s.to_physical();
        prop_assert!(back.sub(&f).unwrap().max_abs() <= 1e-13 * f.max_abs().max(1.0));
    }

    #[test]
    fn y_derivative_commutes_with_transform(seed in any::<u64>(), order in 1usize..4) {
        let g = Grid::new(4.0 * PI, 16, 21).unwrap();
        let f = random_field(&g, seed);
        let a = f.derivative(Axis2::Y, order).unwrap().transform_x(Direction::Forward).unwrap();
        let b = f.to_spectral().derivative(Axis2::Y, order).unwrap();
        prop_assert!(a.sub(&b).unwrap().max_abs() <= 1e-10 * a.max_abs().max(1.0));
    }

    #[test]
    fn sobolev_zero_is_l2(seed in any::<u64>()) {
        let g = Grid::new(2.0 * PI, 16, 17).unwrap();
        let f = random_field(&g, seed);
        let ip = f.inner_product(&f).unwrap();
        prop_assert!(ip.im.abs() <= 1e-14 * ip.re.max(1e-300));
        prop_assert!(rel(f.sobolev_norm(0).unwrap(), ip.re.sqrt()) < 1e-12);
    }

    #[test]
    fn e0_is_subadditive(s1 in any::<u64>(), s2 in any::<u64>()) {
        let g = Grid::new(2.0 * PI, 16, 17).unwrap();
        let f = random_field(&g, s1);
        let h = random_field(&g, s2);
        let sum = f.add(&h).unwrap();
        let lhs = sum.compute_e0().unwrap();
        prop_assert!(lhs <= f.compute_e0().unwrap() + h.compute_e0().unwrap() + 1e-10);
    }

    #[test]
    fn physical_fields_are_conjugate_symmetric(seed in any::<u64>()) {
        let g = Grid::new(2.0 * PI, 32, 17).unwrap();
        let f = random_field(&g, seed);
        prop_assert!(f.conjugate_symmetry_defect() < 1e-12 * f.max_abs().max(1.0));
    }
}

#[test]
fn zero_field_is_zero_everywhere() {
    let g = Grid::new(2.0 * PI, 8, 9).unwrap();
    let z = Field::zeros(&g, Frame::Physical);
    assert_eq!(z.norm_sq(), 0.0);
    assert_eq!(z.sobolev_norm(3).unwrap(), 0.0);
    assert_eq!(z.compute_e0().unwrap(), 0.0);
    assert_eq!(z.to_spectral().max_abs(), 0.0);
}

#[test]
fn mismatched_grids_are_rejected() {
    let a = Field::zeros(&Grid::new(2.0 * PI, 8, 9).unwrap(), Frame::Physical);
    let b = Field::zeros(&Grid::new(2.0 * PI, 8, 11).unwrap(), Frame::Physical);
    assert!(a.add(&b).is_err());
    assert!(a.inner_product(&a.to_spectral()).is_err());
}

#[test]
fn file_round_trip_through_json() {
    let g = Grid::new(2.0 * PI, 16, 17).unwrap();
    let f = random_field(&g, 7).to_spectral();
    let text = serde_json::to_string(&f.to_file()).unwrap();
    let back = Field::from_file(&serde_json::from_str(&text).unwrap(), None).unwrap();
    assert_eq!(back.frame(), Frame::Spectral);
    assert_eq!(back.data(), f.data());
}
