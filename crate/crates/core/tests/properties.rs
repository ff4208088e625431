use num_traits::Zero;
use proptest::prelude::*;
use rigidview::chow::{chow_factor, chow_map, same_unordered_pair};
use rigidview::constraints::{bilinear_value, octic_eval, rigid_membership_oracle};
use rigidview::forms::{polarize, unit_distance_q};
use rigidview::harness::*;
use rigidview::linalg::{det, rank};
use rigidview::polyspace::conjecture_generator_count;
use rigidview::triangulate::{triangulate, BMatrix};
use rigidview::{CameraRig, ProjectivePoint, Rational, Scalar, Tolerances};

fn rat(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| Rational::from_i64(x)).collect()
}

fn image_point() -> impl Strategy<Value = ProjectivePoint<Rational>> {
    prop::array::uniform3(-9i64..=9)
        .prop_filter("nonzero", |v| v.iter().any(|&x| x != 0))
        .prop_map(|v| ProjectivePoint::new(rat(&v)).unwrap())
}

fn rig(seed: u64, n: usize) -> CameraRig<Rational> {
    random_rig(seed, n, Height::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn polarization_restricts_to_the_form(x in prop::array::uniform4(-20i64..20), y in prop::array::uniform4(-20i64..20)) {
        let q = unit_distance_q::<Rational>();
        let t = polarize(&q).unwrap();
        let (x, y) = (rat(&x), rat(&y));
        prop_assert_eq!(t.eval(&x, &x, &y, &y), q.eval(&x, &y));
    }

    #[test]
    fn polarization_is_symmetric(a in prop::array::uniform4(-9i64..9), b in prop::array::uniform4(-9i64..9),
                                 c in prop::array::uniform4(-9i64..9), d in prop::array::uniform4(-9i64..9)) {
        let t = polarize(&unit_distance_q::<Rational>()).unwrap();
        let (a, b, c, d) = (rat(&a), rat(&b), rat(&c), rat(&d));
        prop_assert_eq!(t.eval(&a, &b, &c, &d), t.eval(&b, &a, &c, &d));
        prop_assert_eq!(t.eval(&a, &b, &c, &d), t.eval(&a, &b, &d, &c));
    }

    #[test]
    fn bilinear_form_is_det_b(seed in 0u64..500, u0 in image_point(), u1 in image_point()) {
        let rig = rig(seed, 2);
        let f = rig.fundamental_matrix(0, 1).unwrap();
        let fu = f.mul_vec(u1.coords()).unwrap();
        let lhs: Rational = u0.coords().iter().zip(&fu).map(|(a, b)| a * b).sum();
        let b = BMatrix::new(&rig, 0, 1, &u0, &u1).unwrap();
        prop_assert_eq!(&lhs, &b.det());
        prop_assert_eq!(lhs, bilinear_value(&rig, 0, 1, &[u0, u1]).unwrap());
        prop_assert_eq!(rank(&f), 2);
    }

    #[test]
    fn chow_round_trip(u in image_point(), v in image_point()) {
        let a = chow_map(&u, &v).unwrap();
        prop_assert!(a.det().is_zero());
        let back = chow_factor(&a, 1e-9).unwrap();
        prop_assert!(same_unordered_pair(&back, &(u, v), 1e-12));
    }

    #[test]
    fn chow_map_is_symmetric_and_homogeneous(u in image_point(), v in image_point(), s in 1i64..9) {
        let a = chow_map(&u, &v).unwrap();
        let swapped = chow_map(&v, &u).unwrap();
        prop_assert_eq!(a.matrix(), swapped.matrix());
        let scaled = chow_map(&u.scaled(&Rational::from_i64(s)), &v).unwrap();
        prop_assert_eq!(scaled.matrix(), &a.matrix().scale(&Rational::from_i64(s)));
    }

    #[test]
    fn counts_are_consistent(n in 2u64..60) {
        let c = conjecture_generator_count(n).unwrap();
        prop_assert!(c.consistent());
        prop_assert_eq!(c.by_total_degree.values().sum::<u64>(), c.total);
    }

    #[test]
    fn point_json_round_trip(p in image_point()) {
        prop_assert_eq!(ProjectivePoint::<Rational>::from_json(&p.to_json()).unwrap(), p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn exact_triangulation_recovers_the_point(seed in 0u64..1000, n in 2usize..5, x in prop::array::uniform3(-30i64..30)) {
        let rig = rig(seed, n);
        let x = ProjectivePoint::from_affine(&rat(&x));
        let Ok(tuple) = rig.forward_map(&x) else { return Ok(()) };
        let tol = Tolerances::default();
        match triangulate(&rig, &tuple, &tol) {
            Ok(sol) => prop_assert!(sol.x.proj_eq(&x, 0.0)),
            // points on a baseline are legitimately not triangulable
            Err(rigidview::Error::NotTriangulable) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn octic_scales_quadratically(seed in 0u64..200, s in 2i64..7) {
        let rig = rig(seed, 2);
        let t = polarize(&unit_distance_q::<Rational>()).unwrap();
        let mut r = rng(seed);
        let (x, y) = sample_generic_pair_with(&mut r);
        let (Some(u), Some(v)) = (images(&rig, &x), images(&rig, &y)) else { return Ok(()) };
        let sel = (((0, 1), (0, 1)), ((0, 1), (2, 2)));
        let base = octic_eval(&rig, &t, sel.0, sel.1, &u, &v).unwrap();
        let mut us = u.clone();
        us[0] = us[0].scaled(&Rational::from_i64(s));
        let scaled = octic_eval(&rig, &t, sel.0, sel.1, &us, &v).unwrap();
        prop_assert_eq!(scaled, base * Rational::from_i64(s * s));
    }

    #[test]
    fn membership_is_invariant_under_left_action(seed in 0u64..200, member in any::<bool>()) {
        let rig = rig(seed, 2);
        let mut r = rng(seed + 7);
        let (x, y) = if member { sample_unit_pair_with(&mut r) } else { sample_generic_pair_with(&mut r) };
        let (Some(u), Some(v)) = (images(&rig, &x), images(&rig, &y)) else { return Ok(()) };
        let tol = Tolerances::default();
        let before = rigid_membership_oracle(&rig, &u, &v, &tol).unwrap();
        prop_assert_eq!(before, member);
        let ms: Vec<_> = (0..2).map(|_| random_invertible(&mut r)).collect();
        let moved = rig.apply_left_action(&ms).unwrap();
        let act = |t: &[ProjectivePoint<Rational>]| -> Vec<ProjectivePoint<Rational>> {
            t.iter().zip(&ms).map(|(p, m)| ProjectivePoint::new(m.mul_vec(p.coords()).unwrap()).unwrap()).collect()
        };
        prop_assert_eq!(rigid_membership_oracle(&moved, &act(&u), &act(&v), &tol).unwrap(), before);
        prop_assert!(!det(&ms[0]).unwrap().is_zero());
    }

    #[test]
    fn rig_json_round_trip(seed in 0u64..1000, n in 2usize..6) {
        let rig = rig(seed, n);
        let back = CameraRig::<Rational>::from_json(&rig.to_json()).unwrap();
        prop_assert_eq!(back.to_json(), rig.to_json());
    }
}
