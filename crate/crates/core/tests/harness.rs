use rigidview::forms::unit_distance_q;
use rigidview::harness::*;
use rigidview::{Error, Rational, Scalar};

#[test]
fn reports_are_reproducible() {
    let cfg = ExperimentConfig {
        samples: 4,
        seed: 42,
        ..Default::default()
    };
    for tag in [ExperimentTag::Equivalence, ExperimentTag::Coplanar] {
        let a = run_experiment(tag, &cfg).unwrap().to_json().to_string();
        let b = run_experiment(tag, &cfg).unwrap().to_json().to_string();
        assert_eq!(a, b);
        assert!(!a.contains("elapsed"));
    }
}

#[test]
fn float_backend_runs() {
    let cfg = ExperimentConfig {
        samples: 4,
        seed: 8,
        backend: Backend::Float,
        ..Default::default()
    };
    for tag in [
        ExperimentTag::Vanish,
        ExperimentTag::Separate,
        ExperimentTag::Equivalence,
    ] {
        let rep = run_experiment(tag, &cfg).unwrap();
        assert!(rep.pass, "{tag}: {:?}", rep.failures().collect::<Vec<_>>());
    }
}

#[test]
fn signed_heights_give_general_rigs() {
    let h = Height::new(5, true).unwrap();
    for seed in 0..20 {
        let rig = random_rig(seed, 4, h).unwrap();
        assert!(rig.general_position().passes());
        assert!(rig
            .cameras()
            .iter()
            .flat_map(|c| c.matrix().entries().iter().cloned())
            .all(|v| v.to_f64().abs() <= 5.0));
    }
    assert!(matches!(
        random_rig(0, 1, h),
        Err(Error::TooFewCameras { .. })
    ));
}

#[test]
fn noiseless_refinement_recovers_the_pair() {
    let rig = random_rig(3, 3, Height::default()).unwrap();
    let mut r = rng(3);
    for _ in 0..10 {
        let scene = Scene::unit_pair(rig.clone(), &mut r).unwrap();
        let clean = scene.with_noise(Noise {
            sigma: 0.0,
            seed: 0,
        });
        let out = rigid_triangulate_refine(
            &clean.rig,
            &clean.images[0],
            &clean.images[1],
            &RefineOptions::default(),
        )
        .unwrap();
        assert!(out.residual <= 1e-12, "{out:?}");
        let x = scene.world[0].dehomogenize().unwrap();
        for k in 0..3 {
            assert!((out.x[k] - x[k].to_f64()).abs() < 1e-6);
        }
        assert!(out.distance_residual.abs() <= 1e-14);
    }
}

#[test]
fn noisy_refinement_descends() {
    let rig = random_rig(4, 3, Height::default()).unwrap();
    let mut r = rng(4);
    for i in 0..20 {
        let scene = Scene::unit_pair(rig.clone(), &mut r).unwrap();
        let noisy = scene.with_noise(Noise {
            sigma: 1e-3,
            seed: i,
        });
        let out = rigid_triangulate_refine(
            &noisy.rig,
            &noisy.images[0],
            &noisy.images[1],
            &RefineOptions::default(),
        )
        .unwrap();
        assert!(out.residual <= out.initial_residual);
        assert!(
            out.distance_residual.abs() <= 1e-12,
            "{}",
            out.distance_residual
        );
    }
}

#[test]
fn scenes_are_consistent() {
    let rig = random_rig(5, 2, Height::default()).unwrap();
    let scene = Scene::unit_pair(rig.clone(), &mut rng(5)).unwrap();
    assert_eq!(scene.images[0], rig.forward_map(&scene.world[0]).unwrap());
    let q = unit_distance_q::<Rational>();
    assert!(num_traits::Zero::is_zero(
        &q.eval(scene.world[0].coords(), scene.world[1].coords())
    ));
}

#[test]
fn dimension_needs_feasible_distances() {
    let rig = random_rig(6, 2, Height::default()).unwrap().to_f64();
    let err = numeric_dimension(
        &rig,
        Scenario::Pairwise3 {
            d12: 1.0,
            d13: 2.0,
            d23: 5.0,
        },
        &DimensionOptions::default(),
    );
    assert!(matches!(err, Err(Error::Infeasible(_))));
    let rep = numeric_dimension(
        &rig,
        Scenario::RigidPair,
        &DimensionOptions {
            base_points: 7,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(rep.ranks, vec![5; 7]);
    assert!(rep.stable);
}
