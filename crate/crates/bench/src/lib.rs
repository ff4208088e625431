//! Shared fixtures for the benchmarks in `benches/`.

use rigidview::harness::{random_rig, rng, sample_unit_pair_with, Height};
use rigidview::{CameraRig, ImageTuple, Rational};

/// A seeded rig with the images of a unit-distance pair.
pub fn unit_pair_fixture(
    seed: u64,
    n: usize,
) -> (
    CameraRig<Rational>,
    ImageTuple<Rational>,
    ImageTuple<Rational>,
) {
    let rig = random_rig(seed, n, Height::default()).expect("rig");
    let mut r = rng(seed);
    loop {
        let (x, y) = sample_unit_pair_with(&mut r);
        if let (Ok(u), Ok(v)) = (rig.forward_map(&x), rig.forward_map(&y)) {
            return (rig, u, v);
        }
    }
}
