use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::camera::{Camera, CameraRig, ImageTuple, ProjectivePoint, RigidMotion};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::{Rational, Scalar};

pub type Rng8 = ChaCha8Rng;

/// Redraw bound for rank and general-position rejection loops.
pub const MAX_REDRAWS: usize = 1000;

/// Default bound on numerators and denominators of random rationals.
pub const RATIONAL_BOUND: i64 = 100;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed of the `index`-th sample of a run, independent of scheduling.
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index.wrapping_add(1));
    r.random()
}

/// Entry distribution for random cameras.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Height {
    pub bound: i64,
    /// Entries in `[-bound, bound]` instead of `[0, bound - 1]`.
    pub signed: bool,
}

impl Height {
    pub fn new(bound: i64, signed: bool) -> Result<Self> {
        if bound < 2 {
            return Err(Error::InvalidParameter(format!(
                "height must be at least 2, got {bound}"
            )));
        }
        Ok(Height { bound, signed })
    }

    fn draw(&self, rng: &mut Rng8) -> i64 {
        if self.signed {
            rng.random_range(-self.bound..=self.bound)
        } else {
            rng.random_range(0..self.bound)
        }
    }
}

impl Default for Height {
    fn default() -> Self {
        Height {
            bound: 20,
            signed: false,
        }
    }
}

pub fn random_camera_with(rng: &mut Rng8, height: Height) -> Result<Camera<Rational>> {
    for _ in 0..MAX_REDRAWS {
        let mut rows = [[0i64; 4]; 3];
        for v in rows.iter_mut().flatten() {
            *v = height.draw(rng);
        }
        if let Ok(c) = Camera::from_i64(rows) {
            return Ok(c);
        }
    }
    Err(Error::Exhausted(MAX_REDRAWS))
}

pub fn random_camera(seed: u64, height: Height) -> Result<Camera<Rational>> {
    random_camera_with(&mut rng(seed), height)
}

pub fn random_rig_with(rng: &mut Rng8, n: usize, height: Height) -> Result<CameraRig<Rational>> {
    if n < 2 {
        return Err(Error::TooFewCameras { needed: 2, got: n });
    }
    for _ in 0..MAX_REDRAWS {
        let cams = (0..n)
            .map(|_| random_camera_with(rng, height))
            .collect::<Result<Vec<_>>>()?;
        let rig = CameraRig::from_cameras(cams)?;
        if rig.general_position().passes() {
            return Ok(rig);
        }
    }
    Err(Error::Exhausted(MAX_REDRAWS))
}

/// Rig whose focal points are in linear general position.
pub fn random_rig(seed: u64, n: usize, height: Height) -> Result<CameraRig<Rational>> {
    random_rig_with(&mut rng(seed), n, height)
}

/// `p/q` with `|p| <= bound`, `1 <= q <= bound`.
pub fn random_rational(rng: &mut Rng8, bound: i64) -> Rational {
    Rational::from_ratio(
        rng.random_range(-bound..=bound),
        rng.random_range(1..=bound),
    )
}

pub fn random_affine(rng: &mut Rng8, bound: i64) -> Vec<Rational> {
    (0..3).map(|_| random_rational(rng, bound)).collect()
}

/// Point on the unit sphere: `(2p, 2q, p^2 + q^2 - 1) / (p^2 + q^2 + 1)`.
pub fn unit_direction(p: &Rational, q: &Rational) -> [Rational; 3] {
    let s = p.square() + q.square();
    let den = &s + Rational::from_i64(1);
    let two = Rational::from_i64(2);
    [
        &two * p / &den,
        &two * q / &den,
        (s - Rational::from_i64(1)) / den,
    ]
}

pub fn random_unit_direction(rng: &mut Rng8, bound: i64) -> [Rational; 3] {
    let p = random_rational(rng, bound);
    let q = random_rational(rng, bound);
    unit_direction(&p, &q)
}

fn offset(x: &[Rational], d: &[Rational]) -> Vec<Rational> {
    x.iter().zip(d).map(|(a, b)| a + b).collect()
}

/// Affine world pair at distance one.
pub fn sample_unit_pair_with(
    rng: &mut Rng8,
) -> (ProjectivePoint<Rational>, ProjectivePoint<Rational>) {
    let x = random_affine(rng, RATIONAL_BOUND);
    let d = random_unit_direction(rng, RATIONAL_BOUND);
    let y = offset(&x, &d);
    (
        ProjectivePoint::from_affine(&x),
        ProjectivePoint::from_affine(&y),
    )
}

pub fn sample_unit_pair(seed: u64) -> (ProjectivePoint<Rational>, ProjectivePoint<Rational>) {
    sample_unit_pair_with(&mut rng(seed))
}

/// Affine world pair at a random rational distance other than one.
pub fn sample_generic_pair_with(
    rng: &mut Rng8,
) -> (ProjectivePoint<Rational>, ProjectivePoint<Rational>) {
    let x = random_affine(rng, RATIONAL_BOUND);
    loop {
        let d = random_affine(rng, RATIONAL_BOUND);
        let len2 = d
            .iter()
            .fold(Rational::from_i64(0), |acc, v| acc + v.square());
        if len2 != Rational::from_i64(1) && len2 != Rational::from_i64(0) {
            let y = offset(&x, &d);
            return (
                ProjectivePoint::from_affine(&x),
                ProjectivePoint::from_affine(&y),
            );
        }
    }
}

/// Random rational rotation (from a quaternion with small integer entries)
/// and translation.
pub fn random_motion(rng: &mut Rng8) -> RigidMotion<Rational> {
    loop {
        let q: [Rational; 4] =
            std::array::from_fn(|_| Rational::from_i64(rng.random_range(-5..=5)));
        let t = random_affine(rng, 10);
        if let Ok(m) = RigidMotion::from_quaternion(q, t) {
            return m;
        }
    }
}

/// Forward image that avoids focal points; `None` when `x` is one.
pub fn images(
    rig: &CameraRig<Rational>,
    x: &ProjectivePoint<Rational>,
) -> Option<ImageTuple<Rational>> {
    rig.forward_map(x).ok()
}

/// Constraint metadata attached to the world data of a scene.
#[derive(Debug, Clone, PartialEq)]
pub enum WorldConstraint<S> {
    None,
    Distance(S),
    Coplanar,
    PairwiseDistances([S; 3]),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Noise {
    pub sigma: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct Scene<S> {
    pub rig: CameraRig<S>,
    pub world: Vec<ProjectivePoint<S>>,
    pub constraint: WorldConstraint<S>,
    pub images: Vec<ImageTuple<S>>,
    pub noise: Option<Noise>,
}

impl Scene<Rational> {
    pub fn new(
        rig: CameraRig<Rational>,
        world: Vec<ProjectivePoint<Rational>>,
        constraint: WorldConstraint<Rational>,
    ) -> Result<Self> {
        let images = world
            .iter()
            .map(|x| rig.forward_map(x))
            .collect::<Result<Vec<_>>>()?;
        Ok(Scene {
            rig,
            world,
            constraint,
            images,
            noise: None,
        })
    }

    /// Random unit-distance pair seen by `rig`; redrawn if it hits a focal point.
    pub fn unit_pair(rig: CameraRig<Rational>, rng: &mut Rng8) -> Result<Self> {
        for _ in 0..MAX_REDRAWS {
            let (x, y) = sample_unit_pair_with(rng);
            if images(&rig, &x).is_some() && images(&rig, &y).is_some() {
                return Scene::new(
                    rig,
                    vec![x, y],
                    WorldConstraint::Distance(Rational::from_i64(1)),
                );
            }
        }
        Err(Error::Exhausted(MAX_REDRAWS))
    }

    /// Float copy with Gaussian noise on the affine image coordinates.
    pub fn with_noise(&self, noise: Noise) -> Scene<f64> {
        let mut r = rng(noise.seed);
        let normal = Normal::new(0.0, noise.sigma.max(0.0)).expect("finite sigma");
        let images = self
            .images
            .iter()
            .map(|t| {
                t.iter()
                    .map(|u| {
                        let c = u.to_f64();
                        let c = c.coords();
                        let a = c[0] / c[2] + normal.sample(&mut r);
                        let b = c[1] / c[2] + normal.sample(&mut r);
                        ProjectivePoint::new(vec![a, b, 1.0]).expect("nonzero")
                    })
                    .collect()
            })
            .collect();
        Scene {
            rig: self.rig.to_f64(),
            world: self.world.iter().map(ProjectivePoint::to_f64).collect(),
            constraint: match &self.constraint {
                WorldConstraint::None => WorldConstraint::None,
                WorldConstraint::Distance(d) => WorldConstraint::Distance(Scalar::to_f64(d)),
                WorldConstraint::Coplanar => WorldConstraint::Coplanar,
                WorldConstraint::PairwiseDistances(d) => WorldConstraint::PairwiseDistances([
                    d[0].to_f64(),
                    d[1].to_f64(),
                    d[2].to_f64(),
                ]),
            },
            images,
            noise: Some(noise),
        }
    }
}

/// Random invertible 3x3 integer matrix.
pub fn random_invertible(rng: &mut Rng8) -> Mat<Rational> {
    loop {
        let rows: Vec<Vec<Rational>> = (0..3)
            .map(|_| {
                (0..3)
                    .map(|_| Rational::from_i64(rng.random_range(-5..=5)))
                    .collect()
            })
            .collect();
        let m = Mat::from_rows(rows).expect("3x3");
        if !crate::linalg::det(&m).expect("square").is_zero() {
            return m;
        }
    }
}
