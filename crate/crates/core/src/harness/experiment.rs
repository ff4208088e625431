use std::fmt;
use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::random::*;
use crate::camera::{CameraRig, ImageTuple, ProjectivePoint};
use crate::constraints::{
    collinearity_discriminant, rigid_membership_by_equations, rigid_membership_oracle,
    triangle_inequality_ok, ConstraintSystem, Evaluation, Family, FamilyParams,
};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::polyspace::{
    conjecture_generator_count, span_facts, EXPECTED_OCTIC_SPAN, EXPECTED_QUOTIENT,
};
use crate::scalar::{Rational, Scalar};
use crate::tolerance::Tolerances;
use crate::triangulate::nontriangulable_locus;

/// Arithmetic used to evaluate constraints in a run. Samples are always
/// generated exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Exact,
    Float,
}

impl Backend {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Backend::Exact),
            "float" => Ok(Backend::Float),
            _ => Err(Error::Parse(format!("unknown backend {s:?}"))),
        }
    }
}

/// Scalars a rational sample can be carried into.
pub trait FromRational: Scalar {
    fn from_rational(q: &Rational) -> Self;
}

impl FromRational for Rational {
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
}

impl FromRational for f64 {
    fn from_rational(q: &Rational) -> Self {
        Scalar::to_f64(q)
    }
}

pub fn lift_rig<S: FromRational>(rig: &CameraRig<Rational>) -> Result<CameraRig<S>> {
    CameraRig::new(
        rig.cameras()
            .iter()
            .map(|c| c.matrix().map(S::from_rational))
            .collect(),
    )
}

pub fn lift_tuple<S: FromRational>(t: &[ProjectivePoint<Rational>]) -> ImageTuple<S> {
    t.iter()
        .map(|p| {
            ProjectivePoint::new(p.coords().iter().map(S::from_rational).collect())
                .expect("nonzero")
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExperimentTag {
    /// Octic, bilinear and trilinear constraints vanish on members.
    #[serde(rename = "VANISH")]
    Vanish,
    /// Images of pairs at other distances violate some octic.
    #[serde(rename = "SEPARATE")]
    Separate,
    /// Verdicts of the full octic family agree with the geometric oracle.
    #[serde(rename = "THM32_EQUIV")]
    Equivalence,
    /// Verdicts of the sixteen octics agree with the oracle for three cameras.
    #[serde(rename = "COR34_SIXTEEN")]
    SixteenOctics,
    /// Span dimensions of the two-camera octics.
    #[serde(rename = "SPAN_126_9")]
    SpanDimensions,
    #[serde(rename = "COUNTS")]
    Counts,
    /// The epipole pair is the only non-triangulable point of a camera pair.
    #[serde(rename = "EPIPOLE_COMPONENT")]
    EpipoleComponent,
    #[serde(rename = "GROUP_ACTION")]
    GroupAction,
    #[serde(rename = "COPLANAR")]
    Coplanar,
    #[serde(rename = "PAIRWISE_TRIANGLE")]
    PairwiseTriangle,
}

impl ExperimentTag {
    pub const ALL: [ExperimentTag; 10] = [
        ExperimentTag::Vanish,
        ExperimentTag::Separate,
        ExperimentTag::Equivalence,
        ExperimentTag::SixteenOctics,
        ExperimentTag::SpanDimensions,
        ExperimentTag::Counts,
        ExperimentTag::EpipoleComponent,
        ExperimentTag::GroupAction,
        ExperimentTag::Coplanar,
        ExperimentTag::PairwiseTriangle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentTag::Vanish => "VANISH",
            ExperimentTag::Separate => "SEPARATE",
            ExperimentTag::Equivalence => "THM32_EQUIV",
            ExperimentTag::SixteenOctics => "COR34_SIXTEEN",
            ExperimentTag::SpanDimensions => "SPAN_126_9",
            ExperimentTag::Counts => "COUNTS",
            ExperimentTag::EpipoleComponent => "EPIPOLE_COMPONENT",
            ExperimentTag::GroupAction => "GROUP_ACTION",
            ExperimentTag::Coplanar => "COPLANAR",
            ExperimentTag::PairwiseTriangle => "PAIRWISE_TRIANGLE",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown experiment {s:?}")))
    }

    /// Camera counts cycled through when none is configured.
    fn default_ns(self) -> &'static [usize] {
        match self {
            ExperimentTag::Vanish | ExperimentTag::Separate => &[2, 3, 4],
            ExperimentTag::Equivalence | ExperimentTag::GroupAction => &[2, 3],
            ExperimentTag::Coplanar | ExperimentTag::PairwiseTriangle => &[2, 3],
            ExperimentTag::SixteenOctics => &[3],
            ExperimentTag::SpanDimensions | ExperimentTag::EpipoleComponent => &[2],
            ExperimentTag::Counts => &[2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12],
        }
    }

    fn accepts(self, n: usize) -> bool {
        match self {
            ExperimentTag::SixteenOctics => n >= 3,
            ExperimentTag::SpanDimensions | ExperimentTag::EpipoleComponent => n == 2,
            ExperimentTag::Counts => n >= 2,
            // exact octic families grow as C(n,2)^2
            _ => (2..=6).contains(&n),
        }
    }

    fn supports_float(self) -> bool {
        matches!(
            self,
            ExperimentTag::Vanish
                | ExperimentTag::Separate
                | ExperimentTag::Equivalence
                | ExperimentTag::SixteenOctics
                | ExperimentTag::GroupAction
                | ExperimentTag::Counts
        )
    }
}

impl fmt::Display for ExperimentTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    /// Fixed camera count; `None` cycles through the tag's defaults.
    pub n: Option<usize>,
    pub samples: usize,
    pub seed: u64,
    pub height: Height,
    pub backend: Backend,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n: None,
            samples: 100,
            seed: 0,
            height: Height::default(),
            backend: Backend::Exact,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleRecord {
    pub index: usize,
    pub seed: u64,
    pub n: usize,
    pub kind: &'static str,
    pub pass: bool,
    /// Largest normalized constraint value relevant to the verdict.
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub experiment: ExperimentTag,
    pub config: ExperimentConfig,
    pub passed: usize,
    pub failed: usize,
    pub pass: bool,
    pub samples: Vec<SampleRecord>,
    /// Not serialized, so reports stay byte-identical across runs.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl ExperimentReport {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("serializable")
    }

    pub fn failures(&self) -> impl Iterator<Item = &SampleRecord> {
        self.samples.iter().filter(|s| !s.pass)
    }
}

/// Run `config.samples` seeded samples in parallel. Sample `i` depends only on
/// `(tag, config, i)`; records are returned in sample order.
pub fn run_experiment(tag: ExperimentTag, config: &ExperimentConfig) -> Result<ExperimentReport> {
    if let Some(n) = config.n {
        if !tag.accepts(n) {
            return Err(Error::InvalidParameter(format!(
                "{tag} does not run with n = {n}"
            )));
        }
    }
    if config.backend == Backend::Float && !tag.supports_float() {
        return Err(Error::InvalidParameter(format!(
            "{tag} runs on the exact backend only"
        )));
    }
    let start = Instant::now();
    let count = match (tag, config.n) {
        (ExperimentTag::Counts, None) => tag.default_ns().len(),
        _ => config.samples,
    };
    let samples = (0..count)
        .into_par_iter()
        .map(|i| {
            let n = config.n.unwrap_or_else(|| {
                let ns = tag.default_ns();
                ns[i % ns.len()]
            });
            let seed = sub_seed(config.seed, i as u64);
            let mut rec = match config.backend {
                Backend::Exact => run_sample::<Rational>(tag, config, i, n, seed),
                Backend::Float => run_sample::<f64>(tag, config, i, n, seed),
            }
            .unwrap_or_else(|e| SampleRecord {
                index: i,
                seed,
                n,
                kind: "error",
                pass: false,
                residual: f64::NAN,
                detail: Some(e.to_string()),
            });
            rec.index = i;
            rec.seed = seed;
            rec.n = n;
            rec
        })
        .collect::<Vec<_>>();
    let passed = samples.iter().filter(|s| s.pass).count();
    Ok(ExperimentReport {
        experiment: tag,
        config: config.clone(),
        passed,
        failed: samples.len() - passed,
        pass: passed == samples.len() && !samples.is_empty(),
        samples,
        elapsed: start.elapsed(),
    })
}

fn record(kind: &'static str, pass: bool, residual: f64, detail: Option<String>) -> SampleRecord {
    SampleRecord {
        index: 0,
        seed: 0,
        n: 0,
        kind,
        pass,
        residual,
        detail,
    }
}

fn max_normalized<S: Scalar>(evals: &[Evaluation<S>]) -> f64 {
    evals.iter().map(Evaluation::normalized).fold(0.0, f64::max)
}

fn run_sample<S: FromRational>(
    tag: ExperimentTag,
    config: &ExperimentConfig,
    index: usize,
    n: usize,
    seed: u64,
) -> Result<SampleRecord> {
    let mut r = rng(seed);
    let tol = Tolerances::default();
    match tag {
        ExperimentTag::Counts => counts_sample(n),
        ExperimentTag::SpanDimensions => {
            let rig = random_rig_with(&mut r, n, config.height)?;
            let f = span_facts(&rig, r.random())?;
            let pass = f.octic_span == EXPECTED_OCTIC_SPAN && f.quotient() == EXPECTED_QUOTIENT;
            let detail = format!(
                "octic span {}, ideal span {}, joint span {}, quotient {}",
                f.octic_span,
                f.ideal_span,
                f.joint_span,
                f.quotient()
            );
            Ok(record("rig", pass, 0.0, Some(detail)))
        }
        _ => {
            let rig = random_rig_with(&mut r, n, config.height)?;
            match tag {
                ExperimentTag::Vanish => vanish_sample::<S>(&rig, &mut r, &tol),
                ExperimentTag::Separate => separate_sample::<S>(&rig, &mut r, &tol),
                ExperimentTag::Equivalence => {
                    equivalence_sample::<S>(&rig, &mut r, index, Family::OcticFull, &tol)
                }
                ExperimentTag::SixteenOctics => {
                    equivalence_sample::<S>(&rig, &mut r, index, Family::OcticSixteen, &tol)
                }
                ExperimentTag::EpipoleComponent => epipole_sample(&rig, &mut r, &tol),
                ExperimentTag::GroupAction => group_action_sample::<S>(&rig, &mut r, index, &tol),
                ExperimentTag::Coplanar => coplanar_sample(&rig, &mut r),
                ExperimentTag::PairwiseTriangle => pairwise_sample(&rig, &mut r, index),
                ExperimentTag::Counts | ExperimentTag::SpanDimensions => unreachable!(),
            }
        }
    }
}

/// Totals for small camera counts, and the split by total degree of the
/// generators for three to five cameras.
const KNOWN_TOTALS: [(u64, u64); 4] = [(2, 11), (3, 177), (4, 1176), (5, 4940)];
const KNOWN_BY_DEGREE: [(u64, [(u32, u64); 5]); 3] = [
    (3, [(2, 6), (3, 2), (6, 1), (7, 24), (8, 144)]),
    (4, [(2, 12), (3, 8), (6, 16), (7, 240), (8, 900)]),
    (5, [(2, 20), (3, 20), (6, 100), (7, 1200), (8, 3600)]),
];

fn counts_sample(n: usize) -> Result<SampleRecord> {
    let c = conjecture_generator_count(n as u64)?;
    let mut pass = c.consistent();
    if let Some((_, t)) = KNOWN_TOTALS.iter().find(|(m, _)| *m == c.n) {
        pass &= c.total == *t;
    }
    if let Some((_, by)) = KNOWN_BY_DEGREE.iter().find(|(m, _)| *m == c.n) {
        pass &= by.iter().all(|(d, k)| c.by_total_degree.get(d) == Some(k));
    }
    Ok(record(
        "count",
        pass,
        0.0,
        Some(format!("total {}", c.total)),
    ))
}

fn unit_pair_images(
    rig: &CameraRig<Rational>,
    r: &mut Rng8,
) -> Result<(ImageTuple<Rational>, ImageTuple<Rational>)> {
    let scene = Scene::unit_pair(rig.clone(), r)?;
    let mut it = scene.images.into_iter();
    Ok((it.next().expect("two"), it.next().expect("two")))
}

fn generic_pair_images(
    rig: &CameraRig<Rational>,
    r: &mut Rng8,
) -> Result<(ImageTuple<Rational>, ImageTuple<Rational>)> {
    for _ in 0..MAX_REDRAWS {
        let (x, y) = sample_generic_pair_with(r);
        if let (Some(u), Some(v)) = (images(rig, &x), images(rig, &y)) {
            return Ok((u, v));
        }
    }
    Err(Error::Exhausted(MAX_REDRAWS))
}

fn vanish_sample<S: FromRational>(
    rig: &CameraRig<Rational>,
    r: &mut Rng8,
    tol: &Tolerances,
) -> Result<SampleRecord> {
    let (u, v) = unit_pair_images(rig, r)?;
    let rig = lift_rig::<S>(rig)?;
    let (u, v) = (lift_tuple::<S>(&u), lift_tuple::<S>(&v));
    let mut families = vec![Family::OcticFull, Family::MultiviewBilinear];
    if rig.n() >= 3 {
        families.push(Family::MultiviewTrilinear);
    }
    let mut worst = 0.0f64;
    let mut pass = true;
    for f in families {
        let sys = ConstraintSystem::new(&rig, f, FamilyParams::default())?;
        let evals = sys.evaluate(&[&u, &v])?;
        pass &= evals.iter().all(|e| e.vanishes(tol.vanish));
        worst = worst.max(max_normalized(&evals));
    }
    Ok(record("member", pass, worst, None))
}

fn separate_sample<S: FromRational>(
    rig: &CameraRig<Rational>,
    r: &mut Rng8,
    tol: &Tolerances,
) -> Result<SampleRecord> {
    let (u, v) = generic_pair_images(rig, r)?;
    let rig = lift_rig::<S>(rig)?;
    let (u, v) = (lift_tuple::<S>(&u), lift_tuple::<S>(&v));
    let sys = ConstraintSystem::new(&rig, Family::OcticNine, FamilyParams::default())?;
    let evals = sys.evaluate(&[&u, &v])?;
    let violated = evals.iter().any(|e| !e.vanishes(tol.vanish));
    let oracle = rigid_membership_oracle(&rig, &u, &v, tol)?;
    Ok(record(
        "nonmember",
        violated && !oracle,
        max_normalized(&evals),
        Some(format!("octic violated {violated}, oracle {oracle}")),
    ))
}

/// A unit pair `(X, Y)` with `Y` on the line through the first two focal
/// points, so the pair `(0, 1)` sees `Y` only through its epipoles.
fn baseline_member(
    rig: &CameraRig<Rational>,
    r: &mut Rng8,
) -> Result<(ImageTuple<Rational>, ImageTuple<Rational>)> {
    let f0 = rig.focal_point(0).coords();
    let f1 = rig.focal_point(1).coords();
    for _ in 0..MAX_REDRAWS {
        let (a, b) = (random_rational(r, 10), random_rational(r, 10));
        let y: Vec<Rational> = f0.iter().zip(f1).map(|(p, q)| &a * p + &b * q).collect();
        let Ok(y) = ProjectivePoint::new(y) else {
            continue;
        };
        let Some(ya) = y.dehomogenize() else { continue };
        let d = random_unit_direction(r, RATIONAL_BOUND);
        let x = ProjectivePoint::from_affine(
            &ya.iter().zip(&d).map(|(p, q)| p + q).collect::<Vec<_>>(),
        );
        let y = ProjectivePoint::from_affine(&ya);
        if let (Some(u), Some(v)) = (images(rig, &x), images(rig, &y)) {
            return Ok((u, v));
        }
    }
    Err(Error::Exhausted(MAX_REDRAWS))
}

/// Images of a random world point together with the epipole pair of cameras
/// 0 and 1 (two cameras only).
fn epipole_component(
    rig: &CameraRig<Rational>,
    r: &mut Rng8,
) -> Result<(ImageTuple<Rational>, ImageTuple<Rational>)> {
    let (e0, e1) = rig.epipole_pair(0, 1).ok_or(Error::FocalPoint(None))?;
    for _ in 0..MAX_REDRAWS {
        let x = ProjectivePoint::from_affine(&random_affine(r, RATIONAL_BOUND));
        if let Some(u) = images(rig, &x) {
            return Ok((u, vec![e0.clone(), e1.clone()]));
        }
    }
    Err(Error::Exhausted(MAX_REDRAWS))
}

fn equivalence_sample<S: FromRational>(
    rig: &CameraRig<Rational>,
    r: &mut Rng8,
    index: usize,
    family: Family,
    tol: &Tolerances,
) -> Result<SampleRecord> {
    let (kind, (u, v)) = match index % 3 {
        0 => ("member", unit_pair_images(rig, r)?),
        1 => ("nonmember", generic_pair_images(rig, r)?),
        _ if rig.n() == 2 => {
            let (a, b) = epipole_component(rig, r)?;
            if index.is_multiple_of(2) {
                ("epipole component", (a, b))
            } else {
                ("epipole component", (b, a))
            }
        }
        _ => ("baseline member", baseline_member(rig, r)?),
    };
    let rig = lift_rig::<S>(rig)?;
    let (u, v) = (lift_tuple::<S>(&u), lift_tuple::<S>(&v));
    let sys = ConstraintSystem::new(&rig, family, FamilyParams::default())?;
    let by_eq = rigid_membership_by_equations(&sys, &u, &v, tol)?;
    let oracle = rigid_membership_oracle(&rig, &u, &v, tol)?;
    let residual = max_normalized(&sys.evaluate(&[&u, &v])?);
    Ok(record(
        kind,
        by_eq == oracle,
        residual,
        Some(format!("equations {by_eq}, oracle {oracle}")),
    ))
}

fn epipole_sample(
    rig: &CameraRig<Rational>,
    r: &mut Rng8,
    tol: &Tolerances,
) -> Result<SampleRecord> {
    let locus = nontriangulable_locus(rig, 0, 1, tol)?;
    let (e0, e1) = rig.epipole_pair(0, 1).ok_or(Error::FocalPoint(None))?;
    let at_epipoles = locus
        .point
        .as_ref()
        .is_some_and(|(a, b)| a.proj_eq(&e0, tol.angle) && b.proj_eq(&e1, tol.angle));
    let (u, v) = epipole_component(rig, r)?;
    let sys = ConstraintSystem::new(rig, Family::OcticFull, FamilyParams::default())?;
    let evals = sys.evaluate(&[&u, &v])?;
    let vanish = evals.iter().all(|e| e.vanishes(tol.vanish));
    let oracle = rigid_membership_oracle(rig, &u, &v, tol)?;
    Ok(record(
        "rig",
        locus.is_single_point() && at_epipoles && vanish && oracle,
        max_normalized(&evals),
        Some(format!(
            "single point {}, at epipoles {at_epipoles}, rank there {:?}, octics vanish {vanish}",
            locus.is_single_point(),
            locus.rank_at_point
        )),
    ))
}

fn verdict<S: Scalar>(
    rig: &CameraRig<S>,
    u: &[ProjectivePoint<S>],
    v: &[ProjectivePoint<S>],
    tol: &Tolerances,
) -> Result<bool> {
    let sys = ConstraintSystem::new(rig, Family::OcticFull, FamilyParams::default())?;
    rigid_membership_by_equations(&sys, u, v, tol)
}

/// Verdicts are unchanged by a rigid motion of the world and by projective
/// changes of image coordinates.
fn group_action_sample<S: FromRational>(
    rig: &CameraRig<Rational>,
    r: &mut Rng8,
    index: usize,
    tol: &Tolerances,
) -> Result<SampleRecord> {
    let member = index.is_multiple_of(2);
    let (x, y) = loop {
        let (x, y) = if member {
            sample_unit_pair_with(r)
        } else {
            sample_generic_pair_with(r)
        };
        if images(rig, &x).is_some() && images(rig, &y).is_some() {
            break (x, y);
        }
    };
    let motion = random_motion(r);
    let moved = rig.apply_right_action(&motion.matrix())?;
    let inv = motion.inverse();
    let (xm, ym) = (inv.apply(&x), inv.apply(&y));
    let (u, v) = (rig.forward_map(&x)?, rig.forward_map(&y)?);
    let (um, vm) = (moved.forward_map(&xm)?, moved.forward_map(&ym)?);
    let same_images = u
        .iter()
        .chain(&v)
        .zip(um.iter().chain(&vm))
        .all(|(a, b)| a.proj_eq(b, tol.angle));

    let ms: Vec<Mat<Rational>> = (0..rig.n()).map(|_| random_invertible(r)).collect();
    let relabeled = rig.apply_left_action(&ms)?;
    let act = |t: &[ProjectivePoint<Rational>]| -> Result<ImageTuple<Rational>> {
        t.iter()
            .zip(&ms)
            .map(|(p, m)| ProjectivePoint::new(m.mul_vec(p.coords())?))
            .collect()
    };
    let (ul, vl) = (act(&u)?, act(&v)?);

    let base = verdict(&lift_rig::<S>(rig)?, &lift_tuple(&u), &lift_tuple(&v), tol)?;
    let right = verdict(
        &lift_rig::<S>(&moved)?,
        &lift_tuple(&um),
        &lift_tuple(&vm),
        tol,
    )?;
    let left = verdict(
        &lift_rig::<S>(&relabeled)?,
        &lift_tuple(&ul),
        &lift_tuple(&vl),
        tol,
    )?;
    Ok(record(
        if member { "member" } else { "nonmember" },
        same_images && base == member && right == base && left == base,
        0.0,
        Some(format!(
            "verdicts {base}/{right}/{left}, images preserved {same_images}"
        )),
    ))
}

fn coplanar_sample(rig: &CameraRig<Rational>, r: &mut Rng8) -> Result<SampleRecord> {
    let world = |r: &mut Rng8, planar: bool| -> Vec<ProjectivePoint<Rational>> {
        let p: Vec<Vec<Rational>> = (0..3).map(|_| random_affine(r, RATIONAL_BOUND)).collect();
        let fourth = if planar {
            let (s, t) = (random_rational(r, 10), random_rational(r, 10));
            (0..3)
                .map(|i| &p[0][i] + &s * (&p[1][i] - &p[0][i]) + &t * (&p[2][i] - &p[0][i]))
                .collect()
        } else {
            random_affine(r, RATIONAL_BOUND)
        };
        p.iter()
            .chain(std::iter::once(&fourth))
            .map(|a| ProjectivePoint::from_affine(a))
            .collect()
    };
    let sys = ConstraintSystem::new(rig, Family::Coplanar, FamilyParams::default())?;
    let mut run = |planar: bool| -> Result<(bool, f64)> {
        for _ in 0..MAX_REDRAWS {
            let pts = world(r, planar);
            let Some(tuples) = pts
                .iter()
                .map(|x| images(rig, x))
                .collect::<Option<Vec<_>>>()
            else {
                continue;
            };
            let refs: Vec<&[ProjectivePoint<Rational>]> =
                tuples.iter().map(Vec::as_slice).collect();
            let evals = sys.evaluate(&refs)?;
            return Ok((
                evals.iter().all(|e| e.vanishes(0.0)),
                max_normalized(&evals),
            ));
        }
        Err(Error::Exhausted(MAX_REDRAWS))
    };
    let (planar_zero, residual) = run(true)?;
    let (generic_zero, _) = run(false)?;
    Ok(record(
        "four points",
        planar_zero && !generic_zero,
        residual,
        Some(format!(
            "coplanar vanish {planar_zero}, generic vanish {generic_zero}"
        )),
    ))
}

/// Integer triangles with rational coordinates: a scalene one, a right one
/// and a degenerate one on a line.
const TRIANGLES: [([[i64; 2]; 3], [i64; 3]); 3] = [
    ([[0, 0], [14, 0], [5, 12]], [14, 13, 15]),
    ([[0, 0], [3, 0], [0, 4]], [3, 4, 5]),
    ([[0, 0], [1, 0], [2, 0]], [1, 2, 1]),
];

fn pairwise_sample(rig: &CameraRig<Rational>, r: &mut Rng8, index: usize) -> Result<SampleRecord> {
    let (corners, d) = TRIANGLES[index % TRIANGLES.len()];
    let d: [Rational; 3] = d.map(Rational::from_i64);
    let tuples = loop {
        let motion = random_motion(r);
        let pts = corners.map(|[a, b]| {
            motion.apply(&ProjectivePoint::from_affine(&[
                Rational::from_i64(a),
                Rational::from_i64(b),
                Rational::from_i64(0),
            ]))
        });
        if let Some(t) = pts
            .iter()
            .map(|x| images(rig, x))
            .collect::<Option<Vec<_>>>()
        {
            break t;
        }
    };
    let refs: Vec<&[ProjectivePoint<Rational>]> = tuples.iter().map(Vec::as_slice).collect();
    let params = |d: [Rational; 3]| FamilyParams {
        form: None,
        distances: Some(d),
    };
    let sys = ConstraintSystem::new(rig, Family::PairwiseDistance, params(d.clone()))?;
    let evals = sys.evaluate(&refs)?;
    let vanish = evals.iter().all(|e| e.vanishes(0.0));
    let mut wrong = d.clone();
    wrong[2] = &wrong[2] + Rational::from_i64(1);
    let wrong_sys = ConstraintSystem::new(rig, Family::PairwiseDistance, params(wrong))?;
    let detects = wrong_sys.evaluate(&refs)?.iter().any(|e| !e.vanishes(0.0));
    let disc = collinearity_discriminant(&d[0], &d[1], &d[2])?;
    let strict = triangle_inequality_ok(&d[0], &d[1], &d[2])?;
    let collinear = index % TRIANGLES.len() == 2;
    let shape_ok = if collinear {
        disc.is_zero() && !strict
    } else {
        !disc.is_zero() && strict
    };
    Ok(record(
        if collinear {
            "collinear triangle"
        } else {
            "triangle"
        },
        vanish && detects && shape_ok,
        max_normalized(&evals),
        Some(format!(
            "vanish {vanish}, wrong distance detected {detects}, discriminant {disc}"
        )),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_round_trip() {
        for t in ExperimentTag::ALL {
            assert_eq!(ExperimentTag::parse(t.name()).unwrap(), t);
            assert_eq!(
                serde_json::to_value(t).unwrap(),
                Value::String(t.name().into())
            );
        }
        assert!(ExperimentTag::parse("NOPE").is_err());
    }

    #[test]
    fn config_checks() {
        let cfg = ExperimentConfig {
            n: Some(2),
            ..Default::default()
        };
        assert!(run_experiment(ExperimentTag::SixteenOctics, &cfg).is_err());
        let cfg = ExperimentConfig {
            backend: Backend::Float,
            ..Default::default()
        };
        assert!(run_experiment(ExperimentTag::SpanDimensions, &cfg).is_err());
    }

    #[test]
    fn small_runs_pass_and_repeat() {
        let cfg = ExperimentConfig {
            samples: 3,
            seed: 3,
            ..Default::default()
        };
        for tag in [
            ExperimentTag::Vanish,
            ExperimentTag::Separate,
            ExperimentTag::Equivalence,
            ExperimentTag::Counts,
            ExperimentTag::EpipoleComponent,
            ExperimentTag::GroupAction,
            ExperimentTag::Coplanar,
            ExperimentTag::PairwiseTriangle,
        ] {
            let rep = run_experiment(tag, &cfg).unwrap();
            assert!(rep.pass, "{tag}: {:?}", rep.failures().collect::<Vec<_>>());
            let again = run_experiment(tag, &cfg).unwrap();
            assert_eq!(rep.to_json().to_string(), again.to_json().to_string());
        }
    }
}
