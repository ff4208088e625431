//! Polynomial constraints on image tuples: multiview equations, distance
//! octics and their generalizations, plus a reference membership oracle.
//!
//! Every family is evaluated pointwise from wedge vectors of the `B`
//! matrices; no polynomial is expanded here (see [`crate::polyspace`]).

use std::cell::OnceCell;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::camera::{camera_pairs, pair_index, CameraRig, ProjectivePoint};
use crate::error::{Error, Result};
use crate::forms::{polarize, unit_distance_q, BihomForm, QuadTensor};
use crate::linalg::{det, Mat};
use crate::scalar::{norm_f64, Scalar};
use crate::tolerance::Tolerances;
use crate::triangulate::{b_matrix, find_witness, hadamard_bound};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Family {
    MultiviewBilinear,
    MultiviewTrilinear,
    OcticFull,
    OcticNine,
    OcticSixteen,
    Coplanar,
    PairwiseDistance,
    GeneralDe,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::MultiviewBilinear,
        Family::MultiviewTrilinear,
        Family::OcticFull,
        Family::OcticNine,
        Family::OcticSixteen,
        Family::Coplanar,
        Family::PairwiseDistance,
        Family::GeneralDe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::MultiviewBilinear => "MULTIVIEW_BILINEAR",
            Family::MultiviewTrilinear => "MULTIVIEW_TRILINEAR",
            Family::OcticFull => "OCTIC_FULL",
            Family::OcticNine => "OCTIC_NINE",
            Family::OcticSixteen => "OCTIC_SIXTEEN",
            Family::Coplanar => "COPLANAR",
            Family::PairwiseDistance => "PAIRWISE_DISTANCE",
            Family::GeneralDe => "GENERAL_DE",
        }
    }

    pub fn parse(s: &str) -> Result<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown family {s:?}")))
    }

    pub fn is_octic(self) -> bool {
        matches!(
            self,
            Family::OcticFull | Family::OcticNine | Family::OcticSixteen
        )
    }

    /// Number of image tuples an evaluator consumes.
    pub fn arity(self) -> usize {
        match self {
            Family::Coplanar => 4,
            Family::PairwiseDistance => 3,
            _ => 2,
        }
    }
}

/// A camera pair `j < k` and a deleted row of its `B` matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRow {
    pub pair: (usize, usize),
    pub row: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstraintIndex {
    /// `det B^{jk}` on tuple `side`.
    Bilinear { side: usize, pair: (usize, usize) },
    /// The 7x7 minor of the stacked 9x7 matrix with two rows deleted.
    Trilinear {
        side: usize,
        triple: (usize, usize, usize),
        deleted: (usize, usize),
    },
    /// `T(w[u_pair, u_rows.0], w[u_pair, u_rows.1], w[v_pair, v_rows.0], w[v_pair, v_rows.1])`.
    Octic {
        u_pair: (usize, usize),
        u_rows: (usize, usize),
        v_pair: (usize, usize),
        v_rows: (usize, usize),
    },
    /// `det` of four wedge vectors, one per tuple.
    Coplanar { slots: [PairRow; 4] },
    /// `Q_ij(w_u, w_v)` for world points `i < j` of a triple.
    Pairwise {
        points: (usize, usize),
        u: PairRow,
        v: PairRow,
    },
    /// `q(w_u, w_v)` for a general bihomogeneous `q`.
    General { u: PairRow, v: PairRow },
}

/// One evaluator value together with an a-priori bound on its magnitude,
/// used to normalize the float zero test.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation<S> {
    pub index: ConstraintIndex,
    pub value: S,
    pub scale: f64,
}

impl<S: Scalar> Evaluation<S> {
    pub fn normalized(&self) -> f64 {
        if self.scale > 0.0 {
            self.value.magnitude() / self.scale
        } else {
            self.value.magnitude()
        }
    }

    pub fn vanishes(&self, tol: f64) -> bool {
        if S::EXACT {
            self.value.is_zero()
        } else {
            self.normalized() <= tol
        }
    }

    pub fn to_json(&self) -> Value {
        let value = if S::EXACT && self.value.is_zero() {
            Value::String("0".into())
        } else {
            self.value.to_json()
        };
        json!({"indices": self.index, "value": value})
    }
}

/// Extra data some families need.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyParams<S> {
    /// Distance form for the octic families (unit distance when absent) or
    /// the form of `GENERAL_DE` (required there).
    pub form: Option<BihomForm<S>>,
    /// `(d_12, d_13, d_23)` for `PAIRWISE_DISTANCE`.
    pub distances: Option<[S; 3]>,
}

impl<S> Default for FamilyParams<S> {
    fn default() -> Self {
        FamilyParams {
            form: None,
            distances: None,
        }
    }
}

#[derive(Debug, Clone)]
enum Evaluator<S> {
    None,
    Tensor(QuadTensor<S>),
    Form(BihomForm<S>),
    Pairwise([QuadTensor<S>; 3]),
}

/// An enumerated, evaluable family of constraints for one rig.
#[derive(Debug, Clone)]
pub struct ConstraintSystem<'a, S: Scalar> {
    rig: &'a CameraRig<S>,
    family: Family,
    indices: Vec<ConstraintIndex>,
    evaluator: Evaluator<S>,
}

fn pairs_of(n: usize) -> Vec<(usize, usize)> {
    camera_pairs(n)
}

fn triples_of(n: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                out.push((a, b, c));
            }
        }
    }
    out
}

fn ordered_rows(upto: usize) -> Vec<(usize, usize)> {
    (0..upto)
        .flat_map(|a| (a..upto).map(move |b| (a, b)))
        .collect()
}

fn enumerate(n: usize, family: Family) -> Result<Vec<ConstraintIndex>> {
    let pairs = pairs_of(n);
    let mut out = Vec::new();
    match family {
        Family::MultiviewBilinear => {
            for side in 0..2 {
                for &pair in &pairs {
                    out.push(ConstraintIndex::Bilinear { side, pair });
                }
            }
        }
        Family::MultiviewTrilinear => {
            for side in 0..2 {
                for triple in triples_of(n) {
                    for a in 0..9 {
                        for b in a + 1..9 {
                            out.push(ConstraintIndex::Trilinear {
                                side,
                                triple,
                                deleted: (a, b),
                            });
                        }
                    }
                }
            }
        }
        Family::OcticFull | Family::OcticNine => {
            let rows: Vec<(usize, usize)> = if family == Family::OcticFull {
                ordered_rows(6)
            } else {
                (0..3).map(|i| (i, i)).collect()
            };
            for &u_pair in &pairs {
                for &v_pair in &pairs {
                    for &u_rows in &rows {
                        for &v_rows in &rows {
                            out.push(ConstraintIndex::Octic {
                                u_pair,
                                u_rows,
                                v_pair,
                                v_rows,
                            });
                        }
                    }
                }
            }
        }
        Family::OcticSixteen => {
            if n < 3 {
                return Err(Error::TooFewCameras { needed: 3, got: n });
            }
            for u_pair in [(0, 1), (0, 2)] {
                for v_pair in [(0, 1), (0, 2)] {
                    for i in 0..2 {
                        for k in 0..2 {
                            out.push(ConstraintIndex::Octic {
                                u_pair,
                                u_rows: (i, i),
                                v_pair,
                                v_rows: (k, k),
                            });
                        }
                    }
                }
            }
        }
        Family::Coplanar => {
            let slots: Vec<PairRow> = pairs
                .iter()
                .flat_map(|&pair| (0..2).map(move |row| PairRow { pair, row }))
                .collect();
            for &a in &slots {
                for &b in &slots {
                    for &c in &slots {
                        for &d in &slots {
                            out.push(ConstraintIndex::Coplanar {
                                slots: [a, b, c, d],
                            });
                        }
                    }
                }
            }
        }
        Family::PairwiseDistance | Family::GeneralDe => {
            let points: &[(usize, usize)] = if family == Family::PairwiseDistance {
                &[(0, 1), (0, 2), (1, 2)]
            } else {
                &[(0, 1)]
            };
            for &pts in points {
                for &up in &pairs {
                    for &vp in &pairs {
                        for i in 0..3 {
                            for k in 0..3 {
                                let u = PairRow { pair: up, row: i };
                                let v = PairRow { pair: vp, row: k };
                                out.push(if family == Family::PairwiseDistance {
                                    ConstraintIndex::Pairwise { points: pts, u, v }
                                } else {
                                    ConstraintIndex::General { u, v }
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Wedge vectors shorter than this fraction of their Hadamard bound are
/// rounding noise.
const WEDGE_FLOOR: f64 = 1.5e-8;

/// First four signed maximal minors of `B` with row `i` deleted, and the
/// scale used to normalize forms in them: the vector's own length, floored
/// at a fraction of the Hadamard bound.
fn wedge_tilde<S: Scalar>(b: &Mat<S>, row: usize) -> (Vec<S>, f64) {
    let sub = b.without_row(row);
    let w = (0..4)
        .map(|c| {
            let d = det(&sub.without_column(c)).expect("square");
            if c % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect::<Vec<S>>();
    let scale = norm_f64(&w).max(WEDGE_FLOOR * hadamard_bound(&sub));
    (w, scale)
}

/// Lazily computed wedge vectors of one image tuple.
struct WedgeCache<'t, S: Scalar> {
    rig: &'t CameraRig<S>,
    tuple: &'t [ProjectivePoint<S>],
    b: Vec<OnceCell<Mat<S>>>,
    wedges: Vec<OnceCell<(Vec<S>, f64)>>,
}

impl<'t, S: Scalar> WedgeCache<'t, S> {
    fn new(rig: &'t CameraRig<S>, tuple: &'t [ProjectivePoint<S>]) -> Self {
        let np = rig.n() * (rig.n() - 1) / 2;
        WedgeCache {
            rig,
            tuple,
            b: (0..np).map(|_| OnceCell::new()).collect(),
            wedges: (0..np * 6).map(|_| OnceCell::new()).collect(),
        }
    }

    fn b(&self, (j, k): (usize, usize)) -> &Mat<S> {
        self.b[pair_index(self.rig.n(), j, k)].get_or_init(|| {
            b_matrix(
                self.rig.camera(j).matrix(),
                self.rig.camera(k).matrix(),
                self.tuple[j].coords(),
                self.tuple[k].coords(),
            )
        })
    }

    fn wedge(&self, pr: PairRow) -> &(Vec<S>, f64) {
        let (j, k) = pr.pair;
        let idx = pair_index(self.rig.n(), j, k) * 6 + pr.row;
        self.wedges[idx].get_or_init(|| wedge_tilde(self.b(pr.pair), pr.row))
    }
}

/// `[A_j u_j 0 0; A_k 0 u_k 0; A_l 0 0 u_l]`.
fn stacked_triple<S: Scalar>(
    rig: &CameraRig<S>,
    cams: [usize; 3],
    images: [&ProjectivePoint<S>; 3],
) -> Mat<S> {
    let mut m = Mat::zeros(9, 7);
    for (slot, (&c, u)) in cams.iter().zip(images).enumerate() {
        let a = rig.camera(c).matrix();
        for r in 0..3 {
            for col in 0..4 {
                m[(3 * slot + r, col)] = a[(r, col)].clone();
            }
            m[(3 * slot + r, 4 + slot)] = u.coords()[r].clone();
        }
    }
    m
}

fn valid_pair(n: usize, (j, k): (usize, usize)) -> bool {
    j < k && k < n
}

fn check_index(n: usize, idx: &ConstraintIndex) -> Result<()> {
    let bad = || Error::Index(format!("{idx:?} for n={n}"));
    let pr_ok = |p: &PairRow| valid_pair(n, p.pair) && p.row < 6;
    let ok = match idx {
        ConstraintIndex::Bilinear { pair, .. } => valid_pair(n, *pair),
        ConstraintIndex::Trilinear {
            triple: (a, b, c),
            deleted: (r, s),
            ..
        } => a < b && b < c && *c < n && r < s && *s < 9,
        ConstraintIndex::Octic {
            u_pair,
            u_rows,
            v_pair,
            v_rows,
        } => {
            valid_pair(n, *u_pair)
                && valid_pair(n, *v_pair)
                && [u_rows.0, u_rows.1, v_rows.0, v_rows.1]
                    .iter()
                    .all(|&r| r < 6)
        }
        ConstraintIndex::Coplanar { slots } => slots.iter().all(pr_ok),
        ConstraintIndex::Pairwise {
            points: (i, j),
            u,
            v,
        } => i < j && *j < 3 && pr_ok(u) && pr_ok(v),
        ConstraintIndex::General { u, v } => pr_ok(u) && pr_ok(v),
    };
    if ok {
        Ok(())
    } else {
        Err(bad())
    }
}

impl<'a, S: Scalar> ConstraintSystem<'a, S> {
    pub fn new(rig: &'a CameraRig<S>, family: Family, params: FamilyParams<S>) -> Result<Self> {
        let evaluator = match family {
            Family::MultiviewBilinear | Family::MultiviewTrilinear | Family::Coplanar => {
                Evaluator::None
            }
            Family::OcticFull | Family::OcticNine | Family::OcticSixteen => {
                let q = params.form.unwrap_or_else(unit_distance_q);
                Evaluator::Tensor(polarize(&q)?)
            }
            Family::GeneralDe => Evaluator::Form(
                params
                    .form
                    .ok_or_else(|| Error::InvalidParameter("GENERAL_DE needs a form".into()))?,
            ),
            Family::PairwiseDistance => {
                let [d12, d13, d23] = params.distances.ok_or_else(|| {
                    Error::InvalidParameter("PAIRWISE_DISTANCE needs three distances".into())
                })?;
                let t = |d: &S| -> Result<QuadTensor<S>> {
                    polarize(&crate::forms::scaled_distance_q(d)?)
                };
                Evaluator::Pairwise([t(&d12)?, t(&d13)?, t(&d23)?])
            }
        };
        if family == Family::MultiviewTrilinear && rig.n() < 3 {
            return Err(Error::TooFewCameras {
                needed: 3,
                got: rig.n(),
            });
        }
        Ok(ConstraintSystem {
            rig,
            family,
            indices: enumerate(rig.n(), family)?,
            evaluator,
        })
    }

    /// A system over an explicit index list (checked against the rig).
    pub fn with_indices(
        rig: &'a CameraRig<S>,
        family: Family,
        params: FamilyParams<S>,
        indices: Vec<ConstraintIndex>,
    ) -> Result<Self> {
        let mut sys = Self::new(rig, family, params)?;
        for idx in &indices {
            check_index(rig.n(), idx)?;
        }
        sys.indices = indices;
        Ok(sys)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rig(&self) -> &CameraRig<S> {
        self.rig
    }

    pub fn indices(&self) -> &[ConstraintIndex] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    fn check_tuples(&self, tuples: &[&[ProjectivePoint<S>]]) -> Result<()> {
        let arity = self.family.arity();
        if tuples.len() != arity {
            return Err(Error::Shape(format!(
                "{} takes {arity} image tuples, got {}",
                self.family.name(),
                tuples.len()
            )));
        }
        for t in tuples {
            if t.len() != self.rig.n() || t.iter().any(|p| p.dim() != 3) {
                return Err(Error::Shape(format!(
                    "image tuple must hold {} image points",
                    self.rig.n()
                )));
            }
        }
        Ok(())
    }

    fn eval_one(
        &self,
        caches: &[WedgeCache<'_, S>],
        tuples: &[&[ProjectivePoint<S>]],
        idx: &ConstraintIndex,
    ) -> Evaluation<S> {
        let (value, scale) = match (*idx, &self.evaluator) {
            (ConstraintIndex::Bilinear { side, pair }, _) => {
                let b = caches[side].b(pair);
                (det(b).expect("square"), hadamard_bound(b))
            }
            (
                ConstraintIndex::Trilinear {
                    side,
                    triple,
                    deleted,
                },
                _,
            ) => {
                let t = tuples[side];
                let (a, b, c) = triple;
                let m = stacked_triple(self.rig, [a, b, c], [&t[a], &t[b], &t[c]]);
                let keep: Vec<usize> = (0..9)
                    .filter(|&r| r != deleted.0 && r != deleted.1)
                    .collect();
                let sub = m.select_rows(&keep);
                (det(&sub).expect("square"), hadamard_bound(&sub))
            }
            (
                ConstraintIndex::Octic {
                    u_pair,
                    u_rows,
                    v_pair,
                    v_rows,
                },
                Evaluator::Tensor(t),
            ) => {
                let w = |c: usize, pair, row| caches[c].wedge(PairRow { pair, row });
                let (a, b) = (w(0, u_pair, u_rows.0), w(0, u_pair, u_rows.1));
                let (c, d) = (w(1, v_pair, v_rows.0), w(1, v_pair, v_rows.1));
                (
                    t.eval(&a.0, &b.0, &c.0, &d.0),
                    t.l1_norm() * a.1 * b.1 * c.1 * d.1,
                )
            }
            (ConstraintIndex::Coplanar { slots }, _) => {
                let ws: Vec<&(Vec<S>, f64)> = slots
                    .iter()
                    .enumerate()
                    .map(|(c, pr)| caches[c].wedge(*pr))
                    .collect();
                let m = Mat::from_columns(&ws.iter().map(|w| w.0.clone()).collect::<Vec<_>>())
                    .expect("4x4");
                (
                    det(&m).expect("square"),
                    ws.iter().map(|w| 2.0 * w.1).product(),
                )
            }
            (ConstraintIndex::Pairwise { points, u, v }, Evaluator::Pairwise(ts)) => {
                let t = &ts[match points {
                    (0, 1) => 0,
                    (0, 2) => 1,
                    _ => 2,
                }];
                let a = caches[points.0].wedge(u);
                let b = caches[points.1].wedge(v);
                (
                    t.eval(&a.0, &a.0, &b.0, &b.0),
                    t.l1_norm() * (a.1 * b.1).powi(2),
                )
            }
            (ConstraintIndex::General { u, v }, Evaluator::Form(q)) => {
                let a = caches[0].wedge(u);
                let b = caches[1].wedge(v);
                let (d, e) = q.bidegree();
                (
                    q.eval(&a.0, &b.0),
                    q.l1_norm() * a.1.powi(d as i32) * b.1.powi(e as i32),
                )
            }
            _ => unreachable!("index kind matches family by construction"),
        };
        Evaluation {
            index: *idx,
            value,
            scale,
        }
    }

    /// All evaluator values in index order.
    pub fn evaluate(&self, tuples: &[&[ProjectivePoint<S>]]) -> Result<Vec<Evaluation<S>>> {
        self.check_tuples(tuples)?;
        let caches: Vec<WedgeCache<'_, S>> = tuples
            .iter()
            .map(|t| WedgeCache::new(self.rig, t))
            .collect();
        Ok(self
            .indices
            .iter()
            .map(|idx| self.eval_one(&caches, tuples, idx))
            .collect())
    }

    /// Whether every evaluator vanishes; stops at the first that does not.
    pub fn all_vanish(&self, tuples: &[&[ProjectivePoint<S>]], tol: f64) -> Result<bool> {
        Ok(self.first_nonzero(tuples, tol)?.is_none())
    }

    pub fn first_nonzero(
        &self,
        tuples: &[&[ProjectivePoint<S>]],
        tol: f64,
    ) -> Result<Option<Evaluation<S>>> {
        self.check_tuples(tuples)?;
        let caches: Vec<WedgeCache<'_, S>> = tuples
            .iter()
            .map(|t| WedgeCache::new(self.rig, t))
            .collect();
        for idx in &self.indices {
            let ev = self.eval_one(&caches, tuples, idx);
            if !ev.vanishes(tol) {
                return Ok(Some(ev));
            }
        }
        Ok(None)
    }

    /// `{"family": ..., "n": ..., "indices": [...]}`.
    pub fn to_json(&self) -> Value {
        json!({"family": self.family.name(), "n": self.rig.n(), "indices": self.indices})
    }
}

/// `det B^{jk}` for one tuple.
pub fn bilinear_value<S: Scalar>(
    rig: &CameraRig<S>,
    j: usize,
    k: usize,
    tuple: &[ProjectivePoint<S>],
) -> Result<S> {
    let b = crate::triangulate::assemble_b(rig, j, k, &tuple[j], &tuple[k])?;
    Ok(b.det())
}

/// All 36 maximal minors of `[A_j u_j 0 0; A_k 0 u_k 0; A_l 0 0 u_l]`, in
/// lexicographic order of the two deleted rows.
pub fn trilinear_residuals<S: Scalar>(
    rig: &CameraRig<S>,
    j: usize,
    k: usize,
    l: usize,
    uj: &ProjectivePoint<S>,
    uk: &ProjectivePoint<S>,
    ul: &ProjectivePoint<S>,
) -> Result<Vec<S>> {
    let n = rig.n();
    if j >= n || k >= n || l >= n || j == k || k == l || j == l {
        return Err(Error::Index(format!(
            "camera triple ({j},{k},{l}) for n={n}"
        )));
    }
    let m = stacked_triple(rig, [j, k, l], [uj, uk, ul]);
    let mut out = Vec::with_capacity(36);
    for a in 0..9 {
        for b in a + 1..9 {
            let keep: Vec<usize> = (0..9).filter(|&r| r != a && r != b).collect();
            out.push(det(&m.select_rows(&keep))?);
        }
    }
    Ok(out)
}

fn q_vanishes<S: Scalar>(q: &BihomForm<S>, x: &[S], y: &[S], tol: &Tolerances) -> bool {
    let v = q.eval(x, y);
    if S::EXACT {
        return v.is_zero();
    }
    let (d, e) = q.bidegree();
    let scale = q.l1_norm() * norm_f64(x).powi(d as i32) * norm_f64(y).powi(e as i32);
    v.magnitude() <= tol.vanish * scale
}

/// Membership in the closure of `(X, Y) -> (phi(X), phi(Y))` over `q(X, Y) = 0`,
/// decided geometrically: triangulate both tuples and test `q`. For two
/// cameras, a side equal to the epipole pair belongs to the closure whenever
/// the other side lies in the multiview variety.
pub fn rigid_membership_oracle_with<S: Scalar>(
    rig: &CameraRig<S>,
    q: &BihomForm<S>,
    u: &[ProjectivePoint<S>],
    v: &[ProjectivePoint<S>],
    tol: &Tolerances,
) -> Result<bool> {
    if !rig.multiview_membership(u, tol)?.member || !rig.multiview_membership(v, tol)?.member {
        return Ok(false);
    }
    if rig.n() == 2 {
        if let Some((e1, e2)) = rig.epipole_pair(0, 1) {
            let is_epi = |t: &[ProjectivePoint<S>]| {
                t[0].proj_eq(&e1, tol.angle) && t[1].proj_eq(&e2, tol.angle)
            };
            if is_epi(u) || is_epi(v) {
                return Ok(true);
            }
        }
    }
    let x = find_witness(rig, u, tol)?.ok_or(Error::NotTriangulable)?.2;
    let y = find_witness(rig, v, tol)?.ok_or(Error::NotTriangulable)?.2;
    Ok(q_vanishes(q, x.coords(), y.coords(), tol))
}

pub fn rigid_membership_oracle<S: Scalar>(
    rig: &CameraRig<S>,
    u: &[ProjectivePoint<S>],
    v: &[ProjectivePoint<S>],
    tol: &Tolerances,
) -> Result<bool> {
    rigid_membership_oracle_with(rig, &unit_distance_q(), u, v, tol)
}

/// Both tuples in the multiview variety and every octic of `system` zero.
pub fn rigid_membership_by_equations<S: Scalar>(
    system: &ConstraintSystem<'_, S>,
    u: &[ProjectivePoint<S>],
    v: &[ProjectivePoint<S>],
    tol: &Tolerances,
) -> Result<bool> {
    if !system.family().is_octic() {
        return Err(Error::InvalidParameter(format!(
            "{} is not an octic family",
            system.family().name()
        )));
    }
    let rig = system.rig();
    if !rig.multiview_membership(u, tol)?.member || !rig.multiview_membership(v, tol)?.member {
        return Ok(false);
    }
    system.all_vanish(&[u, v], tol.vanish)
}

/// `T(w(B, i1), w(B, i2), w(C, i3), w(C, i4))` for one choice of pairs and rows.
pub fn octic_eval<S: Scalar>(
    rig: &CameraRig<S>,
    t: &QuadTensor<S>,
    u_sel: ((usize, usize), (usize, usize)),
    v_sel: ((usize, usize), (usize, usize)),
    u: &[ProjectivePoint<S>],
    v: &[ProjectivePoint<S>],
) -> Result<S> {
    let idx = ConstraintIndex::Octic {
        u_pair: u_sel.0,
        u_rows: u_sel.1,
        v_pair: v_sel.0,
        v_rows: v_sel.1,
    };
    check_index(rig.n(), &idx)?;
    let wu = WedgeCache::new(rig, u);
    let wv = WedgeCache::new(rig, v);
    let w = |c: &WedgeCache<'_, S>, pair, row| c.wedge(PairRow { pair, row }).0.clone();
    Ok(t.eval(
        &w(&wu, u_sel.0, u_sel.1 .0),
        &w(&wu, u_sel.0, u_sel.1 .1),
        &w(&wv, v_sel.0, v_sel.1 .0),
        &w(&wv, v_sel.0, v_sel.1 .1),
    ))
}

/// `q(w(B, i), w(C, k))`.
pub fn general_constraint_eval<S: Scalar>(
    rig: &CameraRig<S>,
    q: &BihomForm<S>,
    u_sel: PairRow,
    v_sel: PairRow,
    u: &[ProjectivePoint<S>],
    v: &[ProjectivePoint<S>],
) -> Result<S> {
    check_index(rig.n(), &ConstraintIndex::General { u: u_sel, v: v_sel })?;
    let wu = WedgeCache::new(rig, u);
    let wv = WedgeCache::new(rig, v);
    Ok(q.eval(&wu.wedge(u_sel).0, &wv.wedge(v_sel).0))
}

/// Determinants of four stacked wedge vectors, one per tuple. With
/// `choices = None` the full `COPLANAR` family is evaluated.
pub fn coplanar_residuals<S: Scalar>(
    rig: &CameraRig<S>,
    tuples: [&[ProjectivePoint<S>]; 4],
    choices: Option<Vec<[PairRow; 4]>>,
) -> Result<Vec<S>> {
    let sys = match choices {
        None => ConstraintSystem::new(rig, Family::Coplanar, FamilyParams::default())?,
        Some(c) => ConstraintSystem::with_indices(
            rig,
            Family::Coplanar,
            FamilyParams::default(),
            c.into_iter()
                .map(|slots| ConstraintIndex::Coplanar { slots })
                .collect(),
        )?,
    };
    Ok(sys
        .evaluate(&tuples)?
        .into_iter()
        .map(|e| e.value)
        .collect())
}

fn check_distances<S: Scalar>(d: &[&S; 3]) -> Result<()> {
    if d.iter().any(|x| x.to_f64() <= 0.0 || x.is_zero()) {
        return Err(Error::InvalidParameter("distances must be positive".into()));
    }
    Ok(())
}

/// `(d12 + d13 + d23)(d12 + d13 - d23)(d12 - d13 + d23)(-d12 + d13 + d23)`,
/// zero exactly when the three points are collinear.
pub fn collinearity_discriminant<S: Scalar>(d12: &S, d13: &S, d23: &S) -> Result<S> {
    check_distances(&[d12, d13, d23])?;
    let (a, b, c) = (d12.clone(), d13.clone(), d23.clone());
    Ok((a.clone() + b.clone() + c.clone())
        * (a.clone() + b.clone() - c.clone())
        * (a.clone() - b.clone() + c.clone())
        * (-a + b + c))
}

/// Strict triangle inequality.
pub fn triangle_inequality_ok<S: Scalar>(d12: &S, d13: &S, d23: &S) -> Result<bool> {
    check_distances(&[d12, d13, d23])?;
    let (a, b, c) = (d12.to_f64(), d13.to_f64(), d23.to_f64());
    if S::EXACT {
        let pos = |x: S| !x.is_zero() && x.to_f64() > 0.0;
        return Ok(pos(d12.clone() + d13.clone() - d23.clone())
            && pos(d12.clone() - d13.clone() + d23.clone())
            && pos(-d12.clone() + d13.clone() + d23.clone()));
    }
    Ok(a + b > c && a + c > b && b + c > a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use num_traits::Zero;

    fn toy() -> CameraRig<Rational> {
        CameraRig::new(vec![
            Mat::from_i64_rows(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0]]).unwrap(),
            Mat::from_i64_rows(&[&[1, 0, 0, 1], &[0, 1, 0, 0], &[0, 0, 1, 0]]).unwrap(),
        ])
        .unwrap()
    }

    fn three() -> CameraRig<Rational> {
        CameraRig::new(vec![
            Mat::from_i64_rows(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0]]).unwrap(),
            Mat::from_i64_rows(&[&[1, 0, 0, 1], &[0, 1, 0, 0], &[0, 0, 1, 0]]).unwrap(),
            Mat::from_i64_rows(&[&[1, 0, 0, 0], &[0, 1, 0, 1], &[0, 0, 1, 0]]).unwrap(),
        ])
        .unwrap()
    }

    fn pt(c: &[i64]) -> ProjectivePoint<Rational> {
        ProjectivePoint::from_i64(c).unwrap()
    }

    #[test]
    fn family_sizes() {
        let rig = toy();
        let p = FamilyParams::default;
        assert_eq!(
            ConstraintSystem::new(&rig, Family::OcticNine, p())
                .unwrap()
                .len(),
            9
        );
        assert_eq!(
            ConstraintSystem::new(&rig, Family::OcticFull, p())
                .unwrap()
                .len(),
            441
        );
        assert_eq!(
            ConstraintSystem::new(&rig, Family::MultiviewBilinear, p())
                .unwrap()
                .len(),
            2
        );
        assert!(ConstraintSystem::new(&rig, Family::OcticSixteen, p()).is_err());
        let rig3 = three();
        assert_eq!(
            ConstraintSystem::new(&rig3, Family::OcticSixteen, p())
                .unwrap()
                .len(),
            16
        );
        assert_eq!(
            ConstraintSystem::new(&rig3, Family::OcticNine, p())
                .unwrap()
                .len(),
            81
        );
        assert_eq!(
            ConstraintSystem::new(&rig3, Family::MultiviewTrilinear, p())
                .unwrap()
                .len(),
            72
        );
        assert_eq!(
            ConstraintSystem::new(&rig3, Family::MultiviewBilinear, p())
                .unwrap()
                .len(),
            6
        );
    }

    #[test]
    fn octic_on_distance_two_pair() {
        // X = (0,0,0,1), Y = (0,2,0,1); Q(X,Y) = 3
        let rig = toy();
        let t = polarize(&unit_distance_q::<Rational>()).unwrap();
        let u = rig.forward_map(&pt(&[0, 0, 0, 1]));
        // X is the first focal point; use images given directly
        assert!(u.is_err());
        let u = vec![pt(&[0, 0, 1]), pt(&[1, 0, 1])];
        let v = vec![pt(&[0, 2, 1]), pt(&[1, 2, 1])];
        // the world points are (0,0,1,1) and (0,2,1,1), distance 2
        let bu = crate::triangulate::assemble_b(&rig, 0, 1, &u[0], &u[1]).unwrap();
        let bv = crate::triangulate::assemble_b(&rig, 0, 1, &v[0], &v[1]).unwrap();
        for i in 0..6 {
            for k in 0..6 {
                let wi = bu.wedge5_tilde_vec(i).unwrap();
                let wk = bv.wedge5_tilde_vec(k).unwrap();
                let val = octic_eval(&rig, &t, ((0, 1), (i, i)), ((0, 1), (k, k)), &u, &v).unwrap();
                // wedges are c (0,0,1,1) and d (0,2,1,1): value 3 c^2 d^2
                let c = wi[3].clone();
                let d = wk[3].clone();
                assert_eq!(val, Rational::from_i64(3) * c.square() * d.square());
            }
        }
    }

    #[test]
    fn octics_vanish_on_epipole_pair() {
        let rig = toy();
        let sys = ConstraintSystem::new(&rig, Family::OcticFull, FamilyParams::default()).unwrap();
        let (e1, e2) = rig.epipole_pair(0, 1).unwrap();
        let u = vec![pt(&[1, 2, 3]), pt(&[1, 2, 3])];
        let v = vec![e1, e2];
        assert!(sys.all_vanish(&[&u, &v], 0.0).unwrap());
    }

    #[test]
    fn oracle_examples() {
        let rig = toy();
        let tol = Tolerances::default();
        let x = pt(&[0, 0, 1, 1]);
        let unit = rig.forward_map(&pt(&[1, 0, 1, 1])).unwrap();
        let far = rig.forward_map(&pt(&[2, 0, 1, 1])).unwrap();
        let u = rig.forward_map(&x).unwrap();
        assert!(rigid_membership_oracle(&rig, &u, &unit, &tol).unwrap());
        assert!(!rigid_membership_oracle(&rig, &u, &far, &tol).unwrap());
        let (e1, e2) = rig.epipole_pair(0, 1).unwrap();
        assert!(rigid_membership_oracle(&rig, &far, &[e1, e2], &tol).unwrap());
        let sys = ConstraintSystem::new(&rig, Family::OcticNine, FamilyParams::default()).unwrap();
        assert!(rigid_membership_by_equations(&sys, &u, &unit, &tol).unwrap());
        assert!(!rigid_membership_by_equations(&sys, &u, &far, &tol).unwrap());
    }

    #[test]
    fn trilinear_examples() {
        let rig = three();
        let t = rig.forward_map(&pt(&[1, 2, 3, 1])).unwrap();
        let r = trilinear_residuals(&rig, 0, 1, 2, &t[0], &t[1], &t[2]).unwrap();
        assert_eq!(r.len(), 36);
        assert!(r.iter().all(|x| x.is_zero()));
        let r = trilinear_residuals(&rig, 0, 1, 2, &t[0], &t[1], &pt(&[5, 1, 2])).unwrap();
        assert!(r.iter().any(|x| !x.is_zero()));
    }

    #[test]
    fn general_forms() {
        let rig = toy();
        let x3y3 = BihomForm::new(
            (1, 1),
            [(([0, 0, 0, 1], [0, 0, 0, 1]), Rational::from_i64(1))],
        )
        .unwrap();
        let u = rig.forward_map(&pt(&[0, 0, 1, 1])).unwrap();
        let v_inf = rig.forward_map(&pt(&[0, 1, 1, 0])).unwrap();
        let sel = PairRow {
            pair: (0, 1),
            row: 0,
        };
        assert!(general_constraint_eval(&rig, &x3y3, sel, sel, &u, &v_inf)
            .unwrap()
            .is_zero());
        let diff = BihomForm::new(
            (1, 1),
            [
                (([1, 0, 0, 0], [0, 0, 0, 1]), Rational::from_i64(1)),
                (([0, 0, 0, 1], [1, 0, 0, 0]), Rational::from_i64(-1)),
            ],
        )
        .unwrap();
        let v = rig.forward_map(&pt(&[0, 5, 2, 1])).unwrap();
        for i in 0..6 {
            let s = PairRow {
                pair: (0, 1),
                row: i,
            };
            assert!(general_constraint_eval(&rig, &diff, s, s, &u, &v)
                .unwrap()
                .is_zero());
        }
        // unit Q in the general evaluator matches the diagonal octic
        let q = unit_distance_q::<Rational>();
        let t = polarize(&q).unwrap();
        let v = rig.forward_map(&pt(&[0, 5, 2, 1])).unwrap();
        let g = general_constraint_eval(
            &rig,
            &q,
            PairRow {
                pair: (0, 1),
                row: 2,
            },
            PairRow {
                pair: (0, 1),
                row: 1,
            },
            &u,
            &v,
        )
        .unwrap();
        let o = octic_eval(&rig, &t, ((0, 1), (2, 2)), ((0, 1), (1, 1)), &u, &v).unwrap();
        assert_eq!(g, o);
    }

    #[test]
    fn coplanar_examples() {
        let rig = toy();
        let pts = [[0, 0, 1, 1], [1, 0, 1, 1], [0, 1, 1, 1], [3, 5, 1, 1]];
        let t: Vec<_> = pts
            .iter()
            .map(|p| rig.forward_map(&pt(p)).unwrap())
            .collect();
        let r = coplanar_residuals(&rig, [&t[0], &t[1], &t[2], &t[3]], None).unwrap();
        assert_eq!(r.len(), 16);
        assert!(r.iter().all(|x| x.is_zero()));
        let off = rig.forward_map(&pt(&[3, 5, 2, 1])).unwrap();
        let r = coplanar_residuals(&rig, [&t[0], &t[1], &t[2], &off], None).unwrap();
        assert!(r.iter().any(|x| !x.is_zero()));
    }

    #[test]
    fn distance_triples() {
        let r = |v| Rational::from_i64(v);
        assert_eq!(
            collinearity_discriminant(&r(1), &r(1), &r(2)).unwrap(),
            r(0)
        );
        assert_eq!(
            collinearity_discriminant(&r(1), &r(1), &r(1)).unwrap(),
            r(3)
        );
        assert!(!triangle_inequality_ok(&r(1), &r(2), &r(5)).unwrap());
        assert!(!triangle_inequality_ok(&r(1), &r(1), &r(2)).unwrap());
        assert!(triangle_inequality_ok(&r(3), &r(4), &r(5)).unwrap());
        assert!(collinearity_discriminant(&r(0), &r(1), &r(1)).is_err());
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(Family::parse(f.name()).unwrap(), f);
            assert_eq!(
                serde_json::to_value(f).unwrap(),
                Value::String(f.name().into())
            );
        }
    }
}
