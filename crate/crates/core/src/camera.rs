//! Cameras, rigs and the multiview map.
//!
//! A camera is a rank-3 3x4 matrix `A`; its focal point is the kernel of `A`.
//! A rig caches focal points, epipoles `e[k <- j] = A_k f_j` and the
//! fundamental matrices for every camera pair. Degenerate rigs are still
//! constructed; their focal-point violations are recorded in
//! [`GeneralPosition`].

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::{self, det, inverse, nullspace, rank_report, Mat};
use crate::scalar::{norm_f64, Scalar};
use crate::tolerance::Tolerances;
use crate::triangulate::b_matrix;

/// Homogeneous coordinates, equal up to a nonzero scale.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectivePoint<S> {
    coords: Vec<S>,
}

/// One image point per camera, in camera order.
pub type ImageTuple<S> = Vec<ProjectivePoint<S>>;

impl<S: Scalar> ProjectivePoint<S> {
    pub fn new(coords: Vec<S>) -> Result<Self> {
        if coords.iter().all(|x| x.is_zero()) {
            return Err(Error::ZeroPoint);
        }
        Ok(ProjectivePoint { coords })
    }

    pub fn from_i64(coords: &[i64]) -> Result<Self> {
        Self::new(coords.iter().map(|&x| S::from_i64(x)).collect())
    }

    /// `(x, y, z, 1)` for an affine world point.
    pub fn from_affine(p: &[S]) -> Self {
        let mut c = p.to_vec();
        c.push(S::one());
        ProjectivePoint { coords: c }
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<S> {
        self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Affine coordinates after dividing by the last coordinate.
    pub fn dehomogenize(&self) -> Option<Vec<S>> {
        let (last, rest) = self.coords.split_last()?;
        if last.is_zero() {
            return None;
        }
        Some(rest.iter().map(|x| x.clone() / last.clone()).collect())
    }

    /// Canonical representative: integer-cleared primitive vector on exact
    /// backends, unit vector on the float backend.
    pub fn normalized(&self) -> Self {
        let mut c = self.coords.clone();
        S::normalize_projective(&mut c);
        ProjectivePoint { coords: c }
    }

    pub fn scaled(&self, s: &S) -> Self {
        ProjectivePoint {
            coords: self.coords.iter().map(|x| x.clone() * s.clone()).collect(),
        }
    }

    /// Equality up to nonzero scale. Exact backends normalize by the first
    /// nonzero coordinate; the float backend compares unit vectors up to sign
    /// with `angle_tol`.
    pub fn proj_eq(&self, other: &Self, angle_tol: f64) -> bool {
        if self.coords.len() != other.coords.len() {
            return false;
        }
        if S::EXACT {
            let Some(i) = self.coords.iter().position(|x| !x.is_zero()) else {
                return false;
            };
            if other.coords[..i].iter().any(|x| !x.is_zero()) || other.coords[i].is_zero() {
                return false;
            }
            let (a, b) = (self.coords[i].clone(), other.coords[i].clone());
            self.coords
                .iter()
                .zip(&other.coords)
                .all(|(x, y)| x.clone() / a.clone() == y.clone() / b.clone())
        } else {
            angular_distance(&self.coords, &other.coords) <= angle_tol
        }
    }

    pub fn to_f64(&self) -> ProjectivePoint<f64> {
        ProjectivePoint {
            coords: self.coords.iter().map(Scalar::to_f64).collect(),
        }
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.coords.iter().map(Scalar::to_json).collect())
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Parse("point must be an array".into()))?;
        Self::new(arr.iter().map(S::from_json).collect::<Result<_>>()?)
    }
}

/// Angle between the lines spanned by two vectors (radians, in [0, pi/2]).
pub fn angular_distance<S: Scalar>(a: &[S], b: &[S]) -> f64 {
    let (na, nb) = (norm_f64(a), norm_f64(b));
    if na == 0.0 || nb == 0.0 {
        return f64::INFINITY;
    }
    let (mut plus, mut minus) = (0.0f64, 0.0f64);
    for (x, y) in a.iter().zip(b) {
        let (x, y) = (x.to_f64() / na, y.to_f64() / nb);
        plus += (x + y).powi(2);
        minus += (x - y).powi(2);
    }
    // chord length -> angle
    2.0 * (plus.min(minus).sqrt() / 2.0).min(1.0).asin()
}

pub fn tuple_to_json<S: Scalar>(t: &[ProjectivePoint<S>]) -> Value {
    Value::Array(t.iter().map(ProjectivePoint::to_json).collect())
}

pub fn tuple_from_json<S: Scalar>(v: &Value) -> Result<ImageTuple<S>> {
    v.as_array()
        .ok_or_else(|| Error::Parse("image tuple must be an array of points".into()))?
        .iter()
        .map(ProjectivePoint::from_json)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Camera<S> {
    matrix: Mat<S>,
    focal_point: ProjectivePoint<S>,
}

impl<S: Scalar> Camera<S> {
    pub fn new(matrix: Mat<S>) -> Result<Self> {
        if matrix.rows() != 3 || matrix.cols() != 4 {
            return Err(Error::Shape(format!(
                "camera must be 3x4, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let r = rank_report(&matrix, linalg::DEFAULT_RANK_TOL).rank;
        if r != 3 {
            return Err(Error::RankDeficientCamera { index: 0, rank: r });
        }
        let f = linalg::kernel_vector(&matrix)?;
        Ok(Camera {
            matrix,
            focal_point: ProjectivePoint { coords: f },
        })
    }

    pub fn from_i64(rows: [[i64; 4]; 3]) -> Result<Self> {
        let r: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        Self::new(Mat::from_i64_rows(&r)?)
    }

    pub fn matrix(&self) -> &Mat<S> {
        &self.matrix
    }

    pub fn focal_point(&self) -> &ProjectivePoint<S> {
        &self.focal_point
    }

    /// `A X` as an image point. Fails when `X` is the focal point.
    pub fn project(&self, x: &ProjectivePoint<S>) -> Result<ProjectivePoint<S>> {
        self.project_tol(x, linalg::DEFAULT_RANK_TOL)
    }

    pub fn project_tol(&self, x: &ProjectivePoint<S>, tol: f64) -> Result<ProjectivePoint<S>> {
        if x.dim() != 4 {
            return Err(Error::Shape(format!("world point of length {}", x.dim())));
        }
        let img = self.matrix.mul_vec(x.coords())?;
        let scale = tol * self.matrix.max_abs() * norm_f64(x.coords());
        if img.iter().all(|v| v.is_negligible(scale)) {
            return Err(Error::FocalPoint(None));
        }
        Ok(ProjectivePoint { coords: img })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    DuplicateFocalPoints(usize, usize),
    CollinearFocalPoints(usize, usize, usize),
    CoplanarFocalPoints(usize, usize, usize, usize),
}

/// Focal-point general-position record: all distinct, no three on a line,
/// no four on a plane. Zariski-genericity of the matrices is not checked.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GeneralPosition {
    pub violations: Vec<Violation>,
}

impl GeneralPosition {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CameraRig<S> {
    cameras: Vec<Camera<S>>,
    /// `epipoles[k][j]` is the image of focal point `j` in camera `k`.
    epipoles: Vec<Vec<Option<ProjectivePoint<S>>>>,
    /// `F^{jk}` for `j < k`, lexicographic pair order.
    fundamentals: Vec<Mat<S>>,
    general_position: GeneralPosition,
}

/// Result of the rank test for the multiview variety.
#[derive(Debug, Clone, PartialEq)]
pub struct Membership<S> {
    pub member: bool,
    /// World part of a kernel vector of the stacked matrix.
    pub world: Option<ProjectivePoint<S>>,
    /// `lambda_m` with `A_m X = lambda_m u_m`.
    pub lambdas: Vec<S>,
    /// Cameras whose `lambda` vanished (the world point is their focal point).
    pub zero_lambdas: Vec<usize>,
}

/// Index of the unordered pair `(j, k)`, `j < k`, in lexicographic order.
pub fn pair_index(n: usize, j: usize, k: usize) -> usize {
    debug_assert!(j < k && k < n);
    j * (2 * n - j - 1) / 2 + (k - j - 1)
}

/// All pairs `j < k` in lexicographic order.
pub fn camera_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|j| (j + 1..n).map(move |k| (j, k)))
        .collect()
}

impl<S: Scalar> CameraRig<S> {
    pub fn new(matrices: Vec<Mat<S>>) -> Result<Self> {
        if matrices.len() < 2 {
            return Err(Error::TooFewCameras {
                needed: 2,
                got: matrices.len(),
            });
        }
        let cameras = matrices
            .into_iter()
            .enumerate()
            .map(|(index, m)| {
                Camera::new(m).map_err(|e| match e {
                    Error::RankDeficientCamera { rank, .. } => {
                        Error::RankDeficientCamera { index, rank }
                    }
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_cameras(cameras)
    }

    pub fn from_cameras(cameras: Vec<Camera<S>>) -> Result<Self> {
        let n = cameras.len();
        if n < 2 {
            return Err(Error::TooFewCameras { needed: 2, got: n });
        }
        let epipoles = (0..n)
            .map(|k| {
                (0..n)
                    .map(|j| {
                        if j == k {
                            None
                        } else {
                            cameras[k].project(&cameras[j].focal_point).ok()
                        }
                    })
                    .collect()
            })
            .collect();
        let fundamentals = camera_pairs(n)
            .into_iter()
            .map(|(j, k)| fundamental_from_det(&cameras[j], &cameras[k]))
            .collect::<Result<Vec<_>>>()?;
        let general_position = check_general_position(&cameras);
        Ok(CameraRig {
            cameras,
            epipoles,
            fundamentals,
            general_position,
        })
    }

    pub fn n(&self) -> usize {
        self.cameras.len()
    }

    pub fn cameras(&self) -> &[Camera<S>] {
        &self.cameras
    }

    pub fn camera(&self, i: usize) -> &Camera<S> {
        &self.cameras[i]
    }

    pub fn focal_point(&self, i: usize) -> &ProjectivePoint<S> {
        &self.cameras[i].focal_point
    }

    pub fn general_position(&self) -> &GeneralPosition {
        &self.general_position
    }

    /// `e[into <- from]`: image of focal point `from` in camera `into`.
    /// `None` when the focal points coincide.
    pub fn epipole(&self, into: usize, from: usize) -> Option<&ProjectivePoint<S>> {
        self.epipoles[into][from].as_ref()
    }

    /// The pair `(e[j <- k], e[k <- j])`, the non-triangulable image pair.
    pub fn epipole_pair(
        &self,
        j: usize,
        k: usize,
    ) -> Option<(ProjectivePoint<S>, ProjectivePoint<S>)> {
        Some((self.epipole(j, k)?.clone(), self.epipole(k, j)?.clone()))
    }

    /// `F` with `u_j^T F u_k = det B^{jk}(u_j, u_k)`.
    pub fn fundamental_matrix(&self, j: usize, k: usize) -> Result<Mat<S>> {
        let n = self.n();
        if j >= n || k >= n || j == k {
            return Err(Error::Index(format!("camera pair ({j},{k}) for n={n}")));
        }
        if j < k {
            Ok(self.fundamentals[pair_index(n, j, k)].clone())
        } else {
            // det B^{kj}(u_k, u_j) swaps two column blocks of B^{jk}: a row
            // block swap and a column swap, so the sign is preserved.
            Ok(self.fundamentals[pair_index(n, k, j)].transpose())
        }
    }

    pub fn forward_map(&self, x: &ProjectivePoint<S>) -> Result<ImageTuple<S>> {
        self.cameras
            .iter()
            .enumerate()
            .map(|(i, c)| {
                c.project(x).map_err(|e| match e {
                    Error::FocalPoint(_) => Error::FocalPoint(Some(i)),
                    other => other,
                })
            })
            .collect()
    }

    /// Stacked `3n x (4+n)` matrix with block rows `[A_m | 0 .. u_m .. 0]`.
    pub fn stacked_matrix(&self, tuple: &[ProjectivePoint<S>]) -> Result<Mat<S>> {
        let n = self.n();
        if tuple.len() != n {
            return Err(Error::Shape(format!(
                "{} image points for {n} cameras",
                tuple.len()
            )));
        }
        let mut m = Mat::zeros(3 * n, 4 + n);
        for (c, (cam, u)) in self.cameras.iter().zip(tuple).enumerate() {
            if u.dim() != 3 {
                return Err(Error::Shape(format!("image point of length {}", u.dim())));
            }
            for r in 0..3 {
                for col in 0..4 {
                    m[(3 * c + r, col)] = cam.matrix[(r, col)].clone();
                }
                m[(3 * c + r, 4 + c)] = u.coords[r].clone();
            }
        }
        Ok(m)
    }

    /// Rank test: the tuple is in the multiview variety iff the stacked matrix
    /// has rank at most `n + 3`.
    pub fn multiview_membership(
        &self,
        tuple: &[ProjectivePoint<S>],
        tol: &Tolerances,
    ) -> Result<Membership<S>> {
        let n = self.n();
        let m = self.stacked_matrix(tuple)?;
        let r = rank_report(&m, tol.rank).rank;
        if r > n + 3 {
            return Ok(Membership {
                member: false,
                world: None,
                lambdas: Vec::new(),
                zero_lambdas: Vec::new(),
            });
        }
        let kernel = nullspace(&m, tol.rank);
        let v = kernel.into_iter().next().ok_or(Error::TrivialKernel)?;
        let lambdas: Vec<S> = v[4..].iter().map(|x| -x.clone()).collect();
        let scale = tol.rank * norm_f64(&v);
        let zero_lambdas = lambdas
            .iter()
            .enumerate()
            .filter(|(_, l)| l.is_negligible(scale))
            .map(|(i, _)| i)
            .collect();
        Ok(Membership {
            member: true,
            world: ProjectivePoint::new(v[..4].to_vec()).ok(),
            lambdas,
            zero_lambdas,
        })
    }

    /// The rig `(A_1 N, ..., A_n N)`.
    pub fn apply_right_action(&self, n: &Mat<S>) -> Result<Self> {
        if n.rows() != 4 || !n.is_square() {
            return Err(Error::Shape("right action needs a 4x4 matrix".into()));
        }
        if is_singular(n) {
            return Err(Error::Singular);
        }
        Self::new(self.cameras.iter().map(|c| &c.matrix * n).collect())
    }

    /// The rig `(M_1 A_1, ..., M_n A_n)`.
    pub fn apply_left_action(&self, ms: &[Mat<S>]) -> Result<Self> {
        if ms.len() != self.n() {
            return Err(Error::Shape(format!(
                "{} matrices for {} cameras",
                ms.len(),
                self.n()
            )));
        }
        let mut out = Vec::with_capacity(ms.len());
        for (m, c) in ms.iter().zip(&self.cameras) {
            if m.rows() != 3 || !m.is_square() {
                return Err(Error::Shape("left action needs 3x3 matrices".into()));
            }
            if is_singular(m) {
                return Err(Error::Singular);
            }
            out.push(m * &c.matrix);
        }
        Self::new(out)
    }

    pub fn to_f64(&self) -> CameraRig<f64> {
        CameraRig::new(self.cameras.iter().map(|c| c.matrix.to_f64()).collect())
            .expect("float image of a valid rig")
    }

    /// `{"cameras": [[12 row-major entries], ...]}`.
    pub fn to_json(&self) -> Value {
        let cams = self
            .cameras
            .iter()
            .map(|c| Value::Array(c.matrix.entries().iter().map(Scalar::to_json).collect()))
            .collect();
        serde_json::json!({ "cameras": Value::Array(cams) })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let cams = v
            .get("cameras")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("rig needs a \"cameras\" array".into()))?;
        let mats = cams
            .iter()
            .map(|c| {
                let entries = c
                    .as_array()
                    .ok_or_else(|| Error::Parse("camera must be an array of 12 entries".into()))?;
                let data = entries
                    .iter()
                    .map(S::from_json)
                    .collect::<Result<Vec<_>>>()?;
                Mat::from_vec(3, 4, data)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(mats)
    }
}

fn is_singular<S: Scalar>(m: &Mat<S>) -> bool {
    inverse(m).is_err()
}

/// Coefficient extraction from the bilinear form `det B^{jk}(u_j, u_k)`:
/// `F[a][b] = det B(e_a, e_b)`.
fn fundamental_from_det<S: Scalar>(aj: &Camera<S>, ak: &Camera<S>) -> Result<Mat<S>> {
    let basis = |i: usize| {
        let mut v = vec![S::zero(); 3];
        v[i] = S::one();
        v
    };
    let mut f = Mat::zeros(3, 3);
    for a in 0..3 {
        for b in 0..3 {
            f[(a, b)] = det(&b_matrix(&aj.matrix, &ak.matrix, &basis(a), &basis(b)))?;
        }
    }
    Ok(f)
}

fn check_general_position<S: Scalar>(cameras: &[Camera<S>]) -> GeneralPosition {
    let n = cameras.len();
    let f: Vec<Vec<S>> = cameras
        .iter()
        .map(|c| c.focal_point.normalized().coords)
        .collect();
    let stacked =
        |idx: &[usize]| Mat::from_rows(idx.iter().map(|&i| f[i].clone()).collect()).expect("rows");
    let rank_of = |idx: &[usize]| rank_report(&stacked(idx), linalg::DEFAULT_RANK_TOL).rank;
    let mut violations = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rank_of(&[i, j]) < 2 {
                violations.push(Violation::DuplicateFocalPoints(i, j));
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if rank_of(&[i, j, k]) < 3 {
                    violations.push(Violation::CollinearFocalPoints(i, j, k));
                }
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for l in k + 1..n {
                    if rank_of(&[i, j, k, l]) < 4 {
                        violations.push(Violation::CoplanarFocalPoints(i, j, k, l));
                    }
                }
            }
        }
    }
    GeneralPosition { violations }
}

/// Element of SE(3): `[R t; 0 1]` with `R^T R = I`, `det R = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RigidMotion<S> {
    rotation: Mat<S>,
    translation: Vec<S>,
}

impl<S: Scalar> RigidMotion<S> {
    pub fn new(rotation: Mat<S>, translation: Vec<S>, tol: f64) -> Result<Self> {
        if rotation.rows() != 3 || rotation.cols() != 3 || translation.len() != 3 {
            return Err(Error::Shape(
                "rigid motion needs a 3x3 rotation and a 3-vector".into(),
            ));
        }
        let rtr = &rotation.transpose() * &rotation;
        let id = Mat::<S>::identity(3);
        let orthogonal = rtr
            .entries()
            .iter()
            .zip(id.entries())
            .all(|(a, b)| (a.clone() - b.clone()).is_negligible(tol));
        let d = det(&rotation)?;
        if !orthogonal || !(d - S::one()).is_negligible(tol) {
            return Err(Error::InvalidParameter("not a proper rotation".into()));
        }
        Ok(RigidMotion {
            rotation,
            translation,
        })
    }

    /// Rotation from the quaternion `(w, x, y, z)`; rational entries whenever
    /// the quaternion is.
    pub fn from_quaternion(q: [S; 4], translation: Vec<S>) -> Result<Self> {
        let [w, x, y, z] = q;
        let n2 = w.square() + x.square() + y.square() + z.square();
        if n2.is_zero() {
            return Err(Error::InvalidParameter("zero quaternion".into()));
        }
        let two = S::from_i64(2);
        let r = |v: S| v / n2.clone();
        let rot = Mat::from_rows(vec![
            vec![
                r(w.square() + x.square() - y.square() - z.square()),
                r(two.clone() * (x.clone() * y.clone() - w.clone() * z.clone())),
                r(two.clone() * (x.clone() * z.clone() + w.clone() * y.clone())),
            ],
            vec![
                r(two.clone() * (x.clone() * y.clone() + w.clone() * z.clone())),
                r(w.square() - x.square() + y.square() - z.square()),
                r(two.clone() * (y.clone() * z.clone() - w.clone() * x.clone())),
            ],
            vec![
                r(two.clone() * (x.clone() * z.clone() - w.clone() * y.clone())),
                r(two.clone() * (y.clone() * z.clone() + w.clone() * x.clone())),
                r(w.square() - x.square() - y.square() + z.square()),
            ],
        ])?;
        Self::new(rot, translation, 1e-12)
    }

    pub fn rotation(&self) -> &Mat<S> {
        &self.rotation
    }

    pub fn translation(&self) -> &[S] {
        &self.translation
    }

    /// The 4x4 homogeneous matrix.
    pub fn matrix(&self) -> Mat<S> {
        let mut m = Mat::identity(4);
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] = self.rotation[(i, j)].clone();
            }
            m[(i, 3)] = self.translation[i].clone();
        }
        m
    }

    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        let t = rt
            .mul_vec(&self.translation)
            .expect("3-vector")
            .into_iter()
            .map(|x| -x)
            .collect();
        RigidMotion {
            rotation: rt,
            translation: t,
        }
    }

    pub fn apply(&self, x: &ProjectivePoint<S>) -> ProjectivePoint<S> {
        ProjectivePoint {
            coords: self.matrix().mul_vec(x.coords()).expect("4-vector"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    pub(crate) fn toy_rig() -> CameraRig<Rational> {
        CameraRig::new(vec![
            Mat::from_i64_rows(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0]]).unwrap(),
            Mat::from_i64_rows(&[&[1, 0, 0, 1], &[0, 1, 0, 0], &[0, 0, 1, 0]]).unwrap(),
        ])
        .unwrap()
    }

    fn pt(c: &[i64]) -> ProjectivePoint<Rational> {
        ProjectivePoint::from_i64(c).unwrap()
    }

    #[test]
    fn toy_rig_caches() {
        let rig = toy_rig();
        let tol = 0.0;
        assert!(rig.focal_point(0).proj_eq(&pt(&[0, 0, 0, 1]), tol));
        assert!(rig.focal_point(1).proj_eq(&pt(&[-1, 0, 0, 1]), tol));
        assert!(rig.epipole(0, 1).unwrap().proj_eq(&pt(&[-1, 0, 0]), tol));
        assert!(rig.epipole(1, 0).unwrap().proj_eq(&pt(&[1, 0, 0]), tol));
        assert!(rig.general_position().passes());
    }

    #[test]
    fn collinear_focal_points_are_recorded() {
        // focal points (0,0,0,1), (1,0,0,1), (2,0,0,1)
        let rig = CameraRig::<Rational>::new(vec![
            Mat::from_i64_rows(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0]]).unwrap(),
            Mat::from_i64_rows(&[&[1, 0, 0, -1], &[0, 1, 0, 0], &[0, 0, 1, 0]]).unwrap(),
            Mat::from_i64_rows(&[&[1, 0, 0, -2], &[0, 1, 0, 0], &[0, 0, 1, 0]]).unwrap(),
        ])
        .unwrap();
        assert_eq!(
            rig.general_position().violations,
            vec![Violation::CollinearFocalPoints(0, 1, 2)]
        );
    }

    #[test]
    fn duplicate_focal_points_are_recorded() {
        let rig = CameraRig::<Rational>::new(vec![
            Mat::from_i64_rows(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0]]).unwrap(),
            Mat::from_i64_rows(&[&[2, 1, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0]]).unwrap(),
        ])
        .unwrap();
        assert_eq!(
            rig.general_position().violations,
            vec![Violation::DuplicateFocalPoints(0, 1)]
        );
        assert!(rig.epipole(0, 1).is_none());
    }

    #[test]
    fn rank_deficient_camera_is_rejected() {
        let err = CameraRig::<Rational>::new(vec![
            Mat::from_i64_rows(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0]]).unwrap(),
            Mat::from_i64_rows(&[&[1, 0, 0, 0], &[2, 0, 0, 0], &[0, 0, 1, 0]]).unwrap(),
        ])
        .unwrap_err();
        assert_eq!(err, Error::RankDeficientCamera { index: 1, rank: 2 });
        assert!(matches!(
            CameraRig::<Rational>::new(vec![Mat::identity(3)]),
            Err(Error::TooFewCameras { .. })
        ));
    }

    #[test]
    fn project_examples() {
        let rig = toy_rig();
        let x = pt(&[0, 0, 1, 1]);
        assert_eq!(rig.camera(0).project(&x).unwrap(), pt(&[0, 0, 1]));
        assert_eq!(rig.camera(1).project(&x).unwrap(), pt(&[1, 0, 1]));
        assert_eq!(
            rig.camera(0).project(&pt(&[0, 0, 0, 1])),
            Err(Error::FocalPoint(None))
        );
        assert_eq!(
            rig.forward_map(&pt(&[0, 0, 0, 1])),
            Err(Error::FocalPoint(Some(0)))
        );
        // on the baseline but not a focal point
        let t = rig.forward_map(&pt(&[1, 0, 0, 1])).unwrap();
        assert!(t[0].proj_eq(&pt(&[1, 0, 0]), 0.0));
    }

    #[test]
    fn fundamental_of_toy_rig() {
        let f = toy_rig().fundamental_matrix(0, 1).unwrap();
        let expected: Mat<Rational> =
            Mat::from_i64_rows(&[&[0, 0, 0], &[0, 0, -1], &[0, 1, 0]]).unwrap();
        let s = f[(2, 1)].clone() / expected[(2, 1)].clone();
        assert_eq!(f, expected.scale(&s));
    }

    #[test]
    fn membership_examples() {
        let rig = toy_rig();
        let tol = Tolerances::default();
        let t = rig.forward_map(&pt(&[0, 0, 1, 1])).unwrap();
        let m = rig.multiview_membership(&t, &tol).unwrap();
        assert!(m.member);
        assert!(m.world.unwrap().proj_eq(&pt(&[0, 0, 1, 1]), 0.0));

        let (e1, e2) = rig.epipole_pair(0, 1).unwrap();
        assert!(rig.multiview_membership(&[e1, e2], &tol).unwrap().member);

        let frig = rig.to_f64();
        let fpt = |c: [f64; 3]| ProjectivePoint::new(c.to_vec()).unwrap();
        // The epipolar line of (0,0,1) in the second view is y = 0, so a
        // perturbation along y leaves the variety while one along z does not.
        let off = [fpt([0.0, 0.0, 1.0]), fpt([1.0, 0.01, 1.0])];
        assert!(!frig.multiview_membership(&off, &tol).unwrap().member);
        let on = [fpt([0.0, 0.0, 1.0]), fpt([1.0, 0.0, 1.01])];
        assert!(frig.multiview_membership(&on, &tol).unwrap().member);
    }

    #[test]
    fn right_action_moves_focal_points() {
        let rig = toy_rig();
        let n: Mat<Rational> =
            Mat::from_i64_rows(&[&[1, 2, 0, 0], &[0, 1, 0, 3], &[0, 0, 1, 0], &[1, 0, 0, 1]])
                .unwrap();
        let moved = rig.apply_right_action(&n).unwrap();
        let ninv = inverse(&n).unwrap();
        for i in 0..2 {
            let expect =
                ProjectivePoint::new(ninv.mul_vec(rig.focal_point(i).coords()).unwrap()).unwrap();
            assert!(moved.focal_point(i).proj_eq(&expect, 0.0));
        }
        assert_eq!(rig.apply_right_action(&Mat::identity(4)).unwrap(), rig);
        assert_eq!(
            rig.apply_right_action(&Mat::zeros(4, 4)),
            Err(Error::Singular)
        );
    }

    #[test]
    fn left_action_moves_epipoles() {
        let rig = toy_rig();
        let m0: Mat<Rational> = Mat::from_i64_rows(&[&[2, 1, 0], &[0, 1, 0], &[1, 0, 3]]).unwrap();
        let m1: Mat<Rational> = Mat::from_i64_rows(&[&[1, 0, 1], &[0, 2, 0], &[0, 1, 1]]).unwrap();
        let moved = rig.apply_left_action(&[m0.clone(), m1.clone()]).unwrap();
        let e10 = rig.epipole(1, 0).unwrap();
        let expect = ProjectivePoint::new(m1.mul_vec(e10.coords()).unwrap()).unwrap();
        assert!(moved.epipole(1, 0).unwrap().proj_eq(&expect, 0.0));
        let e01 = rig.epipole(0, 1).unwrap();
        let expect = ProjectivePoint::new(m0.mul_vec(e01.coords()).unwrap()).unwrap();
        assert!(moved.epipole(0, 1).unwrap().proj_eq(&expect, 0.0));
    }

    #[test]
    fn quaternion_rotation_is_exact() {
        let q = [1, 2, 3, 4].map(Rational::from_i64);
        let m = RigidMotion::from_quaternion(q, vec![Rational::from_i64(1); 3]).unwrap();
        assert_eq!(&m.matrix() * &m.inverse().matrix(), Mat::identity(4));
    }

    #[test]
    fn rig_json_round_trip() {
        let rig = toy_rig();
        let back = CameraRig::<Rational>::from_json(&rig.to_json()).unwrap();
        assert_eq!(back, rig);
        let js = serde_json::json!({"cameras": [[1,0,0,0, 0,1,0,0, 0,0,1,0], ["1","0","0","1/2", 0,1,0,0, 0,0,1,0]]});
        let r = CameraRig::<Rational>::from_json(&js).unwrap();
        assert!(r.focal_point(1).proj_eq(&pt(&[-1, 0, 0, 2]), 0.0));
    }

    #[test]
    fn pair_index_is_lexicographic() {
        for n in 2..7 {
            for (idx, (j, k)) in camera_pairs(n).into_iter().enumerate() {
                assert_eq!(pair_index(n, j, k), idx);
            }
        }
    }
}
