//! Two-view triangulation by Cramer's rule.
//!
//! For a camera pair `(j, k)` and image points `u_j, u_k` the 6x6 matrix
//! `B = [A_j u_j 0; A_k 0 u_k]` has the kernel vector `(X, -lambda_j, -lambda_k)`
//! whenever the two back-projected rays meet. Deleting row `i` leaves a 5x6
//! matrix whose signed maximal minors span that kernel, so the first four
//! minors recover `X` without solving anything.
//!
//! Row indices are 0-based throughout.

use crate::camera::{angular_distance, camera_pairs, CameraRig, ImageTuple, ProjectivePoint};
use crate::error::{Error, Result};
use crate::linalg::{det, rank_report, signed_maximal_minors, Mat};
use crate::scalar::{norm_f64, Scalar};
use crate::tolerance::Tolerances;

/// `[A_j u_j 0; A_k 0 u_k]` from raw camera matrices and image vectors.
pub fn b_matrix<S: Scalar>(aj: &Mat<S>, ak: &Mat<S>, uj: &[S], uk: &[S]) -> Mat<S> {
    let mut b = Mat::zeros(6, 6);
    for r in 0..3 {
        for c in 0..4 {
            b[(r, c)] = aj[(r, c)].clone();
            b[(r + 3, c)] = ak[(r, c)].clone();
        }
        b[(r, 4)] = uj[r].clone();
        b[(r + 3, 5)] = uk[r].clone();
    }
    b
}

#[derive(Debug, Clone, PartialEq)]
pub struct BMatrix<S> {
    matrix: Mat<S>,
    pair: (usize, usize),
    images: (Vec<S>, Vec<S>),
}

impl<S: Scalar> BMatrix<S> {
    pub fn new(
        rig: &CameraRig<S>,
        j: usize,
        k: usize,
        uj: &ProjectivePoint<S>,
        uk: &ProjectivePoint<S>,
    ) -> Result<Self> {
        let n = rig.n();
        if j >= n || k >= n || j == k {
            return Err(Error::Index(format!("camera pair ({j},{k}) for n={n}")));
        }
        if uj.dim() != 3 || uk.dim() != 3 {
            return Err(Error::Shape("image points must have 3 coordinates".into()));
        }
        Ok(BMatrix {
            matrix: b_matrix(
                rig.camera(j).matrix(),
                rig.camera(k).matrix(),
                uj.coords(),
                uk.coords(),
            ),
            pair: (j, k),
            images: (uj.coords().to_vec(), uk.coords().to_vec()),
        })
    }

    pub fn matrix(&self) -> &Mat<S> {
        &self.matrix
    }

    pub fn pair(&self) -> (usize, usize) {
        self.pair
    }

    pub fn images(&self) -> (&[S], &[S]) {
        (&self.images.0, &self.images.1)
    }

    pub fn det(&self) -> S {
        det(&self.matrix).expect("square")
    }

    pub fn rank(&self, tol: f64) -> usize {
        rank_report(&self.matrix, tol).rank
    }

    /// Signed maximal minors of `B` with row `i` deleted (length 6).
    pub fn wedge5(&self, i: usize) -> Result<Vec<S>> {
        if i >= 6 {
            return Err(Error::Index(format!("row {i} of a 6x6 matrix")));
        }
        signed_maximal_minors(&self.matrix.without_row(i))
    }

    /// First four coordinates of [`wedge5`](Self::wedge5), possibly zero.
    pub fn wedge5_tilde_vec(&self, i: usize) -> Result<Vec<S>> {
        let mut w = self.wedge5(i)?;
        w.truncate(4);
        Ok(w)
    }

    /// The world point carried by row `i`, or `None` when the first four
    /// minors vanish. On the float backend "vanish" is relative to the
    /// Hadamard bound of the 5x6 submatrix.
    pub fn wedge5_tilde(&self, i: usize, tol: f64) -> Result<Option<ProjectivePoint<S>>> {
        let w = self.wedge5_tilde_vec(i)?;
        let scale = tol * hadamard_bound(&self.matrix.without_row(i));
        if w.iter().all(|x| x.is_negligible(scale)) {
            return Ok(None);
        }
        Ok(Some(ProjectivePoint::new(w)?))
    }
}

/// Product of the row norms: bounds every maximal minor in absolute value.
pub fn hadamard_bound<S: Scalar>(m: &Mat<S>) -> f64 {
    (0..m.rows())
        .map(|r| norm_f64(m.row(r)).max(f64::MIN_POSITIVE))
        .product()
}

pub fn assemble_b<S: Scalar>(
    rig: &CameraRig<S>,
    j: usize,
    k: usize,
    uj: &ProjectivePoint<S>,
    uk: &ProjectivePoint<S>,
) -> Result<BMatrix<S>> {
    BMatrix::new(rig, j, k, uj, uk)
}

/// Which pair and deleted row produced a world point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Witness {
    pub pair: (usize, usize),
    pub row: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriangulationSolution<S> {
    pub x: ProjectivePoint<S>,
    /// `(lambda_j, lambda_k)` for the witness pair, matching the stored `x`.
    pub lambdas: (S, S),
    pub witness: Witness,
    pub rank_of_b: usize,
}

fn check_tuple<S: Scalar>(rig: &CameraRig<S>, tuple: &[ProjectivePoint<S>]) -> Result<()> {
    if tuple.len() != rig.n() {
        return Err(Error::Shape(format!(
            "{} image points for {} cameras",
            tuple.len(),
            rig.n()
        )));
    }
    Ok(())
}

/// First witness in lexicographic pair order, rows in increasing order.
/// Does not check membership.
pub fn find_witness<S: Scalar>(
    rig: &CameraRig<S>,
    tuple: &[ProjectivePoint<S>],
    tol: &Tolerances,
) -> Result<Option<(BMatrix<S>, Witness, ProjectivePoint<S>)>> {
    check_tuple(rig, tuple)?;
    for (j, k) in camera_pairs(rig.n()) {
        let b = BMatrix::new(rig, j, k, &tuple[j], &tuple[k])?;
        if b.rank(tol.rank) != 5 {
            continue;
        }
        for i in 0..6 {
            if let Some(x) = b.wedge5_tilde(i, tol.rank)? {
                return Ok(Some((
                    b,
                    Witness {
                        pair: (j, k),
                        row: i,
                    },
                    x,
                )));
            }
        }
    }
    Ok(None)
}

/// Triangulability of a point of the multiview variety.
pub fn is_triangulable<S: Scalar>(
    rig: &CameraRig<S>,
    tuple: &[ProjectivePoint<S>],
    tol: &Tolerances,
) -> Result<Option<Witness>> {
    if !rig.multiview_membership(tuple, tol)?.member {
        return Err(Error::NotInVariety);
    }
    Ok(find_witness(rig, tuple, tol)?.map(|(_, w, _)| w))
}

/// Recover the world point of a triangulable tuple. Every nonzero candidate
/// over all rank-5 pairs and all rows must agree.
pub fn triangulate<S: Scalar>(
    rig: &CameraRig<S>,
    tuple: &[ProjectivePoint<S>],
    tol: &Tolerances,
) -> Result<TriangulationSolution<S>> {
    if !rig.multiview_membership(tuple, tol)?.member {
        return Err(Error::NotInVariety);
    }
    let (b, witness, x) = find_witness(rig, tuple, tol)?.ok_or(Error::NotTriangulable)?;
    let w = b.wedge5(witness.row)?;
    let lambdas = (-w[4].clone(), -w[5].clone());

    for (j, k) in camera_pairs(rig.n()) {
        let other = BMatrix::new(rig, j, k, &tuple[j], &tuple[k])?;
        if other.rank(tol.rank) != 5 {
            continue;
        }
        for i in 0..6 {
            if let Some(y) = other.wedge5_tilde(i, tol.rank)? {
                agree(&x, &y, tol)?;
            }
        }
    }

    // reprojection: A_m X is parallel to u_m unless X is the focal point of m
    for (cam, u) in rig.cameras().iter().zip(tuple) {
        if let Ok(img) = cam.project_tol(&x, tol.rank) {
            if !img.proj_eq(u, tol.angle) {
                return Err(Error::NotInVariety);
            }
        }
    }

    Ok(TriangulationSolution {
        x,
        lambdas,
        witness,
        rank_of_b: 5,
    })
}

fn agree<S: Scalar>(
    x: &ProjectivePoint<S>,
    y: &ProjectivePoint<S>,
    tol: &Tolerances,
) -> Result<()> {
    if x.proj_eq(y, tol.angle) {
        return Ok(());
    }
    if S::EXACT {
        Err(Error::Inconsistent)
    } else {
        Err(Error::AmbiguousFloat(angular_distance(
            x.coords(),
            y.coords(),
        )))
    }
}

/// Outcome of solving for the common zeros of all 5x5 minors of `B^{jk}`.
#[derive(Debug, Clone, PartialEq)]
pub struct NontriangulableLocus<S> {
    /// Rank of the 6x3 coefficient matrix of the minors linear in `u_j`.
    pub coefficient_rank_j: usize,
    pub coefficient_rank_k: usize,
    /// The forced points when both ranks are 2.
    pub point: Option<(ProjectivePoint<S>, ProjectivePoint<S>)>,
    /// `rank B` at the forced point.
    pub rank_at_point: Option<usize>,
}

impl<S: Scalar> NontriangulableLocus<S> {
    /// The minors vanish at exactly one point of `P^2 x P^2`.
    pub fn is_single_point(&self) -> bool {
        self.coefficient_rank_j == 2
            && self.coefficient_rank_k == 2
            && self.rank_at_point.is_some_and(|r| r <= 4)
    }
}

/// Solve for the image pairs where `B^{jk}` drops to rank at most 4.
///
/// Deleting the `u_k` column and one row leaves a 5x5 minor that is linear
/// in `u_j` alone; the six such minors form a 6x3 linear system whose kernel
/// pins down `u_j`. The same holds with the roles swapped. If both kernels
/// are lines, the locus is at most their product, and a rank evaluation
/// there decides whether it is empty.
pub fn nontriangulable_locus<S: Scalar>(
    rig: &CameraRig<S>,
    j: usize,
    k: usize,
    tol: &Tolerances,
) -> Result<NontriangulableLocus<S>> {
    let n = rig.n();
    if j >= n || k >= n || j == k {
        return Err(Error::Index(format!("camera pair ({j},{k}) for n={n}")));
    }
    let (aj, ak) = (rig.camera(j).matrix(), rig.camera(k).matrix());
    let zero = vec![S::zero(); 3];
    let basis = |a: usize| {
        let mut v = zero.clone();
        v[a] = S::one();
        v
    };
    // side 0: u_j varies, column of u_k dropped; side 1 the converse
    let coefficients = |side: usize| -> Result<Mat<S>> {
        let mut c = Mat::zeros(6, 3);
        for a in 0..3 {
            let b = if side == 0 {
                b_matrix(aj, ak, &basis(a), &zero).without_column(5)
            } else {
                b_matrix(aj, ak, &zero, &basis(a)).without_column(4)
            };
            for r in 0..6 {
                c[(r, a)] = det(&b.without_row(r))?;
            }
        }
        Ok(c)
    };
    let cj = coefficients(0)?;
    let ck = coefficients(1)?;
    let rj = rank_report(&cj, tol.rank).rank;
    let rk = rank_report(&ck, tol.rank).rank;
    let mut locus = NontriangulableLocus {
        coefficient_rank_j: rj,
        coefficient_rank_k: rk,
        point: None,
        rank_at_point: None,
    };
    if rj == 2 && rk == 2 {
        let uj = ProjectivePoint::new(crate::linalg::kernel_vector_tol(&cj, tol.rank)?)?;
        let uk = ProjectivePoint::new(crate::linalg::kernel_vector_tol(&ck, tol.rank)?)?;
        let b = BMatrix::new(rig, j, k, &uj, &uk)?;
        locus.rank_at_point = Some(b.rank(tol.rank));
        locus.point = Some((uj, uk));
    }
    Ok(locus)
}

/// World point of a tuple in the float backend used as a starting guess:
/// Cramer recovery where available, otherwise the midpoint of the closest
/// points of the first two back-projected rays.
pub fn initial_world_point(
    rig: &CameraRig<f64>,
    tuple: &ImageTuple<f64>,
    tol: &Tolerances,
) -> Option<Vec<f64>> {
    let mut best: Option<(f64, Vec<f64>)> = None;
    for (j, k) in camera_pairs(rig.n()) {
        let Ok(b) = BMatrix::new(rig, j, k, &tuple[j], &tuple[k]) else {
            continue;
        };
        // on noisy data B has full rank; every row still gives a candidate
        for i in 0..6 {
            let Ok(w) = b.wedge5_tilde_vec(i) else {
                continue;
            };
            let Some(x) = ProjectivePoint::new(w).ok().and_then(|p| p.dehomogenize()) else {
                continue;
            };
            if !x.iter().all(|v| v.is_finite()) {
                continue;
            }
            let err = reprojection_error(rig, &x, tuple);
            if best.as_ref().is_none_or(|(e, _)| err < *e) {
                best = Some((err, x));
            }
        }
    }
    let _ = tol;
    best.map(|(_, x)| x).or_else(|| ray_midpoint(rig, tuple))
}

/// Sum of squared differences between affine image coordinates.
pub fn reprojection_error(rig: &CameraRig<f64>, x: &[f64], tuple: &[ProjectivePoint<f64>]) -> f64 {
    let xh = ProjectivePoint::from_affine(x);
    let mut total = 0.0;
    for (cam, u) in rig.cameras().iter().zip(tuple) {
        let p = cam.matrix().mul_vec(xh.coords()).expect("4-vector");
        let uc = u.coords();
        total += (p[0] / p[2] - uc[0] / uc[2]).powi(2) + (p[1] / p[2] - uc[1] / uc[2]).powi(2);
    }
    if total.is_finite() {
        total
    } else {
        f64::INFINITY
    }
}

fn ray_midpoint(rig: &CameraRig<f64>, tuple: &[ProjectivePoint<f64>]) -> Option<Vec<f64>> {
    // ray m: c_m + t d_m with c_m the affine focal point and d_m = M^{-1} u
    let ray = |m: usize| -> Option<(Vec<f64>, Vec<f64>)> {
        let a = rig.camera(m).matrix();
        let c = rig.focal_point(m).dehomogenize()?;
        let mm = Mat::from_rows((0..3).map(|r| a.row(r)[..3].to_vec()).collect()).ok()?;
        let d = crate::linalg::solve(&mm, tuple[m].coords()).ok()?;
        Some((c, d))
    };
    let (c1, d1) = ray(0)?;
    let (c2, d2) = ray(1)?;
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let w: Vec<f64> = c1.iter().zip(&c2).map(|(a, b)| a - b).collect();
    let (a, b, c) = (dot(&d1, &d1), dot(&d1, &d2), dot(&d2, &d2));
    let (d, e) = (dot(&d1, &w), dot(&d2, &w));
    let den = a * c - b * b;
    if den.abs() < 1e-15 * a * c {
        return None;
    }
    let s = (b * e - c * d) / den;
    let t = (a * e - b * d) / den;
    Some(
        (0..3)
            .map(|i| 0.5 * (c1[i] + s * d1[i] + c2[i] + t * d2[i]))
            .collect(),
    )
}
