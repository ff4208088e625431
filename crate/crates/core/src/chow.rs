//! Unordered point pairs of the projective plane as degenerate conics.
//!
//! The pair `{u, v}` maps to the symmetric matrix `a = u v^T + v u^T`, the
//! conic formed by the two lines with those coordinate vectors. Factoring
//! inverts the map: the singular point `p = u x v` of the conic satisfies
//! `-adj(a) = p p^T`, and `u v^T = (a - [p]_x) / 2`.

use crate::camera::ProjectivePoint;
use crate::error::{Error, Result};
use crate::linalg::{rank_report, Mat};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct ChowMatrix<S> {
    a: Mat<S>,
}

impl<S: Scalar> ChowMatrix<S> {
    pub fn new(a: Mat<S>) -> Result<Self> {
        if a.rows() != 3 || !a.is_square() {
            return Err(Error::Shape("Chow matrix must be 3x3".into()));
        }
        for i in 0..3 {
            for j in 0..i {
                if a[(i, j)] != a[(j, i)] {
                    return Err(Error::InvalidParameter(
                        "Chow matrix must be symmetric".into(),
                    ));
                }
            }
        }
        Ok(ChowMatrix { a })
    }

    pub fn matrix(&self) -> &Mat<S> {
        &self.a
    }

    /// The six coordinates `(a00, a11, a22, a01, a02, a12)`.
    pub fn coordinates(&self) -> [S; 6] {
        let a = &self.a;
        [
            a[(0, 0)].clone(),
            a[(1, 1)].clone(),
            a[(2, 2)].clone(),
            a[(0, 1)].clone(),
            a[(0, 2)].clone(),
            a[(1, 2)].clone(),
        ]
    }

    pub fn det(&self) -> S {
        crate::linalg::det(&self.a).expect("square")
    }
}

/// `a_ij = u_i v_j + u_j v_i`.
pub fn chow_map<S: Scalar>(
    u: &ProjectivePoint<S>,
    v: &ProjectivePoint<S>,
) -> Result<ChowMatrix<S>> {
    if u.dim() != 3 || v.dim() != 3 {
        return Err(Error::Shape("Chow map takes image points".into()));
    }
    let (u, v) = (u.coords(), v.coords());
    let mut a = Mat::zeros(3, 3);
    for i in 0..3 {
        for j in 0..3 {
            a[(i, j)] = u[i].clone() * v[j].clone() + u[j].clone() * v[i].clone();
        }
    }
    Ok(ChowMatrix { a })
}

fn adjugate<S: Scalar>(a: &Mat<S>) -> Mat<S> {
    let mut adj = Mat::zeros(3, 3);
    for i in 0..3 {
        for j in 0..3 {
            let (r0, r1) = match j {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let (c0, c1) = match i {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let minor = a[(r0, c0)].clone() * a[(r1, c1)].clone()
                - a[(r0, c1)].clone() * a[(r1, c0)].clone();
            adj[(i, j)] = if (i + j) % 2 == 0 { minor } else { -minor };
        }
    }
    adj
}

fn largest_index<S: Scalar>(v: impl Iterator<Item = S>) -> (usize, S) {
    v.enumerate()
        .fold(None, |best: Option<(usize, S)>, (i, x)| match best {
            Some((_, ref b)) if b.magnitude() >= x.magnitude() => best,
            _ => Some((i, x)),
        })
        .expect("nonempty")
}

/// Recover `{u, v}` up to scale. `tol` is the float rank and realness
/// threshold and is ignored on exact backends.
pub fn chow_factor<S: Scalar>(
    a: &ChowMatrix<S>,
    tol: f64,
) -> Result<(ProjectivePoint<S>, ProjectivePoint<S>)> {
    let m = &a.a;
    match rank_report(m, tol).rank {
        0 => Err(Error::ZeroPoint),
        1 => {
            // a = c u u^T: any nonzero column is u
            let (j, _) = largest_index((0..3).map(|i| m[(i, i)].clone()));
            let u = ProjectivePoint::new(m.column(j))?.normalized();
            Ok((u.clone(), u))
        }
        2 => {
            let neg_adj = adjugate(m).scale(&-S::one());
            let (r, d) = largest_index((0..3).map(|i| neg_adj[(i, i)].clone()));
            let scale = tol * m.max_abs().powi(2);
            if d.to_f64() < 0.0 && !d.is_negligible(scale) {
                return Err(Error::NonRealSplit);
            }
            let pr = d.sqrt_exact().ok_or(Error::IrrationalSplit)?;
            let p: Vec<S> = neg_adj
                .column(r)
                .into_iter()
                .map(|x| x / pr.clone())
                .collect();
            let two = S::from_i64(2);
            // u v^T = (a - [p]_x) / 2
            let cross = Mat::from_rows(vec![
                vec![S::zero(), -p[2].clone(), p[1].clone()],
                vec![p[2].clone(), S::zero(), -p[0].clone()],
                vec![-p[1].clone(), p[0].clone(), S::zero()],
            ])?;
            let mut uv = Mat::zeros(3, 3);
            for i in 0..3 {
                for j in 0..3 {
                    uv[(i, j)] = (m[(i, j)].clone() - cross[(i, j)].clone()) / two.clone();
                }
            }
            let (col, _) =
                largest_index((0..3).map(|j| S::from_f64(crate::scalar::norm_f64(&uv.column(j)))));
            let (row, _) =
                largest_index((0..3).map(|i| S::from_f64(crate::scalar::norm_f64(uv.row(i)))));
            let u = ProjectivePoint::new(uv.column(col))?.normalized();
            let v = ProjectivePoint::new(uv.row(row).to_vec())?.normalized();
            Ok((u, v))
        }
        _ => Err(Error::FullRankConic),
    }
}

/// Equality of unordered pairs of projective points.
pub fn same_unordered_pair<S: Scalar>(
    a: &(ProjectivePoint<S>, ProjectivePoint<S>),
    b: &(ProjectivePoint<S>, ProjectivePoint<S>),
    tol: f64,
) -> bool {
    (a.0.proj_eq(&b.0, tol) && a.1.proj_eq(&b.1, tol))
        || (a.0.proj_eq(&b.1, tol) && a.1.proj_eq(&b.0, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use num_traits::Zero;

    fn pt(c: &[i64]) -> ProjectivePoint<Rational> {
        ProjectivePoint::from_i64(c).unwrap()
    }

    #[test]
    fn map_examples() {
        let a = chow_map(&pt(&[1, 0, 0]), &pt(&[1, 0, 0])).unwrap();
        assert_eq!(
            a.matrix(),
            &Mat::from_i64_rows(&[&[2, 0, 0], &[0, 0, 0], &[0, 0, 0]]).unwrap()
        );
        assert!(a.det().is_zero());
        let a = chow_map(&pt(&[0, 0, 1]), &pt(&[0, 2, 1])).unwrap();
        assert_eq!(
            a.matrix(),
            &Mat::from_i64_rows(&[&[0, 0, 0], &[0, 0, 2], &[0, 2, 2]]).unwrap()
        );
        assert!(a.det().is_zero());
        assert_eq!(
            chow_map(&pt(&[1, 2, 3]), &pt(&[4, 5, 6])),
            chow_map(&pt(&[4, 5, 6]), &pt(&[1, 2, 3]))
        );
    }

    #[test]
    fn factor_round_trips() {
        for (u, v) in [
            (pt(&[1, 0, 0]), pt(&[0, 1, 0])),
            (pt(&[1, 2, 3]), pt(&[1, 2, 3])),
            (pt(&[1, -2, 7]), pt(&[3, 0, -5])),
        ] {
            let a = chow_map(&u, &v).unwrap();
            let f = chow_factor(&a, 0.0).unwrap();
            assert!(same_unordered_pair(&f, &(u, v), 0.0));
        }
    }

    #[test]
    fn factor_errors() {
        let full = ChowMatrix::new(Mat::<Rational>::identity(3)).unwrap();
        assert_eq!(chow_factor(&full, 0.0), Err(Error::FullRankConic));
        // x^2 + y^2 splits over the complex numbers only
        let complex = ChowMatrix::new(
            Mat::<Rational>::from_i64_rows(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 0]]).unwrap(),
        )
        .unwrap();
        assert_eq!(chow_factor(&complex, 0.0), Err(Error::NonRealSplit));
        // x^2 - 2 y^2 splits over the reals with irrational lines
        let irr = ChowMatrix::new(
            Mat::<Rational>::from_i64_rows(&[&[1, 0, 0], &[0, -2, 0], &[0, 0, 0]]).unwrap(),
        )
        .unwrap();
        assert_eq!(chow_factor(&irr, 0.0), Err(Error::IrrationalSplit));
        assert!(ChowMatrix::new(
            Mat::<Rational>::from_i64_rows(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, 0]]).unwrap()
        )
        .is_err());
    }

    #[test]
    fn float_factor() {
        let u = ProjectivePoint::new(vec![0.3, -1.2, 2.0]).unwrap();
        let v = ProjectivePoint::new(vec![1.5, 0.25, -0.75]).unwrap();
        let f = chow_factor(&chow_map(&u, &v).unwrap(), 1e-9).unwrap();
        assert!(same_unordered_pair(&f, &(u, v), 1e-9));
    }
}
