//! Small dense matrices and the elimination kernels built on them.
//!
//! Exact backends use fraction-free (Bareiss) elimination; the float backend
//! uses pivoted Gaussian elimination with a tolerance relative to the largest
//! pivot.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default relative tolerance for float rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Dense row-major matrix. Dimensions are fixed at construction.
#[derive(Clone, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<S>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Ok(Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| S::from_i64(x)).collect())
                .collect(),
        )
    }

    pub fn from_columns(cols: &[Vec<S>]) -> Result<Self> {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|col| col.len() != r) {
            return Err(Error::Shape("ragged columns".into()));
        }
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn entries(&self) -> &[S] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Mat<T> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn mul_vec(&self, v: &[S]) -> Result<Vec<S>> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| crate::scalar::dot(self.row(i), v))
            .collect())
    }

    pub fn matmul(&self, other: &Mat<S>) -> Result<Mat<S>> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out: Mat<S> = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out[(i, j)].clone() + a.clone() * other[(k, j)].clone();
                    out[(i, j)] = v;
                }
            }
        }
        Ok(out)
    }

    pub fn without_row(&self, r: usize) -> Self {
        let rows = (0..self.rows)
            .filter(|&i| i != r)
            .map(|i| self.row(i).to_vec())
            .collect();
        Mat::from_rows(rows).expect("rectangular")
    }

    pub fn without_column(&self, c: usize) -> Self {
        let mut data = Vec::with_capacity(self.rows * (self.cols - 1));
        for i in 0..self.rows {
            for j in 0..self.cols {
                if j != c {
                    data.push(self[(i, j)].clone());
                }
            }
        }
        Mat {
            rows: self.rows,
            cols: self.cols - 1,
            data,
        }
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Mat::from_rows(idx.iter().map(|&i| self.row(i).to_vec()).collect()).expect("rectangular")
    }

    pub fn vstack(&self, other: &Mat<S>) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::Shape("vstack column mismatch".into()));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Mat {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Largest absolute entry, as f64.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    pub fn to_f64(&self) -> Mat<f64> {
        self.map(Scalar::to_f64)
    }
}

impl<S> Index<(usize, usize)> for Mat<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i},{j}) out of bounds"
        );
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i},{j}) out of bounds"
        );
        &mut self.data[i * self.cols + j]
    }
}

impl<S: Scalar> Mul for &Mat<S> {
    type Output = Mat<S>;
    fn mul(self, rhs: &Mat<S>) -> Mat<S> {
        self.matmul(rhs)
            .expect("dimension mismatch in matrix product")
    }
}

impl<S: fmt::Debug> fmt::Debug for Mat<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{:?} ", self.data[i * self.cols + j])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankReport {
    pub rank: usize,
    /// Pivot magnitudes in elimination order (float backend only).
    pub pivots: Vec<f64>,
    /// Relative tolerance that was applied; `None` on exact backends.
    pub tolerance: Option<f64>,
}

pub fn det<S: Scalar>(m: &Mat<S>) -> Result<S> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "determinant of a {}x{} matrix",
            m.rows, m.cols
        )));
    }
    let n = m.rows;
    if n == 0 {
        return Ok(S::one());
    }
    if S::EXACT {
        Ok(bareiss_det(m.clone()))
    } else {
        Ok(pivoted_det(m.clone()))
    }
}

fn bareiss_det<S: Scalar>(mut a: Mat<S>) -> S {
    let n = a.rows;
    let mut sign = false;
    let mut prev = S::one();
    for k in 0..n - 1 {
        if a[(k, k)].is_zero() {
            match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                Some(p) => {
                    swap_rows(&mut a, k, p);
                    sign = !sign;
                }
                None => return S::zero(),
            }
        }
        let pivot = a[(k, k)].clone();
        for i in k + 1..n {
            let lead = a[(i, k)].clone();
            for j in k + 1..n {
                let v = (pivot.clone() * a[(i, j)].clone() - lead.clone() * a[(k, j)].clone())
                    / prev.clone();
                a[(i, j)] = v;
            }
            a[(i, k)] = S::zero();
        }
        prev = pivot;
    }
    let d = a[(n - 1, n - 1)].clone();
    if sign {
        -d
    } else {
        d
    }
}

fn pivoted_det<S: Scalar>(mut a: Mat<S>) -> S {
    let n = a.rows;
    let mut d = S::one();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[(i, k)].magnitude().total_cmp(&a[(j, k)].magnitude()))
            .expect("nonempty");
        if a[(p, k)].is_zero() {
            return S::zero();
        }
        if p != k {
            swap_rows(&mut a, k, p);
            d = -d;
        }
        let pivot = a[(k, k)].clone();
        d = d * pivot.clone();
        for i in k + 1..n {
            let f = a[(i, k)].clone() / pivot.clone();
            if f.is_zero() {
                continue;
            }
            for j in k + 1..n {
                let v = a[(i, j)].clone() - f.clone() * a[(k, j)].clone();
                a[(i, j)] = v;
            }
        }
    }
    d
}

fn swap_rows<S>(a: &mut Mat<S>, i: usize, j: usize) {
    if i == j {
        return;
    }
    let c = a.cols;
    for k in 0..c {
        a.data.swap(i * c + k, j * c + k);
    }
}

fn swap_cols<S>(a: &mut Mat<S>, i: usize, j: usize) {
    if i == j {
        return;
    }
    let c = a.cols;
    for r in 0..a.rows {
        a.data.swap(r * c + i, r * c + j);
    }
}

/// Rank with the default float tolerance.
pub fn rank<S: Scalar>(m: &Mat<S>) -> usize {
    rank_report(m, DEFAULT_RANK_TOL).rank
}

/// Rank of `m`. `tol` is relative to the largest pivot on the float backend
/// and ignored on exact backends.
pub fn rank_report<S: Scalar>(m: &Mat<S>, tol: f64) -> RankReport {
    if S::EXACT {
        RankReport {
            rank: bareiss_rank(m.clone()),
            pivots: Vec::new(),
            tolerance: None,
        }
    } else {
        let (rank, pivots) = complete_pivot_rank(m.clone(), tol);
        RankReport {
            rank,
            pivots,
            tolerance: Some(tol),
        }
    }
}

fn bareiss_rank<S: Scalar>(mut a: Mat<S>) -> usize {
    let (rows, cols) = (a.rows, a.cols);
    let mut r = 0;
    let mut prev = S::one();
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        swap_rows(&mut a, r, p);
        let pivot = a[(r, c)].clone();
        for i in r + 1..rows {
            let lead = a[(i, c)].clone();
            for j in c + 1..cols {
                let v = (pivot.clone() * a[(i, j)].clone() - lead.clone() * a[(r, j)].clone())
                    / prev.clone();
                a[(i, j)] = v;
            }
            a[(i, c)] = S::zero();
        }
        prev = pivot;
        r += 1;
    }
    r
}

fn complete_pivot_rank<S: Scalar>(mut a: Mat<S>, tol: f64) -> (usize, Vec<f64>) {
    let (rows, cols) = (a.rows, a.cols);
    let mut pivots = Vec::new();
    let mut largest = 0.0f64;
    for k in 0..rows.min(cols) {
        let mut best = (k, k, -1.0f64);
        for i in k..rows {
            for j in k..cols {
                let v = a[(i, j)].magnitude();
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        let (pi, pj, pv) = best;
        if k == 0 {
            largest = pv;
        }
        if pv <= 0.0 || pv <= tol * largest {
            break;
        }
        pivots.push(pv);
        swap_rows(&mut a, k, pi);
        swap_cols(&mut a, k, pj);
        let pivot = a[(k, k)].clone();
        for i in k + 1..rows {
            let f = a[(i, k)].clone() / pivot.clone();
            for j in k + 1..cols {
                let v = a[(i, j)].clone() - f.clone() * a[(k, j)].clone();
                a[(i, j)] = v;
            }
            a[(i, k)] = S::zero();
        }
    }
    (pivots.len(), pivots)
}

/// Basis of the right kernel, one vector per free column of the reduced row
/// echelon form. `tol` is relative to the largest entry (float only).
pub fn nullspace<S: Scalar>(m: &Mat<S>, tol: f64) -> Vec<Vec<S>> {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.clone();
    let thresh = tol * a.max_abs();
    let zero = |x: &S| {
        if S::EXACT {
            x.is_zero()
        } else {
            x.magnitude() <= thresh
        }
    };
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let p = if S::EXACT {
            (r..rows).find(|&i| !a[(i, c)].is_zero())
        } else {
            (r..rows)
                .max_by(|&i, &j| a[(i, c)].magnitude().total_cmp(&a[(j, c)].magnitude()))
                .filter(|&i| !zero(&a[(i, c)]))
        };
        let Some(p) = p else { continue };
        swap_rows(&mut a, r, p);
        let inv = S::one() / a[(r, c)].clone();
        for j in 0..cols {
            let v = a[(r, j)].clone() * inv.clone();
            a[(r, j)] = v;
        }
        for i in 0..rows {
            if i == r || a[(i, c)].is_zero() {
                continue;
            }
            let f = a[(i, c)].clone();
            for j in 0..cols {
                let v = a[(i, j)].clone() - f.clone() * a[(r, j)].clone();
                a[(i, j)] = v;
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![S::zero(); cols];
            v[f] = S::one();
            for (row, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = -a[(row, f)].clone();
            }
            S::normalize_projective(&mut v);
            v
        })
        .collect()
}

/// The unique (up to scale) kernel vector of a matrix with nullity one.
pub fn kernel_vector<S: Scalar>(m: &Mat<S>) -> Result<Vec<S>> {
    kernel_vector_tol(m, DEFAULT_RANK_TOL)
}

pub fn kernel_vector_tol<S: Scalar>(m: &Mat<S>, tol: f64) -> Result<Vec<S>> {
    let mut basis = nullspace(m, tol);
    match basis.len() {
        0 => Err(Error::TrivialKernel),
        1 => Ok(basis.pop().expect("one vector")),
        k => Err(Error::KernelNotSimple(k)),
    }
}

/// For a k x (k+1) matrix, the vector `w` with
/// `w_i = (-1)^(i+1) det(m without column i)` (1-based `i`).
/// It satisfies `m * w = 0`.
pub fn signed_maximal_minors<S: Scalar>(m: &Mat<S>) -> Result<Vec<S>> {
    if m.cols != m.rows + 1 {
        return Err(Error::Shape(format!(
            "signed maximal minors need k x (k+1), got {}x{}",
            m.rows, m.cols
        )));
    }
    (0..m.cols)
        .map(|i| {
            let d = det(&m.without_column(i))?;
            Ok(if i % 2 == 0 { d } else { -d })
        })
        .collect()
}

/// Inverse via Gauss-Jordan. Exact zero test on exact backends, relative
/// tolerance on the float backend.
pub fn inverse<S: Scalar>(m: &Mat<S>) -> Result<Mat<S>> {
    if !m.is_square() {
        return Err(Error::Shape("inverse of non-square matrix".into()));
    }
    let n = m.rows;
    let mut aug = Mat::zeros(n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug[(i, j)] = m[(i, j)].clone();
        }
        aug[(i, n + i)] = S::one();
    }
    let thresh = DEFAULT_RANK_TOL * m.max_abs();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| aug[(i, c)].magnitude().total_cmp(&aug[(j, c)].magnitude()))
            .expect("nonempty");
        let singular = if S::EXACT {
            aug[(p, c)].is_zero()
        } else {
            aug[(p, c)].magnitude() <= thresh
        };
        if singular {
            return Err(Error::Singular);
        }
        swap_rows(&mut aug, c, p);
        let inv = S::one() / aug[(c, c)].clone();
        for j in 0..2 * n {
            let v = aug[(c, j)].clone() * inv.clone();
            aug[(c, j)] = v;
        }
        for i in 0..n {
            if i == c || aug[(i, c)].is_zero() {
                continue;
            }
            let f = aug[(i, c)].clone();
            for j in 0..2 * n {
                let v = aug[(i, j)].clone() - f.clone() * aug[(c, j)].clone();
                aug[(i, j)] = v;
            }
        }
    }
    let mut out = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = aug[(i, n + j)].clone();
        }
    }
    Ok(out)
}

/// Solve the square system `m x = b`.
pub fn solve<S: Scalar>(m: &Mat<S>, b: &[S]) -> Result<Vec<S>> {
    inverse(m)?.mul_vec(b)
}
