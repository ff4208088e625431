//! Symbolic expansion for a fixed rational rig: the image coordinates stay
//! variables, the camera entries are numbers.

use std::collections::HashMap;

use super::poly::{monomial_basis, MultiDegree, MultiHomogPoly, Side, MAX_CAMERAS};
use super::ring::CoeffRing;
use crate::camera::CameraRig;
use crate::error::{Error, Result};
use crate::forms::QuadTensor;
use crate::scalar::Rational;

type Poly<R> = MultiHomogPoly<<R as CoeffRing>::Elem>;

fn check_rig(rig: &CameraRig<Rational>) -> Result<()> {
    if rig.n() > MAX_CAMERAS {
        return Err(Error::Unsupported(format!(
            "symbolic expansion supports at most {MAX_CAMERAS} cameras"
        )));
    }
    Ok(())
}

fn check_pair(rig: &CameraRig<Rational>, (j, k): (usize, usize)) -> Result<()> {
    if j >= rig.n() || k >= rig.n() || j == k {
        return Err(Error::Index(format!(
            "camera pair ({j},{k}) for n={}",
            rig.n()
        )));
    }
    Ok(())
}

/// Determinant of a square matrix of polynomials, by dynamic programming over
/// the set of columns used by the rows processed so far.
pub fn poly_det<R: CoeffRing>(m: &[Vec<Poly<R>>], n: usize, ring: &R) -> Result<Poly<R>> {
    let k = m.len();
    if m.iter().any(|r| r.len() != k) {
        return Err(Error::Shape(
            "polynomial determinant needs a square matrix".into(),
        ));
    }
    let full = (1usize << k) - 1;
    let mut dp: Vec<Option<Poly<R>>> = vec![None; 1 << k];
    dp[0] = Some(MultiHomogPoly::constant(n, ring.one(), ring));
    for mask in 0..full {
        let Some(acc) = dp[mask].take() else { continue };
        let row = mask.count_ones() as usize;
        for c in 0..k {
            if mask & (1 << c) != 0 || m[row][c].is_zero() {
                continue;
            }
            // inversions added: earlier rows that took a later column
            let inv = (mask >> (c + 1)).count_ones();
            let mut term = acc.mul(&m[row][c], ring);
            if inv % 2 == 1 {
                term = term.neg(ring);
            }
            let next = mask | (1 << c);
            dp[next] = Some(match dp[next].take() {
                None => term,
                Some(prev) => prev.add(&term, ring)?,
            });
        }
    }
    Ok(dp[full]
        .take()
        .unwrap_or_else(|| MultiHomogPoly::zero(n, MultiDegree::zero(n))))
}

/// `B^{jk}` with image coordinates of the given side as variables.
fn symbolic_b<R: CoeffRing>(
    rig: &CameraRig<Rational>,
    (j, k): (usize, usize),
    side: Side,
    ring: &R,
) -> Result<Vec<Vec<Poly<R>>>> {
    let n = rig.n();
    let zero = MultiHomogPoly::zero(n, MultiDegree::zero(n));
    let mut b = vec![vec![zero; 6]; 6];
    for (block, cam) in [j, k].into_iter().enumerate() {
        let a = rig.camera(cam).matrix();
        for r in 0..3 {
            for c in 0..4 {
                b[3 * block + r][c] =
                    MultiHomogPoly::constant(n, ring.from_rational(&a[(r, c)])?, ring);
            }
            b[3 * block + r][4 + block] = MultiHomogPoly::variable(n, side, cam, r, ring);
        }
    }
    Ok(b)
}

/// `det B^{jk}` as a bilinear form in `(u_j, u_k)` (or the `v` variables).
pub fn expand_bilinear_symbolic<R: CoeffRing>(
    rig: &CameraRig<Rational>,
    pair: (usize, usize),
    side: Side,
    ring: &R,
) -> Result<Poly<R>> {
    check_rig(rig)?;
    check_pair(rig, pair)?;
    poly_det(&symbolic_b(rig, pair, side, ring)?, rig.n(), ring)
}

/// The four coordinates of the wedge of `B^{jk}` with row `row` deleted, as
/// bilinear forms in the image variables of cameras `j` and `k`.
pub fn expand_wedge5_symbolic<R: CoeffRing>(
    rig: &CameraRig<Rational>,
    pair: (usize, usize),
    row: usize,
    side: Side,
    ring: &R,
) -> Result<[Poly<R>; 4]> {
    check_rig(rig)?;
    check_pair(rig, pair)?;
    if row >= 6 {
        return Err(Error::Index(format!("row {row} of a 6x6 matrix")));
    }
    let mut b = symbolic_b(rig, pair, side, ring)?;
    b.remove(row);
    let coord = |c: usize| -> Result<Poly<R>> {
        let sub: Vec<Vec<Poly<R>>> = b
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(i, _)| *i != c)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let d = poly_det(&sub, rig.n(), ring)?;
        Ok(if c.is_multiple_of(2) { d } else { d.neg(ring) })
    };
    Ok([coord(0)?, coord(1)?, coord(2)?, coord(3)?])
}

/// Expands octics for one rig, caching wedge coordinates and their pairwise
/// products.
pub struct OcticExpander<'a, R: CoeffRing> {
    rig: &'a CameraRig<Rational>,
    ring: &'a R,
    tensor: Vec<([usize; 4], R::Elem)>,
    wedges: HashMap<((usize, usize), usize, Side), [Poly<R>; 4]>,
    products: HashMap<((usize, usize), (usize, usize), Side), Vec<Vec<Poly<R>>>>,
}

impl<'a, R: CoeffRing> OcticExpander<'a, R> {
    pub fn new(
        rig: &'a CameraRig<Rational>,
        tensor: &QuadTensor<Rational>,
        ring: &'a R,
    ) -> Result<Self> {
        check_rig(rig)?;
        let tensor = tensor
            .nonzero()
            .iter()
            .map(|(idx, t)| Ok((*idx, ring.from_rational(t)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(OcticExpander {
            rig,
            ring,
            tensor,
            wedges: HashMap::new(),
            products: HashMap::new(),
        })
    }

    fn wedge(&mut self, pair: (usize, usize), row: usize, side: Side) -> Result<[Poly<R>; 4]> {
        if let Some(w) = self.wedges.get(&(pair, row, side)) {
            return Ok(w.clone());
        }
        let w = expand_wedge5_symbolic(self.rig, pair, row, side, self.ring)?;
        self.wedges.insert((pair, row, side), w.clone());
        Ok(w)
    }

    /// `w_a(row0) * w_b(row1)` for all `a, b`.
    fn products(
        &mut self,
        pair: (usize, usize),
        rows: (usize, usize),
        side: Side,
    ) -> Result<&Vec<Vec<Poly<R>>>> {
        let key = (pair, rows, side);
        if !self.products.contains_key(&key) {
            let w0 = self.wedge(pair, rows.0, side)?;
            let w1 = self.wedge(pair, rows.1, side)?;
            let p = (0..4)
                .map(|a| (0..4).map(|b| w0[a].mul(&w1[b], self.ring)).collect())
                .collect();
            self.products.insert(key, p);
        }
        Ok(&self.products[&key])
    }

    /// `T(w(B, i1), w(B, i2), w(C, i3), w(C, i4))` with `u` variables in the
    /// first two slots and `v` variables in the last two.
    pub fn octic(
        &mut self,
        u_sel: ((usize, usize), (usize, usize)),
        v_sel: ((usize, usize), (usize, usize)),
    ) -> Result<Poly<R>> {
        check_pair(self.rig, u_sel.0)?;
        check_pair(self.rig, v_sel.0)?;
        if [u_sel.1 .0, u_sel.1 .1, v_sel.1 .0, v_sel.1 .1]
            .iter()
            .any(|&r| r >= 6)
        {
            return Err(Error::Index("row index must be below 6".into()));
        }
        let n = self.rig.n();
        let pu = self.products(u_sel.0, u_sel.1, Side::U)?.clone();
        let pv = self.products(v_sel.0, v_sel.1, Side::V)?.clone();
        let ring = self.ring;
        // group by the u-slot pair so each u-side product is multiplied once
        let mut grouped: Vec<((usize, usize), Poly<R>)> = Vec::new();
        for ([a, b, c, d], t) in &self.tensor {
            let term = pv[*c][*d].scale(t, ring);
            match grouped.iter_mut().find(|(k, _)| *k == (*a, *b)) {
                Some((_, acc)) => *acc = acc.add(&term, ring)?,
                None => grouped.push(((*a, *b), term)),
            }
        }
        let degree = MultiDegree::class(
            n,
            &[(u_sel.0 .0, 2), (u_sel.0 .1, 2)],
            &[(v_sel.0 .0, 2), (v_sel.0 .1, 2)],
        );
        let mut out = MultiHomogPoly::zero(n, degree);
        for ((a, b), vpart) in grouped {
            out = out.add(&pu[a][b].mul(&vpart, self.ring), self.ring)?;
        }
        Ok(out)
    }

    /// All octics with row pairs `i1 <= i2`, `i3 <= i4` for one pair of camera
    /// pairs, in lexicographic index order (441 of them).
    pub fn full_family(
        &mut self,
        u_pair: (usize, usize),
        v_pair: (usize, usize),
    ) -> Result<Vec<Poly<R>>> {
        let rows: Vec<(usize, usize)> = (0..6).flat_map(|a| (a..6).map(move |b| (a, b))).collect();
        let mut out = Vec::with_capacity(rows.len() * rows.len());
        for &ur in &rows {
            for &vr in &rows {
                out.push(self.octic((u_pair, ur), (v_pair, vr))?);
            }
        }
        Ok(out)
    }
}

pub fn expand_octic_symbolic<R: CoeffRing>(
    rig: &CameraRig<Rational>,
    tensor: &QuadTensor<Rational>,
    u_sel: ((usize, usize), (usize, usize)),
    v_sel: ((usize, usize), (usize, usize)),
    ring: &R,
) -> Result<Poly<R>> {
    OcticExpander::new(rig, tensor, ring)?.octic(u_sel, v_sel)
}

/// Multiples of the two bilinear equations spanning one multidegree
/// component of the ideal of the multiview variety in `u` plus that in `v`.
/// Only two cameras are supported: with more, the trilinear equations would
/// be needed as well.
pub fn ideal_component_basis<R: CoeffRing>(
    rig: &CameraRig<Rational>,
    target: &MultiDegree,
    ring: &R,
) -> Result<Vec<Poly<R>>> {
    if rig.n() != 2 {
        return Err(Error::Unsupported(
            "ideal components are only available for two cameras".into(),
        ));
    }
    if target.0.len() != 4 {
        return Err(Error::Shape("target multidegree needs 4 entries".into()));
    }
    let mut out = Vec::new();
    for side in [Side::U, Side::V] {
        let g = expand_bilinear_symbolic(rig, (0, 1), side, ring)?;
        let gdeg = match side {
            Side::U => MultiDegree(vec![1, 1, 0, 0]),
            Side::V => MultiDegree(vec![0, 0, 1, 1]),
        };
        let Some(rest) = target.checked_sub(&gdeg) else {
            continue;
        };
        out.extend(monomial_basis(&rest).into_iter().map(|m| g.shift(m)));
    }
    Ok(out)
}
