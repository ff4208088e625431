use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};

use super::ring::CoeffRing;
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// Exponents are packed four bits per variable into a `u128`, which caps the
/// variable count at 32 and so the camera count at 5.
pub const MAX_CAMERAS: usize = 5;
const BITS: u32 = 4;
const MAX_EXP: u32 = (1 << BITS) - 1;

/// Which of the two image tuples a variable belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    U,
    V,
}

/// Index of coordinate `coord` of image point `cam` on `side`; the `u`
/// blocks come first, then the `v` blocks, three variables per block.
pub fn var_index(n: usize, side: Side, cam: usize, coord: usize) -> usize {
    match side {
        Side::U => 3 * cam + coord,
        Side::V => 3 * n + 3 * cam + coord,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(u128);

impl Monomial {
    pub fn one() -> Self {
        Monomial(0)
    }

    pub fn var(v: usize) -> Self {
        assert!(v < 32, "variable {v} out of range");
        Monomial(1u128 << (BITS as usize * v))
    }

    pub fn from_exps(exps: &[u32]) -> Result<Self> {
        if exps.len() > 32 || exps.iter().any(|&e| e > MAX_EXP) {
            return Err(Error::Unsupported(format!(
                "monomials of at most 32 variables with exponents up to {MAX_EXP}"
            )));
        }
        Ok(Monomial(
            exps.iter().enumerate().fold(0u128, |acc, (i, &e)| {
                acc | (e as u128) << (BITS as usize * i)
            }),
        ))
    }

    pub fn exp(self, v: usize) -> u32 {
        ((self.0 >> (BITS as usize * v)) & MAX_EXP as u128) as u32
    }

    pub fn exps(self, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|v| self.exp(v)).collect()
    }

    /// Product; exponents add nibble-wise.
    pub fn times(self, other: Monomial) -> Monomial {
        debug_assert!((0..32).all(|v| self.exp(v) + other.exp(v) <= MAX_EXP));
        Monomial(self.0 + other.0)
    }

    pub fn block_degree(self, block: usize) -> u32 {
        (0..3).map(|a| self.exp(3 * block + a)).sum()
    }

    /// Graded lexicographic on each 3-variable block, blocks in order, the
    /// larger monomial first.
    pub fn canonical_cmp(self, other: Monomial, blocks: usize) -> Ordering {
        for b in 0..blocks {
            let ka = (self.block_degree(b), self.exp(3 * b), self.exp(3 * b + 1));
            let kb = (
                other.block_degree(b),
                other.exp(3 * b),
                other.exp(3 * b + 1),
            );
            match kb.cmp(&ka) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }
}

/// Degrees in the blocks `u_1..u_n, v_1..v_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiDegree(pub Vec<u32>);

impl MultiDegree {
    pub fn zero(n: usize) -> Self {
        MultiDegree(vec![0; 2 * n])
    }

    pub fn of(n: usize, m: Monomial) -> Self {
        MultiDegree((0..2 * n).map(|b| m.block_degree(b)).collect())
    }

    /// Degree `du` in each listed `u` block and `dv` in each listed `v` block.
    pub fn class(n: usize, u_blocks: &[(usize, u32)], v_blocks: &[(usize, u32)]) -> Self {
        let mut d = vec![0; 2 * n];
        for &(c, k) in u_blocks {
            d[c] += k;
        }
        for &(c, k) in v_blocks {
            d[n + c] += k;
        }
        MultiDegree(d)
    }

    pub fn add(&self, other: &MultiDegree) -> MultiDegree {
        MultiDegree(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other` when nonnegative in every block.
    pub fn checked_sub(&self, other: &MultiDegree) -> Option<MultiDegree> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiDegree)
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl fmt::Display for MultiDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Degree-`d` monomials in one 3-variable block, larger first.
fn block_monomials(d: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for a in (0..=d).rev() {
        for b in (0..=d - a).rev() {
            out.push([a, b, d - a - b]);
        }
    }
    out
}

/// All monomials of one multidegree in canonical order.
pub fn monomial_basis(degree: &MultiDegree) -> Vec<Monomial> {
    let mut out = vec![Monomial::one()];
    for (b, &d) in degree.0.iter().enumerate() {
        let block = block_monomials(d);
        let mut next = Vec::with_capacity(out.len() * block.len());
        for m in &out {
            for e in &block {
                let mut x = *m;
                for (a, &k) in e.iter().enumerate() {
                    for _ in 0..k {
                        x = x.times(Monomial::var(3 * b + a));
                    }
                }
                next.push(x);
            }
        }
        out = next;
    }
    out
}

/// Sparse polynomial in the `6n` image variables, homogeneous in every block.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiHomogPoly<E> {
    n: usize,
    degree: MultiDegree,
    terms: BTreeMap<Monomial, E>,
}

impl<E: Clone + PartialEq + fmt::Debug> MultiHomogPoly<E> {
    pub fn zero(n: usize, degree: MultiDegree) -> Self {
        MultiHomogPoly {
            n,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant<R: CoeffRing<Elem = E>>(n: usize, c: E, ring: &R) -> Self {
        let mut p = Self::zero(n, MultiDegree::zero(n));
        if !ring.is_zero(&c) {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn variable<R: CoeffRing<Elem = E>>(
        n: usize,
        side: Side,
        cam: usize,
        coord: usize,
        ring: &R,
    ) -> Self {
        let m = Monomial::var(var_index(n, side, cam, coord));
        let mut terms = BTreeMap::new();
        terms.insert(m, ring.one());
        MultiHomogPoly {
            n,
            degree: MultiDegree::of(n, m),
            terms,
        }
    }

    pub fn from_terms<R: CoeffRing<Elem = E>>(
        n: usize,
        degree: MultiDegree,
        terms: impl IntoIterator<Item = (Monomial, E)>,
        ring: &R,
    ) -> Result<Self> {
        if n > MAX_CAMERAS || degree.0.len() != 2 * n {
            return Err(Error::Unsupported(format!("{n} cameras in a polynomial")));
        }
        let mut p = Self::zero(n, degree);
        for (m, c) in terms {
            if MultiDegree::of(n, m) != p.degree {
                return Err(Error::MixedDegrees);
            }
            p.add_term(m, c, ring);
        }
        Ok(p)
    }

    fn add_term<R: CoeffRing<Elem = E>>(&mut self, m: Monomial, c: E, ring: &R) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                if !ring.is_zero(&c) {
                    e.insert(c);
                }
            }
            Entry::Occupied(mut e) => {
                let s = ring.add(e.get(), &c);
                if ring.is_zero(&s) {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> &MultiDegree {
        &self.degree
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &E)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Option<&E> {
        self.terms.get(m)
    }

    /// Sum; a zero summand takes the other's degree.
    pub fn add<R: CoeffRing<Elem = E>>(&self, other: &Self, ring: &R) -> Result<Self> {
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if self.degree != other.degree {
            return Err(Error::MixedDegrees);
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone(), ring);
        }
        Ok(out)
    }

    pub fn neg<R: CoeffRing<Elem = E>>(&self, ring: &R) -> Self {
        MultiHomogPoly {
            n: self.n,
            degree: self.degree.clone(),
            terms: self.terms.iter().map(|(m, c)| (*m, ring.neg(c))).collect(),
        }
    }

    pub fn scale<R: CoeffRing<Elem = E>>(&self, c: &E, ring: &R) -> Self {
        let mut out = Self::zero(self.n, self.degree.clone());
        if ring.is_zero(c) {
            return out;
        }
        for (m, v) in &self.terms {
            out.add_term(*m, ring.mul(v, c), ring);
        }
        out
    }

    pub fn mul<R: CoeffRing<Elem = E>>(&self, other: &Self, ring: &R) -> Self {
        let mut out = Self::zero(self.n, self.degree.add(&other.degree));
        for (ma, a) in &self.terms {
            for (mb, b) in &other.terms {
                out.add_term(ma.times(*mb), ring.mul(a, b), ring);
            }
        }
        out
    }

    /// Multiply by a monomial with coefficient one.
    pub fn shift(&self, m: Monomial) -> Self {
        MultiHomogPoly {
            n: self.n,
            degree: self.degree.add(&MultiDegree::of(self.n, m)),
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.times(m), c.clone()))
                .collect(),
        }
    }

    /// Value at a point given as `6n` coordinates.
    pub fn eval<R: CoeffRing<Elem = E>>(&self, point: &[E], ring: &R) -> E {
        let nv = 6 * self.n;
        self.terms.iter().fold(ring.zero(), |acc, (m, c)| {
            let mut t = c.clone();
            for (v, x) in point.iter().enumerate().take(nv) {
                for _ in 0..m.exp(v) {
                    t = ring.mul(&t, x);
                }
            }
            ring.add(&acc, &t)
        })
    }

    pub fn map_coefficients<F: Clone + PartialEq + fmt::Debug, R2: CoeffRing<Elem = F>>(
        &self,
        ring: &R2,
        f: impl Fn(&E) -> Result<F>,
    ) -> Result<MultiHomogPoly<F>> {
        let mut out = MultiHomogPoly::zero(self.n, self.degree.clone());
        for (m, c) in &self.terms {
            out.add_term(*m, f(c)?, ring);
        }
        Ok(out)
    }

    /// Terms in canonical monomial order.
    pub fn sorted_terms(&self) -> Vec<(Monomial, &E)> {
        let mut t: Vec<(Monomial, &E)> = self.terms.iter().map(|(m, c)| (*m, c)).collect();
        t.sort_by(|a, b| a.0.canonical_cmp(b.0, 2 * self.n));
        t
    }

    /// `{"degree": [...], "terms": [{"exps": [...], "coef": ...}]}`.
    pub fn to_json<R: CoeffRing<Elem = E>>(&self, ring: &R) -> Value {
        let terms: Vec<Value> = self
            .sorted_terms()
            .into_iter()
            .map(|(m, c)| json!({"exps": m.exps(6 * self.n), "coef": ring.elem_to_json(c)}))
            .collect();
        json!({"degree": self.degree.0, "terms": terms})
    }
}

impl MultiHomogPoly<Rational> {
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("polynomial: {m}"));
        let degree: Vec<u32> = serde_json::from_value(
            v.get("degree")
                .cloned()
                .ok_or_else(|| bad("missing degree"))?,
        )?;
        if !degree.len().is_multiple_of(2) {
            return Err(bad("degree must have 2n entries"));
        }
        let n = degree.len() / 2;
        let terms = v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing terms"))?
            .iter()
            .map(|t| {
                let exps: Vec<u32> = serde_json::from_value(
                    t.get("exps")
                        .cloned()
                        .ok_or_else(|| bad("term without exps"))?,
                )?;
                if exps.len() != 6 * n {
                    return Err(bad("exponent vector of wrong length"));
                }
                let c =
                    Rational::from_json(t.get("coef").ok_or_else(|| bad("term without coef"))?)?;
                Ok((Monomial::from_exps(&exps)?, c))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(n, MultiDegree(degree), terms, &super::ring::RationalField)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyspace::ring::RationalField;

    #[test]
    fn basis_sizes_and_order() {
        let d = MultiDegree(vec![2, 2, 2, 2]);
        let b = monomial_basis(&d);
        assert_eq!(b.len(), 1296);
        for w in b.windows(2) {
            assert_eq!(w[0].canonical_cmp(w[1], 4), Ordering::Less);
        }
        assert_eq!(monomial_basis(&MultiDegree(vec![1, 1, 2, 2])).len(), 324);
        let first = b[0];
        assert_eq!(first.exps(12), vec![2, 0, 0, 2, 0, 0, 2, 0, 0, 2, 0, 0]);
    }

    #[test]
    fn arithmetic_and_degrees() {
        let r = RationalField;
        let x = MultiHomogPoly::variable(2, Side::U, 0, 1, &r);
        let y = MultiHomogPoly::variable(2, Side::U, 1, 0, &r);
        let z = MultiHomogPoly::variable(2, Side::V, 1, 2, &r);
        let xy = x.mul(&y, &r);
        assert_eq!(xy.degree(), &MultiDegree(vec![1, 1, 0, 0]));
        assert_eq!(x.add(&y, &r), Err(Error::MixedDegrees));
        let s = xy.add(&xy, &r).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s.add(&s.neg(&r), &r).unwrap().is_zero());
        let p = xy.mul(&z, &r);
        let mut pt = vec![Rational::from_i64(0); 12];
        pt[1] = Rational::from_i64(2);
        pt[3] = Rational::from_i64(3);
        pt[11] = Rational::from_i64(5);
        assert_eq!(p.eval(&pt, &r), Rational::from_i64(30));
    }

    #[test]
    fn json_round_trip() {
        let r = RationalField;
        let x = MultiHomogPoly::variable(2, Side::U, 0, 0, &r);
        let y =
            MultiHomogPoly::variable(2, Side::U, 1, 2, &r).scale(&Rational::from_ratio(-3, 7), &r);
        let x2 = MultiHomogPoly::variable(2, Side::U, 0, 2, &r);
        let y2 = MultiHomogPoly::variable(2, Side::U, 1, 1, &r);
        let p = x.mul(&y, &r).add(&x2.mul(&y2, &r), &r).unwrap();
        let back = MultiHomogPoly::from_json(&p.to_json(&r)).unwrap();
        assert_eq!(back, p);
    }
}
