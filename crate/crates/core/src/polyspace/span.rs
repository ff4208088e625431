use std::collections::HashMap;

use serde::Serialize;

use super::expand::{ideal_component_basis, OcticExpander};
use super::poly::{monomial_basis, MultiDegree, MultiHomogPoly};
use super::ring::{random_prime, CoeffRing, PrimeField, RationalField};
use crate::camera::CameraRig;
use crate::error::{Error, Result};
use crate::forms::{polarize, unit_distance_q};
use crate::scalar::Rational;

/// Coefficient rows in the canonical monomial basis of the common degree.
pub fn coefficient_rows<R: CoeffRing>(
    polys: &[MultiHomogPoly<R::Elem>],
    ring: &R,
) -> Result<Vec<Vec<R::Elem>>> {
    let Some(first) = polys.iter().find(|p| !p.is_zero()) else {
        return Ok(Vec::new());
    };
    let degree = first.degree().clone();
    if polys.iter().any(|p| !p.is_zero() && p.degree() != &degree) {
        return Err(Error::MixedDegrees);
    }
    let basis = monomial_basis(&degree);
    let column: HashMap<_, usize> = basis.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    Ok(polys
        .iter()
        .map(|p| {
            let mut row = vec![ring.zero(); basis.len()];
            for (m, c) in p.terms() {
                row[column[m]] = c.clone();
            }
            row
        })
        .collect())
}

/// Dimension of the linear span of polynomials sharing one multidegree.
pub fn span_dimension<R: CoeffRing>(polys: &[MultiHomogPoly<R::Elem>], ring: &R) -> Result<usize> {
    Ok(ring.rank(coefficient_rows(polys, ring)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modulus {
    /// Fraction-free elimination over the rationals.
    Exact,
    Prime(u64),
    /// A random prime in `[2^30, 2^31)` derived from the seed.
    Random {
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpanReport {
    pub dimension: usize,
    /// Empty for exact computations. A rank modulo `p` never exceeds the
    /// rational rank, so mod-p results are lower bounds.
    pub primes: Vec<u64>,
}

/// Span dimension of rational polynomials, exactly or after reduction.
pub fn span_dimension_rational(
    polys: &[MultiHomogPoly<Rational>],
    modulus: Modulus,
) -> Result<SpanReport> {
    let p = match modulus {
        Modulus::Exact => {
            return Ok(SpanReport {
                dimension: span_dimension(polys, &RationalField)?,
                primes: Vec::new(),
            })
        }
        Modulus::Prime(p) => p,
        Modulus::Random { seed } => random_prime(seed),
    };
    let f = PrimeField::new(p)?;
    let reduced = polys
        .iter()
        .map(|q| q.map_coefficients(&f, |c| f.from_rational(c)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpanReport {
        dimension: span_dimension(&reduced, &f)?,
        primes: vec![p],
    })
}

/// The three ranks behind the degree-(2,2,2,2) facts for two cameras.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpanFacts {
    /// Span of the 441 octics.
    pub octic_span: usize,
    /// Span of the 648 multiples of the bilinear equations.
    pub ideal_span: usize,
    /// Span of both lists together.
    pub joint_span: usize,
    pub primes: Vec<u64>,
}

impl SpanFacts {
    /// Dimension of the octic span modulo the ideal component.
    pub fn quotient(&self) -> usize {
        self.joint_span - self.ideal_span
    }
}

pub const EXPECTED_OCTIC_SPAN: usize = 126;
pub const EXPECTED_QUOTIENT: usize = 9;

fn facts_mod(rig: &CameraRig<Rational>, p: u64) -> Result<SpanFacts> {
    let f = PrimeField::new(p)?;
    let t = polarize(&unit_distance_q::<Rational>())?;
    let octics = OcticExpander::new(rig, &t, &f)?.full_family((0, 1), (0, 1))?;
    let ideal = ideal_component_basis(rig, &MultiDegree(vec![2, 2, 2, 2]), &f)?;
    let octic_rows = coefficient_rows(&octics, &f)?;
    let ideal_rows = coefficient_rows(&ideal, &f)?;
    let joint: Vec<Vec<u64>> = ideal_rows.iter().chain(&octic_rows).cloned().collect();
    let (octic_span, (ideal_span, joint_span)) = rayon::join(
        || f.rank(octic_rows),
        || rayon::join(|| f.rank(ideal_rows), || f.rank(joint)),
    );
    Ok(SpanFacts {
        octic_span,
        ideal_span,
        joint_span,
        primes: vec![p],
    })
}

/// Ranks modulo a random prime. If they differ from the expected generic
/// values, a second prime is tried and the larger ranks are kept (each is a
/// lower bound for the rational rank).
pub fn span_facts(rig: &CameraRig<Rational>, seed: u64) -> Result<SpanFacts> {
    if rig.n() != 2 {
        return Err(Error::Unsupported(
            "span facts are stated for two cameras".into(),
        ));
    }
    let p1 = random_prime(seed);
    let first = facts_mod(rig, p1);
    let generic =
        |f: &SpanFacts| f.octic_span == EXPECTED_OCTIC_SPAN && f.quotient() == EXPECTED_QUOTIENT;
    match first {
        Ok(ref f) if generic(f) => return first,
        Err(ref e) if !matches!(e, Error::BadPrime(_)) => return first,
        _ => {}
    }
    let mut p2 = random_prime(seed ^ 0x9e37_79b9_7f4a_7c15);
    if p2 == p1 {
        p2 = random_prime(seed.wrapping_add(1) ^ 0x9e37_79b9_7f4a_7c15);
    }
    let second = facts_mod(rig, p2)?;
    Ok(match first {
        Ok(f) => SpanFacts {
            octic_span: f.octic_span.max(second.octic_span),
            ideal_span: f.ideal_span.max(second.ideal_span),
            joint_span: f.joint_span.max(second.joint_span),
            primes: vec![p1, p2],
        },
        Err(_) => second,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyspace::poly::Side;
    use crate::scalar::Scalar;

    #[test]
    fn single_and_scaled() {
        let r = RationalField;
        let x = MultiHomogPoly::variable(2, Side::U, 0, 0, &r);
        let y = MultiHomogPoly::variable(2, Side::U, 0, 1, &r);
        assert_eq!(span_dimension(std::slice::from_ref(&x), &r).unwrap(), 1);
        let x3 = x.scale(&Rational::from_i64(3), &r);
        assert_eq!(span_dimension(&[x.clone(), x3], &r).unwrap(), 1);
        assert_eq!(span_dimension(&[x.clone(), y.clone()], &r).unwrap(), 2);
        let xy = x.mul(&y, &r);
        assert_eq!(span_dimension(&[x, xy], &r), Err(Error::MixedDegrees));
    }

    #[test]
    fn modular_and_exact_agree() {
        let r = RationalField;
        let polys: Vec<_> = (0..3)
            .map(|a| {
                let x = MultiHomogPoly::variable(2, Side::U, 0, a, &r);
                let y = MultiHomogPoly::variable(2, Side::U, 0, (a + 1) % 3, &r);
                x.add(&y.scale(&Rational::from_ratio(1, 2), &r), &r)
                    .unwrap()
            })
            .collect();
        let exact = span_dimension_rational(&polys, Modulus::Exact).unwrap();
        let modp = span_dimension_rational(&polys, Modulus::Random { seed: 3 }).unwrap();
        assert_eq!(exact.dimension, 3);
        assert_eq!(modp.dimension, 3);
        assert_eq!(modp.primes.len(), 1);
    }
}
