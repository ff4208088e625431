//! Bihomogeneous forms in two world points and their quadrilinear
//! polarizations.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Exponent vector over the four world coordinates.
pub type Exps = [u32; 4];

/// A polynomial `q(X, Y)` homogeneous of degree `d` in `X` and `e` in `Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct BihomForm<S> {
    bidegree: (u32, u32),
    terms: BTreeMap<(Exps, Exps), S>,
}

fn degree(e: &Exps) -> u32 {
    e.iter().sum()
}

fn monomial<S: Scalar>(x: &[S], e: &Exps) -> S {
    let mut acc = S::one();
    for (v, &k) in x.iter().zip(e) {
        for _ in 0..k {
            acc = acc * v.clone();
        }
    }
    acc
}

impl<S: Scalar> BihomForm<S> {
    pub fn new(
        bidegree: (u32, u32),
        terms: impl IntoIterator<Item = ((Exps, Exps), S)>,
    ) -> Result<Self> {
        if bidegree == (0, 0) {
            return Err(Error::InvalidParameter("bidegree (0,0)".into()));
        }
        let mut map = BTreeMap::new();
        for ((a, b), c) in terms {
            let got = (degree(&a), degree(&b));
            if got != bidegree {
                return Err(Error::Bidegree {
                    expected: bidegree,
                    got,
                });
            }
            let sum = map.remove(&(a, b)).unwrap_or_else(S::zero) + c;
            if !sum.is_zero() {
                map.insert((a, b), sum);
            }
        }
        Ok(BihomForm {
            bidegree,
            terms: map,
        })
    }

    pub fn bidegree(&self) -> (u32, u32) {
        self.bidegree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Exps, Exps), &S)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, a: Exps, b: Exps) -> S {
        self.terms.get(&(a, b)).cloned().unwrap_or_else(S::zero)
    }

    pub fn eval(&self, x: &[S], y: &[S]) -> S {
        self.terms.iter().fold(S::zero(), |acc, ((a, b), c)| {
            acc + c.clone() * monomial(x, a) * monomial(y, b)
        })
    }

    /// Sum of absolute coefficients, bounding `|q(X, Y)|` by
    /// `l1 * max|X|^d * max|Y|^e`.
    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(Scalar::magnitude).sum()
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|((a, b), c)| json!({"x": a, "y": b, "coef": c.to_json()}))
            .collect();
        json!({"bidegree": [self.bidegree.0, self.bidegree.1], "terms": terms})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("bihomogeneous form: {m}"));
        let bd: (u32, u32) = serde_json::from_value(
            v.get("bidegree")
                .cloned()
                .ok_or_else(|| bad("missing bidegree"))?,
        )?;
        let terms = v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing terms"))?
            .iter()
            .map(|t| {
                let a: Exps = serde_json::from_value(
                    t.get("x").cloned().ok_or_else(|| bad("term without x"))?,
                )?;
                let b: Exps = serde_json::from_value(
                    t.get("y").cloned().ok_or_else(|| bad("term without y"))?,
                )?;
                let c = S::from_json(t.get("coef").ok_or_else(|| bad("term without coef"))?)?;
                Ok(((a, b), c))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(bd, terms)
    }
}

fn e(i: usize, k: u32) -> Exps {
    let mut v = [0; 4];
    v[i] = k;
    v
}

fn add(a: Exps, b: Exps) -> Exps {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

/// `sum_a (X_a Y_3 - Y_a X_3)^2 - d^2 X_3^2 Y_3^2`: squared distance `d`
/// between the affine points of `X` and `Y`, cleared of denominators.
pub fn scaled_distance_q<S: Scalar>(d: &S) -> Result<BihomForm<S>> {
    if d.is_zero() {
        return Err(Error::InvalidParameter("distance must be nonzero".into()));
    }
    let mut terms = Vec::new();
    for a in 0..3 {
        terms.push(((e(a, 2), e(3, 2)), S::one()));
        terms.push(((e(3, 2), e(a, 2)), S::one()));
        terms.push((
            (add(e(a, 1), e(3, 1)), add(e(a, 1), e(3, 1))),
            S::from_i64(-2),
        ));
    }
    terms.push(((e(3, 2), e(3, 2)), -(d.square())));
    BihomForm::new((2, 2), terms)
}

pub fn unit_distance_q<S: Scalar>() -> BihomForm<S> {
    scaled_distance_q(&S::one()).expect("nonzero")
}

/// The form for the distance between world points `i` and `j` of a
/// configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseForm<S> {
    pub points: (usize, usize),
    pub distance: S,
    pub form: BihomForm<S>,
}

pub fn pairwise_q<S: Scalar>(i: usize, j: usize, d: &S) -> Result<PairwiseForm<S>> {
    if i == j {
        return Err(Error::InvalidParameter(
            "pairwise form needs two distinct points".into(),
        ));
    }
    Ok(PairwiseForm {
        points: (i, j),
        distance: d.clone(),
        form: scaled_distance_q(d)?,
    })
}

/// Quadrilinear form `T` on `(R^4)^4`, symmetric in slots 1,2 and 3,4.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadTensor<S> {
    entries: Vec<S>,
    nonzero: Vec<([usize; 4], S)>,
}

fn flat(a: usize, b: usize, c: usize, d: usize) -> usize {
    ((a * 4 + b) * 4 + c) * 4 + d
}

impl<S: Scalar> QuadTensor<S> {
    pub fn entry(&self, a: usize, b: usize, c: usize, d: usize) -> &S {
        &self.entries[flat(a, b, c, d)]
    }

    /// Nonzero entries in lexicographic index order.
    pub fn nonzero(&self) -> &[([usize; 4], S)] {
        &self.nonzero
    }

    pub fn eval(&self, x: &[S], xp: &[S], y: &[S], yp: &[S]) -> S {
        S::sum_of_products(
            self.nonzero
                .iter()
                .map(|([a, b, c, d], t)| (t, [&x[*a], &xp[*b], &y[*c], &yp[*d]])),
        )
    }

    pub fn l1_norm(&self) -> f64 {
        self.nonzero.iter().map(|(_, t)| t.magnitude()).sum()
    }
}

/// Polarize a (2,2) form: `b(x, x') = (q(x + x') - q(x) - q(x')) / 2` in the
/// `X` argument, then the same in `Y`. Entries are read off at basis vectors.
pub fn polarize<S: Scalar>(q: &BihomForm<S>) -> Result<QuadTensor<S>> {
    if q.bidegree() != (2, 2) {
        return Err(Error::Bidegree {
            expected: (2, 2),
            got: q.bidegree(),
        });
    }
    let half = S::from_ratio(1, 2);
    let basis = |i: usize| {
        let mut v = vec![S::zero(); 4];
        v[i] = S::one();
        v
    };
    let sum = |a: &[S], b: &[S]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.clone() + y.clone())
            .collect::<Vec<S>>()
    };
    let bx = |x: &[S], xp: &[S], y: &[S]| {
        half.clone() * (q.eval(&sum(x, xp), y) - q.eval(x, y) - q.eval(xp, y))
    };
    let t = |x: &[S], xp: &[S], y: &[S], yp: &[S]| {
        half.clone() * (bx(x, xp, &sum(y, yp)) - bx(x, xp, y) - bx(x, xp, yp))
    };
    let mut entries = vec![S::zero(); 256];
    let mut nonzero = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let v = t(&basis(a), &basis(b), &basis(c), &basis(d));
                    if !v.is_zero() {
                        nonzero.push(([a, b, c, d], v.clone()));
                    }
                    entries[flat(a, b, c, d)] = v;
                }
            }
        }
    }
    Ok(QuadTensor { entries, nonzero })
}
