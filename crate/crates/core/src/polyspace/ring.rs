use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::{rank, Mat};
use crate::scalar::{Rational, Scalar};

/// Coefficient arithmetic for polynomial expansion and span ranks.
pub trait CoeffRing: Sync + Send + fmt::Debug {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn from_rational(&self, q: &Rational) -> Result<Self::Elem>;
    fn elem_to_json(&self, a: &Self::Elem) -> Value;
    /// Rank of a dense row list.
    fn rank(&self, rows: Vec<Vec<Self::Elem>>) -> usize;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn from_i64(&self, v: i64) -> Self::Elem {
        self.from_rational(&Rational::from_i64(v))
            .expect("integers reduce modulo any prime")
    }
}

/// Exact arithmetic over the rationals.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RationalField;

impl CoeffRing for RationalField {
    type Elem = Rational;

    fn zero(&self) -> Rational {
        Rational::zero()
    }
    fn one(&self) -> Rational {
        Rational::one()
    }
    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }
    fn neg(&self, a: &Rational) -> Rational {
        -a
    }
    fn is_zero(&self, a: &Rational) -> bool {
        a.is_zero()
    }
    fn from_rational(&self, q: &Rational) -> Result<Rational> {
        Ok(q.clone())
    }
    fn elem_to_json(&self, a: &Rational) -> Value {
        a.to_json()
    }
    fn rank(&self, rows: Vec<Vec<Rational>>) -> usize {
        if rows.is_empty() {
            return 0;
        }
        rank(&Mat::from_rows(rows).expect("rectangular"))
    }
}

/// Integers modulo a prime below `2^32`, so products fit in a `u64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p >= 1 << 32 || !is_prime(p) {
            return Err(Error::InvalidParameter(format!(
                "{p} is not a prime below 2^32"
            )));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn pow(&self, mut b: u64, mut e: u64) -> u64 {
        let mut acc = 1;
        b %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % self.p;
            }
            b = b * b % self.p;
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> u64 {
        self.pow(a, self.p - 2)
    }

    fn reduce_int(&self, n: &BigInt) -> u64 {
        let r = n.mod_floor(&BigInt::from(self.p));
        r.to_u64().expect("residue fits")
    }
}

impl CoeffRing for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn from_rational(&self, q: &Rational) -> Result<u64> {
        let d = self.reduce_int(q.denom());
        if d == 0 {
            return Err(Error::BadPrime(self.p));
        }
        Ok(self.reduce_int(q.numer()) * self.inv(d) % self.p)
    }
    fn elem_to_json(&self, a: &u64) -> Value {
        Value::String(a.to_string())
    }
    fn rank(&self, rows: Vec<Vec<u64>>) -> usize {
        rank_mod_p(rows, self)
    }
}

/// Gaussian elimination modulo `p`; rows below the pivot are cleared in
/// parallel.
fn rank_mod_p(mut rows: Vec<Vec<u64>>, f: &PrimeField) -> usize {
    use rayon::prelude::*;
    let p = f.p;
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(piv) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, piv);
        let inv = f.inv(rows[r][c]);
        for x in rows[r][c..].iter_mut() {
            *x = *x * inv % p;
        }
        let (head, tail) = rows.split_at_mut(r + 1);
        let pivot_row = &head[r];
        tail.par_iter_mut().for_each(|row| {
            let factor = row[c];
            if factor != 0 {
                let m = p - factor;
                for (x, y) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                    *x = (*x + m * y % p) % p;
                }
            }
        });
        r += 1;
    }
    r
}

/// Deterministic Miller-Rabin, exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for b in BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for a in BASES {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// A prime drawn uniformly-ish from `[2^30, 2^31)`: a random odd start,
/// then the next prime.
pub fn random_prime(seed: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = rng.random_range((1u64 << 30)..(1u64 << 31)) | 1;
    while !is_prime(c) {
        c += 2;
        if c >= 1 << 31 {
            c = (1 << 30) + 1;
        }
    }
    c
}
