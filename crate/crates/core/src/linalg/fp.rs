//! Elimination over F_p on machine words.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::lin::Vector;

/// Sparse vector over F_p, sorted by index, no zeros.
pub type FpVec = Vec<(usize, u64)>;

pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a % p, p - 2, p)
}

pub fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

/// `x + a*y`.
pub fn axpy(p: u64, x: &[(usize, u64)], a: u64, y: &[(usize, u64)]) -> FpVec {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take_x = j >= y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_y = i >= x.len() || (j < y.len() && y[j].0 < x[i].0);
        if take_x {
            out.push(x[i]);
            i += 1;
        } else if take_y {
            let v = mul_mod(a, y[j].1, p);
            if v != 0 {
                out.push((y[j].0, v));
            }
            j += 1;
        } else {
            let v = (x[i].1 + mul_mod(a, y[j].1, p)) % p;
            if v != 0 {
                out.push((x[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn to_fp(v: &Vector, p: u64) -> FpVec {
    let m = BigInt::from(p);
    v.iter()
        .filter_map(|(&i, c)| {
            let r = ((c % &m) + &m) % &m;
            let r = r.to_u64().expect("reduced value fits");
            (r != 0).then_some((i, r))
        })
        .collect()
}

pub fn from_fp(v: &[(usize, u64)]) -> Vector {
    let mut out = Vector::new();
    for &(i, c) in v {
        out.add_term(i, &BigInt::from(c), crate::ring::RingTag::Integers);
    }
    out
}

pub fn dot(p: u64, x: &[(usize, u64)], y: &[(usize, u64)]) -> u64 {
    let (mut i, mut j, mut s) = (0, 0, 0u64);
    while i < x.len() && j < y.len() {
        match x[i].0.cmp(&y[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                s = (s + mul_mod(x[i].1, y[j].1, p)) % p;
                i += 1;
                j += 1;
            }
        }
    }
    s
}

/// Echelon set of vectors with distinct pivots (pivot = lowest index present).
/// Each stored vector carries a tag recording the combination that produced it.
#[derive(Clone, Debug)]
pub struct Echelon {
    p: u64,
    vecs: Vec<FpVec>,
    tags: Vec<FpVec>,
    pivot_of: HashMap<usize, usize>,
}

pub enum Inserted {
    Independent,
    Dependent(FpVec),
}

impl Echelon {
    pub fn new(p: u64) -> Self {
        Echelon { p, vecs: Vec::new(), tags: Vec::new(), pivot_of: HashMap::new() }
    }

    pub fn len(&self) -> usize {
        self.vecs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vecs.is_empty()
    }

    pub fn vectors(&self) -> &[FpVec] {
        &self.vecs
    }

    pub fn tags(&self) -> &[FpVec] {
        &self.tags
    }

    /// Returns `(residual, t)` with `v = residual + sum_k t-weighted stored combinations`,
    /// where `t` is expressed in tag coordinates.
    pub fn reduce(&self, v: &[(usize, u64)]) -> (FpVec, FpVec) {
        let p = self.p;
        let mut v = v.to_vec();
        let mut t: FpVec = Vec::new();
        let mut start = 0;
        while start < v.len() {
            let (piv, c) = v[start];
            match self.pivot_of.get(&piv) {
                Some(&k) => {
                    let lead = self.vecs[k][0].1;
                    let f = mul_mod(c, inv_mod(lead, p), p);
                    v = axpy(p, &v, p - f, &self.vecs[k]);
                    t = axpy(p, &t, f, &self.tags[k]);
                    start = v.iter().position(|e| e.0 > piv).unwrap_or(v.len());
                }
                None => start += 1,
            }
        }
        (v, t)
    }

    /// Reduces `v` and stores the residual with tag `tag - t`; the residual's
    /// leading index is unclaimed by construction.
    pub fn insert(&mut self, v: &[(usize, u64)], tag: FpVec) -> Inserted {
        let (res, t) = self.reduce(v);
        let tag = axpy(self.p, &tag, self.p - 1, &t);
        if res.is_empty() {
            return Inserted::Dependent(tag);
        }
        self.pivot_of.insert(res[0].0, self.vecs.len());
        self.vecs.push(res);
        self.tags.push(tag);
        Inserted::Independent
    }

    pub fn contains(&self, v: &[(usize, u64)]) -> bool {
        self.reduce(v).0.is_empty()
    }
}
