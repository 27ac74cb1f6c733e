//! Finite formal linear combinations with BigInt coefficients.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::ring::RingTag;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lin<K: Ord> {
    terms: BTreeMap<K, BigInt>,
}

impl<K: Ord> Default for Lin<K> {
    fn default() -> Self {
        Lin { terms: BTreeMap::new() }
    }
}

impl<K: Ord + Clone> Lin<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(k: K) -> Self {
        let mut l = Self::new();
        l.terms.insert(k, BigInt::one());
        l
    }

    pub fn from_terms<I: IntoIterator<Item = (K, BigInt)>>(it: I, ring: RingTag) -> Self {
        let mut l = Self::new();
        for (k, c) in it {
            l.add_term(k, &c, ring);
        }
        l
    }

    pub fn add_term(&mut self, k: K, c: &BigInt, ring: RingTag) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(k.clone()).or_insert_with(BigInt::zero);
        *entry = ring.add(entry, c);
        if entry.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn add_scaled(&mut self, other: &Lin<K>, c: &BigInt, ring: RingTag) {
        if c.is_zero() {
            return;
        }
        for (k, v) in &other.terms {
            self.add_term(k.clone(), &(v * c), ring);
        }
    }

    pub fn add(&mut self, other: &Lin<K>, ring: RingTag) {
        self.add_scaled(other, &BigInt::one(), ring);
    }

    pub fn sub(&mut self, other: &Lin<K>, ring: RingTag) {
        self.add_scaled(other, &-BigInt::one(), ring);
    }

    pub fn scaled(&self, c: &BigInt, ring: RingTag) -> Self {
        let mut l = Self::new();
        l.add_scaled(self, c, ring);
        l
    }

    pub fn reduced(&self, ring: RingTag) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, v)| (k.clone(), v.clone())), ring)
    }

    pub fn get(&self, k: &K) -> BigInt {
        self.terms.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &BigInt)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl DoubleEndedIterator<Item = &K> {
        self.terms.keys()
    }

    pub fn map_keys<J: Ord + Clone, F: Fn(&K) -> J>(&self, f: F, ring: RingTag) -> Lin<J> {
        Lin::from_terms(self.terms.iter().map(|(k, v)| (f(k), v.clone())), ring)
    }
}

impl<K: Ord> IntoIterator for Lin<K> {
    type Item = (K, BigInt);
    type IntoIter = std::collections::btree_map::IntoIter<K, BigInt>;
    fn into_iter(self) -> Self::IntoIter {
        self.terms.into_iter()
    }
}

/// Element of a finite-basis module: basis index to coefficient.
pub type Vector = Lin<usize>;

/// `(-1)^e` as a BigInt.
pub fn sign(e: i64) -> BigInt {
    if e.rem_euclid(2) == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// Coefficient codec: a JSON number when it fits in 64 bits, else a decimal string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coeff(pub BigInt);

impl Serialize for Coeff {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Coeff {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            UInt(u64),
            Text(String),
        }
        Ok(Coeff(match Raw::deserialize(d)? {
            Raw::Int(v) => BigInt::from(v),
            Raw::UInt(v) => BigInt::from(v),
            Raw::Text(t) => t.trim().parse().map_err(|_| de::Error::custom(format!("bad integer '{t}'")))?,
        }))
    }
}

/// Serialized as a list of `[key, coefficient]` pairs in key order.
impl<K: Ord + Serialize> Serialize for Lin<K> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.terms.iter().map(|(k, v)| (k, Coeff(v.clone()))))
    }
}

impl<'de, K: Ord + Clone + Deserialize<'de>> Deserialize<'de> for Lin<K> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let pairs: Vec<(K, Coeff)> = Vec::deserialize(d)?;
        let mut l = Lin::new();
        for (k, Coeff(c)) in pairs {
            l.add_term(k, &c, RingTag::Integers);
        }
        Ok(l)
    }
}

pub fn ser_bigints<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|c| Coeff(c.clone())))
}

pub fn ser_bigint<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    Coeff(v.clone()).serialize(s)
}
