//! Coefficient rings Z, F_p and Z/p^e with BigInt scalars.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum RingTag {
    Integers,
    PrimeField(u64),
    CyclicRing(u64, u32),
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl RingTag {
    pub fn field(p: u64) -> Result<Self> {
        Self::cyclic(p, 1)
    }

    /// `Z/p^e`; `e = 1` yields the prime field.
    pub fn cyclic(p: u64, e: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Ring(format!("{p} is not prime")));
        }
        match e {
            0 => Err(Error::Ring("exponent must be at least 1".into())),
            1 => Ok(RingTag::PrimeField(p)),
            _ => Ok(RingTag::CyclicRing(p, e)),
        }
    }

    pub fn is_field(&self) -> bool {
        matches!(self, RingTag::PrimeField(_))
    }

    pub fn prime(&self) -> Option<u64> {
        match *self {
            RingTag::Integers => None,
            RingTag::PrimeField(p) | RingTag::CyclicRing(p, _) => Some(p),
        }
    }

    pub fn exponent(&self) -> u32 {
        match *self {
            RingTag::Integers => 0,
            RingTag::PrimeField(_) => 1,
            RingTag::CyclicRing(_, e) => e,
        }
    }

    pub fn modulus(&self) -> Option<BigInt> {
        self.prime().map(|p| BigInt::from(p).pow(self.exponent()))
    }

    /// Canonical representative: `[0, m)` for finite rings, identity over Z.
    pub fn reduce(&self, x: &BigInt) -> BigInt {
        match self.modulus() {
            None => x.clone(),
            Some(m) => x.mod_floor(&m),
        }
    }

    pub fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        self.reduce(&(a + b))
    }

    pub fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        self.reduce(&(a * b))
    }

    pub fn neg(&self, a: &BigInt) -> BigInt {
        self.reduce(&(-a))
    }

    pub fn is_zero(&self, a: &BigInt) -> bool {
        self.reduce(a).is_zero()
    }

    pub fn is_unit(&self, a: &BigInt) -> bool {
        match self.modulus() {
            None => a.abs().is_one(),
            Some(m) => a.gcd(&m).is_one(),
        }
    }

    /// Inverse of a unit, `None` otherwise.
    pub fn inverse(&self, a: &BigInt) -> Option<BigInt> {
        match self.modulus() {
            None => {
                if a.abs().is_one() {
                    Some(a.clone())
                } else {
                    None
                }
            }
            Some(m) => {
                let e = self.reduce(a).extended_gcd(&m);
                if e.gcd.is_one() {
                    Some(self.reduce(&e.x))
                } else {
                    None
                }
            }
        }
    }

    /// Ring with the same prime and a different exponent (0 means Z).
    pub fn with_exponent(&self, e: u32) -> Result<RingTag> {
        match (self.prime(), e) {
            (_, 0) => Ok(RingTag::Integers),
            (Some(p), e) => RingTag::cyclic(p, e),
            (None, _) => Err(Error::Ring("integers have no prime".into())),
        }
    }
}

/// Exact p-adic valuation; `None` for zero.
pub fn valuation(x: &BigInt, p: u64) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0;
    let mut y = x.clone();
    loop {
        let (q, r) = y.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        y = q;
        v += 1;
    }
}

impl fmt::Display for RingTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingTag::Integers => write!(f, "Z"),
            RingTag::PrimeField(p) => write!(f, "F{p}"),
            RingTag::CyclicRing(p, e) => write!(f, "Z/{p}^{e}"),
        }
    }
}

impl FromStr for RingTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "Z" {
            return Ok(RingTag::Integers);
        }
        if let Some(rest) = s.strip_prefix('F') {
            let p = rest
                .parse::<u64>()
                .map_err(|_| Error::Parse(format!("bad ring '{s}'")))?;
            return RingTag::field(p);
        }
        if let Some(rest) = s.strip_prefix("Z/") {
            let (p, e) = match rest.split_once('^') {
                Some((p, e)) => (p, e),
                None => (rest, "1"),
            };
            let p = p
                .parse::<u64>()
                .map_err(|_| Error::Parse(format!("bad ring '{s}'")))?;
            let e = e
                .parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad ring '{s}'")))?;
            return RingTag::cyclic(p, e);
        }
        Err(Error::Parse(format!("bad ring '{s}'")))
    }
}

impl TryFrom<String> for RingTag {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<RingTag> for String {
    fn from(r: RingTag) -> String {
        r.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_forms() {
        assert_eq!(RingTag::cyclic(5, 1).unwrap(), RingTag::PrimeField(5));
        assert!(RingTag::field(4).is_err());
        assert!(RingTag::cyclic(3, 0).is_err());
        for s in ["Z", "F7", "Z/3^2"] {
            assert_eq!(s.parse::<RingTag>().unwrap().to_string(), s);
        }
        assert_eq!("Z/5^1".parse::<RingTag>().unwrap(), RingTag::PrimeField(5));
    }

    #[test]
    fn arithmetic() {
        let r = RingTag::cyclic(3, 2).unwrap();
        assert_eq!(r.reduce(&BigInt::from(-1)), BigInt::from(8));
        assert_eq!(r.inverse(&BigInt::from(2)), Some(BigInt::from(5)));
        assert_eq!(r.inverse(&BigInt::from(3)), None);
        assert_eq!(valuation(&BigInt::from(72), 3), Some(2));
        assert_eq!(valuation(&BigInt::from(0), 3), None);
    }
}
