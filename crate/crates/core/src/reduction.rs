//! Coefficient reduction Z -> Z/p^e and Bockstein homomorphisms.

use serde::{Deserialize, Serialize};

use crate::dga::{DGAlgebra, InvariantCheck};
use crate::error::{Error, Result};
use crate::lin::Vector;
use crate::linalg::divide_exact;
use crate::ring::RingTag;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReductionKind {
    /// Z -> F_p.
    RedP,
    /// Z -> Z/p^e.
    RedPe(u32),
    /// Z/p^f -> Z/p^e with e < f.
    Quotient(u32),
}

/// Entry-wise reduction of an integral (or higher cyclic) algebra.
#[derive(Clone, Debug)]
pub struct ReductionMap {
    pub source: DGAlgebra,
    pub target: DGAlgebra,
    pub kind: ReductionKind,
}

/// All structure tables reduced into `target`.
pub fn base_change(a: &DGAlgebra, target: RingTag) -> Result<DGAlgebra> {
    Ok(reduction(a, target)?.target)
}

pub fn reduction(a: &DGAlgebra, target: RingTag) -> Result<ReductionMap> {
    let p = target
        .prime()
        .ok_or_else(|| Error::Ring("base change target must be F_p or Z/p^e".into()))?;
    let e = target.exponent();
    let kind = match a.ring() {
        RingTag::Integers if e == 1 => ReductionKind::RedP,
        RingTag::Integers => ReductionKind::RedPe(e),
        src if src.prime() == Some(p) && src.exponent() > e => ReductionKind::Quotient(e),
        src => return Err(Error::Ring(format!("no reduction map from {src} to {target}"))),
    };
    Ok(ReductionMap { source: a.clone(), target: a.with_ring_unchecked(target)?, kind })
}

impl ReductionMap {
    pub fn apply(&self, v: &Vector) -> Vector {
        v.reduced(self.target.ring())
    }

    /// Canonical lift with coefficients in `[0, p^e)`.
    pub fn lift(&self, v: &Vector) -> Vector {
        v.reduced(self.target.ring())
    }

    /// Chain map and multiplicativity checked on every basis element and pair.
    pub fn check(&self) -> InvariantCheck {
        let (s, t) = (&self.source, &self.target);
        let mut c = InvariantCheck::new("reduction is a multiplicative chain map");
        for i in 0..s.dim() {
            let e = Vector::single(i);
            let lhs = self.apply(&s.d(&e));
            let rhs = t.d(&self.apply(&e));
            c.record(lhs == rhs, || format!("d fails to commute on {}", s.name(i)));
        }
        for i in 0..s.dim() {
            for j in 0..s.dim() {
                let (x, y) = (Vector::single(i), Vector::single(j));
                let lhs = self.apply(&s.mul(&x, &y));
                let rhs = t.mul(&self.apply(&x), &self.apply(&y));
                c.record(lhs == rhs, || format!("product fails to commute on ({}, {})", s.name(i), s.name(j)));
            }
        }
        c
    }
}

/// Connecting map of 0 -> Z/p^e -> Z/p^2e -> Z/p^e -> 0 on a cocycle of the
/// reduced algebra: lift, apply the integral differential, divide by p^e.
/// `source` must be defined over Z or over Z/p^f with f >= 2e.
pub fn bockstein(source: &DGAlgebra, eps: u32, z: &Vector) -> Result<Vector> {
    let src_ring = source.ring();
    let p = match src_ring {
        RingTag::Integers => None,
        r => r.prime(),
    };
    let target = match p {
        Some(p) if src_ring.exponent() >= 2 * eps => RingTag::cyclic(p, eps)?,
        Some(_) => return Err(Error::Ring(format!("{src_ring} cannot host a Bockstein of exponent {eps}"))),
        None => {
            return Err(Error::Ring("pass the prime via bockstein_over_z for integral sources".into()));
        }
    };
    bockstein_into(source, target, z)
}

/// Bockstein for an integral source with target coefficients Z/p^e.
pub fn bockstein_over_z(source: &DGAlgebra, p: u64, eps: u32, z: &Vector) -> Result<Vector> {
    if source.ring() != RingTag::Integers {
        return bockstein(source, eps, z);
    }
    bockstein_into(source, RingTag::cyclic(p, eps)?, z)
}

fn bockstein_into(source: &DGAlgebra, target: RingTag, z: &Vector) -> Result<Vector> {
    let lift = z.reduced(target);
    let dz = source.d(&lift);
    if !dz.reduced(target).is_zero() {
        return Err(Error::Precondition("Bockstein input is not a cocycle".into()));
    }
    let q = target.modulus().expect("cyclic target");
    let quotient = divide_exact(&dz, &q).ok_or_else(|| Error::Invariant("coboundary not divisible by p^e".into()))?;
    Ok(quotient.reduced(target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use num_bigint::BigInt;

    #[test]
    fn moore_reduces_to_zero_differential_mod_p() {
        let a = presets::moore(3, 2).unwrap();
        let r = reduction(&a, RingTag::field(3).unwrap()).unwrap();
        assert_eq!(r.kind, ReductionKind::RedP);
        assert!(r.target.d(&Vector::single(1)).is_zero());
        assert!(r.check().passed);
        let r9 = reduction(&a, RingTag::cyclic(3, 2).unwrap()).unwrap();
        assert_eq!(r9.target.d(&Vector::single(1)), Vector::from_terms([(2, BigInt::from(3))], RingTag::Integers));
        assert!(r9.check().passed);
    }

    #[test]
    fn moore_bockstein() {
        let a = presets::moore(5, 2).unwrap();
        let b = bockstein_over_z(&a, 5, 1, &Vector::single(1)).unwrap();
        assert_eq!(b, Vector::single(2));
        assert!(bockstein_over_z(&a, 5, 1, &Vector::single(2)).unwrap().is_zero());
    }

    #[test]
    fn torsion_free_bockstein_vanishes() {
        let a = presets::exterior(&[3, 5]).unwrap();
        for i in 0..a.dim() {
            assert!(bockstein_over_z(&a, 3, 2, &Vector::single(i)).unwrap().is_zero());
        }
    }

    #[test]
    fn bockstein_from_higher_cyclic_source() {
        let a = presets::moore(3, 2).unwrap();
        let a9 = base_change(&a, RingTag::cyclic(3, 2).unwrap()).unwrap();
        assert_eq!(bockstein(&a9, 1, &Vector::single(1)).unwrap(), Vector::single(2));
        assert!(bockstein(&a9, 2, &Vector::single(1)).is_err());
    }
}
