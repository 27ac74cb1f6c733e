//! Sequences built with the cup-one product: the companion b-sequence of a
//! torsion witness and the correction cochains X̄ₙ over Z/p^ε.

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{products_sum, IntegralLift};
use crate::dga::DGAlgebra;
use crate::error::{Error, Result};
use crate::lin::Vector;
use crate::linalg::{self, divide_exact, Solution};
use crate::reduction::{base_change, bockstein_over_z};
use crate::ring::RingTag;

fn at(v: &[Vector], i: usize) -> Vector {
    v.get(i.wrapping_sub(1)).cloned().unwrap_or_default()
}

fn divisible(v: &Vector, p: u64) -> bool {
    divide_exact(v, &BigInt::from(p)).is_some()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BSequence {
    pub p: u64,
    pub eps: u32,
    /// b̂₁ = b′ and b̂_{i+1} = âᵢ ⌣₁ b̂₁.
    pub terms: Vec<Vector>,
    /// Residuals of d b̂ₙ − Σ(âᵢ b̂_{n−i} ∓ b̂ᵢ â_{n−i}) for n ≥ 2 (index n−2).
    pub residuals: Vec<Vector>,
    /// Residual equals −ζ̂_{n−1} ⌣₁ b̂₁ + p^ε â_{n−1} ⌣₁ a′.
    pub predicted: Vec<bool>,
    /// Residual reduces to zero mod p.
    pub in_kernel: Vec<bool>,
}

impl BSequence {
    pub fn all_pass(&self) -> bool {
        self.predicted.iter().chain(&self.in_kernel).all(|&b| b)
    }
}

/// Builds b̂₁..b̂_{n_max} from a witness d b̂₁ = p^ε a′ over Z with cup-one.
pub fn cup_one_b_sequence(
    integral: &DGAlgebra,
    lift: &IntegralLift,
    b1: &Vector,
    a_prime: &Vector,
    eps: u32,
    n_max: usize,
) -> Result<BSequence> {
    let z = RingTag::Integers;
    if integral.ring() != z {
        return Err(Error::Ring("b-sequence needs an algebra over Z".into()));
    }
    if !integral.has_cup_one() {
        return Err(Error::Capability("algebra carries no cup-one product".into()));
    }
    let p = lift.p;
    if n_max > lift.lifts.len() + 1 {
        return Err(Error::Precondition(format!("b-sequence of length {n_max} needs {} lifted terms", n_max - 1)));
    }
    let pe = BigInt::from(p).pow(eps);
    if integral.d(b1) != a_prime.scaled(&pe, z) {
        return Err(Error::Precondition("d b1 must equal p^eps a'".into()));
    }
    let deg_b = integral.degree_of(b1).ok_or_else(|| Error::Precondition("b1 vanishes".into()))?;
    let s = if deg_b % 2 == 0 { -BigInt::one() } else { BigInt::one() };
    let a = &lift.lifts;
    let mut terms = vec![b1.clone()];
    for i in 1..n_max {
        terms.push(integral.cup1(&at(a, i), b1)?);
    }
    let (mut residuals, mut predicted, mut in_kernel) = (Vec::new(), Vec::new(), Vec::new());
    for n in 2..=n_max {
        let mut r = integral.d(&terms[n - 1]);
        for i in 1..n {
            r.sub(&integral.mul(&at(a, i), &terms[n - i - 1]), z);
            r.sub(&integral.mul(&terms[i - 1], &at(a, n - i)).scaled(&s, z), z);
        }
        let mut pred = integral.cup1(&at(a, n - 1), a_prime)?.scaled(&pe, z);
        pred.sub(&integral.cup1(&at(&lift.defects, n - 1), b1)?, z);
        predicted.push(r == pred);
        in_kernel.push(divisible(&r, p));
        residuals.push(r);
    }
    Ok(BSequence { p, eps, terms, residuals, predicted, in_kernel })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectionSequence {
    pub p: u64,
    /// Minimal valuation of the defects; 1 when all defects vanish.
    pub eps: u32,
    pub ring: RingTag,
    /// X̄₁..X̄_{N+1}.
    pub x: Vec<Vector>,
    /// z̄ₙ = red(ζ̂ₙ / p^ε).
    pub z: Vec<Vector>,
    /// d X̄ₙ = Σ_{i<n}(āᵢ z̄_{n−i} − z̄ᵢ ā_{n−i}) for n = 1..=N+1.
    pub identity: Vec<bool>,
    /// β_ε(Σ āᵢ ā_{N+1−i}) + d X̄_{N+1} is a coboundary over Z/p^ε.
    pub bockstein_certified: bool,
}

impl CorrectionSequence {
    pub fn all_pass(&self) -> bool {
        self.identity.iter().all(|&b| b) && self.bockstein_certified
    }

    /// First failing index of the differential identity, if any.
    pub fn first_failure(&self) -> Option<usize> {
        self.identity.iter().position(|&b| !b).map(|i| i + 1)
    }
}

/// Correction cochains X̄₁ = 0, X̄_{n+1} = Σ_{i=1}^{n} āᵢ ⌣₁ (z̄_{n+1−i} − X̄_{n+1−i}).
pub fn correction_sequence(integral: &DGAlgebra, lift: &IntegralLift) -> Result<CorrectionSequence> {
    if !integral.has_cup_one() {
        return Err(Error::Capability("algebra carries no cup-one product".into()));
    }
    let p = lift.p;
    let n = lift.lifts.len();
    let eps = lift.eps_min().unwrap_or(1);
    let ring = RingTag::cyclic(p, eps)?;
    let r = base_change(integral, ring)?;
    let q = BigInt::from(p).pow(eps);
    let a: Vec<Vector> = lift.lifts.iter().map(|v| v.reduced(ring)).collect();
    let zs: Vec<Vector> = lift
        .defects
        .iter()
        .map(|d| divide_exact(d, &q).map(|v| v.reduced(ring)).ok_or_else(|| Error::Invariant("defect below the minimal valuation".into())))
        .collect::<Result<_>>()?;

    let mut x = vec![Vector::new()];
    for m in 1..=n {
        let mut next = Vector::new();
        for i in 1..=m {
            let mut inner = at(&zs, m + 1 - i);
            inner.sub(&x[m - i], ring);
            next.add(&r.cup1(&a[i - 1], &inner)?, ring);
        }
        x.push(next);
    }
    let identity = (1..=n + 1)
        .map(|m| {
            let mut rhs = Vector::new();
            for i in 1..m {
                rhs.add(&r.mul(&at(&a, i), &at(&zs, m - i)), ring);
                rhs.sub(&r.mul(&at(&zs, i), &at(&a, m - i)), ring);
            }
            r.d(&x[m - 1]) == rhs
        })
        .collect();

    let s = products_sum(&r, &a, n + 1);
    let mut c = bockstein_over_z(integral, p, eps, &s)?;
    c.add(&r.d(&x[n]), ring);
    let bockstein_certified = c.is_zero() || {
        let deg = r.degree_of(&c).expect("homogeneous");
        deg > 0 && matches!(linalg::solve(&r.differential_matrix(deg - 1), &r.to_degree_coords(&c))?, Solution::Solution(_))
    };
    Ok(CorrectionSequence { p, eps, ring, x, z: zs, identity, bockstein_certified })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kraines::{grow, integral_lift, Status};
    use crate::presets;
    use crate::simplicial::{cochain_algebra, SimplicialComplex};

    fn simplicial_moore(p: u64) -> DGAlgebra {
        let k = SimplicialComplex::moore_space(p).unwrap();
        cochain_algebra(&k, RingTag::Integers).unwrap()
    }

    /// Torsion witness d b̂ = p â with b̂ in degree 1.
    fn witness(z: &DGAlgebra, p: u64) -> (Vector, Vector) {
        let u = crate::uct::uct_split(z, p, 2).unwrap();
        let w = u.degrees.iter().flat_map(|d| &d.h1).find(|w| w.degree == 1).expect("degree-1 witness").clone();
        assert_eq!(w.eps, 1);
        (w.b_hat, w.a_hat)
    }

    #[test]
    fn square_zero_model_is_trivial() {
        let p = 3;
        let z = presets::moore(p, 2).unwrap();
        let lift = integral_lift(&z, p, &[Vector::single(2), Vector::new(), Vector::new()]).unwrap();
        let b = cup_one_b_sequence(&z, &lift, &Vector::single(1), &Vector::single(2), 1, 4).unwrap();
        assert!(b.all_pass());
        assert!(b.terms[1..].iter().all(Vector::is_zero));
        let c = correction_sequence(&z, &lift).unwrap();
        assert!(c.all_pass());
        assert!(c.x.iter().all(Vector::is_zero));
    }

    #[test]
    fn simplicial_b_sequence_residuals() {
        let p = 5;
        let z = simplicial_moore(p);
        let fp = base_change(&z, RingTag::field(p).unwrap()).unwrap();
        let (b1, a1) = witness(&z, p);
        let seq = grow(&fp, &b1.reduced(fp.ring()), 4, None).unwrap();
        assert_eq!(seq.terms.len(), 4, "{:?}", seq.status);
        let lift = integral_lift(&z, p, &seq.terms).unwrap();
        let b = cup_one_b_sequence(&z, &lift, &b1, &a1, 1, 4).unwrap();
        assert!(b.all_pass(), "{:?}", b.predicted);
        assert!(!b.terms[1].is_zero() && b.residuals.iter().any(|r| !r.is_zero()));
    }

    #[test]
    fn simplicial_correction_sequence() {
        for p in [3, 5] {
            let z = simplicial_moore(p);
            let fp = base_change(&z, RingTag::field(p).unwrap()).unwrap();
            let (b1, _) = witness(&z, p);
            let seq = grow(&fp, &b1.reduced(fp.ring()), 2 * p as usize, None).unwrap();
            let Status::Obstructed(o) = &seq.status else { panic!("p = {p}: expected an obstruction, got {:?}", seq.status) };
            assert_eq!(o.index, p as usize, "p = {p}");
            let lift = integral_lift(&z, p, &seq.terms).unwrap();
            let c = correction_sequence(&z, &lift).unwrap();
            assert!(c.x[0].is_zero());
            assert!(c.all_pass(), "p = {p}: {:?}", c.identity);
            assert!(c.x.iter().any(|v| !v.is_zero()) && c.z.iter().any(|v| !v.is_zero()), "p = {p}");
        }
    }
}
