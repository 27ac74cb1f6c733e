//! Integral cohomology and the mod-p universal coefficient splitting.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::dga::DGAlgebra;
use crate::error::{Error, Result};
use crate::lin::Vector;
use crate::linalg::{self, fp::Echelon, smith_normal_form, SmithForm, Solution};
use crate::reduction::{base_change, bockstein_over_z};
use crate::ring::{valuation, RingTag};

/// H^n(A; Z) as rank plus invariant factors (all > 1).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntegralGroup {
    pub degree: usize,
    pub rank: usize,
    #[serde(serialize_with = "crate::lin::ser_bigints")]
    pub torsion: Vec<BigInt>,
}

impl std::fmt::Display for IntegralGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        if self.rank > 0 {
            parts.push(if self.rank == 1 { "Z".to_string() } else { format!("Z^{}", self.rank) });
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Suspension witness for an H₁ class: d b̂ = p^ε â with red_p(b̂) a mod-p cocycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorsionWitness {
    pub degree: usize,
    pub b_hat: Vector,
    pub a_hat: Vector,
    pub eps: u32,
}

impl TorsionWitness {
    /// Checks d b̂ = p^ε â exactly and β_ε(cls red b̂) = cls red â over Z/p^ε.
    pub fn verify(&self, a: &DGAlgebra, p: u64) -> Result<bool> {
        let q = BigInt::from(p).pow(self.eps);
        let exact = a.d(&self.b_hat) == self.a_hat.scaled(&q, RingTag::Integers);
        if !exact {
            return Ok(false);
        }
        let ring = RingTag::cyclic(p, self.eps)?;
        let beta = bockstein_over_z(a, p, self.eps, &self.b_hat)?;
        let mut diff = beta;
        diff.sub(&self.a_hat.reduced(ring), ring);
        if diff.is_zero() {
            return Ok(true);
        }
        let reduced = base_change(a, ring)?;
        let m = reduced.differential_matrix(self.degree);
        let rhs = reduced.to_degree_coords(&diff);
        Ok(matches!(linalg::solve(&m, &rhs)?, Solution::Solution(_)))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct UctDegree {
    pub degree: usize,
    pub dim_fp: usize,
    /// Mod-p reductions of integral cocycles, independent in H^n(F_p).
    pub h0: Vec<Vector>,
    /// Witnesses for the suspended p-torsion of H^{n+1}(Z).
    pub h1: Vec<TorsionWitness>,
}

#[derive(Clone, Debug, Serialize)]
pub struct UctSplit {
    pub p: u64,
    pub degrees: Vec<UctDegree>,
}

impl UctSplit {
    pub fn consistent(&self) -> bool {
        self.degrees.iter().all(|d| d.dim_fp == d.h0.len() + d.h1.len())
    }
}

fn smith_of(a: &DGAlgebra, n: usize) -> Result<SmithForm> {
    smith_normal_form(&a.differential_matrix(n))
}

/// Integral cohomology in degrees `0..=through`.
pub fn integral_cohomology(a: &DGAlgebra, through: usize) -> Result<Vec<IntegralGroup>> {
    require_integral(a)?;
    let forms: Vec<SmithForm> = (0..=through).map(|n| smith_of(a, n)).collect::<Result<_>>()?;
    Ok((0..=through)
        .map(|n| {
            let dim = a.in_degree(n).len();
            let (rank_in, torsion) = match n {
                0 => (0, Vec::new()),
                _ => {
                    let s = &forms[n - 1];
                    let tors = s.diag.iter().filter(|d| !d.is_zero() && !d.abs().is_one()).map(BigInt::abs).collect();
                    (s.rank(), tors)
                }
            };
            IntegralGroup { degree: n, rank: dim - forms[n].rank() - rank_in, torsion }
        })
        .collect())
}

fn require_integral(a: &DGAlgebra) -> Result<()> {
    if a.ring() != RingTag::Integers {
        return Err(Error::Ring("integral algebra required".into()));
    }
    Ok(())
}

/// Splits H^n(A; F_p) = H₀^n ⊕ H₁^n for n in `0..=through`.
pub fn uct_split(a: &DGAlgebra, p: u64, through: usize) -> Result<UctSplit> {
    require_integral(a)?;
    let fpr = RingTag::field(p)?;
    let afp = base_change(a, fpr)?;
    let cx = afp.cochain_complex();
    let mut degrees = Vec::new();
    for n in 0..=through {
        let hom = cx.homology_at(n)?;
        let s = smith_of(a, n)?;
        let mut h0 = Vec::new();
        let mut h1 = Vec::new();
        let mut classes = Echelon::new(p);
        for b in &hom.boundaries {
            classes.insert(&linalg::fp::to_fp(b, p), Vec::new());
        }
        let dim = a.in_degree(n).len();
        // integral cocycles: columns of R past the rank
        for j in s.rank()..dim {
            let z = s.right.column_vector(j);
            let zp = linalg::fp::to_fp(&z.reduced(fpr), p);
            if let linalg::fp::Inserted::Independent = classes.insert(&zp, Vec::new()) {
                h0.push(a.from_degree_coords(n, &z.reduced(fpr)));
            }
        }
        for (i, d) in s.diag.iter().enumerate() {
            let Some(eps) = valuation(d, p).filter(|&e| e > 0) else { continue };
            let q = BigInt::from(p).pow(eps);
            let unit = d.div_floor(&q);
            let b_hat = s.right.column_vector(i);
            let w = s.left_inverse.column_vector(i);
            let a_hat = w.scaled(&unit, RingTag::Integers);
            let witness = TorsionWitness {
                degree: n,
                b_hat: a.from_degree_coords(n, &b_hat),
                a_hat: a.from_degree_coords(n + 1, &a_hat),
                eps,
            };
            let bp = linalg::fp::to_fp(&b_hat.reduced(fpr), p);
            if !matches!(classes.insert(&bp, Vec::new()), linalg::fp::Inserted::Independent) {
                return Err(Error::Invariant(format!("H1 witness in degree {n} is dependent on H0")));
            }
            h1.push(witness);
        }
        degrees.push(UctDegree { degree: n, dim_fp: hom.dimension(), h0, h1 });
    }
    Ok(UctSplit { p, degrees })
}
