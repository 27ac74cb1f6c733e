//! Finite (or degree-truncated) DG coalgebras.

use num_bigint::BigInt;
use num_traits::One;

use crate::complex::Direction;
use crate::dga::{BasisElement, DGAlgebra, InvariantCheck, InvariantReport};
use crate::error::{Error, Result};
use crate::lin::{sign, Lin, Vector};
use crate::ring::RingTag;

pub type Tensor2 = Lin<(usize, usize)>;

/// Coalgebra with a distinguished group-like unit `coaugmentation` and a
/// differential that raises (cochain) or lowers (chain) degree.
#[derive(Clone, Debug)]
pub struct DGCoalgebra {
    pub ring: RingTag,
    pub direction: Direction,
    pub basis: Vec<BasisElement>,
    pub diff: Vec<Vector>,
    /// Full coproduct of each basis element.
    pub coproduct: Vec<Tensor2>,
    pub counit: Vector,
    pub coaugmentation: usize,
    /// Elements above this degree are missing; identities are only checked below it.
    pub truncated_above: Option<usize>,
}

impl DGCoalgebra {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.basis[i].degree
    }

    pub fn top_degree(&self) -> usize {
        self.basis.iter().map(|b| b.degree).max().unwrap_or(0)
    }

    pub fn d(&self, v: &Vector) -> Vector {
        let mut out = Vector::new();
        for (&i, c) in v.iter() {
            out.add_scaled(&self.diff[i], c, self.ring);
        }
        out
    }

    pub fn delta(&self, v: &Vector) -> Tensor2 {
        let mut out = Tensor2::new();
        for (&i, c) in v.iter() {
            out.add_scaled(&self.coproduct[i], c, self.ring);
        }
        out
    }

    /// Δ̄x = Δx − x⊗1 − 1⊗x on elements killed by the counit; zero on the unit.
    pub fn reduced_delta_basis(&self, i: usize) -> Tensor2 {
        let u = self.coaugmentation;
        if i == u {
            return Tensor2::new();
        }
        let mut out = self.coproduct[i].clone();
        let m1 = -BigInt::one();
        out.add_term((i, u), &m1, self.ring);
        out.add_term((u, i), &m1, self.ring);
        out
    }

    /// Letters of the cobar construction: basis elements other than the unit.
    pub fn letters(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| i != self.coaugmentation).collect()
    }

    pub fn is_connected(&self) -> bool {
        self.letters().iter().all(|&i| self.degree(i) > 0) && self.degree(self.coaugmentation) == 0
    }

    pub fn is_one_reduced(&self) -> bool {
        self.is_connected() && self.letters().iter().all(|&i| self.degree(i) != 1)
    }

    /// Linear dual of a finite DG algebra; the unit must be a single basis element.
    pub fn dual_of(a: &DGAlgebra) -> Result<Self> {
        let unit = match a.unit().iter().collect::<Vec<_>>().as_slice() {
            [(&u, c)] if c.is_one() => u,
            _ => return Err(Error::Precondition("dual coalgebra needs a basis element as unit".into())),
        };
        let ring = a.ring();
        let n = a.dim();
        let mut diff = vec![Vector::new(); n];
        for k in 0..n {
            for (&j, c) in a.d_basis(k).iter() {
                diff[j].add_term(k, c, ring);
            }
        }
        let mut coproduct = vec![Tensor2::new(); n];
        for (&(i, j), v) in a.product_table() {
            for (&k, c) in v.iter() {
                coproduct[k].add_term((i, j), c, ring);
            }
        }
        let coaug = match a.augmentation().iter().collect::<Vec<_>>().as_slice() {
            [(&e, c)] if c.is_one() => e,
            _ => return Err(Error::Precondition("dual coalgebra needs a basis functional as augmentation".into())),
        };
        Ok(DGCoalgebra {
            ring,
            direction: Direction::Lowering,
            basis: a.basis().to_vec(),
            diff,
            coproduct,
            counit: Vector::single(unit),
            coaugmentation: coaug,
            truncated_above: None,
        })
    }

    /// Chain-graded homology coalgebra of S^n: 1 and a primitive class e_n.
    pub fn sphere_homology(n: usize, ring: RingTag) -> Self {
        let one = BigInt::one();
        DGCoalgebra {
            ring,
            direction: Direction::Lowering,
            basis: vec![
                BasisElement { name: "1".into(), degree: 0 },
                BasisElement { name: "e".into(), degree: n },
            ],
            diff: vec![Vector::new(); 2],
            coproduct: vec![
                Tensor2::from_terms([((0, 0), one.clone())], ring),
                Tensor2::from_terms([((1, 0), one.clone()), ((0, 1), one)], ring),
            ],
            counit: Vector::single(0),
            coaugmentation: 0,
            truncated_above: None,
        }
    }

    fn checked(&self, i: usize, extra: usize) -> bool {
        self.truncated_above.is_none_or(|t| self.degree(i) + extra <= t)
    }

    /// Exhaustive identity checks on basis elements.
    pub fn check_invariants(&self) -> InvariantReport {
        let ring = self.ring;
        let n = self.dim();
        let mut report = InvariantReport::default();
        let e = |i: usize| Vector::single(i);

        let mut dd = InvariantCheck::new("coalgebra d^2 = 0");
        for i in (0..n).filter(|&i| self.checked(i, 2)) {
            let z = self.d(&self.d(&e(i)));
            dd.record(z.is_zero(), || format!("d^2({}) != 0", self.basis[i].name));
        }
        report.checks.push(dd);

        let mut coassoc = InvariantCheck::new("coassociativity");
        for i in 0..n {
            let mut l: Lin<(usize, usize, usize)> = Lin::new();
            let mut r: Lin<(usize, usize, usize)> = Lin::new();
            for (&(x, y), c) in self.coproduct[i].iter() {
                for (&(x1, x2), c2) in self.coproduct[x].iter() {
                    l.add_term((x1, x2, y), &(c * c2), ring);
                }
                for (&(y1, y2), c2) in self.coproduct[y].iter() {
                    r.add_term((x, y1, y2), &(c * c2), ring);
                }
            }
            coassoc.record(l == r, || format!("coassociativity fails on {}", self.basis[i].name));
        }
        report.checks.push(coassoc);

        let mut counit = InvariantCheck::new("counit laws");
        for i in 0..n {
            let mut l = Vector::new();
            let mut r = Vector::new();
            for (&(x, y), c) in self.coproduct[i].iter() {
                l.add_term(y, &(c * self.counit.get(&x)), ring);
                r.add_term(x, &(c * self.counit.get(&y)), ring);
            }
            counit.record(l == e(i) && r == e(i), || format!("counit law fails on {}", self.basis[i].name));
        }
        report.checks.push(counit);

        let mut leib = InvariantCheck::new("co-Leibniz");
        for i in (0..n).filter(|&i| self.checked(i, 1)) {
            let lhs = self.delta(&self.d(&e(i)));
            let mut rhs = Tensor2::new();
            for (&(x, y), c) in self.coproduct[i].iter() {
                for (&dx, c2) in self.diff[x].iter() {
                    rhs.add_term((dx, y), &(c * c2), ring);
                }
                let s = sign(self.degree(x) as i64);
                for (&dy, c2) in self.diff[y].iter() {
                    rhs.add_term((x, dy), &(c * c2 * &s), ring);
                }
            }
            leib.record(lhs == rhs, || format!("co-Leibniz fails on {}", self.basis[i].name));
        }
        report.checks.push(leib);

        // iterated reduced coproduct: degrees of positive letters strictly drop
        let mut conil = InvariantCheck::new("local conilpotence");
        for i in 0..n {
            let mut frontier: Vec<usize> = vec![i];
            let mut steps = 0;
            while !frontier.is_empty() && steps <= self.top_degree() + 1 {
                let mut next = Vec::new();
                for &x in &frontier {
                    for ((a, b), _) in self.reduced_delta_basis(x).into_iter() {
                        next.push(a);
                        next.push(b);
                    }
                }
                next.sort();
                next.dedup();
                frontier = next;
                steps += 1;
            }
            conil.record(frontier.is_empty(), || format!("reduced coproduct iterates of {} never vanish", self.basis[i].name));
        }
        report.checks.push(conil);
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn duals_of_presets_are_coalgebras() {
        for e in ["moore(3,2)", "truncated_poly(2,4)", "exterior(2,3)", "tensor(truncated_poly(2,2),sphere(3))"] {
            let a = presets::parse_preset(e).unwrap();
            let c = DGCoalgebra::dual_of(&a).unwrap();
            let r = c.check_invariants();
            assert!(r.all_passed(), "{e}: {r:?}");
            assert!(c.is_one_reduced());
        }
    }

    #[test]
    fn sphere_homology_is_primitive() {
        let c = DGCoalgebra::sphere_homology(4, RingTag::field(3).unwrap());
        assert!(c.reduced_delta_basis(1).is_zero());
        assert!(c.check_invariants().all_passed());
    }
}
