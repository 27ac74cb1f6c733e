//! Hochschild complex A ⊗ B̄A of a DG algebra with coefficients in itself.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bar::{self, format_word, sdeg, shuffle_unchecked, words_through, Chain, Word};
use crate::complex::{BettiTable, CochainComplex, Direction};
use crate::dga::{DGAlgebra, InvariantCheck, InvariantReport};
use crate::error::{Error, Result};
use crate::lin::{sign, Lin, Vector};
use crate::linalg::{SparseMatrix, SubquotientBasis};
use crate::ring::RingTag;

/// a₀ ⊗ [a₁|…|a_k] with a₀ any basis element (the unit included).
pub type HWord = (usize, Word);
pub type HChain = Lin<HWord>;

pub fn hdeg(a: &DGAlgebra, w: &HWord) -> usize {
    a.degree(w.0) + sdeg(a, &w.1)
}

/// D = (d₀ − d₁) + (d_A ⊗ 1 + (−1)^{deg a₀} 1 ⊗ δ).
pub fn hochschild_differential(a: &DGAlgebra, c: &HChain) -> HChain {
    let ring = a.ring();
    let mut out = HChain::new();
    for ((a0, w), coef) in c.iter() {
        let d0 = a.degree(*a0);
        let s0 = sign(d0 as i64) * coef;
        if let (Some(&first), Some(&last)) = (w.first(), w.last()) {
            let k = w.len();
            if let Some(p) = a.mul_basis(*a0, first) {
                for (&b, e) in p.iter() {
                    out.add_term((b, w[1..].to_vec()), &(&s0 * e), ring);
                }
            }
            if let Some(p) = a.mul_basis(last, *a0) {
                let inner: usize = w[..k - 1].iter().map(|&x| a.degree(x)).sum();
                let ex = (a.degree(last) + 1) * (d0 + inner + k - 1);
                let s1 = -sign(ex as i64) * coef;
                for (&b, e) in p.iter() {
                    out.add_term((b, w[..k - 1].to_vec()), &(&s1 * e), ring);
                }
            }
        }
        for (&b, e) in a.d_basis(*a0).iter() {
            out.add_term((b, w.clone()), &(coef * e), ring);
        }
        for (w2, e) in bar::differential(a, &Chain::single(w.clone())).iter() {
            out.add_term((*a0, w2.clone()), &(&s0 * e), ring);
        }
    }
    out
}

/// 1 ⊗ ξ for a bar chain ξ.
pub fn unit_head(a: &DGAlgebra, x: &Chain) -> HChain {
    let ring = a.ring();
    let mut out = HChain::new();
    for (&u, c) in a.unit().iter() {
        for (w, e) in x.iter() {
            out.add_term((u, w.clone()), &(c * e), ring);
        }
    }
    out
}

/// I(a) = a ⊗ [].
pub fn map_i(a: &DGAlgebra, v: &Vector) -> HChain {
    HChain::from_terms(v.iter().map(|(&k, c)| ((k, Vec::new()), c.clone())), a.ring())
}

/// ψ(a₀ ⊗ w) = ε(a₀) w.
pub fn map_psi(a: &DGAlgebra, c: &HChain) -> Chain {
    let ring = a.ring();
    let mut out = Chain::new();
    for ((a0, w), e) in c.iter() {
        let eps = a.augmentation().get(a0);
        out.add_term(w.clone(), &(e * eps), ring);
    }
    out
}

/// (a₀⊗u) ⋆ (b₀⊗v) = (−1)^{deg b₀ · sdeg u} a₀b₀ ⊗ (u ш v); commutative sources only.
pub fn shuffle(a: &DGAlgebra, x: &HChain, y: &HChain) -> Result<HChain> {
    if !a.is_graded_commutative() {
        return Err(Error::Capability("Hochschild shuffle product needs a graded-commutative source".into()));
    }
    Ok(shuffle_unchecked_h(a, x, y))
}

fn shuffle_unchecked_h(a: &DGAlgebra, x: &HChain, y: &HChain) -> HChain {
    let ring = a.ring();
    let mut out = HChain::new();
    for ((a0, u), c) in x.iter() {
        for ((b0, v), e) in y.iter() {
            let Some(prod) = a.mul_basis(*a0, *b0) else { continue };
            let s = sign((a.degree(*b0) * sdeg(a, u)) as i64) * c * e;
            let sh = shuffle_unchecked(a, &Chain::single(u.clone()), &Chain::single(v.clone()));
            for (&m, f) in prod.iter() {
                for (w, g) in sh.iter() {
                    out.add_term((m, w.clone()), &(&s * f * g), ring);
                }
            }
        }
    }
    out
}

pub fn format_hword(a: &DGAlgebra, w: &HWord) -> String {
    format!("{}⊗{}", a.name(w.0), format_word(a, &w.1))
}

/// Built through degree `window + 1`; cohomology is exact in `0..=window`.
#[derive(Debug)]
pub struct HochschildComplex {
    source: DGAlgebra,
    window: usize,
    words: Vec<Vec<HWord>>,
    index: HashMap<HWord, usize>,
    complex: OnceLock<CochainComplex>,
}

impl HochschildComplex {
    pub fn new(a: &DGAlgebra, window: usize) -> Result<Self> {
        a.check_bar_ready()?;
        let top = window + 1;
        let bar_words = words_through(a, top);
        let mut words: Vec<Vec<HWord>> = vec![Vec::new(); top + 1];
        for (n, slot) in words.iter_mut().enumerate() {
            for h in 0..a.dim() {
                let dh = a.degree(h);
                if dh > n {
                    continue;
                }
                slot.extend(bar_words[n - dh].iter().map(|w| (h, w.clone())));
            }
            slot.sort_by(|x, y| (x.1.len(), &x.1, x.0).cmp(&(y.1.len(), &y.1, y.0)));
        }
        let index = words.iter().flat_map(|ws| ws.iter().enumerate().map(|(i, w)| (w.clone(), i))).collect();
        Ok(HochschildComplex { source: a.clone(), window, words, index, complex: OnceLock::new() })
    }

    pub fn source(&self) -> &DGAlgebra {
        &self.source
    }

    pub fn ring(&self) -> RingTag {
        self.source.ring()
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn words(&self, n: usize) -> &[HWord] {
        self.words.get(n).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn dims(&self) -> Vec<usize> {
        self.words.iter().map(Vec::len).collect()
    }

    pub fn degree_of(&self, c: &HChain) -> Option<usize> {
        let mut it = c.keys().map(|w| hdeg(&self.source, w));
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn coords(&self, n: usize, c: &HChain) -> Result<Vector> {
        if n > self.window + 1 {
            return Err(Error::Window { requested: n, limit: self.window + 1 });
        }
        let mut v = Vector::new();
        for (w, e) in c.iter() {
            if hdeg(&self.source, w) != n {
                return Err(Error::Precondition(format!("chain is not homogeneous of degree {n}")));
            }
            v.add_term(self.index[w], e, self.ring());
        }
        Ok(v)
    }

    pub fn matrix(&self, n: usize) -> Result<SparseMatrix> {
        if n > self.window {
            return Err(Error::Window { requested: n, limit: self.window });
        }
        let src = &self.words[n];
        let entries: Vec<(usize, usize, BigInt)> = src
            .par_iter()
            .enumerate()
            .flat_map_iter(|(j, w)| {
                let img = hochschild_differential(&self.source, &HChain::single(w.clone()));
                img.into_iter().map(move |(w2, c)| (self.index[&w2], j, c)).collect::<Vec<_>>()
            })
            .collect();
        SparseMatrix::from_entries(self.words[n + 1].len(), src.len(), self.ring(), entries)
    }

    pub fn complex(&self) -> Result<&CochainComplex> {
        if let Some(c) = self.complex.get() {
            return Ok(c);
        }
        let maps = (0..=self.window + 1)
            .into_par_iter()
            .map(|n| if n <= self.window { self.matrix(n).map(Some) } else { Ok(None) })
            .collect::<Result<Vec<_>>>()?;
        let cx = CochainComplex::new(self.ring(), Direction::Raising, self.dims(), maps, self.window)?;
        Ok(self.complex.get_or_init(|| cx))
    }

    pub fn cohomology(&self) -> Result<(BettiTable, Vec<SubquotientBasis>)> {
        self.complex()?.cohomology(self.window, "hochschild")
    }

    /// Exact rank test in the truncated complex.
    pub fn class_nonzero(&self, c: &HChain) -> Result<bool> {
        if c.is_zero() {
            return Ok(false);
        }
        let n = self.degree_of(c).ok_or_else(|| Error::Precondition("chain is not homogeneous".into()))?;
        if n > self.window {
            return Err(Error::Window { requested: n, limit: self.window });
        }
        let h = self.complex()?.homology_at(n)?;
        Ok(!h.is_boundary(&self.coords(n, c)?)?)
    }

    /// D² = 0, I and ψ chain maps, ψ∘I = unit∘augmentation, ψ(1⊗w) = w.
    pub fn check_invariants(&self) -> InvariantReport {
        let a = &self.source;
        let ring = self.ring();
        let all: Vec<&HWord> = self.words.iter().take(self.window + 1).flatten().collect();
        let results: Vec<(bool, bool)> = all
            .par_iter()
            .map(|w| {
                let c = HChain::single((*w).clone());
                let dc = hochschild_differential(a, &c);
                let dd = hochschild_differential(a, &dc).is_zero();
                let psi = map_psi(a, &dc) == bar::differential(a, &map_psi(a, &c));
                (dd, psi)
            })
            .collect();
        let mut dd = InvariantCheck::new("hochschild D^2 = 0");
        let mut psi = InvariantCheck::new("psi chain map");
        for (w, (r0, r1)) in all.iter().zip(&results) {
            dd.record(*r0, || format!("D^2 != 0 on {}", format_hword(a, w)));
            psi.record(*r1, || format!("psi D != delta psi on {}", format_hword(a, w)));
        }

        let mut i_map = InvariantCheck::new("I chain map");
        let mut psi_i = InvariantCheck::new("psi I = unit augmentation");
        for k in 0..a.dim() {
            let v = Vector::single(k);
            i_map.record(hochschild_differential(a, &map_i(a, &v)) == map_i(a, &a.d(&v)), || {
                format!("D I != I d on {}", a.name(k))
            });
            let expect = Chain::from_terms([(Vec::new(), a.augment(&v))], ring);
            psi_i.record(map_psi(a, &map_i(a, &v)) == expect, || format!("psi I wrong on {}", a.name(k)));
        }

        let mut section = InvariantCheck::new("psi (1 ⊗ w) = w");
        for w in self.words.iter().take(self.window + 1).flatten().filter(|w| a.unit() == &Vector::single(w.0)) {
            let x = Chain::single(w.1.clone());
            section.record(map_psi(a, &unit_head(a, &x)) == x, || format!("fails on {}", format_word(a, &w.1)));
        }
        InvariantReport { checks: vec![dd, psi, i_map, psi_i, section] }
    }

    /// D(x ⋆ y) = Dx ⋆ y + (−1)^{|x|} x ⋆ Dy on all word pairs of total degree ≤ `limit`.
    pub fn check_shuffle_leibniz(&self, limit: usize) -> Result<InvariantCheck> {
        let a = &self.source;
        if !a.is_graded_commutative() {
            return Err(Error::Capability("Hochschild shuffle product needs a graded-commutative source".into()));
        }
        let limit = limit.min(self.window);
        let ring = self.ring();
        let all: Vec<&HWord> = self.words.iter().take(limit + 1).flatten().collect();
        let outcomes: Vec<Option<String>> = all
            .par_iter()
            .flat_map_iter(|x| {
                let dx_deg = hdeg(a, x);
                all.iter()
                    .filter(move |y| dx_deg + hdeg(a, y) <= limit)
                    .map(move |y| {
                        let xc = HChain::single((*x).clone());
                        let yc = HChain::single((*y).clone());
                        let lhs = hochschild_differential(a, &shuffle_unchecked_h(a, &xc, &yc));
                        let mut rhs = shuffle_unchecked_h(a, &hochschild_differential(a, &xc), &yc);
                        rhs.add_scaled(
                            &shuffle_unchecked_h(a, &xc, &hochschild_differential(a, &yc)),
                            &sign(dx_deg as i64),
                            ring,
                        );
                        (lhs != rhs).then(|| format!("{} * {}", format_hword(a, x), format_hword(a, y)))
                    })
            })
            .collect();
        let mut check = InvariantCheck::new("hochschild shuffle Leibniz");
        for o in outcomes {
            let ok = o.is_none();
            check.record(ok, || o.unwrap_or_default());
        }
        Ok(check)
    }
}

/// Free-loop-space Betti numbers HH^n(A) for n ≤ N over a prime field.
pub fn free_loop_betti(a: &DGAlgebra, n: usize) -> Result<BettiTable> {
    if !a.ring().is_field() {
        return Err(Error::Ring("free-loop Betti numbers need a prime field".into()));
    }
    Ok(HochschildComplex::new(a, n)?.cohomology()?.0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleVerdict {
    pub label: String,
    pub degree: Option<usize>,
    pub cycle: bool,
    /// First word where D of the candidate is nonzero.
    pub offending: Option<String>,
    pub nonzero: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZCycleReport {
    pub verdicts: Vec<CycleVerdict>,
    /// ψ(z_{r,s}) agrees with the bar shuffle x(r) ш y(s).
    pub psi_matches_bar_product: Option<bool>,
}

impl ZCycleReport {
    pub fn all_cycles(&self) -> bool {
        self.verdicts.iter().all(|v| v.cycle) && self.psi_matches_bar_product != Some(false)
    }
}

fn verdict(h: &HochschildComplex, label: String, z: &HChain) -> Result<CycleVerdict> {
    let a = h.source();
    let dz = hochschild_differential(a, z);
    let offending = dz.iter().next().map(|(w, c)| format!("{c}*{}", format_hword(a, w)));
    let degree = h.degree_of(z);
    let nonzero = match (offending.is_none(), degree) {
        (true, Some(d)) if d <= h.window() && h.ring().is_field() => Some(h.class_nonzero(z)?),
        _ => None,
    };
    Ok(CycleVerdict { label, degree, cycle: offending.is_none(), offending, nonzero })
}

/// Checks D(1⊗x(r)) = 0 and D(1⊗y(s)) = 0; for commutative sources also
/// z_{r,s} = (1⊗x(r)) ⋆ (1⊗y(s)) with ψ(z_{r,s}) = x(r) ш y(s).
/// Families are indexed from r = 1.
pub fn verify_z_cycles(h: &HochschildComplex, xs: &[Chain], ys: &[Chain]) -> Result<ZCycleReport> {
    let a = h.source();
    let mut verdicts = Vec::new();
    verdicts.push(verdict(h, "z(0,0)".into(), &unit_head(a, &Chain::single(Vec::new())))?);
    for (r, x) in xs.iter().enumerate() {
        verdicts.push(verdict(h, format!("1⊗x({})", r + 1), &unit_head(a, x))?);
    }
    for (s, y) in ys.iter().enumerate() {
        verdicts.push(verdict(h, format!("1⊗y({})", s + 1), &unit_head(a, y))?);
    }
    let mut psi_ok = None;
    if a.is_graded_commutative() {
        let mut all = true;
        for (r, x) in xs.iter().enumerate() {
            for (s, y) in ys.iter().enumerate() {
                let z = shuffle(a, &unit_head(a, x), &unit_head(a, y))?;
                verdicts.push(verdict(h, format!("z({},{})", r + 1, s + 1), &z)?);
                all &= map_psi(a, &z) == bar::shuffle(a, x, y)?;
            }
        }
        psi_ok = Some(all);
    }
    Ok(ZCycleReport { verdicts, psi_matches_bar_product: psi_ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::convolve;
    use crate::presets;
    use crate::reduction::base_change;

    fn fp(e: &str, p: u64) -> DGAlgebra {
        base_change(&presets::parse_preset(e).unwrap(), RingTag::field(p).unwrap()).unwrap()
    }

    #[test]
    fn exterior_generator() {
        let a = fp("exterior(3)", 3);
        let t = free_loop_betti(&a, 10).unwrap();
        assert_eq!(t.dims, vec![1, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1]);
        let x = HChain::single((0, vec![1]));
        assert!(hochschild_differential(&a, &x).is_zero());
        assert!(hochschild_differential(&a, &HChain::single((1, vec![]))).is_zero());
    }

    #[test]
    fn invariants_and_leibniz() {
        let a = presets::parse_preset("tensor(truncated_poly(2,2),exterior(3))").unwrap();
        let h = HochschildComplex::new(&a, 8).unwrap();
        let r = h.check_invariants();
        assert!(r.all_passed(), "{r:?}");
        assert!(h.check_shuffle_leibniz(6).unwrap().passed);
        let m = HochschildComplex::new(&presets::moore(3, 2).unwrap(), 8).unwrap();
        assert!(m.check_invariants().all_passed());
    }

    #[test]
    fn kunneth() {
        let x = free_loop_betti(&fp("truncated_poly(2,2)", 3), 9).unwrap();
        let y = free_loop_betti(&fp("exterior(3)", 3), 9).unwrap();
        let xy = free_loop_betti(&fp("tensor(truncated_poly(2,2),exterior(3))", 3), 9).unwrap();
        assert_eq!(xy.dims, convolve(&x.dims, &y.dims)[..=9].to_vec());
    }

    #[test]
    fn psi_examples() {
        let a = presets::wedge_of_spheres(&[2, 3]).unwrap();
        let x = Chain::single(vec![1]);
        assert_eq!(map_psi(&a, &unit_head(&a, &x)), x);
        assert!(map_psi(&a, &HChain::single((1, vec![2]))).is_zero());
    }

    #[test]
    fn suspension_cycles_on_moore() {
        let a = fp("moore(3,2)", 3);
        let h = HochschildComplex::new(&a, 6).unwrap();
        let v = Chain::single(vec![2]);
        let r = verify_z_cycles(&h, std::slice::from_ref(&v), std::slice::from_ref(&v)).unwrap();
        assert!(r.all_cycles(), "{r:?}");
    }
}
