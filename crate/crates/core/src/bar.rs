//! Degree-truncated reduced bar construction.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::coalgebra::{DGCoalgebra, Tensor2};
use crate::complex::{BettiTable, CochainComplex, Direction};
use crate::dga::{BasisElement, DGAlgebra, InvariantCheck, InvariantReport};
use crate::error::{Error, Result};
use crate::lin::{sign, Lin, Vector};
use crate::linalg::{SparseMatrix, SubquotientBasis};
use crate::ring::RingTag;

/// Letters are basis indices of positive degree in the source algebra.
pub type Word = Vec<usize>;
pub type Chain = Lin<Word>;
pub type ChainPair = Lin<(Word, Word)>;

/// Suspended degree Σ(deg aᵢ − 1).
pub fn sdeg(a: &DGAlgebra, w: &[usize]) -> usize {
    w.iter().map(|&x| a.degree(x) - 1).sum()
}

/// Degree of a homogeneous chain.
pub fn chain_degree(a: &DGAlgebra, c: &Chain) -> Option<usize> {
    let mut it = c.keys().map(|w| sdeg(a, w));
    let d = it.next()?;
    it.all(|e| e == d).then_some(d)
}

/// Multilinear expansion of [v₁|…|v_k]; every vᵢ must lie in positive degree.
pub fn word_chain(a: &DGAlgebra, letters: &[Vector]) -> Result<Chain> {
    let ring = a.ring();
    let mut acc = Chain::single(Vec::new());
    for v in letters {
        if v.keys().any(|&k| a.degree(k) == 0) {
            return Err(Error::Precondition("bar letters must lie in positive degree".into()));
        }
        let mut next = Chain::new();
        for (w, c) in acc.iter() {
            for (&k, e) in v.iter() {
                let mut w2 = w.clone();
                w2.push(k);
                next.add_term(w2, &(c * e), ring);
            }
        }
        acc = next;
    }
    Ok(acc)
}

/// δ′[a₁|…|a_k] = −Σ (−1)^{εᵢ} [a₁|…|d aᵢ|…|a_k], εᵢ = Σ_{j<i} (deg aⱼ − 1).
pub fn d_prime(a: &DGAlgebra, c: &Chain) -> Chain {
    let ring = a.ring();
    let mut out = Chain::new();
    for (w, coef) in c.iter() {
        let mut eps = 0;
        for (i, &x) in w.iter().enumerate() {
            let s = -sign(eps as i64) * coef;
            for (&y, e) in a.d_basis(x).iter() {
                let mut w2 = w.clone();
                w2[i] = y;
                out.add_term(w2, &(&s * e), ring);
            }
            eps += a.degree(x) - 1;
        }
    }
    out
}

/// δ″[a₁|…|a_k] = Σ_{i≥2} (−1)^{εᵢ} [a₁|…|a_{i−1}aᵢ|…|a_k], εᵢ = Σ_{j<i} (deg aⱼ − 1).
pub fn d_second(a: &DGAlgebra, c: &Chain) -> Chain {
    let ring = a.ring();
    let mut out = Chain::new();
    for (w, coef) in c.iter() {
        let mut eps = 0;
        for i in 0..w.len() {
            if i >= 1 {
                if let Some(p) = a.mul_basis(w[i - 1], w[i]) {
                    let s = sign(eps as i64) * coef;
                    for (&y, e) in p.iter() {
                        let mut w2 = Vec::with_capacity(w.len() - 1);
                        w2.extend_from_slice(&w[..i - 1]);
                        w2.push(y);
                        w2.extend_from_slice(&w[i + 1..]);
                        out.add_term(w2, &(&s * e), ring);
                    }
                }
            }
            eps += a.degree(w[i]) - 1;
        }
    }
    out
}

/// δ = δ′ + δ″.
pub fn differential(a: &DGAlgebra, c: &Chain) -> Chain {
    let mut out = d_prime(a, c);
    out.add(&d_second(a, c), a.ring());
    out
}

/// Deconcatenation including the splits with the empty word.
pub fn coproduct(c: &Chain, ring: RingTag) -> ChainPair {
    let mut out = ChainPair::new();
    for (w, coef) in c.iter() {
        for i in 0..=w.len() {
            out.add_term((w[..i].to_vec(), w[i..].to_vec()), coef, ring);
        }
    }
    out
}

/// Deconcatenation into two nonempty words.
pub fn reduced_coproduct(c: &Chain, ring: RingTag) -> ChainPair {
    let mut out = ChainPair::new();
    for (w, coef) in c.iter() {
        for i in 1..w.len() {
            out.add_term((w[..i].to_vec(), w[i..].to_vec()), coef, ring);
        }
    }
    out
}

/// x ⊗ y for chains.
pub fn tensor(x: &Chain, y: &Chain, ring: RingTag) -> ChainPair {
    let mut out = ChainPair::new();
    for (u, c) in x.iter() {
        for (v, e) in y.iter() {
            out.add_term((u.clone(), v.clone()), &(c * e), ring);
        }
    }
    out
}

/// (f ⊗ 1 + (−1)^{|u|} 1 ⊗ g) applied to a sum of pairs.
pub fn apply_pair(a: &DGAlgebra, t: &ChainPair, f: impl Fn(&Chain) -> Chain, g: impl Fn(&Chain) -> Chain) -> ChainPair {
    let ring = a.ring();
    let mut out = ChainPair::new();
    for ((u, v), c) in t.iter() {
        for (u2, e) in f(&Chain::single(u.clone())).iter() {
            out.add_term((u2.clone(), v.clone()), &(c * e), ring);
        }
        let s = sign(sdeg(a, u) as i64);
        for (v2, e) in g(&Chain::single(v.clone())).iter() {
            out.add_term((u.clone(), v2.clone()), &(c * e * &s), ring);
        }
    }
    out
}

fn shuffle_words(a: &DGAlgebra, u: &[usize], v: &[usize], out: &mut Chain, prefix: &mut Word, coef: &BigInt) {
    if u.is_empty() || v.is_empty() {
        let mut w = prefix.clone();
        w.extend_from_slice(u);
        w.extend_from_slice(v);
        out.add_term(w, coef, a.ring());
        return;
    }
    prefix.push(u[0]);
    shuffle_words(a, &u[1..], v, out, prefix, coef);
    prefix.pop();
    // v₀ moves past every remaining letter of u
    let s = sign(((a.degree(v[0]) - 1) * sdeg(a, u)) as i64);
    prefix.push(v[0]);
    shuffle_words(a, u, &v[1..], out, prefix, &(coef * s));
    prefix.pop();
}

/// Signed shuffle product; the source must be strictly graded-commutative.
pub fn shuffle(a: &DGAlgebra, x: &Chain, y: &Chain) -> Result<Chain> {
    if !a.is_graded_commutative() {
        return Err(Error::Capability("shuffle product needs a graded-commutative source".into()));
    }
    Ok(shuffle_unchecked(a, x, y))
}

pub(crate) fn shuffle_unchecked(a: &DGAlgebra, x: &Chain, y: &Chain) -> Chain {
    let mut out = Chain::new();
    for (u, c) in x.iter() {
        for (v, e) in y.iter() {
            shuffle_words(a, u, v, &mut out, &mut Vec::new(), &(c * e));
        }
    }
    out
}

/// Letters of a connected algebra with A¹ = 0, grouped by suspended degree.
fn letters_by_sdeg(a: &DGAlgebra) -> Vec<Vec<usize>> {
    let mut by = vec![Vec::new(); a.top_degree().max(1)];
    for x in a.reduced_basis() {
        by[a.degree(x) - 1].push(x);
    }
    by
}

/// All words of suspended degree `0..=top`, each degree sorted by (length, letters).
pub fn words_through(a: &DGAlgebra, top: usize) -> Vec<Vec<Word>> {
    let by = letters_by_sdeg(a);
    let mut words: Vec<Vec<Word>> = vec![Vec::new(); top + 1];
    words[0].push(Vec::new());
    for n in 1..=top {
        let mut cur = Vec::new();
        for (s, ls) in by.iter().enumerate().filter(|(s, _)| *s >= 1 && *s <= n) {
            for prefix in &words[n - s] {
                for &l in ls {
                    let mut w = prefix.clone();
                    w.push(l);
                    cur.push(w);
                }
            }
        }
        cur.sort_by(|x: &Word, y: &Word| (x.len(), x).cmp(&(y.len(), y)));
        words[n] = cur;
    }
    words
}

/// Bar construction built through degree `window + 1`; cohomology is exact
/// in degrees `0..=window`.
#[derive(Debug)]
pub struct BarComplex {
    source: DGAlgebra,
    window: usize,
    words: Vec<Vec<Word>>,
    index: HashMap<Word, usize>,
    complex: OnceLock<CochainComplex>,
    homology: Vec<OnceLock<SubquotientBasis>>,
}

impl BarComplex {
    pub fn new(a: &DGAlgebra, window: usize) -> Result<Self> {
        a.check_bar_ready()?;
        let words = words_through(a, window + 1);
        let index = words.iter().flat_map(|ws| ws.iter().enumerate().map(|(i, w)| (w.clone(), i))).collect();
        Ok(BarComplex {
            source: a.clone(),
            window,
            homology: (0..=window).map(|_| OnceLock::new()).collect(),
            words,
            index,
            complex: OnceLock::new(),
        })
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

    pub fn top(&self) -> usize {
        self.window + 1
    }

    pub fn words(&self, n: usize) -> &[Word] {
        self.words.get(n).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn dims(&self) -> Vec<usize> {
        self.words.iter().map(Vec::len).collect()
    }

    pub fn degree_of(&self, c: &Chain) -> Option<usize> {
        chain_degree(&self.source, c)
    }

    /// Coordinates of a homogeneous chain of degree `n`.
    pub fn coords(&self, n: usize, c: &Chain) -> Result<Vector> {
        if n > self.top() {
            return Err(Error::Window { requested: n, limit: self.top() });
        }
        let mut v = Vector::new();
        for (w, e) in c.iter() {
            if sdeg(&self.source, w) != n {
                return Err(Error::Precondition(format!("chain is not homogeneous of degree {n}")));
            }
            v.add_term(self.index[w], e, self.ring());
        }
        Ok(v)
    }

    pub fn from_coords(&self, n: usize, v: &Vector) -> Chain {
        v.map_keys(|&i| self.words[n][i].clone(), self.ring())
    }

    /// δ: B^n → B^{n+1} in word coordinates, for n ≤ window.
    pub fn matrix(&self, n: usize) -> Result<SparseMatrix> {
        if n > self.window {
            return Err(Error::Window { requested: n, limit: self.window });
        }
        let src = &self.words[n];
        let rows = self.words[n + 1].len();
        let entries: Vec<(usize, usize, BigInt)> = src
            .par_iter()
            .enumerate()
            .flat_map_iter(|(j, w)| {
                let img = differential(&self.source, &Chain::single(w.clone()));
                img.into_iter().map(move |(w2, c)| (self.index[&w2], j, c)).collect::<Vec<_>>()
            })
            .collect();
        SparseMatrix::from_entries(rows, src.len(), self.ring(), entries)
    }

    pub fn complex(&self) -> Result<&CochainComplex> {
        if let Some(c) = self.complex.get() {
            return Ok(c);
        }
        let maps = (0..=self.top())
            .into_par_iter()
            .map(|n| if n <= self.window { self.matrix(n).map(Some) } else { Ok(None) })
            .collect::<Result<Vec<_>>>()?;
        let c = CochainComplex::new(self.ring(), Direction::Raising, self.dims(), maps, self.window)?;
        Ok(self.complex.get_or_init(|| c))
    }

    pub fn homology_at(&self, n: usize) -> Result<&SubquotientBasis> {
        let slot = self.homology.get(n).ok_or(Error::Window { requested: n, limit: self.window })?;
        if let Some(h) = slot.get() {
            return Ok(h);
        }
        let h = self.complex()?.homology_at(n)?;
        Ok(slot.get_or_init(|| h))
    }

    pub fn cohomology(&self, label: &str) -> Result<BettiTable> {
        let dims = (0..=self.window)
            .into_par_iter()
            .map(|n| self.homology_at(n).map(SubquotientBasis::dimension))
            .collect::<Result<Vec<_>>>()?;
        Ok(BettiTable { ring: self.ring(), truncation: self.top(), window: self.window, source: label.into(), dims })
    }

    pub fn is_cycle(&self, c: &Chain) -> bool {
        differential(&self.source, c).is_zero()
    }

    /// Exact rank test: is the cycle `c` a coboundary in the truncated complex?
    pub fn is_boundary(&self, c: &Chain) -> Result<bool> {
        if c.is_zero() {
            return Ok(true);
        }
        let n = self.degree_of(c).ok_or_else(|| Error::Precondition("chain is not homogeneous".into()))?;
        if !self.is_cycle(c) {
            return Err(Error::Precondition("chain is not a cycle".into()));
        }
        let h = self.homology_at(n)?;
        h.is_boundary(&self.coords(n, c)?)
    }

    pub fn class_nonzero(&self, c: &Chain) -> Result<bool> {
        Ok(!self.is_boundary(c)?)
    }

    /// δ² = 0, coassociativity and co-Leibniz on every built word.
    pub fn check_invariants(&self) -> InvariantReport {
        let a = &self.source;
        let ring = self.ring();
        let all: Vec<&Word> = self.words.iter().flatten().collect();
        let results: Vec<(bool, bool, bool)> = all
            .par_iter()
            .map(|w| {
                let c = Chain::single((*w).clone());
                let dc = differential(a, &c);
                let dd = differential(a, &dc).is_zero();
                let lhs = reduced_coproduct(&dc, ring);
                let rhs = apply_pair(a, &reduced_coproduct(&c, ring), |x| differential(a, x), |x| differential(a, x));
                let coder = lhs == rhs;
                let mut l: Lin<(Word, Word, Word)> = Lin::new();
                let mut r: Lin<(Word, Word, Word)> = Lin::new();
                for ((u, v), e) in coproduct(&c, ring).iter() {
                    for ((u1, u2), f) in coproduct(&Chain::single(u.clone()), ring).iter() {
                        l.add_term((u1.clone(), u2.clone(), v.clone()), &(e * f), ring);
                    }
                    for ((v1, v2), f) in coproduct(&Chain::single(v.clone()), ring).iter() {
                        r.add_term((u.clone(), v1.clone(), v2.clone()), &(e * f), ring);
                    }
                }
                (dd, coder, l == r)
            })
            .collect();
        let mut report = InvariantReport::default();
        let names = ["bar d^2 = 0", "bar coderivation", "bar coassociativity"];
        for (k, name) in names.iter().enumerate() {
            let mut c = InvariantCheck::new(name);
            for (w, r) in all.iter().zip(&results) {
                let ok = [r.0, r.1, r.2][k];
                c.record(ok, || format!("fails on {}", format_word(a, w)));
            }
            report.checks.push(c);
        }
        report
    }

    /// The truncated bar construction as a cochain-graded DG coalgebra
    /// (basis element 0 is the empty word).
    pub fn as_coalgebra(&self) -> DGCoalgebra {
        let a = &self.source;
        let ring = self.ring();
        let all: Vec<&Word> = self.words.iter().take(self.window + 1).flatten().collect();
        let gindex: HashMap<&Word, usize> = all.iter().enumerate().map(|(i, w)| (*w, i)).collect();
        let basis = all
            .iter()
            .map(|w| BasisElement { name: format_word(a, w), degree: sdeg(a, w) })
            .collect();
        let diff = all
            .iter()
            .map(|w| {
                let d = differential(a, &Chain::single((*w).clone()));
                Vector::from_terms(d.into_iter().filter_map(|(w2, c)| gindex.get(&w2).map(|&i| (i, c))), ring)
            })
            .collect();
        let coproduct = all
            .iter()
            .map(|w| {
                Tensor2::from_terms(
                    (0..=w.len()).map(|i| ((gindex[&w[..i].to_vec()], gindex[&w[i..].to_vec()]), BigInt::one())),
                    ring,
                )
            })
            .collect();
        DGCoalgebra {
            ring,
            direction: Direction::Raising,
            basis,
            diff,
            coproduct,
            counit: Vector::single(0),
            coaugmentation: 0,
            truncated_above: Some(self.window),
        }
    }
}

pub fn format_word(a: &DGAlgebra, w: &[usize]) -> String {
    format!("[{}]", w.iter().map(|&x| a.name(x)).collect::<Vec<_>>().join("|"))
}

pub fn format_chain(a: &DGAlgebra, c: &Chain) -> String {
    if c.is_zero() {
        return "0".into();
    }
    c.iter()
        .map(|(w, e)| if e.is_one() { format_word(a, w) } else { format!("{e}*{}", format_word(a, w)) })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Loop-space Betti numbers H^n(B̄A) for n ≤ N over a prime field.
pub fn loop_betti(a: &DGAlgebra, n: usize) -> Result<BettiTable> {
    if !a.ring().is_field() {
        return Err(Error::Ring("loop Betti numbers need a prime field".into()));
    }
    BarComplex::new(a, n)?.cohomology("loop")
}

#[derive(Clone, Debug, Serialize)]
pub struct LoopSuspension {
    pub degree: usize,
    pub chain: Chain,
    pub nonzero: bool,
    /// Δ̄ of the representative is zero, so the class is primitive.
    pub primitive: bool,
}

/// σ(cls a) = cls [a], decided by an exact rank test.
pub fn loop_suspension(bar: &BarComplex, rep: &Vector) -> Result<LoopSuspension> {
    let a = bar.source();
    if !a.d(rep).is_zero() {
        return Err(Error::Precondition("loop suspension needs a cocycle representative".into()));
    }
    let chain = word_chain(a, std::slice::from_ref(rep))?;
    let degree = a.degree_of(rep).map(|d| d - 1).unwrap_or(0);
    let nonzero = !chain.is_zero() && bar.class_nonzero(&chain)?;
    let primitive = reduced_coproduct(&chain, a.ring()).is_zero();
    Ok(LoopSuspension { degree, chain, nonzero, primitive })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::reduction::base_change;

    fn fp(a: DGAlgebra, p: u64) -> DGAlgebra {
        base_change(&a, RingTag::field(p).unwrap()).unwrap()
    }

    #[test]
    fn sphere_loop_betti() {
        let a = fp(presets::sphere(3).unwrap(), 5);
        let t = loop_betti(&a, 12).unwrap();
        let expect: Vec<usize> = (0..=12).map(|n| usize::from(n % 2 == 0)).collect();
        assert_eq!(t.dims, expect);
    }

    #[test]
    fn moore_word_counts_are_fibonacci() {
        let a = fp(presets::moore(3, 2).unwrap(), 3);
        let b = BarComplex::new(&a, 6).unwrap();
        assert_eq!(&b.dims()[..7], &[1, 1, 2, 3, 5, 8, 13]);
        assert_eq!(b.cohomology("loop").unwrap().dims, vec![1, 1, 2, 3, 5, 8, 13]);
    }

    #[test]
    fn two_letter_coproduct() {
        let a = presets::wedge_of_spheres(&[2, 3]).unwrap();
        let c = Chain::single(vec![1, 2]);
        let r = reduced_coproduct(&c, a.ring());
        assert_eq!(r, ChainPair::single((vec![1], vec![2])));
        assert!(reduced_coproduct(&Chain::single(vec![1]), a.ring()).is_zero());
    }

    #[test]
    fn invariants_on_presets() {
        for e in ["sphere(3)", "moore(3,2)", "truncated_poly(2,3)", "tensor(truncated_poly(2,2),sphere(3))"] {
            let a = presets::parse_preset(e).unwrap();
            let b = BarComplex::new(&a, 8).unwrap();
            let r = b.check_invariants();
            assert!(r.all_passed(), "{e}: {r:?}");
            assert!(b.as_coalgebra().check_invariants().all_passed());
        }
    }

    #[test]
    fn shuffle_is_a_derivation_target() {
        let a = presets::exterior(&[3]).unwrap();
        let x = Chain::single(vec![1]);
        let s = shuffle(&a, &x, &x).unwrap();
        assert_eq!(s, Chain::from_terms([(vec![1, 1], BigInt::from(2))], a.ring()));
        assert_eq!(shuffle(&a, &x, &Chain::single(Vec::new())).unwrap(), x);
        let nc = presets::truncated_poly(3, 3).unwrap();
        assert!(shuffle(&nc, &x, &x).is_err());
    }

    #[test]
    fn suspension_of_decomposable_vanishes() {
        let a = fp(presets::truncated_poly(2, 3).unwrap(), 3);
        let b = BarComplex::new(&a, 6).unwrap();
        let x = loop_suspension(&b, &Vector::single(1)).unwrap();
        assert!(x.nonzero && x.primitive);
        let x2 = loop_suspension(&b, &Vector::single(2)).unwrap();
        assert!(!x2.nonzero);
        let e = fp(presets::exterior(&[3]).unwrap(), 3);
        let be = BarComplex::new(&e, 4).unwrap();
        let s = loop_suspension(&be, &Vector::single(1)).unwrap();
        assert!(s.nonzero);
        assert_eq!(s.degree, 2);
    }

    #[test]
    fn rejects_degree_one() {
        let a = presets::sphere(1).unwrap();
        assert!(matches!(BarComplex::new(&a, 4), Err(Error::Precondition(_))));
    }
}
