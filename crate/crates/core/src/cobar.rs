//! Cobar construction on a connected DG coalgebra and the counit Ω̄B̄A → A.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::bar::{BarComplex, Word};
use crate::coalgebra::DGCoalgebra;
use crate::complex::{BettiTable, CochainComplex, Direction};
use crate::dga::{DGAlgebra, InvariantCheck};
use crate::error::{Error, Result};
use crate::lin::{sign, Lin, Vector};
use crate::linalg::{self, SparseMatrix};
use crate::ring::RingTag;

pub type CobarChain = Lin<Word>;

/// Word degree: Σ(deg cᵢ + 1) for cochain-graded sources (d raises degree),
/// Σ(deg cᵢ − 1) for chain-graded sources (d lowers degree).
fn weight(c: &DGCoalgebra, x: usize) -> usize {
    match c.direction {
        Direction::Raising => c.degree(x) + 1,
        Direction::Lowering => c.degree(x) - 1,
    }
}

pub fn word_degree(c: &DGCoalgebra, w: &[usize]) -> usize {
    w.iter().map(|&x| weight(c, x)).sum()
}

/// d′ = −Σ (−1)^{εᵢ} ⟨…|d cᵢ|…⟩ and d″ = Σ (−1)^{εᵢ + |c′|} ⟨…|c′|c″|…⟩,
/// with εᵢ the running sum of letter weights before position i.
pub fn cobar_differential(c: &DGCoalgebra, chain: &CobarChain) -> CobarChain {
    let ring = c.ring;
    let mut out = CobarChain::new();
    for (w, coef) in chain.iter() {
        let mut eps = 0usize;
        for (i, &x) in w.iter().enumerate() {
            let s = sign(eps as i64) * coef;
            for (&y, e) in c.diff[x].iter() {
                let mut w2 = w.clone();
                w2[i] = y;
                out.add_term(w2, &(-(&s * e)), ring);
            }
            for ((y1, y2), e) in c.reduced_delta_basis(x).into_iter() {
                let mut w2 = Vec::with_capacity(w.len() + 1);
                w2.extend_from_slice(&w[..i]);
                w2.push(y1);
                w2.push(y2);
                w2.extend_from_slice(&w[i + 1..]);
                out.add_term(w2, &(&s * e * sign(c.degree(y1) as i64)), ring);
            }
            eps += weight(c, x);
        }
    }
    out
}

#[derive(Debug)]
pub struct CobarComplex {
    source: DGCoalgebra,
    window: usize,
    words: Vec<Vec<Word>>,
    index: HashMap<Word, usize>,
    complex: OnceLock<CochainComplex>,
}

impl CobarComplex {
    /// Built through degree `window + 1`; homology is exact in `0..=window`.
    pub fn new(c: &DGCoalgebra, window: usize) -> Result<Self> {
        if c.counit != Vector::single(c.coaugmentation) {
            return Err(Error::Precondition("cobar needs the counit dual to the coaugmentation".into()));
        }
        match c.direction {
            Direction::Raising if !c.is_connected() => {
                return Err(Error::Precondition("cobar needs a connected coalgebra (C^0 = unit line)".into()))
            }
            Direction::Lowering if !c.is_one_reduced() => {
                return Err(Error::Precondition("cobar needs a 1-reduced coalgebra (C^0 = unit, C^1 = 0)".into()))
            }
            _ => {}
        }
        if let Some(t) = c.truncated_above {
            if window > t {
                return Err(Error::Window { requested: window, limit: t });
            }
        }
        let top = window + 1;
        let mut by_weight = vec![Vec::new(); top + 1];
        for x in c.letters() {
            let wt = weight(c, x);
            if wt <= top {
                by_weight[wt].push(x);
            }
        }
        let mut words: Vec<Vec<Word>> = vec![Vec::new(); top + 1];
        words[0].push(Vec::new());
        for n in 1..=top {
            let mut cur = Vec::new();
            for (s, ls) in by_weight.iter().enumerate().filter(|(s, _)| *s >= 1 && *s <= n) {
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
        let index = words.iter().flat_map(|ws| ws.iter().enumerate().map(|(i, w)| (w.clone(), i))).collect();
        Ok(CobarComplex { source: c.clone(), window, words, index, complex: OnceLock::new() })
    }

    pub fn source(&self) -> &DGCoalgebra {
        &self.source
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn words(&self, n: usize) -> &[Word] {
        self.words.get(n).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn dims(&self) -> Vec<usize> {
        self.words.iter().map(Vec::len).collect()
    }

    fn target(&self, n: usize) -> Option<usize> {
        match self.source.direction {
            Direction::Raising => (n <= self.window).then_some(n + 1),
            Direction::Lowering => n.checked_sub(1),
        }
    }

    /// Differential out of degree `n` in word coordinates.
    pub fn matrix(&self, n: usize) -> Result<Option<SparseMatrix>> {
        let Some(t) = self.target(n) else {
            return Ok(match self.source.direction {
                Direction::Lowering => Some(SparseMatrix::zero(0, self.words[n].len(), self.source.ring)),
                Direction::Raising => None,
            });
        };
        let src = &self.words[n];
        let entries: Vec<(usize, usize, BigInt)> = src
            .par_iter()
            .enumerate()
            .flat_map_iter(|(j, w)| {
                let img = cobar_differential(&self.source, &CobarChain::single(w.clone()));
                img.into_iter().map(move |(w2, c)| (self.index[&w2], j, c)).collect::<Vec<_>>()
            })
            .collect();
        SparseMatrix::from_entries(self.words[t].len(), src.len(), self.source.ring, entries).map(Some)
    }

    pub fn complex(&self) -> Result<&CochainComplex> {
        if let Some(c) = self.complex.get() {
            return Ok(c);
        }
        let maps = (0..self.words.len()).into_par_iter().map(|n| self.matrix(n)).collect::<Result<Vec<_>>>()?;
        let cx = CochainComplex::new(self.source.ring, self.source.direction, self.dims(), maps, self.window)?;
        Ok(self.complex.get_or_init(|| cx))
    }

    pub fn cohomology(&self, label: &str) -> Result<(BettiTable, Vec<linalg::SubquotientBasis>)> {
        self.complex()?.cohomology(self.window, label)
    }

    /// d² = 0 on every word whose image stays inside the built range.
    pub fn check_square_zero(&self) -> InvariantCheck {
        let c = &self.source;
        let mut check = InvariantCheck::new("cobar d^2 = 0");
        let limit = match c.direction {
            Direction::Raising => self.window,
            Direction::Lowering => self.window + 1,
        };
        let results: Vec<(Word, bool)> = self.words[..=limit]
            .par_iter()
            .flatten()
            .map(|w| {
                let dd = cobar_differential(c, &cobar_differential(c, &CobarChain::single(w.clone())));
                (w.clone(), dd.is_zero())
            })
            .collect();
        for (w, ok) in results {
            check.record(ok, || format!("d^2 != 0 on word {w:?}"));
        }
        check
    }
}

/// Counit Ω̄B̄A → A and its verification in the window.
#[derive(Clone, Debug, Serialize)]
pub struct AlphaReport {
    pub window: usize,
    pub chain_map: InvariantCheck,
    pub multiplicative: InvariantCheck,
    pub cobar_betti: Vec<usize>,
    pub algebra_betti: Vec<usize>,
    /// Rank of the induced map on cohomology per degree.
    pub induced_rank: Vec<usize>,
}

impl AlphaReport {
    pub fn is_quasi_isomorphism(&self) -> bool {
        self.chain_map.passed
            && self.multiplicative.passed
            && self.cobar_betti == self.algebra_betti
            && self.induced_rank == self.algebra_betti
    }
}

/// ⟨[a₁]|…|[a_k]⟩ ↦ a₁⋯a_k on words of single-letter bar words, 0 otherwise.
fn alpha_word(a: &DGAlgebra, bar_words: &[&Word], w: &[usize]) -> Vector {
    let ring = a.ring();
    let mut cur = a.unit().clone();
    for &x in w {
        match bar_words[x].as_slice() {
            [l] => cur = a.mul(&cur, &Vector::single(*l)),
            _ => return Vector::new(),
        }
    }
    cur.reduced(ring)
}

fn alpha_chain(a: &DGAlgebra, bar_words: &[&Word], c: &CobarChain) -> Vector {
    let mut out = Vector::new();
    for (w, e) in c.iter() {
        out.add_scaled(&alpha_word(a, bar_words, w), e, a.ring());
    }
    out
}

pub fn counit_alpha(a: &DGAlgebra, window: usize) -> Result<AlphaReport> {
    let p = match a.ring() {
        RingTag::PrimeField(p) => p,
        r => return Err(Error::Ring(format!("counit verification needs a prime field, got {r}"))),
    };
    let bar = BarComplex::new(a, window)?;
    let coal = bar.as_coalgebra();
    let bar_words: Vec<&Word> = (0..=window).flat_map(|n| bar.words(n)).collect();
    let cobar = CobarComplex::new(&coal, window)?;

    let mut chain_map = InvariantCheck::new("alpha is a chain map");
    let mut multiplicative = InvariantCheck::new("alpha is multiplicative");
    for n in 0..=window {
        for w in cobar.words(n) {
            let single = CobarChain::single(w.clone());
            let lhs = alpha_chain(a, &bar_words, &cobar_differential(&coal, &single));
            let rhs = a.d(&alpha_word(a, &bar_words, w));
            chain_map.record(lhs == rhs, || format!("alpha d != d alpha on {w:?}"));
        }
    }
    for n1 in 0..=window {
        for n2 in 0..=window - n1 {
            for u in cobar.words(n1) {
                for v in cobar.words(n2) {
                    let uv: Word = u.iter().chain(v).copied().collect();
                    let lhs = alpha_word(a, &bar_words, &uv);
                    let rhs = a.mul(&alpha_word(a, &bar_words, u), &alpha_word(a, &bar_words, v));
                    multiplicative.record(lhs == rhs, || format!("alpha not multiplicative on {u:?}, {v:?}"));
                }
            }
        }
    }

    let (table, bases) = cobar.cohomology("cobar")?;
    let acx = a.cochain_complex();
    let fp = RingTag::field(p)?;
    let mut algebra_betti = Vec::new();
    let mut induced_rank = Vec::new();
    for (n, basis) in bases.iter().enumerate() {
        if n > a.top_degree() {
            algebra_betti.push(0);
            induced_rank.push(0);
            continue;
        }
        let h = acx.homology_at(n)?;
        algebra_betti.push(h.dimension());
        let mut cols = Vec::new();
        for rep in &basis.representatives {
            let chain = rep.map_keys(|&i| cobar.words(n)[i].clone(), fp);
            let img = a.to_degree_coords(&alpha_chain(a, &bar_words, &chain));
            let coords = h.class_of(&img)?;
            cols.push(Vector::from_terms(coords.iter().enumerate().map(|(i, &c)| (i, BigInt::from(c))), fp));
        }
        let m = SparseMatrix::from_columns(h.dimension(), fp, &cols)?;
        induced_rank.push(linalg::rank(&m)?);
    }
    Ok(AlphaReport { window, chain_map, multiplicative, cobar_betti: table.dims, algebra_betti, induced_rank })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::reduction::base_change;

    fn f(p: u64) -> RingTag {
        RingTag::field(p).unwrap()
    }

    #[test]
    fn sphere_homology_cobar_is_tensor_algebra() {
        let c = DGCoalgebra::sphere_homology(4, f(3));
        let cx = CobarComplex::new(&c, 12).unwrap();
        let (t, _) = cx.cohomology("cobar").unwrap();
        let expect: Vec<usize> = (0..=12).map(|n| usize::from(n % 3 == 0)).collect();
        assert_eq!(t.dims, expect);
        assert!(cx.check_square_zero().passed);
    }

    #[test]
    fn counit_on_small_algebras() {
        for (e, p) in [("sphere(2)", 3), ("sphere(3)", 2), ("moore(3,2)", 3)] {
            let a = base_change(&presets::parse_preset(e).unwrap(), f(p)).unwrap();
            let r = counit_alpha(&a, 6).unwrap();
            assert!(r.is_quasi_isomorphism(), "{e}: {r:?}");
        }
    }

    #[test]
    fn dual_cobar_matches_bar() {
        let a = base_change(&presets::parse_preset("tensor(truncated_poly(2,2),sphere(3))").unwrap(), f(3)).unwrap();
        let bar = BarComplex::new(&a, 8).unwrap().cohomology("loop").unwrap();
        let c = DGCoalgebra::dual_of(&a).unwrap();
        let cx = CobarComplex::new(&c, 8).unwrap();
        assert!(cx.check_square_zero().passed);
        assert_eq!(cx.cohomology("cobar").unwrap().0.dims, bar.dims);
    }

    #[test]
    fn rejects_degree_one_chain_coalgebra() {
        let c = DGCoalgebra::sphere_homology(1, f(3));
        assert!(CobarComplex::new(&c, 4).is_err());
    }
}
