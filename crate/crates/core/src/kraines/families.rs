//! Bar-word families built from a Kraines sequence: the cocycles a(n) and the
//! mixed integral words ŷ(n) with their extracted p-power defects x̂(n).

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::cup_one::BSequence;
use super::{products_sum, term_degree, IntegralLift};
use crate::bar::{self, BarComplex, Chain, ChainPair};
use crate::dga::DGAlgebra;
use crate::error::{Error, Result};
use crate::lin::{sign, Lin, Vector};
use crate::linalg::{divide_exact, min_valuation};
use crate::reduction::base_change;
use crate::ring::RingTag;

/// Symbolic letter: `A(i)` stands for the i-th sequence term, `B(i)` for the
/// i-th term of the cup-one b-sequence (both 1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    A(usize),
    B(usize),
}

pub type SymChain = Lin<Vec<Letter>>;

/// All ordered compositions of `n` into positive parts.
pub fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ACandidate {
    /// Every composition of n appears once.
    Compositions,
    /// Literal iteration of the splitting map from [aₙ]; repeated words accumulate.
    IteratedSplit,
}

impl ACandidate {
    pub const ALL: [ACandidate; 2] = [ACandidate::Compositions, ACandidate::IteratedSplit];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum YVariant {
    /// Coefficient 1 on every mixed word.
    Plus,
    /// Sign (−1)^(letters before the b-letter).
    Minus,
}

impl YVariant {
    pub fn other(self) -> Self {
        match self {
            YVariant::Plus => YVariant::Minus,
            YVariant::Minus => YVariant::Plus,
        }
    }
}

pub fn a_symbolic(candidate: ACandidate, n: usize) -> SymChain {
    let z = RingTag::Integers;
    match candidate {
        ACandidate::Compositions => {
            SymChain::from_terms(compositions(n).into_iter().map(|c| (c.into_iter().map(Letter::A).collect(), BigInt::one())), z)
        }
        ACandidate::IteratedSplit => {
            let mut level = SymChain::single(vec![Letter::A(n)]);
            let mut total = level.clone();
            for _ in 1..n {
                let mut next = SymChain::new();
                for (w, c) in level.iter() {
                    for (k, l) in w.iter().enumerate() {
                        let Letter::A(i) = *l else { continue };
                        for j in 1..i {
                            let mut w2 = w[..k].to_vec();
                            w2.extend([Letter::A(j), Letter::A(i - j)]);
                            w2.extend_from_slice(&w[k + 1..]);
                            next.add_term(w2, c, z);
                        }
                    }
                }
                total.add(&next, z);
                level = next;
            }
            total
        }
    }
}

/// Σ over compositions of n and positions of the single b-letter.
pub fn y_symbolic(variant: YVariant, n: usize) -> SymChain {
    let mut out = SymChain::new();
    for c in compositions(n) {
        for k in 0..c.len() {
            let w = c.iter().enumerate().map(|(i, &x)| if i == k { Letter::B(x) } else { Letter::A(x) }).collect();
            let coef = match variant {
                YVariant::Plus => BigInt::one(),
                YVariant::Minus => sign(k as i64),
            };
            out.add_term(w, &coef, RingTag::Integers);
        }
    }
    out
}

/// Multilinear expansion of a symbolic chain under a letter valuation.
pub fn expand(a: &DGAlgebra, s: &SymChain, value: impl Fn(Letter) -> Vector) -> Result<Chain> {
    let mut out = Chain::new();
    for (w, c) in s.iter() {
        let letters: Vec<Vector> = w.iter().map(|&l| value(l)).collect();
        out.add_scaled(&bar::word_chain(a, &letters)?, c, a.ring());
    }
    Ok(out)
}

/// δ′ with each letter's differential replaced by `dval`: −Σ (−1)^{εₖ}[..dval(lₖ)..],
/// εₖ the suspended degree of the letters before position k.
pub fn sym_d_prime(
    a: &DGAlgebra,
    s: &SymChain,
    value: impl Fn(Letter) -> Vector,
    dval: impl Fn(Letter) -> Vector,
    degree: impl Fn(Letter) -> usize,
) -> Result<Chain> {
    let mut out = Chain::new();
    for (w, c) in s.iter() {
        let letters: Vec<Vector> = w.iter().map(|&l| value(l)).collect();
        let mut eps = 0;
        for (k, &l) in w.iter().enumerate() {
            let mut ls = letters.clone();
            ls[k] = dval(l);
            out.add_scaled(&bar::word_chain(a, &ls)?, &(-sign(eps as i64) * c), a.ring());
            eps += degree(l) - 1;
        }
    }
    Ok(out)
}

fn class_nonzero(bar: &BarComplex, c: &Chain) -> Result<bool> {
    if c.is_zero() {
        return Ok(false);
    }
    bar.class_nonzero(c)
}

fn coproduct_target(ring: RingTag, left: &[Chain], right: &[Chain], n: usize) -> ChainPair {
    let mut t = ChainPair::new();
    for n1 in 1..n {
        t.add(&bar::tensor(&left[n1 - 1], &right[n - n1 - 1], ring), ring);
    }
    t
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AFamily {
    pub candidate: ACandidate,
    pub members: Vec<Chain>,
    pub degrees: Vec<usize>,
    pub cocycle: Vec<bool>,
    pub coproduct: Vec<bool>,
    /// Rank-test verdicts; `None` when not evaluated.
    pub nonzero: Vec<Option<bool>>,
}

impl AFamily {
    pub fn identities_hold(&self) -> bool {
        self.cocycle.iter().chain(&self.coproduct).all(|&b| b)
    }

    pub fn all_nonzero(&self) -> bool {
        self.nonzero.iter().all(|v| *v == Some(true))
    }
}

/// Builds a(1..=n_max) over the field algebra `a`; `terms` must have at least
/// n_max entries (pad an infinite-by-pattern sequence with zeros).
pub fn build_a_family(a: &DGAlgebra, terms: &[Vector], candidate: ACandidate, n_max: usize, bar: Option<&BarComplex>) -> Result<AFamily> {
    if terms.len() < n_max {
        return Err(Error::Precondition(format!("need {n_max} sequence terms, have {}", terms.len())));
    }
    let d1 = a.degree_of(&terms[0]).ok_or_else(|| Error::Precondition("a1 vanishes".into()))?;
    let ring = a.ring();
    let value = |l: Letter| match l {
        Letter::A(i) => terms[i - 1].clone(),
        Letter::B(_) => unreachable!("a-family has no b-letters"),
    };
    let members: Vec<Chain> = (1..=n_max).map(|n| expand(a, &a_symbolic(candidate, n), value)).collect::<Result<_>>()?;
    let degrees = (1..=n_max).map(|n| n * (d1 - 1)).collect();
    let cocycle = members.iter().map(|m| bar::differential(a, m).is_zero()).collect();
    let coproduct =
        (1..=n_max).map(|n| bar::reduced_coproduct(&members[n - 1], ring) == coproduct_target(ring, &members, &members, n)).collect();
    let nonzero = match bar {
        Some(b) => members.iter().map(|m| class_nonzero(b, m).map(Some)).collect::<Result<_>>()?,
        None => vec![None; n_max],
    };
    Ok(AFamily { candidate, members, degrees, cocycle, coproduct, nonzero })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateVerdict<T> {
    pub candidate: T,
    pub cocycle: bool,
    pub coproduct: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ASelection {
    pub family: AFamily,
    pub verdicts: Vec<CandidateVerdict<ACandidate>>,
    pub ambiguous: bool,
}

/// Tries every splitting interpretation and keeps the one satisfying both the
/// cocycle and coproduct identities; the first wins if several do.
pub fn select_a_family(a: &DGAlgebra, terms: &[Vector], n_max: usize) -> Result<ASelection> {
    let d1 = a.degree_of(&terms[0]).ok_or_else(|| Error::Precondition("a1 vanishes".into()))?;
    let bar = BarComplex::new(a, n_max * (d1 - 1))?;
    let mut verdicts = Vec::new();
    let mut passing = Vec::new();
    for c in ACandidate::ALL {
        let f = build_a_family(a, terms, c, n_max, None)?;
        let v = CandidateVerdict { candidate: c, cocycle: f.cocycle.iter().all(|&b| b), coproduct: f.coproduct.iter().all(|&b| b) };
        if v.cocycle && v.coproduct {
            passing.push(c);
        }
        verdicts.push(v);
    }
    let Some(&chosen) = passing.first() else {
        return Err(Error::Invariant(format!("no splitting interpretation yields cocycles with the coproduct identity: {verdicts:?}")));
    };
    let family = build_a_family(a, terms, chosen, n_max, Some(&bar))?;
    Ok(ASelection { family, verdicts, ambiguous: passing.len() > 1 })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct YMember {
    pub n: usize,
    pub y_hat: Chain,
    /// δ̂₀ ŷ(n) = 0, i.e. the sequence-level differential kills ŷ(n).
    pub reduced_cocycle: bool,
    pub delta: Chain,
    pub eps: Option<u32>,
    pub x_hat: Chain,
    pub coproduct: bool,
    pub y_degree: usize,
    pub x_degree: usize,
    /// Degrees agree with the closed formulas in terms of deg a = 2m+1 and deg b.
    pub degree_formula: bool,
    pub y_nonzero: Option<bool>,
    pub x_nonzero: Option<bool>,
}

impl YMember {
    pub fn identities_hold(&self) -> bool {
        self.reduced_cocycle && self.coproduct && self.eps.is_some_and(|e| e >= 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct YFamily {
    pub p: u64,
    pub requested: YVariant,
    pub used: YVariant,
    pub verdicts: Vec<CandidateVerdict<YVariant>>,
    pub members: Vec<YMember>,
}

impl YFamily {
    pub fn all_pass(&self) -> bool {
        self.members.iter().all(|m| m.identities_hold() && m.degree_formula && m.y_nonzero == Some(true) && m.x_nonzero == Some(true))
    }
}

/// Closed-form degrees (χₙ, ψₙ) of y(n), x(n) for deg a = 2m+1.
pub fn closed_form_degrees(deg_a: usize, deg_b: usize, n: usize) -> (usize, usize) {
    let m = (deg_a - 1) / 2;
    let chi = if deg_b.is_multiple_of(2) { 2 * ((n - 1) * m + deg_b / 2) - 1 } else { 2 * ((n - 1) * m + (deg_b - 1) / 2) };
    (chi, chi + 1)
}

struct YContext<'a> {
    integral: &'a DGAlgebra,
    lift: &'a IntegralLift,
    b: &'a BSequence,
    d1: usize,
    deg_b: usize,
}

impl YContext<'_> {
    fn value(&self, l: Letter) -> Vector {
        let get = |v: &[Vector], i: usize| v.get(i - 1).cloned().unwrap_or_default();
        match l {
            Letter::A(i) => get(&self.lift.lifts, i),
            Letter::B(i) => get(&self.b.terms, i),
        }
    }

    fn degree(&self, l: Letter) -> usize {
        match l {
            Letter::A(i) => term_degree(self.d1, i),
            Letter::B(i) => self.deg_b + (i - 1) * (self.d1 - 1),
        }
    }

    /// Differential of a letter as predicted by the sequence relations alone.
    fn d0(&self, l: Letter) -> Vector {
        let z = RingTag::Integers;
        match l {
            Letter::A(n) => products_sum(self.integral, &self.lift.lifts, n),
            Letter::B(n) => {
                let s = if self.deg_b.is_multiple_of(2) { -BigInt::one() } else { BigInt::one() };
                let mut out = Vector::new();
                for i in 1..n {
                    out.add(&self.integral.mul(&self.value(Letter::A(i)), &self.value(Letter::B(n - i))), z);
                    out.add_scaled(&self.integral.mul(&self.value(Letter::B(i)), &self.value(Letter::A(n - i))), &s, z);
                }
                out
            }
        }
    }
}

fn y_members_for(cx: &YContext, variant: YVariant, n_max: usize, a_hat: &[Chain]) -> Result<Vec<YMember>> {
    let a = cx.integral;
    let z = RingTag::Integers;
    let p = cx.lift.p;
    let mut ys = Vec::new();
    let mut out = Vec::new();
    for n in 1..=n_max {
        let sym = y_symbolic(variant, n);
        let y_hat = expand(a, &sym, |l| cx.value(l))?;
        let mut red = sym_d_prime(a, &sym, |l| cx.value(l), |l| cx.d0(l), |l| cx.degree(l))?;
        red.add(&bar::d_second(a, &y_hat), z);
        let delta = bar::differential(a, &y_hat);
        let eps = min_valuation_chain(&delta, p);
        let x_hat = match eps {
            Some(e) => divide_chain(&delta, &BigInt::from(p).pow(e)),
            None => Chain::new(),
        };
        ys.push(y_hat.clone());
        let mut target = coproduct_target(z, &ys, a_hat, n);
        target.add(&coproduct_target(z, a_hat, &ys, n), z);
        let coproduct = bar::reduced_coproduct(&y_hat, z) == target;
        let y_degree = (n - 1) * (cx.d1 - 1) + cx.deg_b - 1;
        let degree_formula = bar::chain_degree(a, &y_hat).is_none_or(|d| d == y_degree)
            && bar::chain_degree(a, &x_hat).is_none_or(|d| d == y_degree + 1)
            && (cx.d1.is_multiple_of(2) || closed_form_degrees(cx.d1, cx.deg_b, n) == (y_degree, y_degree + 1));
        out.push(YMember {
            n,
            y_hat,
            reduced_cocycle: red.is_zero(),
            delta,
            eps,
            x_hat,
            coproduct,
            y_degree,
            x_degree: y_degree + 1,
            degree_formula,
            y_nonzero: None,
            x_nonzero: None,
        });
    }
    Ok(out)
}

fn min_valuation_chain(c: &Chain, p: u64) -> Option<u32> {
    let v = Vector::from_terms(c.iter().enumerate().map(|(i, (_, x))| (i, x.clone())), RingTag::Integers);
    min_valuation(&v, p)
}

fn divide_chain(c: &Chain, q: &BigInt) -> Chain {
    let keys: Vec<_> = c.keys().cloned().collect();
    let v = Vector::from_terms(c.iter().enumerate().map(|(i, (_, x))| (i, x.clone())), RingTag::Integers);
    let d = divide_exact(&v, q).expect("valuation divides every coefficient");
    Chain::from_terms(d.iter().map(|(&i, x)| (keys[i].clone(), x.clone())), RingTag::Integers)
}

/// Builds ŷ(1..=n_max) over Z. Both sign variants are evaluated; the requested
/// one is used unless it fails the identities while the other passes.
pub fn build_y_family(integral: &DGAlgebra, lift: &IntegralLift, b: &BSequence, n_max: usize, requested: YVariant) -> Result<YFamily> {
    let p = lift.p;
    let d1 = integral
        .degree_of(&lift.lifts[0])
        .ok_or_else(|| Error::Precondition("a1 lift vanishes".into()))?;
    let deg_b = integral.degree_of(&b.terms[0]).ok_or_else(|| Error::Precondition("b1 vanishes".into()))?;
    let cx = YContext { integral, lift, b, d1, deg_b };
    let a_hat: Vec<Chain> = (1..=n_max)
        .map(|n| expand(integral, &a_symbolic(ACandidate::Compositions, n), |l| cx.value(l)))
        .collect::<Result<_>>()?;
    let mut verdicts = Vec::new();
    let mut built = Vec::new();
    for v in [requested, requested.other()] {
        let ms = y_members_for(&cx, v, n_max, &a_hat)?;
        verdicts.push(CandidateVerdict {
            candidate: v,
            cocycle: ms.iter().all(|m| m.reduced_cocycle && m.eps.is_some_and(|e| e >= 1)),
            coproduct: ms.iter().all(|m| m.coproduct),
        });
        built.push(ms);
    }
    let ok = |i: usize| verdicts[i].cocycle && verdicts[i].coproduct;
    let pick = if ok(0) || !ok(1) { 0 } else { 1 };
    let mut members = built.swap_remove(pick);

    let fp = base_change(integral, RingTag::field(p)?)?;
    let window = members.last().map_or(0, |m| m.x_degree);
    let bar = BarComplex::new(&fp, window)?;
    for m in &mut members {
        let y = m.y_hat.reduced(fp.ring());
        m.y_nonzero = Some(bar.is_cycle(&y) && class_nonzero(&bar, &y)?);
        let x = m.x_hat.reduced(fp.ring());
        m.x_nonzero = Some(bar.is_cycle(&x) && class_nonzero(&bar, &x)?);
    }
    Ok(YFamily { p, requested, used: verdicts[pick].candidate, verdicts, members })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kraines::cup_one::cup_one_b_sequence;
    use crate::kraines::{grow, integral_lift, Status};
    use crate::presets;

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(4).len(), 8);
        assert_eq!(compositions(1), vec![vec![1]]);
    }

    #[test]
    fn iterated_split_multiplicities() {
        let s = a_symbolic(ACandidate::IteratedSplit, 3);
        assert_eq!(s.get(&vec![Letter::A(1); 3]), BigInt::from(2));
        assert_eq!(y_symbolic(YVariant::Plus, 2).len(), 3);
    }

    fn moore_setup(p: u64, n: usize) -> (DGAlgebra, DGAlgebra, Vec<Vector>) {
        let z = presets::moore(p, 2).unwrap();
        let fp = base_change(&z, RingTag::field(p).unwrap()).unwrap();
        let s = grow(&fp, &Vector::single(2), n, None).unwrap();
        assert_eq!(s.status, Status::InfiniteByPattern);
        (z, fp, s.padded(n).unwrap())
    }

    #[test]
    fn moore_a_family() {
        for p in [2, 3, 5] {
            let (_, fp, terms) = moore_setup(p, 5);
            let sel = select_a_family(&fp, &terms, 5).unwrap();
            assert_eq!(sel.family.candidate, ACandidate::Compositions);
            assert!(!sel.ambiguous, "p = {p}");
            assert!(sel.family.identities_hold() && sel.family.all_nonzero());
            assert_eq!(sel.family.members[2], Chain::single(vec![2, 2, 2]));
        }
    }

    #[test]
    fn moore_y_family() {
        for p in [2u64, 3, 5] {
            let (z, _, terms) = moore_setup(p, 5);
            let lift = integral_lift(&z, p, &terms).unwrap();
            let b = cup_one_b_sequence(&z, &lift, &Vector::single(1), &Vector::single(2), 1, 5).unwrap();
            let y = build_y_family(&z, &lift, &b, 5, YVariant::Plus).unwrap();
            assert_eq!(y.used, YVariant::Plus);
            assert!(y.all_pass(), "p = {p}: {:?}", y.members.iter().map(|m| (m.n, m.eps, m.y_nonzero, m.x_nonzero)).collect::<Vec<_>>());
            for m in &y.members {
                let v = (1..).take_while(|k| (m.n as u64).is_multiple_of(p.pow(*k))).count() as u32;
                assert_eq!(m.eps, Some(v + 1));
            }
            assert_eq!(y.members[0].delta, Chain::from_terms([(vec![2], -BigInt::from(p))], RingTag::Integers));
            let minus = build_y_family(&z, &lift, &b, 5, YVariant::Minus).unwrap();
            assert_eq!(minus.used, YVariant::Plus);
            assert!(!minus.verdicts[0].coproduct);
        }
    }
}
