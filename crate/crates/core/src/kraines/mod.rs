//! Kraines sequences d aₖ = Σ_{j<k} aⱼ a_{k−j}: verification, extension by
//! exact solves, integral lifts and the restart from an obstruction.

pub mod cup_one;
pub mod families;
pub mod session;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::dga::{unit_products, BasisElement, DGAlgebra, Table};
use crate::error::{Error, Result};
use crate::lin::Vector;
use crate::linalg::{self, min_valuation, Solution, SparseMatrix};
use crate::ring::RingTag;

/// Degree of the k-th term (1-based) for a start in degree `d1`.
pub fn term_degree(d1: usize, k: usize) -> usize {
    k * (d1 - 1) + 1
}

/// Σ_{j=1}^{k−1} aⱼ a_{k−j}; missing terms count as zero.
pub fn products_sum(a: &DGAlgebra, terms: &[Vector], k: usize) -> Vector {
    let mut out = Vector::new();
    for j in 1..k {
        if let (Some(x), Some(y)) = (terms.get(j - 1), terms.get(k - j - 1)) {
            out.add(&a.mul(x, y), a.ring());
        }
    }
    out
}

fn start_degree(a: &DGAlgebra, terms: &[Vector]) -> Result<usize> {
    let first = terms.first().ok_or_else(|| Error::Precondition("empty Kraines sequence".into()))?;
    match a.degree_of(first) {
        Some(d) if d % 2 == 1 => Ok(d),
        Some(d) => Err(Error::Precondition(format!("a1 must have odd degree, got {d}"))),
        None => Err(Error::Precondition("a1 must be a nonzero homogeneous cochain".into())),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KrainesCheck {
    pub passed: bool,
    /// 1-based index of the first term violating d aₖ = Σ aⱼ a_{k−j}.
    pub first_failure: Option<usize>,
    pub checked: usize,
}

/// Exact verification of every term; degree mismatches are errors.
pub fn check_kraines(a: &DGAlgebra, terms: &[Vector]) -> Result<KrainesCheck> {
    let d1 = start_degree(a, terms)?;
    for (i, t) in terms.iter().enumerate() {
        match a.degree_of(t) {
            Some(d) if d != term_degree(d1, i + 1) => {
                return Err(Error::Precondition(format!(
                    "term {} has degree {d}, expected {}",
                    i + 1,
                    term_degree(d1, i + 1)
                )))
            }
            None if !t.is_zero() => return Err(Error::Precondition(format!("term {} is not homogeneous", i + 1))),
            _ => {}
        }
    }
    let first_failure = (1..=terms.len()).find(|&k| a.d(&terms[k - 1]) != products_sum(a, terms, k));
    Ok(KrainesCheck { passed: first_failure.is_none(), first_failure, checked: terms.len() })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Obstruction {
    /// Index N+1 of the term that cannot be solved for.
    pub index: usize,
    pub degree: usize,
    /// Deterministic representative Σ aᵢ a_{N+1−i} of the nonzero class.
    pub representative: Vector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Extension {
    Extended(Vector),
    Obstructed(Obstruction),
}

/// Solves d x = target in degree `deg − 1` over the algebra's ring.
fn solve_for(a: &DGAlgebra, deg: usize, target: &Vector) -> Result<Option<Vector>> {
    if deg == 0 || deg > a.top_degree() {
        return Ok(target.is_zero().then(Vector::new));
    }
    let m = a.differential_matrix(deg - 1);
    Ok(match linalg::solve(&m, &a.to_degree_coords(target))? {
        Solution::Solution(x) => Some(a.from_degree_coords(deg - 1, &x)),
        Solution::NoSolution(_) => None,
    })
}

/// Next term by the deterministic particular solution, or the obstruction.
/// A length-one sequence with cls(a₁)² ≠ 0 is a hard error.
pub fn extend_kraines(a: &DGAlgebra, terms: &[Vector]) -> Result<Extension> {
    if !a.ring().is_field() {
        return Err(Error::Ring("Kraines extension works over a prime field".into()));
    }
    let check = check_kraines(a, terms)?;
    if let Some(k) = check.first_failure {
        return Err(Error::Precondition(format!("not a Kraines sequence: fails at k = {k}")));
    }
    let d1 = start_degree(a, terms)?;
    let k = terms.len() + 1;
    let deg = term_degree(d1, k) + 1;
    let target = products_sum(a, terms, k);
    match solve_for(a, deg, &target)? {
        Some(x) => Ok(Extension::Extended(x)),
        None if k == 2 => Err(Error::Invariant(format!(
            "square of the odd class {} is not a coboundary",
            a.format(&terms[0])
        ))),
        None => Ok(Extension::Obstructed(Obstruction { index: k, degree: deg, representative: target })),
    }
}

/// Cocycle basis in degree `n` (empty beyond the top degree).
fn cocycles(a: &DGAlgebra, n: usize) -> Result<Vec<Vector>> {
    if n > a.top_degree() {
        return Ok(Vec::new());
    }
    let rki = linalg::rank_kernel_image(&a.differential_matrix(n))?;
    Ok(rki.kernel.iter().map(|z| a.from_degree_coords(n, z)).collect())
}

/// Like [`extend_kraines`], but on obstruction replaces a_N by a_N + z for up
/// to `bound` cocycles z (lexicographic F_p combinations of a cocycle basis).
/// Returns the possibly modified terms, the outcome and the number of cosets tried.
pub fn extend_with_coset_search(a: &DGAlgebra, terms: &[Vector], bound: usize) -> Result<(Vec<Vector>, Extension, usize)> {
    let first = extend_kraines(a, terms)?;
    if matches!(first, Extension::Extended(_)) || terms.len() < 2 {
        return Ok((terms.to_vec(), first, 0));
    }
    let p = a.ring().prime().expect("field");
    let d1 = start_degree(a, terms)?;
    let basis = cocycles(a, term_degree(d1, terms.len()))?;
    let mut tried = 0;
    let mut coeffs = vec![0u64; basis.len()];
    'outer: while tried < bound {
        // next nonzero coefficient vector in lexicographic order
        let mut i = 0;
        loop {
            if i == coeffs.len() {
                break 'outer;
            }
            coeffs[i] += 1;
            if coeffs[i] < p {
                break;
            }
            coeffs[i] = 0;
            i += 1;
        }
        tried += 1;
        let mut shifted = terms.to_vec();
        let last = shifted.last_mut().expect("nonempty");
        for (z, &c) in basis.iter().zip(&coeffs) {
            last.add_scaled(z, &BigInt::from(c), a.ring());
        }
        if let Extension::Extended(x) = extend_kraines(a, &shifted)? {
            return Ok((shifted, Extension::Extended(x), tried));
        }
    }
    Ok((terms.to_vec(), first, tried))
}

/// With every later term zero, all defining equations beyond N hold exactly.
pub fn is_infinite_by_pattern(a: &DGAlgebra, terms: &[Vector]) -> bool {
    let n = terms.len();
    (n + 1..=2 * n).all(|k| products_sum(a, terms, k).is_zero())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Extendable,
    Obstructed(Obstruction),
    InfiniteByPattern,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KrainesSequence {
    pub terms: Vec<Vector>,
    pub status: Status,
    pub cosets_tried: usize,
}

impl KrainesSequence {
    /// First `n` terms, padded with zeros when the sequence is infinite by pattern.
    pub fn padded(&self, n: usize) -> Result<Vec<Vector>> {
        if n <= self.terms.len() {
            return Ok(self.terms[..n].to_vec());
        }
        if self.status != Status::InfiniteByPattern {
            return Err(Error::Precondition(format!("sequence has only {} terms", self.terms.len())));
        }
        let mut t = self.terms.clone();
        t.resize(n, Vector::new());
        Ok(t)
    }
}

/// Extends from a₁ until `max_len` terms, an obstruction, or a provably infinite pattern.
pub fn grow(a: &DGAlgebra, a1: &Vector, max_len: usize, coset_bound: Option<usize>) -> Result<KrainesSequence> {
    let mut terms = vec![a1.clone()];
    check_kraines(a, &terms)?.passed.then_some(()).ok_or_else(|| Error::Precondition("a1 is not a cocycle".into()))?;
    let mut cosets_tried = 0;
    loop {
        if is_infinite_by_pattern(a, &terms) {
            return Ok(KrainesSequence { terms, status: Status::InfiniteByPattern, cosets_tried });
        }
        if terms.len() >= max_len {
            return Ok(KrainesSequence { terms, status: Status::Extendable, cosets_tried });
        }
        let (t, ext) = match coset_bound {
            Some(b) => {
                let (t, e, n) = extend_with_coset_search(a, &terms, b)?;
                cosets_tried += n;
                (t, e)
            }
            None => (terms.clone(), extend_kraines(a, &terms)?),
        };
        terms = t;
        match ext {
            Extension::Extended(x) => terms.push(x),
            Extension::Obstructed(o) => {
                return Ok(KrainesSequence { terms, status: Status::Obstructed(o), cosets_tried })
            }
        }
    }
}

/// Integral lift âₙ with defects ζ̂ₙ = d âₙ − Σ âᵢ â_{n−i} ∈ ker red_p.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegralLift {
    pub p: u64,
    pub lifts: Vec<Vector>,
    pub defects: Vec<Vector>,
    pub valuations: Vec<Option<u32>>,
}

impl IntegralLift {
    /// Minimal valuation over the nonzero defects.
    pub fn eps_min(&self) -> Option<u32> {
        self.valuations.iter().flatten().copied().min()
    }

    /// Re-verifies the defining identities against the integral algebra.
    pub fn verify(&self, integral: &DGAlgebra) -> bool {
        (1..=self.lifts.len()).all(|n| {
            let mut r = integral.d(&self.lifts[n - 1]);
            r.sub(&products_sum(integral, &self.lifts, n), RingTag::Integers);
            r == self.defects[n - 1] && r.iter().all(|(_, c)| c % self.p as i64 == BigInt::from(0))
        })
    }
}

pub fn integral_lift(integral: &DGAlgebra, p: u64, terms: &[Vector]) -> Result<IntegralLift> {
    if integral.ring() != RingTag::Integers {
        return Err(Error::Ring("integral lift needs an algebra over Z".into()));
    }
    let lifts: Vec<Vector> = terms.iter().map(|t| t.reduced(RingTag::Integers)).collect();
    let mut defects = Vec::new();
    let mut valuations = Vec::new();
    for n in 1..=lifts.len() {
        let mut z = integral.d(&lifts[n - 1]);
        z.sub(&products_sum(integral, &lifts, n), RingTag::Integers);
        let v = min_valuation(&z, p);
        if !z.is_zero() && v.is_none_or(|v| v == 0) {
            return Err(Error::Invariant(format!("defect of term {n} is not divisible by p")));
        }
        defects.push(z);
        valuations.push(v);
    }
    Ok(IntegralLift { p, lifts, defects, valuations })
}

/// Restart data: d â_{N+1} = p^ε (Σ âᵢ â_{N+1−i} + ζ̂_{N+1}) with ζ̂ ∈ p·Â.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Restart {
    pub index: usize,
    pub zeta: Vector,
    pub a_hat: Vector,
    pub eps: u32,
    /// red_p(â_{N+1}), the new starting cocycle.
    pub next: Vector,
}

impl Restart {
    pub fn verify(&self, integral: &DGAlgebra, lift: &IntegralLift) -> bool {
        let z = RingTag::Integers;
        let mut c = products_sum(integral, &lift.lifts, self.index);
        c.add(&self.zeta, z);
        let q = BigInt::from(lift.p).pow(self.eps);
        let fp = RingTag::PrimeField(lift.p);
        integral.d(&c).is_zero()
            && integral.d(&self.a_hat) == c.scaled(&q, z)
            && self.zeta.iter().all(|(_, x)| (x % lift.p as i64) == BigInt::from(0))
            && self.next == self.a_hat.reduced(fp)
            && integral.d(&self.next.reduced(z)).reduced(fp).is_zero()
    }
}

/// Solves the block system [d | −p^{ε+1}] (â, w) = p^ε Σ over Z for ε = 1..=cap.
pub fn restart_from_obstruction(integral: &DGAlgebra, lift: &IntegralLift, eps_cap: u32) -> Result<Restart> {
    let z = RingTag::Integers;
    let p = lift.p;
    let index = lift.lifts.len() + 1;
    let s = products_sum(integral, &lift.lifts, index);
    let deg = integral
        .degree_of(&s)
        .ok_or_else(|| Error::Precondition("obstruction vanishes integrally; nothing to restart".into()))?;
    let src = deg - 1;
    let (rows, cols) = (integral.in_degree(deg).len(), integral.in_degree(src).len());
    let d = integral.differential_matrix(src);
    let rhs0 = integral.to_degree_coords(&s);
    for eps in 1..=eps_cap {
        let pe = BigInt::from(p).pow(eps);
        let mut entries: Vec<(usize, usize, BigInt)> = d.entries().map(|(i, j, v)| (i, j, v.clone())).collect();
        entries.extend((0..rows).map(|i| (i, cols + i, -(&pe * p))));
        let m = SparseMatrix::from_entries(rows, cols + rows, z, entries)?;
        if let Solution::Solution(x) = linalg::solve(&m, &rhs0.scaled(&pe, z))? {
            let a_hat = integral.from_degree_coords(src, &Vector::from_terms(x.iter().filter(|(j, _)| **j < cols).map(|(j, c)| (*j, c.clone())), z));
            let w = Vector::from_terms(x.iter().filter(|(j, _)| **j >= cols).map(|(j, c)| (j - cols, c.clone())), z);
            let zeta = integral.from_degree_coords(deg, &w).scaled(&BigInt::from(p), z);
            let next = a_hat.reduced(RingTag::PrimeField(p));
            let r = Restart { index, zeta, a_hat, eps, next };
            if !r.verify(integral, lift) {
                return Err(Error::Invariant("restart solution failed verification".into()));
            }
            return Ok(r);
        }
    }
    Err(Error::Invariant(format!(
        "no p-power multiple (exponent <= {eps_cap}) of the integral obstruction is a coboundary: torsion claim violated"
    )))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestartRound {
    pub sequence: KrainesSequence,
    pub lift: Option<IntegralLift>,
    pub restart: Option<Restart>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestartSearch {
    pub rounds: Vec<RestartRound>,
    /// False when `max_rounds` restarts did not reach an unobstructed sequence.
    pub terminated: bool,
}

/// Grows, restarts on obstruction, and repeats until a sequence is infinite by
/// pattern or has `max_len` terms, for at most `max_rounds` rounds. Fails once
/// the start leaves the finite algebra.
pub fn find_infinite(
    integral: &DGAlgebra,
    p: u64,
    a1: &Vector,
    max_len: usize,
    coset_bound: Option<usize>,
    max_rounds: usize,
) -> Result<RestartSearch> {
    let fp = crate::reduction::base_change(integral, RingTag::field(p)?)?;
    let mut start = a1.reduced(fp.ring());
    let mut rounds = Vec::new();
    while rounds.len() < max_rounds {
        if start.is_zero() || fp.degree_of(&start).is_none_or(|d| d > fp.top_degree()) {
            return Err(Error::Invariant("restart left the finite algebra without an unobstructed start".into()));
        }
        let seq = grow(&fp, &start, max_len, coset_bound)?;
        let Status::Obstructed(_) = &seq.status else {
            rounds.push(RestartRound { sequence: seq, lift: None, restart: None });
            return Ok(RestartSearch { rounds, terminated: true });
        };
        let lift = integral_lift(integral, p, &seq.terms)?;
        let r = restart_from_obstruction(integral, &lift, 64)?;
        start = r.next.clone();
        rounds.push(RestartRound { sequence: seq, lift: Some(lift), restart: Some(r) });
    }
    Ok(RestartSearch { rounds, terminated: false })
}

/// Four-generator integral algebra with an obstructed Kraines sequence:
/// 1, x₃, t₅, q₆, z₇, y₈ with dt = q, dz = p·y, x² = q, xt = tx = y.
pub fn restart_example(p: u64) -> Result<DGAlgebra> {
    let z = RingTag::Integers;
    let names = [("1", 0), ("x", 3), ("t", 5), ("q", 6), ("z", 7), ("y", 8)];
    let basis = names.iter().map(|&(n, d)| BasisElement { name: n.into(), degree: d }).collect();
    let mut diff = vec![Vector::new(); 6];
    diff[2] = Vector::single(3);
    diff[4] = Vector::from_terms([(5, BigInt::from(p))], z);
    let mut product: Table = unit_products(6);
    product.insert((1, 1), Vector::single(3));
    product.insert((1, 2), Vector::single(5));
    product.insert((2, 1), Vector::single(5));
    DGAlgebra::new(z, basis, diff, product, Vector::single(0), Vector::from_terms([(0, BigInt::one())], z), None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::reduction::base_change;

    fn fp(a: &DGAlgebra, p: u64) -> DGAlgebra {
        base_change(a, RingTag::field(p).unwrap()).unwrap()
    }

    #[test]
    fn square_zero_start_is_infinite() {
        let a = fp(&presets::moore(3, 2).unwrap(), 3);
        let s = grow(&a, &Vector::single(2), 6, None).unwrap();
        assert_eq!(s.status, Status::InfiniteByPattern);
        assert_eq!(s.padded(4).unwrap().len(), 4);
        assert!(check_kraines(&a, &s.padded(4).unwrap()).unwrap().passed);
    }

    #[test]
    fn failures_are_located() {
        let a = fp(&presets::moore(3, 2).unwrap(), 5);
        let e = fp(&restart_example(5).unwrap(), 5);
        assert_eq!(check_kraines(&e, &[Vector::single(1), Vector::new()]).unwrap().first_failure, Some(2));
        assert!(check_kraines(&a, &[Vector::single(1)]).is_err());
        let t = fp(&presets::truncated_poly(2, 2).unwrap(), 3);
        assert!(extend_kraines(&t, &[Vector::single(1)]).is_err());
        let bad = check_kraines(&e, &[Vector::single(1), Vector::single(1)]);
        assert!(bad.is_err());
    }

    #[test]
    fn synthetic_restart() {
        let p = 3;
        let z = restart_example(p).unwrap();
        assert!(z.check_invariants().all_passed());
        let a = fp(&z, p);
        let s = grow(&a, &Vector::single(1), 5, None).unwrap();
        assert_eq!(s.terms, vec![Vector::single(1), Vector::single(2)]);
        let Status::Obstructed(o) = &s.status else { panic!("expected obstruction") };
        assert_eq!(o.index, 3);
        let lift = integral_lift(&z, p, &s.terms).unwrap();
        assert!(lift.verify(&z));
        let r = restart_from_obstruction(&z, &lift, 8).unwrap();
        assert_eq!(r.eps, 1);
        assert_eq!(a.degree_of(&r.next), Some(7));
        assert!(a.d(&r.next).is_zero());
        let search = find_infinite(&z, p, &Vector::single(1), 5, None, 4).unwrap();
        assert!(search.terminated);
        let rounds = search.rounds;
        assert_eq!(rounds.len(), 2);
        assert_eq!(rounds[1].sequence.status, Status::InfiniteByPattern);
    }

    #[test]
    fn coset_search_is_bounded() {
        let p = 3;
        let a = fp(&restart_example(p).unwrap(), p);
        let (_, e, tried) = extend_with_coset_search(&a, &[Vector::single(1), Vector::single(2)], 5).unwrap();
        assert!(matches!(e, Extension::Obstructed(_)));
        assert!(tried <= 5);
    }
}
