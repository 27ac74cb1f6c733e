//! Exact sparse linear algebra over F_p, Z/p^e and Z.

pub mod fp;
pub mod matrix;
pub mod snf;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lin::Vector;
use crate::ring::RingTag;
use fp::{Echelon, FpVec, Inserted};

pub use matrix::SparseMatrix;
pub use snf::{smith_normal_form, SmithForm};

fn field_prime(ring: RingTag) -> Result<u64> {
    match ring {
        RingTag::PrimeField(p) => Ok(p),
        other => Err(Error::Ring(format!("{other} is not a field"))),
    }
}

fn fp_columns(m: &SparseMatrix, p: u64) -> Vec<FpVec> {
    (0..m.cols()).map(|j| fp::to_fp(&m.column_vector(j), p)).collect()
}

#[derive(Clone, Debug)]
pub struct RankKernelImage {
    pub rank: usize,
    pub kernel: Vec<Vector>,
    pub image: Vec<Vector>,
}

/// Column echelon reduction over F_p; pivot = lowest row index.
pub fn rank_kernel_image(m: &SparseMatrix) -> Result<RankKernelImage> {
    let p = field_prime(m.ring())?;
    let mut ech = Echelon::new(p);
    let mut kernel = Vec::new();
    for (j, col) in fp_columns(m, p).into_iter().enumerate() {
        if let Inserted::Dependent(rel) = ech.insert(&col, vec![(j, 1)]) {
            kernel.push(fp::from_fp(&rel));
        }
    }
    let image = ech.vectors().iter().map(|v| fp::from_fp(v)).collect();
    Ok(RankKernelImage { rank: ech.len(), kernel, image })
}

pub fn rank(m: &SparseMatrix) -> Result<usize> {
    let p = field_prime(m.ring())?;
    let mut ech = Echelon::new(p);
    for col in fp_columns(m, p) {
        ech.insert(&col, Vec::new());
    }
    Ok(ech.len())
}

/// Witness that `m x = b` has no solution: `y m = 0` and `y b != 0`, all modulo
/// `modulus` (zero meaning exact integers). Over `Z/p^e` the functional also
/// kills `p^e`, so it is well defined on the ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub functional: Vector,
    pub modulus: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Solution(Vector),
    NoSolution(Certificate),
}

impl Solution {
    pub fn ok(self) -> Option<Vector> {
        match self {
            Solution::Solution(x) => Some(x),
            Solution::NoSolution(_) => None,
        }
    }
}

fn modp(x: &BigInt, m: &BigInt) -> BigInt {
    if m.is_zero() {
        x.clone()
    } else {
        x.mod_floor(m)
    }
}

impl Certificate {
    pub fn verify(&self, m: &SparseMatrix, b: &Vector) -> bool {
        let yb: BigInt = self.functional.iter().map(|(i, c)| c * b.get(i)).sum();
        if modp(&yb, &self.modulus).is_zero() {
            return false;
        }
        let cols_ok = (0..m.cols()).all(|j| {
            let s: BigInt = m.column(j).iter().map(|(i, v)| v * self.functional.get(i)).sum();
            modp(&s, &self.modulus).is_zero()
        });
        let ring_ok = match m.ring().modulus() {
            None => true,
            Some(q) => self.functional.iter().all(|(_, c)| modp(&(c * &q), &self.modulus).is_zero()),
        };
        cols_ok && ring_ok
    }
}

fn check_dims(m: &SparseMatrix, b: &Vector) -> Result<()> {
    if let Some(&i) = b.keys().next_back() {
        if i >= m.rows() {
            return Err(Error::Dimension(format!("right-hand side index {i} >= {} rows", m.rows())));
        }
    }
    Ok(())
}

/// Particular solution of `m x = b`, or a cokernel certificate.
pub fn solve(m: &SparseMatrix, b: &Vector) -> Result<Solution> {
    check_dims(m, b)?;
    match m.ring() {
        RingTag::PrimeField(p) => solve_fp(m, b, p),
        RingTag::Integers => solve_z(m, b),
        RingTag::CyclicRing(..) => solve_cyclic(m, b),
    }
}

fn solve_fp(m: &SparseMatrix, b: &Vector, p: u64) -> Result<Solution> {
    let mut ech = Echelon::new(p);
    for (j, col) in fp_columns(m, p).into_iter().enumerate() {
        ech.insert(&col, vec![(j, 1)]);
    }
    let (res, t) = ech.reduce(&fp::to_fp(b, p));
    if res.is_empty() {
        return Ok(Solution::Solution(fp::from_fp(&t)));
    }
    // left kernel vector pairing nonzero with b
    let bt = fp::to_fp(b, p);
    let lk = rank_kernel_image(&m.transpose())?;
    for y in lk.kernel {
        let yv = fp::to_fp(&y, p);
        if fp::dot(p, &yv, &bt) != 0 {
            return Ok(Solution::NoSolution(Certificate { functional: y, modulus: BigInt::from(p) }));
        }
    }
    Err(Error::Invariant("inconsistent system without cokernel witness".into()))
}

fn solve_z(m: &SparseMatrix, b: &Vector) -> Result<Solution> {
    let s = smith_normal_form(m)?;
    solve_with_smith(&s, m.cols(), b)
}

fn solve_with_smith(s: &SmithForm, ncols: usize, b: &Vector) -> Result<Solution> {
    let lb = s.left.mul_vec(b)?;
    let left_row = |i: usize| -> Vector {
        let t = s.left.transpose();
        t.column_vector(i)
    };
    let mut y = Vector::new();
    for (&i, v) in lb.iter() {
        let d = s.diag.get(i).cloned().unwrap_or_default();
        if d.is_zero() {
            return Ok(Solution::NoSolution(Certificate { functional: left_row(i), modulus: BigInt::zero() }));
        }
        let (q, r) = v.div_mod_floor(&d);
        if !r.is_zero() {
            return Ok(Solution::NoSolution(Certificate { functional: left_row(i), modulus: d }));
        }
        if i < ncols {
            y.add_term(i, &q, RingTag::Integers);
        }
    }
    Ok(Solution::Solution(s.right.mul_vec(&y)?))
}

fn solve_cyclic(m: &SparseMatrix, b: &Vector) -> Result<Solution> {
    let ring = m.ring();
    let q = ring.modulus().expect("cyclic ring");
    let (rows, cols) = (m.rows(), m.cols());
    let mut entries: Vec<(usize, usize, BigInt)> = m.entries().map(|(i, j, v)| (i, j, v.clone())).collect();
    for i in 0..rows {
        entries.push((i, cols + i, q.clone()));
    }
    let aug = SparseMatrix::from_entries(rows, cols + rows, RingTag::Integers, entries)?;
    let s = smith_normal_form(&aug)?;
    match solve_with_smith(&s, cols + rows, b)? {
        Solution::Solution(x) => {
            let x = Vector::from_terms(x.into_iter().filter(|(j, _)| *j < cols), ring);
            Ok(Solution::Solution(x))
        }
        Solution::NoSolution(c) => Ok(Solution::NoSolution(c)),
    }
}

/// Cycles, boundaries and coset representatives of `ker d_out / im d_in` over F_p.
#[derive(Clone, Debug)]
pub struct SubquotientBasis {
    pub ambient: usize,
    pub cycles: Vec<Vector>,
    pub boundaries: Vec<Vector>,
    pub representatives: Vec<Vector>,
    p: u64,
    classes: Echelon,
    cycle_span: Echelon,
}

impl SubquotientBasis {
    pub fn dimension(&self) -> usize {
        self.representatives.len()
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// Coordinates of a cycle in the representative basis modulo boundaries.
    pub fn class_of(&self, z: &Vector) -> Result<Vec<u64>> {
        let zv = fp::to_fp(z, self.p);
        if !self.cycle_span.contains(&zv) {
            return Err(Error::Precondition("vector is not a cycle".into()));
        }
        let (res, t) = self.classes.reduce(&zv);
        debug_assert!(res.is_empty());
        let mut out = vec![0u64; self.dimension()];
        for (k, c) in t {
            out[k] = c;
        }
        Ok(out)
    }

    pub fn is_boundary(&self, z: &Vector) -> Result<bool> {
        Ok(self.class_of(z)?.iter().all(|&c| c == 0))
    }

    pub fn is_cycle(&self, z: &Vector) -> bool {
        self.cycle_span.contains(&fp::to_fp(z, self.p))
    }
}

/// Homology at the middle of `d_in` then `d_out`; both over the same prime field.
pub fn homology(d_in: &SparseMatrix, d_out: &SparseMatrix) -> Result<SubquotientBasis> {
    let p = field_prime(d_in.ring())?;
    if field_prime(d_out.ring())? != p {
        return Err(Error::Ring("maps over different fields".into()));
    }
    if d_in.rows() != d_out.cols() {
        return Err(Error::Dimension(format!(
            "d_in has {} rows but d_out has {} columns",
            d_in.rows(),
            d_out.cols()
        )));
    }
    let comp = d_out.mul(d_in)?;
    if let Some((i, j, v)) = comp.entries().next() {
        return Err(Error::Inconsistent { row: i, col: j, value: v.to_string() });
    }
    let ambient = d_in.rows();
    let rki_out = rank_kernel_image(d_out)?;
    let rki_in = rank_kernel_image(d_in)?;
    let mut classes = Echelon::new(p);
    for b in &rki_in.image {
        classes.insert(&fp::to_fp(b, p), Vec::new());
    }
    let mut cycle_span = Echelon::new(p);
    let mut reps = Vec::new();
    for z in &rki_out.kernel {
        let zv = fp::to_fp(z, p);
        cycle_span.insert(&zv, Vec::new());
        if let Inserted::Independent = classes.insert(&zv, vec![(reps.len(), 1)]) {
            reps.push(z.clone());
        }
    }
    Ok(SubquotientBasis {
        ambient,
        cycles: rki_out.kernel,
        boundaries: rki_in.image,
        representatives: reps,
        p,
        classes,
        cycle_span,
    })
}

/// Integer vector with every coordinate divisible by `q`, divided through.
pub fn divide_exact(v: &Vector, q: &BigInt) -> Option<Vector> {
    let mut out = Vector::new();
    for (&i, c) in v.iter() {
        let (d, r) = c.div_rem(q);
        if !r.is_zero() {
            return None;
        }
        out.add_term(i, &d, RingTag::Integers);
    }
    Some(out)
}

/// Minimal p-adic valuation over the coordinates; `None` for the zero vector.
pub fn min_valuation(v: &Vector, p: u64) -> Option<u32> {
    v.iter().filter_map(|(_, c)| crate::ring::valuation(c, p)).min()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, cols: usize, ring: RingTag, e: &[(usize, usize, i64)]) -> SparseMatrix {
        SparseMatrix::from_entries(rows, cols, ring, e.iter().map(|&(i, j, v)| (i, j, BigInt::from(v)))).unwrap()
    }

    fn vecz(e: &[(usize, i64)]) -> Vector {
        Vector::from_terms(e.iter().map(|&(i, v)| (i, BigInt::from(v))), RingTag::Integers)
    }

    #[test]
    fn identity_and_zero() {
        let f5 = RingTag::field(5).unwrap();
        let r = rank_kernel_image(&SparseMatrix::identity(3, f5)).unwrap();
        assert_eq!((r.rank, r.kernel.len(), r.image.len()), (3, 0, 3));
        let f2 = RingTag::field(2).unwrap();
        let r = rank_kernel_image(&SparseMatrix::zero(2, 4, f2)).unwrap();
        assert_eq!((r.rank, r.kernel.len()), (0, 4));
    }

    #[test]
    fn rank_of_dependent_rows() {
        let f5 = RingTag::field(5).unwrap();
        let a = m(2, 2, f5, &[(0, 0, 1), (0, 1, 2), (1, 0, 2), (1, 1, 4)]);
        assert_eq!(rank(&a).unwrap(), 1);
        assert!(rank_kernel_image(&SparseMatrix::identity(2, RingTag::Integers)).is_err());
    }

    #[test]
    fn integer_solve_certificate() {
        let a = m(1, 1, RingTag::Integers, &[(0, 0, 3)]);
        let b = vecz(&[(0, 1)]);
        match solve(&a, &b).unwrap() {
            Solution::NoSolution(c) => {
                assert_eq!(c.modulus, BigInt::from(3));
                assert_eq!(c.functional, vecz(&[(0, 1)]));
                assert!(c.verify(&a, &b));
            }
            other => panic!("expected no solution, got {other:?}"),
        }
        let b = vecz(&[(0, 6)]);
        assert_eq!(solve(&a, &b).unwrap(), Solution::Solution(vecz(&[(0, 2)])));
    }

    #[test]
    fn cyclic_solve() {
        let r = RingTag::cyclic(3, 2).unwrap();
        let a = m(1, 1, r, &[(0, 0, 3)]);
        let x = solve(&a, &vecz(&[(0, 6)])).unwrap().ok().unwrap();
        assert_eq!(a.mul_vec(&x).unwrap(), vecz(&[(0, 6)]));
        match solve(&a, &vecz(&[(0, 1)])).unwrap() {
            Solution::NoSolution(c) => assert!(c.verify(&a, &vecz(&[(0, 1)]))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn two_term_complex_mod_p() {
        let f3 = RingTag::field(3).unwrap();
        let d = m(1, 1, RingTag::Integers, &[(0, 0, 3)]).with_ring(f3);
        let h0 = homology(&SparseMatrix::zero(1, 0, f3), &d).unwrap();
        let h1 = homology(&d, &SparseMatrix::zero(0, 1, f3)).unwrap();
        assert_eq!((h0.dimension(), h1.dimension()), (1, 1));
    }

    #[test]
    fn nonzero_composite_reported() {
        let f2 = RingTag::field(2).unwrap();
        let d = SparseMatrix::identity(1, f2);
        match homology(&d, &d) {
            Err(Error::Inconsistent { row, col, .. }) => assert_eq!((row, col), (0, 0)),
            other => panic!("{other:?}"),
        }
    }
}
