//! Ordered simplicial complexes and 1-reduced cell models with their cochain algebras.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::One;

use crate::complex::{CochainComplex, Direction};
use crate::dga::{BasisElement, DGAlgebra, Table};
use crate::error::{Error, Result};
use crate::lin::{sign, Vector};
use crate::linalg::SparseMatrix;
use crate::ring::RingTag;

pub type Simplex = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    vertices: Vec<usize>,
    facets: Vec<Simplex>,
    /// All simplices, grouped by dimension, each group in lexicographic order.
    simplices: Vec<Vec<Simplex>>,
}

impl SimplicialComplex {
    /// Facets must list strictly ascending vertex labels.
    pub fn from_facets(facets: Vec<Simplex>) -> Result<Self> {
        if facets.is_empty() {
            return Err(Error::Parse("simplicial complex has no facets".into()));
        }
        let mut all = BTreeSet::new();
        for f in &facets {
            if f.is_empty() {
                return Err(Error::Parse("empty facet".into()));
            }
            if f.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Parse(format!("facet {f:?} is not strictly ascending")));
            }
            for mask in 1u64..(1u64 << f.len()) {
                let s: Simplex = f.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &v)| v).collect();
                all.insert((s.len(), s));
            }
        }
        let top = all.iter().map(|(l, _)| *l).max().unwrap_or(1);
        let mut simplices = vec![Vec::new(); top];
        for (l, s) in all {
            simplices[l - 1].push(s);
        }
        let vertices = simplices[0].iter().map(|s| s[0]).collect();
        Ok(SimplicialComplex { vertices, facets, simplices })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Simplex] {
        &self.facets
    }

    pub fn dimension(&self) -> usize {
        self.simplices.len() - 1
    }

    pub fn simplices(&self, dim: usize) -> &[Simplex] {
        self.simplices.get(dim).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.simplices.iter().map(Vec::len).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector().iter().enumerate().map(|(k, &n)| if k % 2 == 0 { n as i64 } else { -(n as i64) }).sum()
    }

    /// Boundary of the n-simplex, an (n-1)-sphere.
    pub fn boundary_of_simplex(n: usize) -> Result<Self> {
        let facets = (0..=n).map(|skip| (0..=n).filter(|&v| v != skip).collect()).collect();
        Self::from_facets(facets)
    }

    /// Triangulated mod-p Moore space: a disc whose 3p-gon rim wraps p times
    /// around a 3-vertex circle. Integral cohomology Z, 0, Z/p.
    pub fn moore_space(p: u64) -> Result<Self> {
        if !crate::ring::is_prime(p) {
            return Err(Error::Precondition(format!("{p} is not prime")));
        }
        let n = 3 * p as usize;
        let centre = 0;
        let o = |k: usize| 1 + k % 3;
        let w = |k: usize| 4 + k % n;
        let mut facets = Vec::with_capacity(3 * n);
        for k in 0..n {
            for mut t in [vec![centre, w(k), w(k + 1)], vec![w(k), w(k + 1), o(k)], vec![w(k + 1), o(k), o(k + 1)]] {
                t.sort();
                facets.push(t);
            }
        }
        Self::from_facets(facets)
    }
}

fn simplex_name(s: &[usize]) -> String {
    format!("[{}]", s.iter().map(usize::to_string).collect::<Vec<_>>().join(","))
}

/// Normalized cochains with front/back-face cup product and the interval cup-one.
pub fn cochain_algebra(k: &SimplicialComplex, ring: RingTag) -> Result<DGAlgebra> {
    let mut basis = Vec::new();
    let mut index: HashMap<&[usize], usize> = HashMap::new();
    for dim in 0..=k.dimension() {
        for s in k.simplices(dim) {
            index.insert(s.as_slice(), basis.len());
            basis.push(BasisElement { name: simplex_name(s), degree: dim });
        }
    }
    let n = basis.len();
    let one = BigInt::one();
    let mut diff = vec![Vector::new(); n];
    for dim in 1..=k.dimension() {
        for t in k.simplices(dim) {
            let ti = index[t.as_slice()];
            for i in 0..t.len() {
                let face: Simplex = t.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v).collect();
                diff[index[face.as_slice()]].add_term(ti, &sign(i as i64), ring);
            }
        }
    }
    let mut product = Table::new();
    let mut cup_one = Table::new();
    for dim in 0..=k.dimension() {
        for r in k.simplices(dim) {
            let ri = index[r.as_slice()];
            for split in 0..=dim {
                let key = (index[&r[..=split]], index[&r[split..]]);
                product.entry(key).or_default().add_term(ri, &one, ring);
            }
            // (f ⌣₁ g)(r) = Σ_i ± f(r_0..r_i, r_{i+q}..r_n) g(r_i..r_{i+q})
            for p in 1..=dim {
                let q = dim + 1 - p;
                for i in 0..p {
                    if i + q > dim {
                        continue;
                    }
                    let f: Simplex = r[..=i].iter().chain(&r[i + q..]).copied().collect();
                    let key = (index[f.as_slice()], index[&r[i..=i + q]]);
                    let e = i + q + i * q + p * q + 1;
                    cup_one.entry(key).or_default().add_term(ri, &sign(e as i64), ring);
                }
            }
        }
    }
    product.retain(|_, v| !v.is_zero());
    cup_one.retain(|_, v| !v.is_zero());
    let unit = Vector::from_terms(k.simplices(0).iter().map(|s| (index[s.as_slice()], one.clone())), ring);
    let aug = Vector::single(index[k.simplices(0)[0].as_slice()]);
    DGAlgebra::new(ring, basis, diff, product, unit, aug, Some(cup_one))
}

/// 1-reduced CW-style model: one 0-cell, no 1-cells, integral boundary maps.
#[derive(Clone, Debug)]
pub struct CellModel {
    pub cells: Vec<Vec<String>>,
    /// `boundary[n]`: C_n -> C_{n-1}; `boundary[0]` is the zero map.
    pub boundary: Vec<SparseMatrix>,
    /// Cup and cup-one tables on cochains, when derivable (global cell order).
    pub products: Option<(Table, Table)>,
}

impl CellModel {
    pub fn new(cells: Vec<Vec<String>>, boundary: Vec<SparseMatrix>, products: Option<(Table, Table)>) -> Result<Self> {
        if cells.first().map(Vec::len) != Some(1) {
            return Err(Error::Precondition("cell model needs exactly one 0-cell".into()));
        }
        if cells.get(1).is_some_and(|c| !c.is_empty()) {
            return Err(Error::Precondition("cell model must have no 1-cells".into()));
        }
        if boundary.len() != cells.len() {
            return Err(Error::Dimension("one boundary map per degree required".into()));
        }
        for (n, b) in boundary.iter().enumerate() {
            let rows = if n == 0 { 0 } else { cells[n - 1].len() };
            if b.cols() != cells[n].len() || b.rows() != rows {
                return Err(Error::Dimension(format!("boundary map in degree {n} has wrong shape")));
            }
        }
        for n in 2..boundary.len() {
            let c = boundary[n - 1].mul(&boundary[n])?;
            let first = c.entries().next().map(|(i, j, v)| (i, j, v.to_string()));
            if let Some((row, col, value)) = first {
                return Err(Error::Inconsistent { row, col, value });
            }
        }
        Ok(CellModel { cells, boundary, products })
    }

    /// Cells e_0, e_n, e_{n+1} with ∂e_{n+1} = p·e_n; products vanish for degree reasons.
    pub fn moore(p: u64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Precondition("1-reduced Moore model needs n >= 2".into()));
        }
        let z = RingTag::Integers;
        let mut cells = vec![Vec::new(); n + 2];
        cells[0].push("e0".into());
        cells[n].push(format!("e{n}"));
        cells[n + 1].push(format!("e{}", n + 1));
        let boundary = (0..n + 2)
            .map(|k| {
                let rows = if k == 0 { 0 } else { cells[k - 1].len() };
                if k == n + 1 {
                    SparseMatrix::from_entries(1, 1, z, [(0, 0, BigInt::from(p))])
                } else {
                    Ok(SparseMatrix::zero(rows, cells[k].len(), z))
                }
            })
            .collect::<Result<_>>()?;
        CellModel::new(cells, boundary, Some((Table::new(), Table::new())))
    }

    fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.cells
            .iter()
            .map(|c| {
                let o = acc;
                acc += c.len();
                o
            })
            .collect()
    }

    /// Cellular cochains: δ^n is the transpose of ∂_{n+1}.
    pub fn cochain_complex(&self, ring: RingTag) -> Result<CochainComplex> {
        let top = self.cells.len() - 1;
        let dims = self.cells.iter().map(Vec::len).collect();
        let maps = (0..=top)
            .map(|n| {
                Some(match self.boundary.get(n + 1) {
                    Some(b) => b.transpose().with_ring(ring),
                    None => SparseMatrix::zero(0, self.cells[n].len(), ring),
                })
            })
            .collect();
        CochainComplex::new(ring, Direction::Raising, dims, maps, top)
    }

    /// DG algebra on the cellular cochains; needs the product flag.
    pub fn to_dga(&self, ring: RingTag) -> Result<DGAlgebra> {
        let (prod, cup) = self
            .products
            .clone()
            .ok_or_else(|| Error::Capability("cell model carries no product structure".into()))?;
        let offs = self.offsets();
        let mut basis = Vec::new();
        for (n, cs) in self.cells.iter().enumerate() {
            for c in cs {
                basis.push(BasisElement { name: if n == 0 { "1".into() } else { c.clone() }, degree: n });
            }
        }
        let mut diff = vec![Vector::new(); basis.len()];
        for (n, b) in self.boundary.iter().enumerate().skip(1) {
            for (i, j, v) in b.entries() {
                diff[offs[n - 1] + i].add_term(offs[n] + j, v, ring);
            }
        }
        let mut product = crate::dga::unit_products(basis.len());
        product.extend(prod);
        DGAlgebra::new(ring, basis, diff, product, Vector::single(0), Vector::single(0), Some(cup))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn f(p: u64) -> RingTag {
        RingTag::field(p).unwrap()
    }

    #[test]
    fn two_sphere_betti() {
        let k = SimplicialComplex::boundary_of_simplex(3).unwrap();
        let a = cochain_algebra(&k, f(3)).unwrap();
        let (t, _) = a.cochain_complex().cohomology(2, "space").unwrap();
        assert_eq!(t.dims, vec![1, 0, 1]);
        assert_eq!(k.euler_characteristic(), 2);
        assert_eq!(a.cochain_complex().euler_characteristic(), 2);
    }

    #[test]
    fn circle_products_vanish_in_degree_two() {
        let k = SimplicialComplex::boundary_of_simplex(2).unwrap();
        let a = cochain_algebra(&k, RingTag::Integers).unwrap();
        assert!(a.in_degree(2).is_empty());
        let e = a.in_degree(1);
        for &x in e {
            for &y in e {
                assert!(a.mul(&Vector::single(x), &Vector::single(y)).is_zero());
            }
        }
    }

    #[test]
    fn cochain_algebras_satisfy_all_identities() {
        for k in [
            SimplicialComplex::boundary_of_simplex(3).unwrap(),
            SimplicialComplex::from_facets(vec![vec![0, 1, 2, 3, 4]]).unwrap(),
            SimplicialComplex::moore_space(3).unwrap(),
        ] {
            let a = cochain_algebra(&k, RingTag::Integers).unwrap();
            let r = a.check_invariants();
            assert!(r.all_passed(), "{r:?}");
            assert!(r.get("cup-one coboundary formula").unwrap().checked > 0);
        }
    }

    #[test]
    fn moore_space_cohomology() {
        let k = SimplicialComplex::moore_space(3).unwrap();
        assert_eq!(k.euler_characteristic(), 1);
        let a = cochain_algebra(&k, f(3)).unwrap();
        let (t, _) = a.cochain_complex().cohomology(2, "space").unwrap();
        assert_eq!(t.dims, vec![1, 1, 1]);
        let a5 = cochain_algebra(&k, f(5)).unwrap();
        let (t5, _) = a5.cochain_complex().cohomology(2, "space").unwrap();
        assert_eq!(t5.dims, vec![1, 0, 0]);
    }

    #[test]
    fn rejects_descending_facet() {
        assert!(SimplicialComplex::from_facets(vec![vec![2, 1]]).is_err());
    }

    #[test]
    fn cell_moore_matches_preset() {
        let c = CellModel::moore(3, 2).unwrap();
        let a = c.to_dga(RingTag::Integers).unwrap();
        let b = presets::moore(3, 2).unwrap();
        assert_eq!(a.differential_matrix(2), b.differential_matrix(2));
        let (t, _) = c.cochain_complex(f(3)).unwrap().cohomology(3, "space").unwrap();
        assert_eq!(t.dims, vec![1, 0, 1, 1]);
    }
}
