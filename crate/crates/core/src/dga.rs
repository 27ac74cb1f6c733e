//! Finite DG algebras given by structure tables.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::complex::{CochainComplex, Direction};
use crate::error::{Error, Result};
use crate::lin::{sign, Vector};
use crate::linalg::SparseMatrix;
use crate::ring::RingTag;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisElement {
    pub name: String,
    pub degree: usize,
}

pub type Table = BTreeMap<(usize, usize), Vector>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DGAlgebra {
    ring: RingTag,
    basis: Vec<BasisElement>,
    diff: Vec<Vector>,
    product: Table,
    unit: Vector,
    augmentation: Vector,
    cup_one: Option<Table>,
    by_degree: Vec<Vec<usize>>,
    position: Vec<usize>,
    names: HashMap<String, usize>,
}

/// Outcome of one exhaustive identity check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantCheck {
    pub name: String,
    pub passed: bool,
    pub checked: usize,
    pub detail: Option<String>,
}

impl InvariantCheck {
    pub fn new(name: &str) -> Self {
        InvariantCheck { name: name.to_string(), passed: true, checked: 0, detail: None }
    }

    pub fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.passed {
            self.passed = false;
            self.detail = Some(what());
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    pub checks: Vec<InvariantCheck>,
}

impl InvariantReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn extend(&mut self, other: InvariantReport) {
        self.checks.extend(other.checks);
    }

    pub fn get(&self, name: &str) -> Option<&InvariantCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn into_result(self) -> Result<Self> {
        match self.checks.iter().find(|c| !c.passed) {
            None => Ok(self),
            Some(c) => Err(Error::Invariant(format!(
                "{}: {}",
                c.name,
                c.detail.clone().unwrap_or_default()
            ))),
        }
    }
}

impl DGAlgebra {
    /// Validates degrees of every table entry and indexes the basis.
    pub fn new(
        ring: RingTag,
        basis: Vec<BasisElement>,
        diff: Vec<Vector>,
        product: Table,
        unit: Vector,
        augmentation: Vector,
        cup_one: Option<Table>,
    ) -> Result<Self> {
        let n = basis.len();
        if diff.len() != n {
            return Err(Error::Dimension(format!("{} differentials for {n} basis elements", diff.len())));
        }
        let mut names = HashMap::new();
        for (i, b) in basis.iter().enumerate() {
            if names.insert(b.name.clone(), i).is_some() {
                return Err(Error::Parse(format!("duplicate basis name '{}'", b.name)));
            }
        }
        let top = basis.iter().map(|b| b.degree).max().unwrap_or(0);
        let mut by_degree = vec![Vec::new(); top + 1];
        let mut position = vec![0; n];
        for (i, b) in basis.iter().enumerate() {
            position[i] = by_degree[b.degree].len();
            by_degree[b.degree].push(i);
        }
        let red = |v: &Vector| v.reduced(ring);
        let alg = DGAlgebra {
            ring,
            diff: diff.iter().map(red).collect(),
            product: product.iter().map(|(k, v)| (*k, red(v))).filter(|(_, v)| !v.is_zero()).collect(),
            unit: red(&unit),
            augmentation: red(&augmentation),
            cup_one: cup_one.map(|t| t.iter().map(|(k, v)| (*k, red(v))).filter(|(_, v)| !v.is_zero()).collect()),
            basis,
            by_degree,
            position,
            names,
        };
        alg.check_homogeneous()?;
        Ok(alg)
    }

    fn check_homogeneous(&self) -> Result<()> {
        let n = self.basis.len();
        let in_range = |v: &Vector| v.keys().all(|&k| k < n);
        for (i, v) in self.diff.iter().enumerate() {
            if !in_range(v) || !self.is_homogeneous(v, self.basis[i].degree + 1) {
                return Err(Error::Precondition(format!("d({}) is not of degree +1", self.basis[i].name)));
            }
        }
        for (&(i, j), v) in &self.product {
            if i >= n || j >= n || !in_range(v) || !self.is_homogeneous(v, self.basis[i].degree + self.basis[j].degree) {
                return Err(Error::Precondition(format!("product entry ({i}, {j}) is not homogeneous")));
            }
        }
        if let Some(t) = &self.cup_one {
            for (&(i, j), v) in t {
                if i >= n || j >= n || !in_range(v) {
                    return Err(Error::Precondition(format!("cup-one entry ({i}, {j}) out of range")));
                }
                let d = self.basis[i].degree + self.basis[j].degree;
                if d == 0 || !self.is_homogeneous(v, d - 1) {
                    return Err(Error::Precondition(format!("cup-one entry ({i}, {j}) is not of degree -1")));
                }
            }
        }
        if !in_range(&self.unit) || !self.is_homogeneous(&self.unit, 0) {
            return Err(Error::Precondition("unit must lie in degree 0".into()));
        }
        if !in_range(&self.augmentation) || !self.is_homogeneous(&self.augmentation, 0) {
            return Err(Error::Precondition("augmentation must be supported in degree 0".into()));
        }
        Ok(())
    }

    fn is_homogeneous(&self, v: &Vector, d: usize) -> bool {
        v.keys().all(|&k| self.basis[k].degree == d)
    }

    pub fn ring(&self) -> RingTag {
        self.ring
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn degree(&self, i: usize) -> usize {
        self.basis[i].degree
    }

    pub fn name(&self, i: usize) -> &str {
        &self.basis[i].name
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.get(name).copied()
    }

    pub fn element(&self, name: &str) -> Result<Vector> {
        self.index_of(name)
            .map(Vector::single)
            .ok_or_else(|| Error::Parse(format!("no basis element named '{name}'")))
    }

    pub fn top_degree(&self) -> usize {
        self.by_degree.len() - 1
    }

    pub fn in_degree(&self, d: usize) -> &[usize] {
        self.by_degree.get(d).map_or(&[], Vec::as_slice)
    }

    /// Index of a basis element inside its degree.
    pub fn position(&self, i: usize) -> usize {
        self.position[i]
    }

    pub fn unit(&self) -> &Vector {
        &self.unit
    }

    pub fn augmentation(&self) -> &Vector {
        &self.augmentation
    }

    pub fn diff_table(&self) -> &[Vector] {
        &self.diff
    }

    pub fn product_table(&self) -> &Table {
        &self.product
    }

    pub fn cup_one_table(&self) -> Option<&Table> {
        self.cup_one.as_ref()
    }

    pub fn has_cup_one(&self) -> bool {
        self.cup_one.is_some()
    }

    /// Degree of a nonzero homogeneous element.
    pub fn degree_of(&self, v: &Vector) -> Option<usize> {
        let mut it = v.keys().map(|&k| self.basis[k].degree);
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn d_basis(&self, i: usize) -> &Vector {
        &self.diff[i]
    }

    pub fn d(&self, v: &Vector) -> Vector {
        let mut out = Vector::new();
        for (&i, c) in v.iter() {
            out.add_scaled(&self.diff[i], c, self.ring);
        }
        out
    }

    pub fn mul_basis(&self, i: usize, j: usize) -> Option<&Vector> {
        self.product.get(&(i, j))
    }

    pub fn mul(&self, a: &Vector, b: &Vector) -> Vector {
        let mut out = Vector::new();
        for (&i, x) in a.iter() {
            for (&j, y) in b.iter() {
                if let Some(p) = self.product.get(&(i, j)) {
                    out.add_scaled(p, &(x * y), self.ring);
                }
            }
        }
        out
    }

    pub fn cup1(&self, a: &Vector, b: &Vector) -> Result<Vector> {
        let t = self
            .cup_one
            .as_ref()
            .ok_or_else(|| Error::Capability("algebra carries no cup-one product".into()))?;
        let mut out = Vector::new();
        for (&i, x) in a.iter() {
            for (&j, y) in b.iter() {
                if let Some(p) = t.get(&(i, j)) {
                    out.add_scaled(p, &(x * y), self.ring);
                }
            }
        }
        Ok(out)
    }

    pub fn augment(&self, v: &Vector) -> BigInt {
        let s: BigInt = v.iter().map(|(i, c)| c * self.augmentation.get(i)).sum();
        self.ring.reduce(&s)
    }

    /// Degree-0 part is the unit line.
    pub fn is_connected(&self) -> bool {
        self.in_degree(0).len() == 1 && !self.unit.is_zero()
    }

    /// Basis elements of the augmentation ideal for a connected algebra.
    pub fn reduced_basis(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.degree(i) > 0).collect()
    }

    /// Preconditions for degree-truncated bar constructions.
    pub fn check_bar_ready(&self) -> Result<()> {
        if !self.is_connected() {
            return Err(Error::Precondition("bar construction needs a connected algebra (A^0 = unit line)".into()));
        }
        if !self.in_degree(1).is_empty() {
            return Err(Error::Precondition(
                "A^1 != 0: word length is unbounded in fixed degree, truncation unsound".into(),
            ));
        }
        Ok(())
    }

    pub fn is_graded_commutative(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            (i..n).all(|j| {
                let ab = self.product.get(&(i, j)).cloned().unwrap_or_default();
                let ba = self.product.get(&(j, i)).cloned().unwrap_or_default();
                let s = sign((self.degree(i) * self.degree(j)) as i64);
                ab == ba.scaled(&s, self.ring)
            })
        })
    }

    /// Differential `A^n -> A^{n+1}` in the per-degree bases.
    pub fn differential_matrix(&self, n: usize) -> SparseMatrix {
        let src = self.in_degree(n);
        let tgt_len = self.in_degree(n + 1).len();
        let entries = src.iter().enumerate().flat_map(|(j, &i)| {
            self.diff[i].iter().map(move |(&k, c)| (self.position[k], j, c.clone()))
        });
        SparseMatrix::from_entries(tgt_len, src.len(), self.ring, entries).expect("valid differential")
    }

    pub fn cochain_complex(&self) -> CochainComplex {
        let top = self.top_degree();
        let dims = (0..=top).map(|n| self.in_degree(n).len()).collect();
        let maps = (0..=top).map(|n| Some(self.differential_matrix(n))).collect();
        CochainComplex::new(self.ring, Direction::Raising, dims, maps, top).expect("consistent shapes")
    }

    /// Vector of degree `n` in per-degree coordinates.
    pub fn to_degree_coords(&self, v: &Vector) -> Vector {
        v.map_keys(|&k| self.position[k], self.ring)
    }

    pub fn from_degree_coords(&self, n: usize, v: &Vector) -> Vector {
        let b = self.in_degree(n);
        v.map_keys(|&k| b[k], self.ring)
    }

    pub fn with_ring_unchecked(&self, ring: RingTag) -> Result<Self> {
        DGAlgebra::new(
            ring,
            self.basis.clone(),
            self.diff.clone(),
            self.product.clone(),
            self.unit.clone(),
            self.augmentation.clone(),
            self.cup_one.clone(),
        )
    }

    pub fn without_cup_one(&self) -> Self {
        let mut a = self.clone();
        a.cup_one = None;
        a
    }

    pub fn with_cup_one(&self, table: Table) -> Result<Self> {
        DGAlgebra::new(
            self.ring,
            self.basis.clone(),
            self.diff.clone(),
            self.product.clone(),
            self.unit.clone(),
            self.augmentation.clone(),
            Some(table),
        )
    }

    pub fn format(&self, v: &Vector) -> String {
        if v.is_zero() {
            return "0".into();
        }
        v.iter()
            .map(|(&i, c)| if c.is_one() { self.name(i).to_string() } else { format!("{c}*{}", self.name(i)) })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Basis indices of degree at most `d`.
    pub fn up_to_degree(&self, d: i64) -> Vec<usize> {
        if d < 0 {
            return Vec::new();
        }
        (0..=(d as usize).min(self.top_degree())).flat_map(|k| self.in_degree(k).iter().copied()).collect()
    }

    /// Exhaustive check of every algebra identity on basis tuples.
    pub fn check_invariants(&self) -> InvariantReport {
        let ring = self.ring;
        let n = self.dim();
        let top = self.top_degree();
        let e = |i: usize| Vector::single(i);
        let mut report = InvariantReport::default();

        let mut dd = InvariantCheck::new("d^2 = 0");
        for i in 0..n {
            let z = self.d(&self.d(&e(i)));
            dd.record(z.is_zero(), || format!("d(d({})) = {}", self.name(i), self.format(&z)));
        }
        report.checks.push(dd);

        let mut leib = InvariantCheck::new("Leibniz");
        for i in 0..n {
            for j in self.up_to_degree(top as i64 - self.degree(i) as i64) {
                let (a, b) = (e(i), e(j));
                let mut r = self.d(&self.mul(&a, &b));
                r.sub(&self.mul(&self.d(&a), &b), ring);
                r.sub(&self.mul(&a, &self.d(&b)).scaled(&sign(self.degree(i) as i64), ring), ring);
                leib.record(r.is_zero(), || format!("({}, {}): residual {}", self.name(i), self.name(j), self.format(&r)));
            }
        }
        report.checks.push(leib);

        let mut assoc = InvariantCheck::new("associativity");
        for i in 0..n {
            for j in self.up_to_degree(top as i64 - self.degree(i) as i64) {
                let ij = self.product.get(&(i, j)).cloned().unwrap_or_default();
                for k in self.up_to_degree(top as i64 - (self.degree(i) + self.degree(j)) as i64) {
                    let l = self.mul(&ij, &e(k));
                    let r = self.mul(&e(i), &self.mul(&e(j), &e(k)));
                    assoc.record(l == r, || format!("({}, {}, {})", self.name(i), self.name(j), self.name(k)));
                }
            }
        }
        report.checks.push(assoc);

        let mut unit = InvariantCheck::new("unit");
        unit.record(self.d(&self.unit).is_zero(), || "d(1) != 0".into());
        for i in 0..n {
            let l = self.mul(&self.unit, &e(i));
            let r = self.mul(&e(i), &self.unit);
            unit.record(l == e(i) && r == e(i), || format!("1 * {} or {} * 1 differs", self.name(i), self.name(i)));
        }
        report.checks.push(unit);

        let mut aug = InvariantCheck::new("augmentation");
        aug.record(self.augment(&self.unit).is_one(), || "augmentation(1) != 1".into());
        for &i in self.in_degree(0) {
            for &j in self.in_degree(0) {
                let l = self.augment(&self.mul(&e(i), &e(j)));
                let r = ring.mul(&self.augment(&e(i)), &self.augment(&e(j)));
                aug.record(l == r, || format!("augmentation not multiplicative on ({}, {})", self.name(i), self.name(j)));
            }
        }
        report.checks.push(aug);

        if self.cup_one.is_some() {
            let (c6, c7) = self.check_cup_one();
            report.checks.push(c6);
            report.checks.push(c7);
        }
        report
    }

    /// Residuals of the cup-one coboundary formula and the Hirsch formula.
    pub fn check_cup_one(&self) -> (InvariantCheck, InvariantCheck) {
        let ring = self.ring;
        let n = self.dim();
        let top = self.top_degree() as i64;
        let e = |i: usize| Vector::single(i);
        let c1 = |a: &Vector, b: &Vector| self.cup1(a, b).expect("cup-one present");
        let mut c6 = InvariantCheck::new("cup-one coboundary formula");
        for i in 0..n {
            for j in self.up_to_degree(top + 1 - self.degree(i) as i64) {
                let (p, q) = (self.degree(i) as i64, self.degree(j) as i64);
                let (a, b) = (e(i), e(j));
                let mut r = self.d(&c1(&a, &b));
                r.sub(&self.mul(&a, &b), ring);
                r.add(&self.mul(&b, &a).scaled(&sign(p * q), ring), ring);
                r.add(&c1(&self.d(&a), &b), ring);
                r.add(&c1(&a, &self.d(&b)).scaled(&sign(p), ring), ring);
                c6.record(r.is_zero(), || format!("({}, {}): residual {}", self.name(i), self.name(j), self.format(&r)));
            }
        }
        let mut c7 = InvariantCheck::new("Hirsch formula");
        for i in 0..n {
            for j in self.up_to_degree(top + 1 - self.degree(i) as i64) {
                let ab = self.mul(&e(i), &e(j));
                for k in self.up_to_degree(top + 1 - (self.degree(i) + self.degree(j)) as i64) {
                    let (p, q, r_) = (self.degree(i) as i64, self.degree(j) as i64, self.degree(k) as i64);
                    let (a, b, c) = (e(i), e(j), e(k));
                    let mut r = c1(&ab, &c);
                    r.sub(&self.mul(&a, &c1(&b, &c)).scaled(&sign(p), ring), ring);
                    r.sub(&self.mul(&c1(&a, &c), &b).scaled(&sign(q * r_), ring), ring);
                    c7.record(r.is_zero(), || {
                        format!("({}, {}, {}): residual {}", self.name(i), self.name(j), self.name(k), self.format(&r))
                    });
                }
            }
        }
        (c6, c7)
    }
}

/// Builds unit products `1*x = x*1 = x` for a basis whose element 0 is the unit.
pub fn unit_products(n: usize) -> Table {
    let mut t = Table::new();
    for i in 0..n {
        t.insert((0, i), Vector::single(i));
        t.insert((i, 0), Vector::single(i));
    }
    t
}
