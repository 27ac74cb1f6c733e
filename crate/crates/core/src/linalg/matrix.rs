use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lin::Vector;
use crate::ring::RingTag;

/// Column-major sparse matrix; entries canonical and nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    ring: RingTag,
    columns: Vec<Vec<(usize, BigInt)>>,
}

impl SparseMatrix {
    pub fn zero(rows: usize, cols: usize, ring: RingTag) -> Self {
        SparseMatrix { rows, cols, ring, columns: vec![Vec::new(); cols] }
    }

    pub fn identity(n: usize, ring: RingTag) -> Self {
        let mut m = Self::zero(n, n, ring);
        for j in 0..n {
            m.columns[j].push((j, BigInt::one()));
        }
        m
    }

    pub fn from_entries<I>(rows: usize, cols: usize, ring: RingTag, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, BigInt)>,
    {
        let mut seen = BTreeSet::new();
        let mut m = Self::zero(rows, cols, ring);
        for (r, c, v) in entries {
            if r >= rows || c >= cols {
                return Err(Error::Dimension(format!("entry ({r}, {c}) outside {rows}x{cols}")));
            }
            if !seen.insert((r, c)) {
                return Err(Error::Parse(format!("duplicate entry ({r}, {c})")));
            }
            let v = ring.reduce(&v);
            if !v.is_zero() {
                m.columns[c].push((r, v));
            }
        }
        for col in &mut m.columns {
            col.sort_by_key(|e| e.0);
        }
        Ok(m)
    }

    pub fn from_columns(rows: usize, ring: RingTag, cols: &[Vector]) -> Result<Self> {
        let mut m = Self::zero(rows, cols.len(), ring);
        for (j, v) in cols.iter().enumerate() {
            for (&r, c) in v.iter() {
                if r >= rows {
                    return Err(Error::Dimension(format!("row {r} outside {rows}")));
                }
                let c = ring.reduce(c);
                if !c.is_zero() {
                    m.columns[j].push((r, c));
                }
            }
        }
        Ok(m)
    }

    pub fn from_dense(rows: &[Vec<BigInt>], cols: usize, ring: RingTag) -> Self {
        let mut m = Self::zero(rows.len(), cols, ring);
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let v = ring.reduce(v);
                if !v.is_zero() {
                    m.columns[j].push((i, v));
                }
            }
        }
        m
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut d = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for (i, v) in col {
                d[*i][j] = v.clone();
            }
        }
        d
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn ring(&self) -> RingTag {
        self.ring
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    pub fn column(&self, j: usize) -> &[(usize, BigInt)] {
        &self.columns[j]
    }

    pub fn column_vector(&self, j: usize) -> Vector {
        Vector::from_terms(self.columns[j].iter().cloned(), self.ring)
    }

    pub fn get(&self, r: usize, c: usize) -> BigInt {
        self.columns[c]
            .binary_search_by_key(&r, |e| e.0)
            .map(|k| self.columns[c][k].1.clone())
            .unwrap_or_default()
    }

    /// Entries in (column, row) order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(j, col)| col.iter().map(move |(i, v)| (*i, j, v)))
    }

    pub fn with_ring(&self, ring: RingTag) -> Self {
        let mut m = Self::zero(self.rows, self.cols, ring);
        for (j, col) in self.columns.iter().enumerate() {
            for (i, v) in col {
                let v = ring.reduce(v);
                if !v.is_zero() {
                    m.columns[j].push((*i, v));
                }
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.cols, self.rows, self.ring);
        for (j, col) in self.columns.iter().enumerate() {
            for (i, v) in col {
                t.columns[*i].push((j, v.clone()));
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &Vector) -> Result<Vector> {
        let mut out = Vector::new();
        for (&j, c) in x.iter() {
            if j >= self.cols {
                return Err(Error::Dimension(format!("vector index {j} >= {} columns", self.cols)));
            }
            for (i, v) in &self.columns[j] {
                out.add_term(*i, &(v * c), self.ring);
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let cols: Vec<Vector> = (0..other.cols)
            .map(|j| self.mul_vec(&other.column_vector(j)))
            .collect::<Result<_>>()?;
        SparseMatrix::from_columns(self.rows, self.ring, &cols)
    }

    /// Text form: header "rows cols ring", then "row col value" lines.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.rows, self.cols, self.ring);
        let mut entries: Vec<_> = self.entries().collect();
        entries.sort_by_key(|e| (e.0, e.1));
        for (i, j, v) in entries {
            let _ = writeln!(s, "{i} {j} {v}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty matrix file".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 3 {
            return Err(Error::Parse(format!("bad header '{header}'")));
        }
        let rows = h[0].parse().map_err(|_| Error::Parse("bad row count".into()))?;
        let cols = h[1].parse().map_err(|_| Error::Parse("bad column count".into()))?;
        let ring: RingTag = h[2].parse()?;
        let mut entries = Vec::new();
        for l in lines {
            let f: Vec<&str> = l.split_whitespace().collect();
            if f.len() != 3 {
                return Err(Error::Parse(format!("bad entry line '{l}'")));
            }
            let r = f[0].parse().map_err(|_| Error::Parse(format!("bad row in '{l}'")))?;
            let c = f[1].parse().map_err(|_| Error::Parse(format!("bad column in '{l}'")))?;
            let v: BigInt = f[2].parse().map_err(|_| Error::Parse(format!("bad value in '{l}'")))?;
            entries.push((r, c, v));
        }
        SparseMatrix::from_entries(rows, cols, ring, entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let r = RingTag::cyclic(3, 2).unwrap();
        let m = SparseMatrix::from_entries(
            2,
            3,
            r,
            vec![(0, 1, BigInt::from(4)), (1, 2, BigInt::from(-1)), (1, 0, BigInt::from(9))],
        )
        .unwrap();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(1, 2), BigInt::from(8));
        let back = SparseMatrix::from_text(&m.to_text()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn duplicates_rejected() {
        let e = vec![(0, 0, BigInt::one()), (0, 0, BigInt::one())];
        assert!(SparseMatrix::from_entries(1, 1, RingTag::Integers, e).is_err());
    }
}
