//! Finite graded complexes and Betti tables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, SparseMatrix, SubquotientBasis};
use crate::ring::RingTag;

/// Direction of the differential on the degree index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Raising,
    Lowering,
}

/// Complex with finite-dimensional pieces in degrees `0..=top`.
/// `maps[n]` goes out of degree `n`; maps leaving the built range are absent,
/// and homology is only reported in degrees `0..=exact_through`.
#[derive(Clone, Debug)]
pub struct CochainComplex {
    pub ring: RingTag,
    pub direction: Direction,
    pub dims: Vec<usize>,
    pub maps: Vec<Option<SparseMatrix>>,
    pub exact_through: usize,
}

impl CochainComplex {
    pub fn new(
        ring: RingTag,
        direction: Direction,
        dims: Vec<usize>,
        maps: Vec<Option<SparseMatrix>>,
        exact_through: usize,
    ) -> Result<Self> {
        if maps.len() != dims.len() {
            return Err(Error::Dimension("one map slot per degree required".into()));
        }
        let c = CochainComplex { ring, direction, dims, maps, exact_through };
        for n in 0..c.dims.len() {
            if let Some(m) = &c.maps[n] {
                let target = c.target_dim(n).unwrap_or(0);
                if m.cols() != c.dims[n] || m.rows() != target {
                    return Err(Error::Dimension(format!(
                        "map out of degree {n} is {}x{}, expected {}x{}",
                        m.rows(),
                        m.cols(),
                        target,
                        c.dims[n]
                    )));
                }
            }
        }
        Ok(c)
    }

    pub fn top(&self) -> usize {
        self.dims.len().saturating_sub(1)
    }

    fn target(&self, n: usize) -> Option<usize> {
        match self.direction {
            Direction::Raising => Some(n + 1),
            Direction::Lowering => n.checked_sub(1),
        }
    }

    fn source_of(&self, n: usize) -> Option<usize> {
        match self.direction {
            Direction::Raising => n.checked_sub(1),
            Direction::Lowering => Some(n + 1),
        }
    }

    fn target_dim(&self, n: usize) -> Option<usize> {
        self.target(n).map(|t| self.dims.get(t).copied().unwrap_or(0))
    }

    fn map_out(&self, n: usize) -> Result<SparseMatrix> {
        match (&self.maps[n], self.target(n)) {
            (Some(m), _) => Ok(m.clone()),
            (None, None) => Ok(SparseMatrix::zero(0, self.dims[n], self.ring)),
            (None, Some(t)) if t >= self.dims.len() || self.dims[t] == 0 => {
                Ok(SparseMatrix::zero(self.dims.get(t).copied().unwrap_or(0), self.dims[n], self.ring))
            }
            (None, Some(_)) => Err(Error::Window { requested: n, limit: self.exact_through }),
        }
    }

    fn map_in(&self, n: usize) -> Result<SparseMatrix> {
        match self.source_of(n) {
            Some(s) if s < self.dims.len() => self.map_out(s),
            _ => Ok(SparseMatrix::zero(self.dims[n], 0, self.ring)),
        }
    }

    /// `d∘d = 0` on every composable pair of built maps; first offending entry.
    pub fn check_square_zero(&self) -> Result<()> {
        for n in 0..self.dims.len() {
            let (Some(a), Some(t)) = (&self.maps[n], self.target(n)) else { continue };
            let Some(Some(b)) = self.maps.get(t) else { continue };
            let c = b.mul(a)?;
            let first = c.entries().next().map(|(i, j, v)| (i, j, v.to_string()));
            if let Some((row, col, value)) = first {
                return Err(Error::Inconsistent { row, col, value });
            }
        }
        Ok(())
    }

    pub fn homology_at(&self, n: usize) -> Result<SubquotientBasis> {
        if n > self.exact_through || n >= self.dims.len() {
            return Err(Error::Window { requested: n, limit: self.exact_through });
        }
        linalg::homology(&self.map_in(n)?, &self.map_out(n)?)
    }

    pub fn cohomology(&self, through: usize, source: &str) -> Result<(BettiTable, Vec<SubquotientBasis>)> {
        if through > self.exact_through {
            return Err(Error::Window { requested: through, limit: self.exact_through });
        }
        let bases: Vec<SubquotientBasis> = (0..=through).map(|n| self.homology_at(n)).collect::<Result<_>>()?;
        let table = BettiTable {
            ring: self.ring,
            truncation: self.top(),
            window: through,
            source: source.to_string(),
            dims: bases.iter().map(SubquotientBasis::dimension).collect(),
        };
        Ok((table, bases))
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(n, &d)| if n % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum()
    }
}

/// Degree-indexed dimensions with truncation metadata.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiTable {
    pub ring: RingTag,
    /// Highest degree present in the underlying truncated complex.
    pub truncation: usize,
    /// Highest degree whose value is guaranteed exact.
    pub window: usize,
    pub source: String,
    pub dims: Vec<usize>,
}

impl BettiTable {
    pub fn get(&self, n: usize) -> Option<usize> {
        self.dims.get(n).copied()
    }

    pub fn running_max(&self) -> Vec<usize> {
        let mut m = 0;
        self.dims
            .iter()
            .map(|&d| {
                m = m.max(d);
                m
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("degree,dimension\n");
        for (n, d) in self.dims.iter().enumerate() {
            s.push_str(&format!("{n},{d}\n"));
        }
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "# {} cohomology over {}; truncation {}, exact through degree {}\n",
            self.source, self.ring, self.truncation, self.window
        );
        let maxes = self.running_max();
        for (n, d) in self.dims.iter().enumerate() {
            s.push_str(&format!("{n:>4} {d:>8}   max {:>8}\n", maxes[n]));
        }
        s
    }
}

/// Convolution of two tables, truncated to the shorter window.
pub fn convolve(a: &[usize], b: &[usize]) -> Vec<usize> {
    let n = a.len().min(b.len());
    (0..n).map(|k| (0..=k).map(|i| a[i] * b[k - i]).sum()).collect()
}
