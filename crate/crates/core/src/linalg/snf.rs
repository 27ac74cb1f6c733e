//! Smith normal form over Z with unimodular transforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::SparseMatrix;
use crate::error::{Error, Result};
use crate::ring::RingTag;

#[derive(Clone, Debug)]
pub struct SmithForm {
    /// Invariant factors d_1 | d_2 | ...; length min(rows, cols), trailing zeros allowed.
    pub diag: Vec<BigInt>,
    pub left: SparseMatrix,
    pub right: SparseMatrix,
    pub left_inverse: SparseMatrix,
    pub right_inverse: SparseMatrix,
}

type Dense = Vec<Vec<BigInt>>;

fn identity(n: usize) -> Dense {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

struct Work {
    a: Dense,
    l: Dense,
    linv: Dense,
    r: Dense,
    rinv: Dense,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        self.l.swap(i, j);
        for row in &mut self.linv {
            row.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in &mut self.a {
            row.swap(i, j);
        }
        for row in &mut self.r {
            row.swap(i, j);
        }
        self.rinv.swap(i, j);
    }

    /// row_i += q * row_t
    fn add_row(&mut self, i: usize, t: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for m in [&mut self.a, &mut self.l] {
            let src = m[t].clone();
            for (x, s) in m[i].iter_mut().zip(src.iter()) {
                *x += q * s;
            }
        }
        // inverse gets col_t -= q * col_i
        for row in &mut self.linv {
            let v = &row[i] * q;
            row[t] -= v;
        }
    }

    /// col_j += q * col_t
    fn add_col(&mut self, j: usize, t: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for m in [&mut self.a, &mut self.r] {
            for row in m.iter_mut() {
                let v = &row[t] * q;
                row[j] += v;
            }
        }
        // inverse gets row_t -= q * row_j
        let src = self.rinv[j].clone();
        for (x, s) in self.rinv[t].iter_mut().zip(src.iter()) {
            *x -= q * s;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut().chain(self.l[i].iter_mut()) {
            *x = -&*x;
        }
        for row in &mut self.linv {
            row[i] = -&row[i];
        }
    }
}

pub fn smith_normal_form(m: &SparseMatrix) -> Result<SmithForm> {
    if m.ring() != RingTag::Integers {
        return Err(Error::Ring("Smith normal form requires integer entries".into()));
    }
    let (rows, cols) = (m.rows(), m.cols());
    let mut w = Work {
        a: m.to_dense(),
        l: identity(rows),
        linv: identity(rows),
        r: identity(cols),
        rinv: identity(cols),
    };
    let n = rows.min(cols);
    for t in 0..n {
        // minimal |entry| in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !w.a[i][j].is_zero()
                    && best.is_none_or(|(bi, bj)| w.a[i][j].abs() < w.a[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        w.swap_rows(t, bi);
        w.swap_cols(t, bj);
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if w.a[i][t].is_zero() {
                    continue;
                }
                let q = w.a[i][t].div_floor(&w.a[t][t]);
                w.add_row(i, t, &-q);
                if !w.a[i][t].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if w.a[t][j].is_zero() {
                    continue;
                }
                let q = w.a[t][j].div_floor(&w.a[t][t]);
                w.add_col(j, t, &-q);
                if !w.a[t][j].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // move the smallest remainder in row/column t to the pivot
                let mut best = (t, t);
                for i in t + 1..rows {
                    if !w.a[i][t].is_zero() && w.a[i][t].abs() < w.a[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..cols {
                    if !w.a[t][j].is_zero() && w.a[t][j].abs() < w.a[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                if best.0 != t {
                    w.swap_rows(t, best.0);
                }
                if best.1 != t {
                    w.swap_cols(t, best.1);
                }
                continue;
            }
            // divisibility of the trailing block by the pivot
            let mut bad = None;
            'outer: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(&w.a[i][j] % &w.a[t][t]).is_zero() {
                        bad = Some(i);
                        break 'outer;
                    }
                }
            }
            match bad {
                Some(i) => w.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        if w.a[t][t].is_negative() {
            w.negate_row(t);
        }
    }
    let diag = (0..n).map(|i| w.a[i][i].clone()).collect();
    let z = RingTag::Integers;
    Ok(SmithForm {
        diag,
        left: SparseMatrix::from_dense(&w.l, rows, z),
        right: SparseMatrix::from_dense(&w.r, cols, z),
        left_inverse: SparseMatrix::from_dense(&w.linv, rows, z),
        right_inverse: SparseMatrix::from_dense(&w.rinv, cols, z),
    })
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.diag.iter().filter(|d| !d.is_zero()).count()
    }

    /// Diagonal form as a sparse matrix of the original shape.
    pub fn diagonal_matrix(&self) -> SparseMatrix {
        let (rows, cols) = (self.left.rows(), self.right.rows());
        let entries = self
            .diag
            .iter()
            .enumerate()
            .map(|(i, d)| (i, i, d.clone()))
            .collect::<Vec<_>>();
        SparseMatrix::from_entries(rows, cols, RingTag::Integers, entries).expect("diagonal fits")
    }

    /// Checks `left * m * right = D`, both inverses, and the divisibility chain.
    pub fn verify(&self, m: &SparseMatrix) -> Result<bool> {
        let lmr = self.left.mul(m)?.mul(&self.right)?;
        let ok_form = lmr == self.diagonal_matrix();
        let ok_l = self.left.mul(&self.left_inverse)? == SparseMatrix::identity(m.rows(), RingTag::Integers);
        let ok_r = self.right.mul(&self.right_inverse)? == SparseMatrix::identity(m.cols(), RingTag::Integers);
        let ok_div = self.diag.windows(2).all(|w| {
            if w[0].is_zero() {
                w[1].is_zero()
            } else {
                (&w[1] % &w[0]).is_zero()
            }
        }) && self.diag.iter().all(|d| !d.is_negative());
        Ok(ok_form && ok_l && ok_r && ok_div)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> SparseMatrix {
        let dense: Dense = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let cols = rows.first().map_or(0, |r| r.len());
        SparseMatrix::from_dense(&dense, cols, RingTag::Integers)
    }

    #[test]
    fn hand_examples() {
        let m = mat(&[&[2, 4], &[6, 8]]);
        let s = smith_normal_form(&m).unwrap();
        assert_eq!(s.diag, vec![BigInt::from(2), BigInt::from(4)]);
        assert!(s.verify(&m).unwrap());

        let m = mat(&[&[3, 0], &[0, 1]]);
        let s = smith_normal_form(&m).unwrap();
        assert_eq!(s.diag, vec![BigInt::from(1), BigInt::from(3)]);
        assert!(s.verify(&m).unwrap());

        let m = SparseMatrix::zero(0, 0, RingTag::Integers);
        let s = smith_normal_form(&m).unwrap();
        assert!(s.diag.is_empty());
        assert!(s.verify(&m).unwrap());
    }

    #[test]
    fn coprime_entries_need_gcd_steps() {
        let m = mat(&[&[2, 0], &[0, 3]]);
        let s = smith_normal_form(&m).unwrap();
        assert_eq!(s.diag, vec![BigInt::from(1), BigInt::from(6)]);
        assert!(s.verify(&m).unwrap());
    }
}
