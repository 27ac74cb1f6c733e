//! Seeded random DG algebras over Z for property tests: square-zero complexes
//! in disguised bases, their tensor products, and truncated free algebras.

use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::dga::{unit_products, BasisElement, DGAlgebra, Table};
use crate::error::Result;
use crate::lin::{sign, Vector};
use crate::presets;
use crate::ring::RingTag;

const Z: RingTag = RingTag::Integers;

type Dense = Vec<Vec<i64>>;

fn identity(n: usize) -> Dense {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

fn matmul(a: &Dense, b: &Dense, inner: usize) -> Dense {
    let cols = b.first().map_or(0, Vec::len);
    a.iter().map(|row| (0..cols).map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum()).collect()).collect()
}

/// Random unimodular matrix with its inverse, as a product of elementary moves.
fn unimodular(rng: &mut StdRng, n: usize) -> (Dense, Dense) {
    let (mut u, mut inv) = (identity(n), identity(n));
    if n < 2 {
        return (u, inv);
    }
    for _ in 0..3 {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let k: i64 = if rng.gen_bool(0.5) { 1 } else { -1 };
        // U ← U·(I + k e_ij), U⁻¹ ← (I − k e_ij)·U⁻¹
        for row in u.iter_mut() {
            row[j] += k * row[i];
        }
        let ri = inv[j].clone();
        for (c, v) in inv[i].iter_mut().enumerate() {
            *v -= k * ri[c];
        }
    }
    (u, inv)
}

/// Square-zero algebra whose differential is a sum of blocks d e = c·f and
/// isolated cycles, conjugated by unimodular changes of basis in each degree.
pub fn random_square_zero(rng: &mut StdRng, max_dim: usize, max_degree: usize) -> Result<DGAlgebra> {
    let mut degrees: Vec<usize> = Vec::new();
    // (source index, target index, coefficient) in the standard basis
    let mut blocks = Vec::new();
    let mut have_two = false;
    while degrees.len() < max_dim {
        let mut d = rng.gen_range(2..=max_degree);
        if d == 2 && have_two {
            d = 3;
        }
        have_two |= d == 2;
        if degrees.len() + 2 <= max_dim && d < max_degree && rng.gen_bool(0.5) {
            blocks.push((degrees.len(), degrees.len() + 1, rng.gen_range(1..=3i64)));
            degrees.push(d);
            degrees.push(d + 1);
        } else {
            degrees.push(d);
        }
        if rng.gen_bool(0.25) {
            break;
        }
    }
    let top = degrees.iter().copied().max().unwrap_or(0);
    let by_degree: Vec<Vec<usize>> = (0..=top + 1).map(|n| (0..degrees.len()).filter(|&i| degrees[i] == n).collect()).collect();
    let changes: Vec<(Dense, Dense)> = by_degree.iter().map(|v| unimodular(rng, v.len())).collect();
    let pos = |i: usize| by_degree[degrees[i]].iter().position(|&j| j == i).expect("indexed");

    let mut diff = vec![Vector::new(); degrees.len() + 1];
    for n in 2..=top {
        let (src, tgt) = (&by_degree[n], &by_degree[n + 1]);
        if src.is_empty() || tgt.is_empty() {
            continue;
        }
        let mut d: Dense = vec![vec![0; src.len()]; tgt.len()];
        for &(s, t, c) in &blocks {
            if degrees[s] == n {
                d[pos(t)][pos(s)] = c;
            }
        }
        let conj = matmul(&matmul(&changes[n + 1].1, &d, tgt.len()), &changes[n].0, src.len());
        for (jj, &j) in src.iter().enumerate() {
            diff[j + 1] = Vector::from_terms(tgt.iter().enumerate().map(|(ii, &i)| (i + 1, BigInt::from(conj[ii][jj]))), Z);
        }
    }
    let mut basis = vec![BasisElement { name: "1".into(), degree: 0 }];
    basis.extend(degrees.iter().enumerate().map(|(i, &d)| BasisElement { name: format!("g{}", i + 1), degree: d }));
    let n = basis.len();
    DGAlgebra::new(Z, basis, diff, unit_products(n), Vector::single(0), Vector::single(0), Some(Table::new()))
}

/// Free associative algebra on generators, truncated above `top`; some
/// generators come in pairs d x = c·y, extended as a derivation.
pub fn random_free_truncated(rng: &mut StdRng, top: usize) -> Result<DGAlgebra> {
    let mut gens: Vec<usize> = Vec::new();
    let mut gen_diff: Vec<Option<(usize, i64)>> = Vec::new();
    let first = rng.gen_range(2..=3);
    if rng.gen_bool(0.5) {
        gens.extend([first, first + 1]);
        gen_diff.extend([Some((1, rng.gen_range(1..=3))), None]);
    } else {
        gens.push(first);
        gen_diff.push(None);
        let g = rng.gen_range(3..=4);
        gens.push(g);
        gen_diff.push(None);
    }
    let mut words: Vec<Vec<usize>> = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for w in &frontier {
            let d: usize = w.iter().map(|&g| gens[g]).sum();
            for (g, &dg) in gens.iter().enumerate() {
                if d + dg <= top {
                    let mut w2: Vec<usize> = w.clone();
                    w2.push(g);
                    next.push(w2);
                }
            }
        }
        words.extend(next.iter().cloned());
        frontier = next;
    }
    let deg = |w: &[usize]| w.iter().map(|&g| gens[g]).sum::<usize>();
    words.sort_by_key(|w| (deg(w), w.clone()));
    let index = |w: &[usize]| words.iter().position(|x| x == w);
    let name = |w: &[usize]| if w.is_empty() { "1".to_string() } else { w.iter().map(|g| format!("x{}", g + 1)).collect::<Vec<_>>().join("") };

    let basis = words.iter().map(|w| BasisElement { name: name(w), degree: deg(w) }).collect();
    let mut diff = Vec::with_capacity(words.len());
    for w in &words {
        let mut v = Vector::new();
        let mut prefix = 0;
        for (k, &g) in w.iter().enumerate() {
            if let Some((t, c)) = gen_diff[g] {
                let mut w2 = w.clone();
                w2[k] = t;
                if let Some(i) = index(&w2) {
                    v.add_term(i, &(sign(prefix as i64) * c), Z);
                }
            }
            prefix += gens[g];
        }
        diff.push(v);
    }
    let mut product = Table::new();
    for (i, a) in words.iter().enumerate() {
        for (j, b) in words.iter().enumerate() {
            let ab: Vec<usize> = a.iter().chain(b).copied().collect();
            if let Some(k) = index(&ab) {
                product.insert((i, j), Vector::single(k));
            }
        }
    }
    DGAlgebra::new(Z, basis, diff, product, Vector::single(0), Vector::single(0), None)
}

/// One random algebra with a short description of its construction.
pub fn random_dga(rng: &mut StdRng) -> Result<(String, DGAlgebra)> {
    Ok(match rng.gen_range(0..3) {
        0 => ("square-zero".into(), random_square_zero(rng, 4, 6)?),
        1 => {
            let a = random_square_zero(rng, 2, 4)?;
            let b = random_square_zero(rng, 2, 5)?;
            ("tensor of square-zero".into(), presets::tensor(&a, &b)?)
        }
        _ => ("truncated free".into(), random_free_truncated(rng, 8)?),
    })
}

/// `count` algebras from a fixed seed.
pub fn random_suite(seed: u64, count: usize) -> Result<Vec<(String, DGAlgebra)>> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count).map(|_| random_dga(&mut rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_algebras_are_valid() {
        for (what, a) in random_suite(7, 30).unwrap() {
            let r = a.check_invariants();
            assert!(r.all_passed(), "{what}: {r:?}");
            assert!(a.check_bar_ready().is_ok(), "{what}");
        }
    }

    #[test]
    fn square_zero_changes_basis() {
        let mut rng = StdRng::seed_from_u64(3);
        let a = random_square_zero(&mut rng, 4, 5).unwrap();
        let (c6, c7) = a.check_cup_one();
        assert!(c6.passed && c7.passed);
    }

    #[test]
    fn seeds_are_deterministic() {
        let a = random_suite(11, 5).unwrap();
        let b = random_suite(11, 5).unwrap();
        for ((_, x), (_, y)) in a.iter().zip(&b) {
            assert_eq!(crate::io::dga_to_json(x), crate::io::dga_to_json(y));
        }
    }
}
