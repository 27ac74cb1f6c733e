//! Fixed workloads shared by the pipeline benchmarks.

use dga_core::reduction::base_change;
use dga_core::simplicial::{cochain_algebra, SimplicialComplex};
use dga_core::{presets, DGAlgebra, RingTag, SparseMatrix};

/// `expr` over F_p.
pub fn preset_mod(expr: &str, p: u64) -> DGAlgebra {
    let a = presets::parse_preset(expr).expect("valid preset");
    base_change(&a, RingTag::field(p).expect("prime")).expect("reducible")
}

pub fn simplicial_moore(p: u64) -> DGAlgebra {
    let k = SimplicialComplex::moore_space(p).expect("triangulation");
    cochain_algebra(&k, RingTag::Integers).expect("cochains")
}

/// Dense integer matrix with a deterministic pseudo-random pattern.
pub fn integer_matrix(rows: usize, cols: usize) -> SparseMatrix {
    let mut state = 0x2545_f491_u64;
    let entries = (0..rows).flat_map(|i| (0..cols).map(move |j| (i, j))).filter_map(|(i, j)| {
        state = state.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1_442_695_040_888_963_407);
        let v = (state >> 59) as i64 - 16;
        (v.abs() < 6 && v != 0).then(|| (i, j, v.into()))
    });
    SparseMatrix::from_entries(rows, cols, RingTag::Integers, entries.collect::<Vec<_>>()).expect("in range")
}
