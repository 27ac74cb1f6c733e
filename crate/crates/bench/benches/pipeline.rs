use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dga_bench::{integer_matrix, preset_mod, simplicial_moore};
use dga_core::bar::loop_betti;
use dga_core::hochschild::free_loop_betti;
use dga_core::kraines::session::{run_session, SessionConfig};
use dga_core::linalg::smith_normal_form;
use dga_core::presets;

fn loop_tables(c: &mut Criterion) {
    let mut g = c.benchmark_group("loop_betti");
    g.sample_size(10);
    let a = preset_mod("moore(3,2)", 3);
    for n in [6, 8, 10] {
        g.bench_with_input(BenchmarkId::new("moore(3,2)", n), &n, |b, &n| b.iter(|| loop_betti(black_box(&a), n).unwrap()));
    }
    g.finish();
}

fn free_loop_tables(c: &mut Criterion) {
    let mut g = c.benchmark_group("free_loop_betti");
    g.sample_size(10);
    let t = preset_mod("tensor(truncated_poly(2,2),exterior(3))", 3);
    for n in [6, 9] {
        g.bench_with_input(BenchmarkId::new("s2xs3", n), &n, |b, &n| b.iter(|| free_loop_betti(black_box(&t), n).unwrap()));
    }
    g.finish();
}

fn smith(c: &mut Criterion) {
    let mut g = c.benchmark_group("smith_normal_form");
    for n in [10, 20, 40] {
        let m = integer_matrix(n, n + 3);
        g.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| b.iter(|| smith_normal_form(black_box(m)).unwrap()));
    }
    g.finish();
}

fn kraines(c: &mut Criterion) {
    let mut g = c.benchmark_group("kraines");
    g.sample_size(10);
    let z = presets::moore(3, 2).unwrap();
    g.bench_function("session moore(3,2) n=5", |b| b.iter(|| run_session(black_box(&z), "moore(3,2)", &SessionConfig::new(3, 5)).unwrap()));
    let s = simplicial_moore(3);
    g.bench_function("cup-one identities, simplicial p=3", |b| b.iter(|| black_box(&s).check_cup_one()));
    g.finish();
}

criterion_group!(benches, loop_tables, free_loop_tables, smith, kraines);
criterion_main!(benches);
