use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use qfa_bench::{m_alpha, palindromes, rot90, two_letter};
use qfa_core::closure::{compile, expr_for_language};
use qfa_core::poly::{clear_invariant_cache, invariant_space};
use qfa_core::ratmat::rat;

fn invariants(c: &mut Criterion) {
    let mut g = c.benchmark_group("invariant_space");
    for d in 1..=4 {
        g.bench_with_input(BenchmarkId::new("m_alpha", d), &d, |b, &d| {
            b.iter(|| {
                clear_invariant_cache();
                invariant_space(2, black_box(&[m_alpha()]), d).unwrap()
            })
        });
        g.bench_with_input(BenchmarkId::new("rot90", d), &d, |b, &d| {
            b.iter(|| {
                clear_invariant_cache();
                invariant_space(2, black_box(&[rot90()]), d).unwrap()
            })
        });
    }
    g.finish();
}

fn compile_palindromes(c: &mut Criterion) {
    let q = two_letter(rat(1, 2));
    let e = expr_for_language(&palindromes(), &q).unwrap();
    let mut g = c.benchmark_group("compile_palindromes");
    g.sample_size(10);
    for d in 1..=2 {
        g.bench_with_input(BenchmarkId::from_parameter(d), &d, |b, &d| {
            b.iter(|| {
                clear_invariant_cache();
                compile(black_box(&e), d).unwrap()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, invariants, compile_palindromes);
criterion_main!(benches);
