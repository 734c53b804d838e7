use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use gaudin_bench::chain;
use gaudin_core::gaudin::{hamiltonian_direct, GaudinSet};
use gaudin_core::vertex::{r_matrix, transfer};
use gaudin_core::C64;

fn bench_r_matrix(c: &mut Criterion) {
    let u = C64::new(0.52, 0.11);
    let eta = C64::new(0.1, 0.0);
    c.bench_function("r_matrix", |b| {
        b.iter(|| r_matrix(black_box(u), black_box(eta), 1e-8).unwrap())
    });
}

fn bench_transfer(c: &mut Criterion) {
    let mut group = c.benchmark_group("transfer");
    for n in [2usize, 4, 6, 8] {
        let params = chain(n);
        let u = C64::new(0.52, 0.0);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| transfer(black_box(u), &params).unwrap())
        });
    }
    group.finish();
}

fn bench_hamiltonian(c: &mut Criterion) {
    let mut group = c.benchmark_group("hamiltonian_direct");
    group.sample_size(20);
    for n in [2usize, 4, 6] {
        let params = chain(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| hamiltonian_direct(1, &params).unwrap())
        });
    }
    group.finish();
}

fn bench_commutator_family(c: &mut Criterion) {
    let params = chain(4);
    c.bench_function("gaudin_set_commutators_n4", |b| {
        b.iter(|| {
            let set = GaudinSet::build(&params).unwrap();
            black_box(set.max_pairwise_commutator_rel())
        })
    });
}

criterion_group!(
    benches,
    bench_r_matrix,
    bench_transfer,
    bench_hamiltonian,
    bench_commutator_family
);
criterion_main!(benches);
