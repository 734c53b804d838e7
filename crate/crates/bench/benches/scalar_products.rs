use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use gaudin_bench::{chain, on_shell_roots, spectral};
use gaudin_core::bethe::Kind;
use gaudin_core::scalar::{
    partition_bruteforce, partition_det, partition_recursive, s11_bruteforce, s11_det,
};

fn bench_partition_triangle(c: &mut Criterion) {
    let mut group = c.benchmark_group("partition");
    for n in [2usize, 4, 6] {
        let params = chain(n);
        let ubar = spectral(n);
        group.bench_with_input(BenchmarkId::new("determinant", n), &n, |b, _| {
            b.iter(|| partition_det(Kind::Two, black_box(&ubar), &params.z, &params).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("recursion", n), &n, |b, _| {
            b.iter(|| partition_recursive(Kind::Two, black_box(&ubar), &params.z, &params).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("bruteforce", n), &n, |b, _| {
            b.iter(|| {
                partition_bruteforce(Kind::Two, black_box(&ubar), &params.z, &params).unwrap()
            })
        });
    }
    group.finish();
}

fn bench_scalar_product(c: &mut Criterion) {
    let params = chain(4);
    let roots = on_shell_roots(&params);
    let u = spectral(2);
    c.bench_function("s11_det_m2", |b| {
        b.iter(|| s11_det(black_box(&u), &roots, &params).unwrap())
    });
    c.bench_function("s11_bruteforce_m2", |b| {
        b.iter(|| s11_bruteforce(black_box(&u), &roots.roots, &params).unwrap())
    });
}

criterion_group!(benches, bench_partition_triangle, bench_scalar_product);
criterion_main!(benches);
