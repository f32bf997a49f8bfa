use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use f2lab_core::bias::{bias_bruteforce, bias_exact, bias_mc, corr_partition_form};
use f2lab_core::f2linalg::rank_u64;
use f2lab_core::rank::{rank_count, rank_exact};
use f2lab_core::tensors::{explicit_form_tensor, trace_tensor};
use f2lab_core::DenseTensor;

fn rank(c: &mut Criterion) {
    let rows: Vec<u64> = (0..64u64).map(|i| i.wrapping_mul(0x9e37_79b9_7f4a_7c15)).collect();
    c.bench_function("rank_u64 64x64", |b| b.iter(|| rank_u64(&mut black_box(rows.clone()))));
    c.bench_function("rank_count n=16", |b| b.iter(|| rank_count(black_box(16)).unwrap()));
}

fn bias(c: &mut Criterion) {
    let mut g = c.benchmark_group("bias trace");
    for k in [8, 12, 16] {
        let t = trace_tensor(k).unwrap();
        g.bench_with_input(BenchmarkId::new("exact", k), &t, |b, t| {
            b.iter(|| bias_exact(t).unwrap())
        });
    }
    let t = trace_tensor(6).unwrap();
    g.bench_function("brute k=6", |b| b.iter(|| bias_bruteforce(&t).unwrap()));
    g.bench_function("mc k=16 10^4", |b| {
        let t = trace_tensor(16).unwrap();
        b.iter(|| bias_mc(&t, 10_000, 0.95, 1).unwrap())
    });
    g.finish();
}

fn correlation(c: &mut Criterion) {
    let f = explicit_form_tensor(4, 4).unwrap();
    let parts: Vec<DenseTensor> = (0..4).map(|i| DenseTensor::random(3, 4, i).unwrap()).collect();
    c.bench_function("partition-form correlation d=4 k=4", |b| {
        b.iter(|| corr_partition_form(&f, &parts).unwrap())
    });
}

fn search(c: &mut Criterion) {
    let t = trace_tensor(2).unwrap();
    let mut g = c.benchmark_group("rank search");
    g.sample_size(10);
    g.bench_function("trace_2 t_max=4", |b| b.iter(|| rank_exact(&t, 4).unwrap()));
    g.finish();
}

criterion_group!(benches, rank, bias, correlation, search);
criterion_main!(benches);
