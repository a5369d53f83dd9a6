use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use num_bigint::BigUint;
use std::hint::black_box;

use spectra_gap::surd::squarefree_decompose;
use spectra_gap::{bound_pair, compute_endpoint, lambda0, markov_sup, RadicalSum};
use spectra_gap_bench::{long_window, preset};

fn values(c: &mut Criterion) {
    let (p, _) = preset("omega1");
    let s = p.biseq("per(21) 1111{w}{w}{ws}{w}{w}212 per(212333)").unwrap();
    c.bench_function("lambda0 long core", |b| b.iter(|| lambda0(black_box(&s))));
    c.bench_function("markov_sup long core", |b| b.iter(|| markov_sup(black_box(&s))));
    let w = long_window(&p);
    c.bench_function("bound_pair 35 letters", |b| b.iter(|| bound_pair(black_box(&w))));
}

fn arithmetic(c: &mut Criterion) {
    let (p, _) = preset("omega2");
    let j = lambda0(&p.biseq("per(21) 111212333211212333* per(211212333)").unwrap());
    let gap = &j - &p.threshold;
    c.bench_function("sign of a 1e-13 gap", |b| b.iter(|| black_box(&gap).sign()));
    let x = RadicalSum::sqrt_int(87);
    c.bench_function("radical sum product", |b| b.iter(|| black_box(&gap) * black_box(&x)));
    // primes of 13 and 28 digits; results are cached, so every round gets a
    // fresh cofactor
    let n: BigUint = "1000000000039000000000000103000000004017".parse().unwrap();
    let mut k = 0u64;
    c.bench_function("squarefree 41 digits", |b| {
        b.iter_batched(
            || {
                k += 1;
                &n * (4 * k + 1)
            },
            |m| squarefree_decompose(&m),
            BatchSize::SmallInput,
        )
    });
}

fn searches(c: &mut Criterion) {
    let (p, l) = preset("omega1");
    let mut g = c.benchmark_group("endpoints");
    g.sample_size(10);
    g.bench_function("omega1 j", |b| b.iter(|| compute_endpoint(&p, &l, "j").unwrap()));
    g.bench_function("omega1 J minimax", |b| b.iter(|| compute_endpoint(&p, &l, "J").unwrap()));
    g.finish();
}

criterion_group!(benches, values, arithmetic, searches);
criterion_main!(benches);
