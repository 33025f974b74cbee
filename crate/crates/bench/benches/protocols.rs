use std::hint::black_box;

use coordsum_core::{
    brute_sumset, DapFamily, DenseSet, PrimeModulus, PublicRandomness, SumDistInstance,
    SumDistProtocol, SumEqualInstance, SumEqualProtocol,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MERSENNE_61: u64 = (1 << 61) - 1;

fn inputs_summing_to(target: u64, k: usize, p: u64) -> Vec<u64> {
    let mut xs: Vec<u64> = (0..k as u64).map(|i| (i * 0x9e37_79b9 + 11) % p).collect();
    let partial = xs[..k - 1]
        .iter()
        .fold(0u64, |a, &x| ((a as u128 + x as u128) % p as u128) as u64);
    xs[k - 1] = ((target as u128 + p as u128 - partial as u128) % p as u128) as u64;
    xs
}

fn sumdist(c: &mut Criterion) {
    let mut group = c.benchmark_group("sumdist/evaluate");
    for (p, k) in [
        (101u64, 4usize),
        (1_000_003, 16),
        (MERSENNE_61, 16),
        (MERSENNE_61, 256),
    ] {
        let proto = SumDistProtocol::new(
            SumDistInstance::new(PrimeModulus::new(p).unwrap(), k, 3, 7).unwrap(),
        )
        .unwrap();
        let xs = inputs_summing_to(7, k, p);
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("p={p},k={k}")),
            &xs,
            |b, xs| b.iter(|| proto.evaluate(black_box(xs))),
        );
    }
    group.finish();

    let proto = SumDistProtocol::new(
        SumDistInstance::new(PrimeModulus::new(MERSENNE_61).unwrap(), 16, 3, 7).unwrap(),
    )
    .unwrap();
    let xs = inputs_summing_to(3, 16, MERSENNE_61);
    c.bench_function("sumdist/run-with-transcript", |b| {
        b.iter(|| proto.run(black_box(&xs)).unwrap().1.pack())
    });
}

fn sumsets(c: &mut Criterion) {
    let mut group = c.benchmark_group("sumset");
    for (p, d, k) in [(101u64, 9u64, 4usize), (1009, 17, 4), (4099, 33, 4)] {
        let prime = PrimeModulus::new(p).unwrap();
        let family = DapFamily::new(prime, d).unwrap();
        let bases: Vec<u64> = (0..k as u64).map(|i| (3 * i + 1) % d).collect();
        let dense: Vec<DenseSet> = bases
            .iter()
            .map(|&b| family.dap(b).unwrap().to_dense().unwrap())
            .collect();
        let label = format!("p={p},D={d},k={k}");
        group.bench_with_input(BenchmarkId::new("interval", &label), &bases, |b, bases| {
            b.iter(|| {
                family
                    .sumset_of_bases(black_box(bases).iter().copied())
                    .len()
            })
        });
        group.bench_with_input(
            BenchmarkId::new("brute-force", &label),
            &dense,
            |b, dense| b.iter(|| brute_sumset(black_box(dense)).unwrap().len()),
        );
    }
    group.finish();
}

fn sumequal(c: &mut Criterion) {
    let mut group = c.benchmark_group("sumequal");
    for (p, k, eps) in [(101u64, 3usize, "1/10"), (1009, 8, "1/4")] {
        let proto = SumEqualProtocol::new(
            SumEqualInstance::new(PrimeModulus::new(p).unwrap(), k, 5, eps.parse().unwrap())
                .unwrap(),
        )
        .unwrap();
        let xs = inputs_summing_to(6, k, p);
        let label = format!("p={p},k={k},eps={eps}");
        group.bench_with_input(BenchmarkId::new("run", &label), &xs, |b, xs| {
            b.iter(|| {
                proto
                    .run(black_box(xs), PublicRandomness::new(42))
                    .unwrap()
                    .0
            })
        });
        group.bench_with_input(BenchmarkId::new("exact-error", &label), &xs, |b, xs| {
            b.iter(|| proto.exact_error(black_box(xs)).unwrap().failing)
        });
    }
    group.finish();
}

criterion_group!(benches, sumdist, sumsets, sumequal);
criterion_main!(benches);
