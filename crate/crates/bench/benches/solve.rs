use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use spinchain::lanczos::lowest_eigenpairs;
use spinchain_bench::{blbq_fixture, dimer_fixture};

fn bench_ground_state(c: &mut Criterion) {
    let mut group = c.benchmark_group("lowest_eigenpairs");
    group.sample_size(10);
    for length in [10usize, 12, 14] {
        let (bonds, basis) = dimer_fixture(length);
        group.bench_with_input(BenchmarkId::new("dimer_k1", length), &length, |b, _| {
            b.iter(|| lowest_eigenpairs(&bonds, &basis, 1, 7).unwrap());
        });
    }
    for length in [6usize, 8] {
        let (bonds, basis) = blbq_fixture(length);
        group.bench_with_input(BenchmarkId::new("blbq_k2", length), &length, |b, _| {
            b.iter(|| lowest_eigenpairs(&bonds, &basis, 2, 7).unwrap());
        });
    }
    group.finish();
}

fn bench_sector_build(c: &mut Criterion) {
    let mut group = c.benchmark_group("sector_build");
    group.sample_size(10);
    for length in [16usize, 20] {
        group.bench_with_input(BenchmarkId::new("spin_half", length), &length, |b, &l| {
            b.iter(|| spinchain::SectorBasis::build(spinchain::SiteKind::SpinHalf, l, 0).unwrap());
        });
    }
    group.finish();
}

criterion_group!(benches, bench_ground_state, bench_sector_build);
criterion_main!(benches);
