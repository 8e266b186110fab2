use std::hint::black_box;

use bilzh_bench::sample_matrices;
use bilzh_core::orbits::census_by_enumeration;
use bilzh_core::ring::Ring;
use bilzh_core::smith::{inner_rank, snf};
use criterion::{criterion_group, criterion_main, Criterion};

fn smith(c: &mut Criterion) {
    for (h, k) in [(12, 3), (360, 4), (1 << 10, 6)] {
        let (ring, mats) = sample_matrices(h, k, k, 64);
        c.bench_function(&format!("snf Z_{h} {k}x{k}"), |b| {
            b.iter(|| {
                for a in &mats {
                    black_box(snf(&ring, a).unwrap());
                }
            })
        });
        c.bench_function(&format!("inner_rank Z_{h} {k}x{k}"), |b| {
            b.iter(|| {
                for a in &mats {
                    black_box(inner_rank(&ring, a).unwrap());
                }
            })
        });
    }
}

fn census(c: &mut Criterion) {
    let mut group = c.benchmark_group("census");
    group.sample_size(10);
    for h in [6, 12] {
        let ring = Ring::new(h).unwrap();
        group.bench_function(format!("Z_{h} 2x2"), |b| {
            b.iter(|| black_box(census_by_enumeration(&ring, 2, 2, u64::MAX).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, smith, census);
criterion_main!(benches);
