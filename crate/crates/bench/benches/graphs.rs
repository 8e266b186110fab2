use std::hint::black_box;

use bilzh_bench::spec;
use bilzh_core::graph::clique::clique_number;
use bilzh_core::graph::{materialize, RankTable};
use criterion::{criterion_group, criterion_main, Criterion};

fn graphs(c: &mut Criterion) {
    let mut group = c.benchmark_group("bil_1");
    group.sample_size(10);
    for (h, n) in [(3, 2), (4, 2), (2, 3)] {
        let s = spec(h, 2, n, 1);
        group.bench_function(format!("rank table Z_{h} 2x{n}"), |b| {
            b.iter(|| black_box(RankTable::new(&s, u64::MAX).unwrap()))
        });
        let g = materialize(&s, u64::MAX).unwrap();
        group.bench_function(format!("clique number Z_{h} 2x{n}"), |b| {
            b.iter(|| black_box(clique_number(g.rows())))
        });
    }
    group.finish();
}

criterion_group!(benches, graphs);
criterion_main!(benches);
