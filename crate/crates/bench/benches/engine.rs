use std::hint::black_box;

use branchlab::diag::{char_sum_check, orbits};
use branchlab::nonfree::{lemma_subsets_verify, tnf_certificate};
use branchlab::{catalog, DEFAULT_BUDGET};
use criterion::{criterion_group, criterion_main, Criterion};

fn measures(c: &mut Criterion) {
    let group = catalog::load("grigorchuk").unwrap().group;
    let g = group.parse_element("abacabadacab").unwrap();
    c.bench_function("fix_measure grigorchuk len-12 word", |b| {
        b.iter(|| group.fix_measure(black_box(&g), DEFAULT_BUDGET).unwrap())
    });
    c.bench_function("minimize grigorchuk len-12 word", |b| b.iter(|| group.minimize(black_box(&g), DEFAULT_BUDGET).unwrap()));
    c.bench_function("fix_measure_level k=20", |b| b.iter(|| group.fix_measure_level(black_box(&g), 20)));
}

fn diagonal(c: &mut Criterion) {
    let group = catalog::load("grigorchuk").unwrap().group;
    let d = group.parse_element("d").unwrap();
    c.bench_function("orbits n=3 level=4", |b| b.iter(|| orbits(&group, 3, black_box(4), DEFAULT_BUDGET).unwrap()));
    c.bench_function("char_sum_check n=2 depth=6", |b| {
        b.iter(|| char_sum_check(&group, 2, black_box(&d), 6, DEFAULT_BUDGET).unwrap())
    });
}

fn certificates(c: &mut Criterion) {
    let group = catalog::load("grigorchuk").unwrap().group;
    let mut slow = c.benchmark_group("certificates");
    slow.sample_size(10);
    slow.bench_function("tnf k=2 radius 3", |b| b.iter(|| tnf_certificate(&group, black_box(2), 3, DEFAULT_BUDGET).unwrap()));
    slow.bench_function("lemma n_max=5", |b| b.iter(|| lemma_subsets_verify(black_box(5)).unwrap()));
    slow.finish();
}

criterion_group!(benches, measures, diagonal, certificates);
criterion_main!(benches);
