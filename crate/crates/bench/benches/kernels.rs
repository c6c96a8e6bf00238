//! Benchmarks for the hot kernels: field arithmetic, curve enumeration,
//! orbit counting, and semigroup construction.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use hermquot::autos::{closure, generator_T, CaseId};
use hermquot::gf;
use hermquot::hermitian::{self, ModelId};
use hermquot::quotient;
use hermquot::semigroup;

fn field_arithmetic(c: &mut Criterion) {
    let f = gf::make_field(3, 14).unwrap();
    let lt = f.log_table();
    let m = f.cardinality() - 1;
    c.bench_function("gf/log_mul_3_14", |b| {
        b.iter(|| {
            let mut acc = 0u64;
            for x in 1..10_000u64 {
                let lx = lt.log[x as usize] as u64;
                acc ^= lt.pow[((lx + lx) % m) as usize] as u64;
            }
            black_box(acc)
        })
    });
    let g = f.primitive_element();
    c.bench_function("gf/element_mul_3_14", |b| {
        let x = g.pow(12345);
        let y = g.pow(54321);
        b.iter(|| black_box(&x * &y))
    });
    c.bench_function("gf/make_field_3_14", |b| {
        b.iter(|| black_box(gf::make_field(3, 14).unwrap()))
    });
}

fn curve_enumeration(c: &mut Criterion) {
    let m1 = hermitian::model(ModelId::M1, 8).unwrap();
    let ext = gf::make_field(2, 6).unwrap();
    c.bench_function("hermitian/enumerate_m1_q8", |b| {
        b.iter(|| black_box(hermitian::enumerate_points(&m1, &ext).unwrap().len()))
    });
}

fn orbit_counting(c: &mut Criterion) {
    let (tmap, model) = generator_T(CaseId::IV1, 5, 3).unwrap();
    let grp = closure(&[tmap], 3).unwrap();
    let ext = gf::make_field(5, 6).unwrap();
    c.bench_function("quotient/point_count_iv1_q5_d3", |b| {
        b.iter(|| black_box(quotient::quotient_point_count(&grp, &model, &ext, 0).unwrap()))
    });
}

fn semigroups(c: &mut Criterion) {
    c.bench_function("semigroup/from_generators_64_65", |b| {
        b.iter(|| black_box(semigroup::from_generators(&[64, 65]).unwrap().genus()))
    });
    let s = semigroup::semigroup_S(23).unwrap();
    c.bench_function("semigroup/filter_divide_q23", |b| {
        b.iter(|| black_box(semigroup::filter_divide(&s, 3).genus()))
    });
}

criterion_group!(
    benches,
    field_arithmetic,
    curve_enumeration,
    orbit_counting,
    semigroups
);
criterion_main!(benches);
