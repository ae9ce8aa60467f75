use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use stokes_bench::*;
use stokes_core::descent::{descend, DescentOptions};
use stokes_core::oracle::{numeric_dominance, section_dimension, GridSpec, RegionSample};
use stokes_core::sectors::compare_on_sector;
use stokes_core::stokesdata::validate;
use stokes_core::*;

fn field_arithmetic(c: &mut Criterion) {
    for (name, k) in [("gaussian", FieldSpec::gaussian()), ("zeta5", FieldSpec::cyclotomic5())] {
        let xs = elements(&k, 64, 1);
        c.bench_function(&format!("field/mul_inv/{name}"), |b| {
            b.iter(|| {
                let mut acc = FieldElement::one(&k);
                for x in &xs {
                    acc = &(&acc * x) * &x.inv().unwrap();
                }
                black_box(acc)
            })
        });
    }
}

fn comparison(c: &mut Criterion) {
    let k = FieldSpec::gaussian();
    let cases = comparisons(&k, 64, 2);
    c.bench_function("sectors/compare_on_sector", |b| {
        b.iter(|| {
            for (phi, psi, s) in &cases {
                black_box(compare_on_sector(phi, psi, s).unwrap());
            }
        })
    });
    let grid = GridSpec::default();
    c.bench_function("oracle/numeric_dominance", |b| {
        b.iter(|| {
            for (phi, psi, s) in &cases[..16] {
                black_box(numeric_dominance(phi, psi, s, &grid));
            }
        })
    });
}

fn stokes_data(c: &mut Criterion) {
    let ds = data(&FieldSpec::gaussian(), 16, 3);
    c.bench_function("stokesdata/validate", |b| {
        b.iter(|| {
            for d in &ds {
                black_box(validate(d));
            }
        })
    });
    let (d, gs) = descent_case(&FieldSpec::gaussian(), 4);
    let q = FieldSpec::rationals();
    c.bench_function("descent/descend_qi_q", |b| {
        b.iter(|| black_box(descend(&d, &gs, &q, &DescentOptions::default()).unwrap()))
    });
}

fn sections(c: &mut Criterion) {
    let q = FieldSpec::rationals();
    let (phi, _, w) = comparisons(&q, 1, 5).remove(0);
    let es = ExponentialSum::simple(vec![phi]).unwrap();
    let grid = GridSpec::default();
    let u = RegionSample::over_sector(&w);
    let mut g = c.benchmark_group("oracle");
    g.sample_size(10);
    g.bench_function("section_dimension", |b| b.iter(|| black_box(section_dimension(&es, &u, &w, &grid).unwrap())));
    g.finish();
}

criterion_group!(benches, field_arithmetic, comparison, stokes_data, sections);
criterion_main!(benches);
