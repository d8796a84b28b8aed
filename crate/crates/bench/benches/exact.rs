use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use wmflat_core::field::angle_field;
use wmflat_core::polygon::triangle;
use wmflat_core::{classify_polygon, classify_polygon_with, homology_basis, period_matrix, unfold, ClassifyOptions, FieldElement, NumberField, RationalAngle};

fn tri(a: i64, b: i64, c: i64) -> [RationalAngle; 3] {
    let k = a + b + c;
    [a, b, c].map(|x| RationalAngle::new(x, k).unwrap())
}

fn field_ops(c: &mut Criterion) {
    let f = angle_field(11).field;
    let y = FieldElement::theta(&f);
    let x = (1..=10).fold(FieldElement::zero(&f), |acc, i| &(&acc * &y) + &FieldElement::from_ratio(&f, i, i + 1));
    c.bench_function("mul k=11", |b| b.iter(|| black_box(&x * &y)));
    c.bench_function("inv k=11", |b| b.iter(|| black_box(x.inv())));
    c.bench_function("sign k=11", |b| b.iter(|| black_box((&x - &y).sign())));
    let g = NumberField::golden();
    c.bench_function("compose k=7 golden", |b| {
        let f7 = angle_field(7).field;
        b.iter(|| black_box(wmflat_core::field::compose_fields_with_bound(&f7, &g, 64).unwrap()))
    });
}

fn pipeline(c: &mut Criterion) {
    let mut g = c.benchmark_group("pipeline");
    g.sample_size(10);
    for (a, b, cc) in [(1, 2, 4), (2, 3, 4), (1, 4, 6)] {
        let p = triangle(tri(a, b, cc)).unwrap();
        let name = format!("{a},{b},{cc}");
        g.bench_function(format!("unfold {name}"), |bn| bn.iter(|| black_box(unfold(&p).unwrap())));
        let s = unfold(&p).unwrap();
        g.bench_function(format!("periods {name}"), |bn| {
            bn.iter(|| {
                let basis = homology_basis(&s).unwrap();
                black_box(period_matrix(&s, &basis))
            })
        });
        g.bench_function(format!("classify {name}"), |bn| bn.iter(|| black_box(classify_polygon(&p).unwrap())));
        let exact = ClassifyOptions { exact_cross_check: true };
        g.bench_function(format!("exact kernel {name}"), |bn| {
            bn.iter(|| black_box(classify_polygon_with(&p, exact).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, field_ops, pipeline);
criterion_main!(benches);
