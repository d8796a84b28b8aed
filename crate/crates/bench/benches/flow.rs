use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use wmflat_core::corpus::double_pentagon;
use wmflat_core::diagnostics::{correlation_cesaro, veech_tracker, CorrelationOptions, Observable};
use wmflat_core::flow::{first_return_iet, FlowSurface, Start};
use wmflat_core::surface::square_torus;
use wmflat_core::{FieldElement, NumberField, PlanarVector};

fn golden_iet(c: &mut Criterion) {
    let f = NumberField::golden();
    let d = PlanarVector::new(FieldElement::one(&f), FieldElement::theta(&f));
    let (fs, framed) = FlowSurface::exact(&square_torus(), &d, &[0]).unwrap();
    let tr = fs.transversal(Start::Corner(0, 0), &FieldElement::one(&framed.field)).unwrap();
    c.bench_function("first return golden torus", |b| {
        b.iter(|| black_box(first_return_iet(&fs, &tr, None, 10_000).unwrap()))
    });
    let iet = first_return_iet(&fs, &tr, None, 10_000).unwrap();
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    c.bench_function("tracker 20 steps", |b| b.iter(|| black_box(veech_tracker(&iet, (1.0, phi), 1.0, 20).unwrap())));
}

fn correlation(c: &mut Criterion) {
    let s = double_pentagon();
    let bump = Observable::incenter_bump(&s, 0, 0.02).unwrap();
    let opts = CorrelationOptions { t_values: vec![10.0, 100.0], n_samples: 100, replicates: 2, steps_per_segment: 50, seed: 7 };
    let mut g = c.benchmark_group("correlation");
    g.sample_size(10);
    g.bench_function("pentagon bump", |b| {
        b.iter(|| black_box(correlation_cesaro(&s, (0.3, 1.0), &bump, &bump, &opts).unwrap()))
    });
    g.finish();
}

criterion_group!(benches, golden_iet, correlation);
criterion_main!(benches);
