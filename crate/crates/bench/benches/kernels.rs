use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use rtflab_bench::{chi5, levels};
use rtflab_core::characters::CharacterGroup;
use rtflab_core::numeric::quadrature::integrate_semicircle;
use rtflab_core::rtf_constants::y_values;
use rtflab_core::spectral_measures::DEFAULT_CELLS;
use rtflab_core::{Density, FieldProfile, QuadraticCharacterProfile, TabulatedCdf};

fn quadrature(c: &mut Criterion) {
    let mut g = c.benchmark_group("mass");
    g.bench_function("mu_ST", |b| b.iter(|| Density::SatoTate.integrate(-2.0, 2.0, 1e-12).unwrap()));
    for q in [2u64, 11] {
        let d = Density::plancherel(q, 1).unwrap();
        g.bench_with_input(BenchmarkId::new("mu_p_plus", q), &d, |b, d| {
            b.iter(|| d.integrate(-2.0, 2.0, 1e-12).unwrap())
        });
    }
    g.bench_function("semicircle_polynomial", |b| {
        b.iter(|| integrate_semicircle(|x| black_box(x).powi(6), -2.0, 2.0, 1e-10).unwrap())
    });
    g.finish();
}

fn cdf(c: &mut Criterion) {
    let d = Density::plancherel(2, 1).unwrap();
    c.bench_function("cdf_table", |b| b.iter(|| TabulatedCdf::new(d, DEFAULT_CELLS).unwrap()));
    let t = TabulatedCdf::new(d, DEFAULT_CELLS).unwrap();
    c.bench_function("cdf_sample_1e4", |b| b.iter(|| t.sample(10_000, 1).unwrap()));
}

fn constants(c: &mut Criterion) {
    let prof = FieldProfile::rational();
    let mut g = c.benchmark_group("y_values");
    for (label, eta) in [("trivial", QuadraticCharacterProfile::trivial()), ("chi5", chi5())] {
        for (n, level) in levels() {
            g.bench_with_input(BenchmarkId::new(label, n), &level, |b, level| {
                b.iter(|| y_values(level, &eta, &prof).unwrap())
            });
        }
    }
    g.finish();
}

fn gauss_sums(c: &mut Criterion) {
    let mut g = c.benchmark_group("gauss_sums");
    for m in [97u64, 360, 1009] {
        let chars = CharacterGroup::new(m).unwrap().characters();
        g.bench_with_input(BenchmarkId::from_parameter(m), &chars, |b, chars| {
            b.iter(|| chars.iter().filter(|c| c.is_primitive()).map(|c| c.gauss_sum().unwrap().norm()).sum::<f64>())
        });
    }
    g.finish();
}

criterion_group!(benches, quadrature, cdf, constants, gauss_sums);
criterion_main!(benches);
