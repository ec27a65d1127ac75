use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use isostokes::continuation::connection_coefficients;
use isostokes::deformation::transport;
use isostokes::frobenius::{build_fuchsian, selected_solution};
use isostokes::laplace::{contour_direction, formal_recursion, laplace_matrix};
use isostokes::model::label_rays;
use isostokes::stokes::stokes_direct;
use isostokes::{CutPlane, Settings, C64};
use isostokes_bench::{generic_system, TAU};
use std::f64::consts::PI;

fn cut() -> CutPlane {
    CutPlane::new(1.5 * PI - TAU)
}

fn local_series(c: &mut Criterion) {
    let s = Settings::default();
    let fs = build_fuchsian(&generic_system(3));
    c.bench_function("frobenius::selected_solution n=3", |b| {
        b.iter(|| selected_solution(&fs, 0, cut(), s.series_order, &s).unwrap())
    });
}

fn connection(c: &mut Criterion) {
    let s = Settings::default();
    let mut group = c.benchmark_group("continuation::connection_coefficients");
    group.sample_size(10);
    for n in [2, 3, 4] {
        let fs = build_fuchsian(&generic_system(n));
        group.bench_with_input(BenchmarkId::from_parameter(n), &fs, |b, fs| {
            b.iter(|| connection_coefficients(fs, cut(), &s).unwrap())
        });
    }
    group.finish();
}

fn formal(c: &mut Criterion) {
    let s = Settings::default();
    let sys = generic_system(4);
    c.bench_function("laplace::formal_recursion n=4 L=12", |b| b.iter(|| formal_recursion(&sys, 12, &[], &s).unwrap()));
}

fn laplace(c: &mut Criterion) {
    let s = Settings::default();
    let fs = build_fuchsian(&generic_system(2));
    let theta = contour_direction(cut().eta, 0);
    let z = C64::from_polar(10.0, PI - theta);
    let mut group = c.benchmark_group("laplace::laplace_matrix");
    group.sample_size(10);
    group.bench_function("n=2 |z|=10", |b| b.iter(|| laplace_matrix(&fs, theta, z, &s).unwrap()));
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let s = Settings::default();
    let sys = generic_system(2);
    let labels = label_rays(sys.u(), TAU, &s).unwrap();
    let mut group = c.benchmark_group("stokes::stokes_direct");
    group.sample_size(10);
    group.bench_function("n=2", |b| b.iter(|| stokes_direct(&sys, &labels, &s).unwrap()));
    group.finish();
}

fn deformation(c: &mut Criterion) {
    let s = Settings::default();
    let sys = generic_system(3);
    let target: Vec<C64> = sys.u().iter().map(|u| u * C64::from_polar(1.1, 0.1)).collect();
    c.bench_function("deformation::transport n=3", |b| b.iter(|| transport(&sys, &target, &s).unwrap()));
}

criterion_group!(benches, local_series, connection, formal, laplace, oracle, deformation);
criterion_main!(benches);
