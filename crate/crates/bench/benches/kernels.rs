use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use duos_core::bernstein::{bernstein_raw, ArithmeticMode};
use duos_core::certificates::{minimax_double_fit, GridTarget, MinimaxProblem};
use duos_core::cesaro::cesaro_errors;
use duos_core::engine::minimax_fit;
use duos_core::series::{CompactGrid, Spacing};
use duos_core::{FormalSeries, TargetFunction, Window};

fn bernstein(c: &mut Criterion) {
    let h = TargetFunction::parse("abs").unwrap();
    let mut g = c.benchmark_group("bernstein_raw");
    for m in [16usize, 64, 256] {
        g.bench_with_input(BenchmarkId::new("float", m), &m, |b, &m| {
            b.iter(|| bernstein_raw(&h, black_box(m), 1.0, ArithmeticMode::Float).unwrap())
        });
    }
    g.bench_function("rational/64", |b| {
        b.iter(|| bernstein_raw(&h, black_box(64), 1.0, ArithmeticMode::Rational).unwrap())
    });
    g.finish();
}

fn minimax(c: &mut Criterion) {
    let h = TargetFunction::parse("x").unwrap();
    let mut g = c.benchmark_group("minimax_fit");
    g.sample_size(10);
    for (l, m) in [(3usize, 16usize), (17, 256)] {
        let w = Window::new(l, m).unwrap();
        g.bench_function(format!("{l}..{m}"), |b| b.iter(|| minimax_fit(&h, w, 1.0, 0.05)));
    }
    g.finish();
}

fn certificate_lp(c: &mut Criterion) {
    let grid = CompactGrid::interval_with(-1.0, 1.0, 512, Spacing::Chebyshev).unwrap();
    let zero = GridTarget::Function(TargetFunction::zero());
    let x = GridTarget::Function(TargetFunction::identity());
    let mut g = c.benchmark_group("double_fit_lp");
    g.sample_size(10);
    for mu in [4usize, 8] {
        let p = MinimaxProblem::new(mu, 2 * mu, zero.clone(), x.clone(), grid.clone());
        g.bench_with_input(BenchmarkId::from_parameter(mu), &p, |b, p| {
            b.iter(|| minimax_double_fit(p).unwrap())
        });
    }
    g.finish();
}

fn cesaro(c: &mut Criterion) {
    let f = FormalSeries::from_coeffs((0..2000).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect());
    let k = CompactGrid::interval(2.0, 3.0, 65).unwrap();
    let h = TargetFunction::zero();
    c.bench_function("cesaro_errors/2000", |b| b.iter(|| cesaro_errors(&f, &h, &k, black_box(2000)).unwrap()));
}

criterion_group!(benches, bernstein, minimax, certificate_lp, cesaro);
criterion_main!(benches);
