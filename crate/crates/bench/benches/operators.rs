use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use pvscale_core::catalog::lookup;
use pvscale_core::operators::{apply_h, apply_i, apply_i_direct, apply_i_lambda, apply_i_lambda_unsplit};
use pvscale_core::scaling_lab::decompose_a_b;
use pvscale_core::PVConfig;

fn operators(c: &mut Criterion) {
    let cfg = PVConfig::default();
    let sin = lookup("sin").unwrap();
    let cosh_sin = lookup("cosh_sin").unwrap();

    let mut g = c.benchmark_group("single_point");
    g.bench_function("H sin", |b| b.iter(|| apply_h(&sin, black_box(0.7), &cfg).unwrap()));
    g.bench_function("I cosh_sin conjugated", |b| b.iter(|| apply_i(&cosh_sin, black_box(0.7), &cfg).unwrap()));
    g.bench_function("I cosh_sin direct", |b| b.iter(|| apply_i_direct(&cosh_sin, black_box(0.7), &cfg).unwrap()));
    g.finish();

    let mut g = c.benchmark_group("i_lambda_sin");
    for lambda in [16.0, 256.0, 4096.0] {
        g.bench_with_input(BenchmarkId::new("split", lambda), &lambda, |b, &l| {
            b.iter(|| apply_i_lambda(&sin, l, black_box(1.0), &cfg).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("unsplit", lambda), &lambda, |b, &l| {
            b.iter(|| apply_i_lambda_unsplit(&sin, l, black_box(1.0), &cfg).unwrap())
        });
    }
    g.finish();

    let mut g = c.benchmark_group("decomposition_sin");
    g.sample_size(20);
    for lambda in [10.0, 1000.0] {
        g.bench_with_input(BenchmarkId::from_parameter(lambda), &lambda, |b, &l| {
            b.iter(|| decompose_a_b(&sin, l, black_box(1.0), &cfg).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, operators);
criterion_main!(benches);
