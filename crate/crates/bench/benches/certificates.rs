use criterion::{criterion_group, criterion_main, Criterion};

use pvscale_core::catalog::lookup;
use pvscale_core::scaling_lab::{measure_scaling_limit, LimitGrid};
use pvscale_core::{Claim, GridSpec, PVConfig, DEFAULT_SEED};

fn certificates(c: &mut Criterion) {
    let cfg = PVConfig::default();
    let mut g = c.benchmark_group("certify");
    g.sample_size(10);
    for claim in [Claim::ConvolutionWeight, Claim::KernelLimit, Claim::ChiBrackets, Claim::OuterTail, Claim::HBounded] {
        g.bench_function(claim.name(), |b| b.iter(|| claim.certify(&cfg, DEFAULT_SEED).unwrap()));
    }
    g.finish();

    let mut g = c.benchmark_group("limit_study");
    g.sample_size(10);
    let phi = lookup("poly:1").unwrap();
    let lambdas = GridSpec::default_lambdas();
    g.bench_function("poly:1 default lambdas", |b| {
        b.iter(|| measure_scaling_limit(&phi, &lambdas, &LimitGrid::default(), 1, &cfg).unwrap())
    });
    g.finish();
}

criterion_group!(benches, certificates);
criterion_main!(benches);
