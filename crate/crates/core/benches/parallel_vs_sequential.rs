use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use tsrm_core::stochastic::{sample_ensemble, tsaw_ensemble, EnsembleConfig, McConfig, PathConfig};
use tsrm_core::Execution;

const POLICIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn brownian(c: &mut Criterion) {
    let mut g = c.benchmark_group("brownian_ensemble");
    g.sample_size(10);
    for (name, execution) in POLICIES {
        let cfg = McConfig {
            n_paths: 2000,
            path: PathConfig {
                dt: 1e-3,
                ..PathConfig::default()
            },
            seed: 42,
            execution,
        };
        g.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| black_box(sample_ensemble(0.5, &[0.25, 0.5, 1.0], cfg).unwrap()))
        });
    }
    g.finish();
}

fn tsaw(c: &mut Criterion) {
    let mut g = c.benchmark_group("tsaw_ensemble");
    g.sample_size(10);
    for (name, execution) in POLICIES {
        let cfg = EnsembleConfig {
            n_walks: 2000,
            n_steps: 5000,
            execution,
            ..EnsembleConfig::default()
        };
        g.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| black_box(tsaw_ensemble(cfg).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, brownian, tsaw);
criterion_main!(benches);
