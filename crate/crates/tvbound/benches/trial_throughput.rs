//! Trial throughput of the coverage engine, sequential versus
//! data-parallel, on a fixed mid-size config. Both modes produce
//! identical output; this measures only how fast the trials run.

use std::time::Duration;

use criterion::{criterion_group, criterion_main, Criterion};

use tvbound::bounds::BoundKind;
use tvbound::exec::ExecMode;
use tvbound::experiment::{run_coverage_with, ExperimentConfig, OutputSpec};

fn bench_config() -> ExperimentConfig {
    ExperimentConfig {
        family: "zipf(2,100)".parse().unwrap(),
        m_values: vec![200],
        delta_values: vec![0.05],
        trials: 400,
        master_seed: 7,
        bounds_enabled: BoundKind::ALL.to_vec(),
        outputs: OutputSpec::default(),
        debug_bound_scale: 1.0,
    }
}

fn coverage_modes(c: &mut Criterion) {
    let cfg = bench_config();
    let mut group = c.benchmark_group("coverage_trials");
    group.sample_size(10);
    group.warm_up_time(Duration::from_secs(1));
    group.measurement_time(Duration::from_secs(5));
    group.bench_function("serial", |b| {
        b.iter(|| run_coverage_with(&cfg, ExecMode::Serial).unwrap());
    });
    group.bench_function("parallel", |b| {
        b.iter(|| run_coverage_with(&cfg, ExecMode::Parallel).unwrap());
    });
    group.finish();
}

criterion_group!(benches, coverage_modes);
criterion_main!(benches);
