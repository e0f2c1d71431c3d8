//! Parallel vs sequential throughput of the solver kernels.
//!
//! `cargo bench` measures the rayon build on the default pool and on a
//! one-thread pool; `cargo bench --no-default-features` measures the
//! sequential fallback. Benchmark ids carry the compiled mode.

use std::hint::black_box;

use cornerflow::analysis::{nonexistence_probe, ProbeCase};
use cornerflow::grid::{build_grid, GridSpec};
use cornerflow::par;
use cornerflow::solver::{assemble_residual, solve, SolveConfig};
use cornerflow::{GasModel, KTProfile};
use criterion::{criterion_group, criterion_main, Criterion};

fn mode() -> &'static str {
    if par::PARALLEL {
        "parallel"
    } else {
        "sequential"
    }
}

fn pools() -> Vec<(String, rayon::ThreadPool)> {
    let mut pools = vec![("1-thread".to_string(), rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap())];
    let n = std::thread::available_parallelism().map_or(1, |n| n.get());
    if n > 1 {
        pools.push((format!("{n}-threads"), rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap()));
    }
    pools
}

fn kernels(c: &mut Criterion) {
    let profile = KTProfile::from_physical(1.5, 1.0, 0.2, 1.0).unwrap();
    let gas = GasModel::from_free_stream(1.4, 0.2, 1.0).unwrap();
    let config = SolveConfig::for_profile(gas, &profile).unwrap();
    let grid = build_grid(&profile, GridSpec::log_polar(50.0, 128, 128)).unwrap();
    let field = solve(&config, &grid, None).unwrap();

    let mut group = c.benchmark_group("kernels");
    for (label, pool) in pools() {
        group.bench_function(format!("{}/{label}/residual-128", mode()), |b| {
            pool.install(|| b.iter(|| assemble_residual(black_box(&field.psi), &grid, &gas).unwrap()))
        });
        group.bench_function(format!("{}/{label}/solve-128", mode()), |b| {
            pool.install(|| b.iter(|| solve(black_box(&config), &grid, None).unwrap()))
        });
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let case = ProbeCase::incompressible(2.0, std::f64::consts::FRAC_PI_4, GridSpec::log_polar(50.0, 16, 16), 3);
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for (label, pool) in pools() {
        group.bench_function(format!("{}/{label}/plate-probe", mode()), |b| {
            pool.install(|| b.iter(|| nonexistence_probe(black_box(&case)).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, kernels, sweep);
criterion_main!(benches);
