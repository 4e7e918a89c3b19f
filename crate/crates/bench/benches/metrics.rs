use criterion::{criterion_group, criterion_main, Criterion};
use gridcoh::cases::ieee39;
use gridcoh::dynamics::{h2_squared_closed_form, h2_squared_gramian, preset_spec, simulate_impulse, SimulationOptions};
use gridcoh::solver::evaluate_topology;
use gridcoh::MetricPreset;
use gridcoh_bench::{ieee39_augment, ieee39_state_space, in_service_laplacian};
use std::hint::black_box;

fn h2_norm(c: &mut Criterion) {
    let net = ieee39();
    let spec = preset_spec(MetricPreset::Coherence, &net);
    let params = net.machine_params();
    let l = in_service_laplacian(&net);
    let ss = ieee39_state_space();

    let mut group = c.benchmark_group("h2_ieee39");
    group.bench_function("closed_form", |b| {
        b.iter(|| h2_squared_closed_form(black_box(&spec), black_box(&l), &params).unwrap())
    });
    group.bench_function("gramian", |b| b.iter(|| h2_squared_gramian(black_box(&ss)).unwrap()));
    group.finish();
}

fn topology_evaluation(c: &mut Criterion) {
    let problem = ieee39_augment(2);
    let incidence = problem.incidence();
    let w = problem.reduced_w();
    let z = problem.base_selection();
    c.bench_function("evaluate_topology_ieee39", |b| {
        b.iter(|| evaluate_topology(&incidence, &w, black_box(&z)).unwrap())
    });
}

fn impulse(c: &mut Criterion) {
    let ss = ieee39_state_space();
    let opts = SimulationOptions { horizon: 10.0, dt: 2e-4, stride: 100 };
    let mut group = c.benchmark_group("simulation");
    group.sample_size(20);
    group.bench_function("impulse_ieee39_10s", |b| b.iter(|| simulate_impulse(&ss, black_box(29), &opts).unwrap()));
    group.finish();
}

criterion_group!(benches, h2_norm, topology_evaluation, impulse);
criterion_main!(benches);
