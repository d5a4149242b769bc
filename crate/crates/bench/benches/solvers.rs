use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use ipsac_bench::{feasible_positions, scenarios};
use ipsac_core::precoder::{optimal_snr, oracle_snr, solve_sensing_precoder};
use ipsac_core::rate::{frame_sum_rate, integral_rate_over_path};
use ipsac_core::{evaluate, plan_constrained, plan_upper_bound, solve_unconstrained, ScenarioConfig};

fn precoder(c: &mut Criterion) {
    let cfg = ScenarioConfig::default();
    let xs = feasible_positions(&cfg, 64);
    let mut g = c.benchmark_group("precoder");
    g.bench_function("closed_form_snr", |b| {
        b.iter(|| xs.iter().map(|&x| optimal_snr(black_box(x), &cfg).unwrap()).sum::<f64>())
    });
    g.bench_function("weights", |b| b.iter(|| solve_sensing_precoder(black_box(xs[17]), &cfg).unwrap()));
    g.bench_function("oracle_200", |b| b.iter(|| oracle_snr(black_box(xs[17]), &cfg, 200).unwrap()));
    g.finish();
}

fn rate(c: &mut Criterion) {
    let cfg = ScenarioConfig::default();
    let mut g = c.benchmark_group("rate");
    g.bench_function("path_integral_147m", |b| {
        b.iter(|| integral_rate_over_path(black_box(253.0), black_box(400.0), &cfg))
    });
    g.bench_function("frame_sum_rate", |b| b.iter(|| frame_sum_rate(black_box(300.0), &cfg).unwrap()));
    g.finish();
}

fn planners(c: &mut Criterion) {
    let mut g = c.benchmark_group("planners");
    g.sample_size(10);
    for (name, cfg) in scenarios() {
        g.bench_with_input(BenchmarkId::new("solve_unconstrained", name), &cfg, |b, cfg| {
            b.iter(|| solve_unconstrained(cfg).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("plan_constrained", name), &cfg, |b, cfg| {
            b.iter(|| plan_constrained(cfg).unwrap())
        });
        let traj = plan_upper_bound(&cfg).unwrap();
        g.bench_with_input(BenchmarkId::new("evaluate_upper_bound", name), &traj, |b, t| {
            b.iter(|| evaluate(t).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, precoder, rate, planners);
criterion_main!(benches);
