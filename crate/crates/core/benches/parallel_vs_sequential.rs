use std::path::Path;

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robust_kelly::backtest::drawdown_surrogate_with;
use robust_kelly::config::RunConfig;
use robust_kelly::hyperplane::HyperplaneSet;
use robust_kelly::lp::{LpSolver, SimplexSolver};
use robust_kelly::robust::{build_robust_lp, portfolio_return_range_with, resolve_hyperplanes};
use robust_kelly::{Execution, Weights};

fn modes() -> Vec<Execution> {
    if cfg!(feature = "parallel") {
        vec![Execution::Sequential, Execution::Parallel]
    } else {
        vec![Execution::Sequential]
    }
}

fn label(exec: Execution) -> &'static str {
    if exec.is_parallel() {
        "parallel"
    } else {
        "sequential"
    }
}

fn synthetic() -> RunConfig {
    RunConfig::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/synthetic.json")).unwrap()
}

fn robust_lp(c: &mut Criterion) {
    let cfg = synthetic();
    let scenarios = cfg.scenarios().unwrap();
    let amb = cfg.ambiguity(&scenarios).unwrap();
    let cons = cfg.constraints(scenarios.n()).unwrap();
    let planes = resolve_hyperplanes(&SimplexSolver::default(), &scenarios, &cons, &cfg.approximation()).unwrap();
    let lp = build_robust_lp(&scenarios, &amb, &cons, &planes).unwrap();
    let mut group = c.benchmark_group("robust_lp_solve");
    group.sample_size(10);
    for exec in modes() {
        let solver = SimplexSolver::default().with_execution(exec);
        group.bench_function(BenchmarkId::from_parameter(label(exec)), |b| {
            b.iter(|| solver.solve(black_box(&lp)).unwrap())
        });
    }
    group.finish();
}

fn return_range(c: &mut Criterion) {
    let cfg = synthetic();
    let scenarios = cfg.scenarios().unwrap();
    let cons = cfg.constraints(scenarios.n()).unwrap();
    let solver = SimplexSolver::default().with_execution(Execution::Sequential);
    let mut group = c.benchmark_group("portfolio_return_range");
    for exec in modes() {
        group.bench_function(BenchmarkId::from_parameter(label(exec)), |b| {
            b.iter(|| portfolio_return_range_with(&solver, black_box(&scenarios), &cons, exec).unwrap())
        });
    }
    group.finish();
}

fn drawdown(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 15;
    let paths: Vec<Vec<Vec<f64>>> = (0..2000)
        .map(|_| (0..250).map(|_| (0..n).map(|_| rng.gen_range(-0.05..0.05)).collect()).collect())
        .collect();
    let weights = Weights::new(vec![1.0 / n as f64; n]);
    let mut group = c.benchmark_group("drawdown_surrogate");
    group.sample_size(20);
    for exec in modes() {
        group.bench_function(BenchmarkId::from_parameter(label(exec)), |b| {
            b.iter(|| drawdown_surrogate_with(&weights, black_box(&paths), exec).unwrap())
        });
    }
    group.finish();
}

fn tangent_grid(c: &mut Criterion) {
    let set = HyperplaneSet::generate(-0.5, 3.0, 1e-5).unwrap();
    let mut group = c.benchmark_group("tangent_gap_on_grid");
    for exec in modes() {
        group.bench_function(BenchmarkId::from_parameter(label(exec)), |b| {
            b.iter(|| set.gap_on_grid(black_box(100_000), exec))
        });
    }
    group.finish();
}

criterion_group!(benches, robust_lp, return_range, drawdown, tangent_grid);
criterion_main!(benches);
