//! Node-loop kernels on the global rayon pool versus a single worker.
//!
//! Built with `--no-default-features` both variants run the plain
//! sequential path, which gives the fallback baseline.

use std::f64::consts::PI;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fluidgeom::continuum_map::{build_rhat, euler_stress, ContinuumState};
use fluidgeom::dynamics::bianchi_consistency;
use fluidgeom::exec;
use fluidgeom::fields::{solve_pressure_poisson, Gauge, Grid3, ScalarField, VectorField};
use fluidgeom::geometry::{riemann_curvature, Metric3};
use fluidgeom::linalg::SymMat3;

fn perturbed(n: usize) -> Metric3 {
    let grid = Grid3::periodic([n; 3], [2.0 * PI; 3]).unwrap();
    Metric3::analytic(grid, |x| {
        let mut g = SymMat3::IDENTITY;
        g.0[0] += 0.01 * x[1].sin() * x[2].sin();
        g
    })
    .unwrap()
}

fn euler_state(n: usize) -> ContinuumState {
    let grid = Grid3::periodic([n; 3], [2.0 * PI; 3]).unwrap();
    let rho = ScalarField::from_fn(grid, |x| 1.0 + 0.1 * x[0].cos());
    let u = VectorField::from_fn(grid, |x| [x[0].sin() * x[1].cos(), -x[0].cos() * x[1].sin(), 0.0]);
    let p = ScalarField::from_fn(grid, |x| 1.0 + 0.25 * ((2.0 * x[0]).cos() + (2.0 * x[1]).cos()));
    ContinuumState::new(rho, u, euler_stress(&p)).unwrap()
}

fn taylor_green(n: usize) -> VectorField {
    let grid = Grid3::periodic([n, n, 8], [2.0 * PI; 3]).unwrap();
    VectorField::from_fn(grid, |x| [x[0].sin() * x[1].cos(), -x[0].cos() * x[1].sin(), 0.0])
}

fn kernels(c: &mut Criterion) {
    let threads = [("pool", 0usize), ("single", 1)];

    let mut group = c.benchmark_group("riemann_curvature");
    let g = perturbed(32);
    for (name, t) in threads {
        group.bench_function(BenchmarkId::new(name, 32), |b| match t {
            0 => b.iter(|| riemann_curvature(&g).unwrap()),
            n => exec::with_threads(n, || b.iter(|| riemann_curvature(&g).unwrap())),
        });
    }
    group.finish();

    let mut group = c.benchmark_group("bianchi_consistency");
    group.sample_size(10);
    let g = perturbed(24);
    for (name, t) in threads {
        group.bench_function(BenchmarkId::new(name, 24), |b| match t {
            0 => b.iter(|| bianchi_consistency(&g).unwrap()),
            n => exec::with_threads(n, || b.iter(|| bianchi_consistency(&g).unwrap())),
        });
    }
    group.finish();

    let mut group = c.benchmark_group("build_rhat");
    let state = euler_state(48);
    for (name, t) in threads {
        group.bench_function(BenchmarkId::new(name, 48), |b| match t {
            0 => b.iter(|| build_rhat(&state).unwrap()),
            n => exec::with_threads(n, || b.iter(|| build_rhat(&state).unwrap())),
        });
    }
    group.finish();

    let mut group = c.benchmark_group("pressure_poisson");
    group.sample_size(10);
    let u = taylor_green(64);
    for (name, t) in threads {
        group.bench_function(BenchmarkId::new(name, 64), |b| match t {
            0 => b.iter(|| solve_pressure_poisson(&u, Gauge::ZeroMean).unwrap()),
            n => exec::with_threads(n, || b.iter(|| solve_pressure_poisson(&u, Gauge::ZeroMean).unwrap())),
        });
    }
    group.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
