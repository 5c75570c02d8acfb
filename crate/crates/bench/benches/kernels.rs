//! Hot-path benchmarks: Hamiltonian assembly, the master-equation
//! right-hand side, short stretches of time evolution, and the design
//! solver.

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use cphase_core::experiments::RunConfig;
use cphase_core::gate;
use cphase_core::hamiltonian::{build_effective, build_full};
use cphase_core::lindblad::{build_dissipators, evolve, rhs, DensityMatrix};
use cphase_core::{design, SolverOptions};
use std::f64::consts::TAU;

fn bench_assemble(c: &mut Criterion) {
    let cfg = RunConfig::reference();
    let h = build_full(&cfg.params, &cfg.space).unwrap();
    c.bench_function("assemble_full_81", |b| {
        b.iter(|| h.assemble_at(black_box(3.7e-9)))
    });
}

fn bench_rhs(c: &mut Criterion) {
    let cfg = RunConfig::reference();
    let h = build_full(&cfg.params, &cfg.space).unwrap();
    let diss = build_dissipators(&cfg.dec, &cfg.space).unwrap();
    let rho = DensityMatrix::from_pure(&gate::initial_state(&cfg.space));
    c.bench_function("dense_rhs_81", |b| {
        b.iter(|| rhs(black_box(&rho), black_box(1.1e-9), &h, &diss).unwrap())
    });
}

fn bench_evolve_segment(c: &mut Criterion) {
    let cfg = RunConfig::reference();
    let h = build_full(&cfg.params, &cfg.space).unwrap();
    let diss = build_dissipators(&cfg.dec, &cfg.space).unwrap();
    let rho = DensityMatrix::from_pure(&gate::initial_state(&cfg.space));
    let opts = SolverOptions {
        n_samples: 1,
        ..Default::default()
    };
    // 200 fixed steps at the default 0.5 ps
    c.bench_function("evolve_100ps_81", |b| {
        b.iter(|| {
            evolve(
                black_box(&rho),
                100.0e-12,
                &h,
                &diss,
                &opts,
                &cfg.space,
            )
            .unwrap()
        })
    });
}

fn bench_effective(c: &mut Criterion) {
    let cfg = RunConfig::reference();
    c.bench_function("build_effective_81", |b| {
        b.iter(|| build_effective(black_box(&cfg.params), &cfg.space).unwrap())
    });
}

fn bench_design(c: &mut Criterion) {
    let g1 = TAU * 150.0e6;
    let delta1 = TAU * 1.5e9;
    let gaps = [TAU * 10.0e6, TAU * 30.0e6];
    c.bench_function("design_solve", |b| {
        b.iter(|| design::solve(black_box(g1), delta1, &gaps, 2).unwrap())
    });
}

criterion_group!(
    benches,
    bench_assemble,
    bench_rhs,
    bench_evolve_segment,
    bench_effective,
    bench_design
);
criterion_main!(benches);
