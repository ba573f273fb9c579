use std::f64::consts::PI;

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use geophase::analytic::{geometric_phase_quadrature, Branch};
use geophase::experiments::{ramsey_fringe_scan, Mode, NumericSettings};
use geophase::propagate::{propagate, HamiltonianSpec, StepperConfig};
use geophase::{DriveProfile, FieldState, SystemParams};

fn branch_cycle(c: &mut Criterion) {
    let p = SystemParams::default();
    let spec = HamiltonianSpec::branch(p, Branch::Excited, DriveProfile::resonant(&p), 32).unwrap();
    let start = FieldState::vacuum(32).unwrap();
    let cfg = StepperConfig::default();
    let mut g = c.benchmark_group("propagate");
    g.sample_size(10);
    g.bench_function("branch_dim32_one_cycle", |b| {
        b.iter(|| propagate(black_box(&start), &spec, 0.0, 2.0 * PI, &cfg, 64).unwrap())
    });
    g.finish();
}

fn quadrature(c: &mut Criterion) {
    let p = SystemParams::default();
    let d = DriveProfile::resonant(&p);
    c.bench_function("geometric_phase_quadrature", |b| {
        b.iter(|| geometric_phase_quadrature(black_box(&p), Branch::Ground, &d, 2.0 * PI).unwrap())
    });
}

fn fringe(c: &mut Criterion) {
    let p = SystemParams::default();
    let grid: Vec<f64> = (0..51).map(|k| k as f64 / 50.0).collect();
    let s = NumericSettings::default();
    c.bench_function("fringe_analytic_51", |b| {
        b.iter(|| ramsey_fringe_scan(black_box(&p), &grid, Mode::Analytic, &s).unwrap())
    });
    let small: Vec<f64> = (0..4).map(|k| k as f64 / 4.0).collect();
    let mut g = c.benchmark_group("fringe_numeric");
    g.sample_size(10);
    g.bench_function("4_points", |b| {
        b.iter(|| ramsey_fringe_scan(black_box(&p), &small, Mode::Numeric, &s).unwrap())
    });
    g.finish();
}

criterion_group!(benches, branch_cycle, quadrature, fringe);
criterion_main!(benches);
