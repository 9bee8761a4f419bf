use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use isosho_core::{estimation, measures, states, susy, DeformationParameter, OscillatorState, PhaseSpaceGrid};

fn lam(v: f64) -> DeformationParameter {
    DeformationParameter::new(v).unwrap()
}

fn wavefunctions(c: &mut Criterion) {
    c.bench_function("excited_wavefunction n=20", |b| {
        b.iter(|| susy::excited_wavefunction(20, lam(black_box(71.0)), black_box(1.3)).unwrap())
    });
    c.bench_function("level_table 16 levels", |b| {
        b.iter(|| susy::LevelTable::on_line(lam(black_box(71.0)), 16, 1.0 / 64.0, 12.0).unwrap())
    });
}

fn measures_ground(c: &mut Criterion) {
    c.bench_function("nong_delta ground", |b| {
        b.iter(|| measures::nong_delta(&OscillatorState::ground(lam(black_box(71.0)))).unwrap())
    });
    c.bench_function("qfi_pure", |b| b.iter(|| estimation::qfi_pure(lam(black_box(71.0))).unwrap()));
    c.bench_function("photon_distribution ground lambda=300", |b| {
        b.iter(|| states::photon_distribution(&OscillatorState::ground(lam(black_box(300.0)))).unwrap())
    });
}

fn measures_thermal(c: &mut Criterion) {
    let mut g = c.benchmark_group("thermal");
    g.sample_size(10);
    g.bench_function("qfi T=0.33", |b| {
        b.iter(|| estimation::qfi(&OscillatorState::thermal(lam(black_box(10.0)), 0.33).unwrap()).unwrap())
    });
    g.bench_function("wigner 201x201 T=0.33", |b| {
        let grid = PhaseSpaceGrid::new((-8.0, 8.0), (-8.0, 8.0), 201, 201).unwrap();
        b.iter(|| measures::wigner(&OscillatorState::thermal(lam(black_box(10.0)), 0.33).unwrap(), &grid).unwrap())
    });
    g.finish();
}

criterion_group!(benches, wavefunctions, measures_ground, measures_thermal);
criterion_main!(benches);
