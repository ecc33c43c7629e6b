//! Criterion benchmarks for the samplers, shared with the `samplers` bench
//! target.

use std::hint::black_box;

use criterion::{BenchmarkId, Criterion, Throughput};
use jamlim_core::{
    armour, density_ergodic, park_box, perfect_site, perfect_window, BoundaryCondition, LatticeBox,
    Norm, ParkingScheme, Site, UniformField, DEFAULT_BUDGET,
};

fn nn(d: usize) -> ParkingScheme {
    ParkingScheme::nn_exclusion(d, 1, Norm::L1).unwrap()
}

pub fn box_parking(c: &mut Criterion) {
    let mut group = c.benchmark_group("park_box");
    for (d, n) in [(1usize, 1_000u64), (1, 10_000), (2, 50), (3, 10)] {
        let scheme = nn(d);
        let field = UniformField::new(1, d).unwrap();
        group.throughput(Throughput::Elements(LatticeBox::centered(d, n).len() as u64));
        group.bench_with_input(BenchmarkId::new(format!("d{d}"), n), &n, |b, &n| {
            b.iter(|| park_box(&field, n, &scheme, &BoundaryCondition::Null).unwrap())
        });
    }
    group.finish();
}

pub fn perfect_sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("perfect_site");
    for d in [1usize, 2, 3] {
        let scheme = nn(d);
        let origin = Site::origin(d);
        group.bench_function(BenchmarkId::from_parameter(format!("d{d}")), |b| {
            let mut seed = 0u64;
            b.iter(|| {
                seed += 1;
                let field = UniformField::new(seed, d).unwrap();
                perfect_site(&field, black_box(&origin), &scheme, DEFAULT_BUDGET).unwrap()
            })
        });
    }
    group.finish();

    let scheme = nn(2);
    let window = LatticeBox::centered(2, 10).sites();
    c.bench_function("perfect_window/d2_r10", |b| {
        let field = UniformField::new(3, 2).unwrap();
        b.iter(|| perfect_window(&field, black_box(&window), &scheme, DEFAULT_BUDGET).unwrap())
    });
}

pub fn armour_exploration(c: &mut Criterion) {
    let mut group = c.benchmark_group("armour");
    for (d, m) in [(1usize, 100u64), (2, 10), (2, 30)] {
        let seeds = LatticeBox::centered(d, m).sites();
        let field = UniformField::new(5, d).unwrap();
        group.bench_with_input(BenchmarkId::new(format!("d{d}"), m), &seeds, |b, seeds| {
            b.iter(|| armour(&field, seeds, 1, DEFAULT_BUDGET).unwrap())
        });
    }
    group.finish();
}

pub fn ergodic_average(c: &mut Criterion) {
    let scheme = nn(1);
    let mut group = c.benchmark_group("density_ergodic");
    group.sample_size(20);
    for n in [1_000u64, 10_000] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| density_ergodic(7, n, &scheme, DEFAULT_BUDGET).unwrap())
        });
    }
    group.finish();
}
