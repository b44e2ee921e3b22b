use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use kpzlab_bench::first_perimeter;
use kpzlab_core::harmonic::{first_hit_sampling, moments, HarmonicConfig, DEFAULT_ORDERS, DEFAULT_RADII};
use kpzlab_core::percsim::{accessible_perimeter, clusters, sample_field, trace_hull};
use kpzlab_core::slesim::{sample_drive, trace_from_drive, DriveMode};
use kpzlab_core::spectra::{default_order_grid, legendre_numeric, mf_tau, Curve};
use kpzlab_core::walksim::{death_times, Geometry, WalkConfig};

fn zipper(c: &mut Criterion) {
    let drive = sample_drive(6.0, 1.0 / 4096.0, 4096, 1, DriveMode::Binomial).unwrap();
    c.bench_function("zipper 4096 steps", |b| b.iter(|| trace_from_drive(black_box(&drive)).unwrap()));
}

fn hull(c: &mut Criterion) {
    let (field, anchor) = (0..100)
        .find_map(|seed| {
            let field = sample_field(512, seed).unwrap();
            let anchor = clusters(&field, 2000).into_iter().find(|c| !c.touches_edge)?.sites[0];
            Some((field, anchor))
        })
        .expect("an interior cluster");
    c.bench_function("hull trace + perimeter 512", |b| {
        b.iter(|| {
            let hull = trace_hull(&field, black_box(anchor)).unwrap();
            accessible_perimeter(&field, &hull).unwrap()
        })
    });
}

fn harmonic(c: &mut Criterion) {
    let ep = first_perimeter(256, 5);
    let config = HarmonicConfig::new(20_000, 5);
    c.bench_function("first hits 2e4 walkers", |b| b.iter(|| first_hit_sampling(black_box(&ep.sites), &config).unwrap()));
    let hist = first_hit_sampling(&ep.sites, &HarmonicConfig::new(200_000, 6)).unwrap();
    c.bench_function("covering moments", |b| {
        b.iter(|| moments(black_box(&hist), &DEFAULT_RADII, &DEFAULT_ORDERS).unwrap())
    });
}

fn walks(c: &mut Criterion) {
    let mut group = c.benchmark_group("walks");
    group.sample_size(20);
    group.bench_function("two walks, 2e3 samples to t = 4096", |b| {
        b.iter_batched(
            || WalkConfig::new(vec![1, 1], Geometry::Plane, 4096, 2000, 7).unwrap(),
            |config| death_times(&config).unwrap(),
            BatchSize::SmallInput,
        )
    });
    group.finish();
}

fn algebra(c: &mut Criterion) {
    let grid = default_order_grid(0.0);
    c.bench_function("numeric Legendre transform", |b| {
        b.iter(|| {
            let curve = Curve::sample(black_box(&grid), |n| mf_tau(0.0, n)).unwrap();
            legendre_numeric(&curve).unwrap()
        })
    });
}

criterion_group!(benches, zipper, hull, harmonic, walks, algebra);
criterion_main!(benches);
