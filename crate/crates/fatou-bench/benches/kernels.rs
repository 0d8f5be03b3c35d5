use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use fatou::map::critical_numerator_poly;
use fatou::raster::topology::{fill_separator_holes, label_components};
use fatou::roots::{poly_roots, ROOT_TOL};
use fatou::{rasterize, RasterSettings};
use fatou_bench::{tilted, mask, radii, ring_window, unit_family};

fn bench_rasterize(c: &mut Criterion) {
    let p = tilted();
    let r = radii(&p);
    let w = ring_window(&r);
    let settings = RasterSettings::default();
    let mut g = c.benchmark_group("rasterize");
    g.sample_size(10);
    for px in [128usize, 256] {
        g.throughput(Throughput::Elements((px * px) as u64));
        g.bench_with_input(BenchmarkId::from_parameter(px), &px, |b, &px| {
            b.iter(|| rasterize(black_box(&p), w, (px, px), &r, &settings))
        });
    }
    g.finish();
}

fn bench_roots(c: &mut Criterion) {
    let mut g = c.benchmark_group("poly_roots");
    for e in [6, 12] {
        let p = unit_family(10f64.powi(-e));
        let coeffs = critical_numerator_poly(&p).unwrap();
        g.bench_with_input(BenchmarkId::new("critical", e), &coeffs, |b, coeffs| {
            b.iter(|| poly_roots(black_box(coeffs), ROOT_TOL).unwrap())
        });
    }
    g.finish();
}

fn bench_labeling(c: &mut Criterion) {
    let mut g = c.benchmark_group("labeling");
    for px in [256usize, 1024] {
        let sep = mask(px, px, 0.4);
        g.throughput(Throughput::Elements((px * px) as u64));
        g.bench_with_input(BenchmarkId::new("label", px), &sep, |b, sep| {
            b.iter(|| label_components(black_box(sep), px, px))
        });
        let (labels, _) = label_components(&sep, px, px);
        g.bench_with_input(BenchmarkId::new("fill", px), &labels, |b, labels| {
            b.iter(|| fill_separator_holes(black_box(labels), px, px))
        });
    }
    g.finish();
}

criterion_group!(benches, bench_rasterize, bench_roots, bench_labeling);
criterion_main!(benches);
