use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use hdsim_core::exact::benchmark_path;
use hdsim_core::integrate::{euler_maruyama_ito, heun_stratonovich, SchemeConfig};
use hdsim_core::noise::{make_partition, sample_bm_pair};
use hdsim_core::{ModelParams, TransformTable};

fn sampling(c: &mut Criterion) {
    let p = make_partition(1.0, 14).unwrap();
    c.bench_function("bm_pair_level14", |b| b.iter(|| sample_bm_pair(black_box(&p), 42, 7)));
}

fn schemes(c: &mut Criterion) {
    let p = make_partition(1.0, 14).unwrap();
    let noise = sample_bm_pair(&p, 42, 0);
    let mp = ModelParams::new(0.5, 0.5, 0.0).unwrap();
    let cfg = SchemeConfig::euler();
    c.bench_function("euler_ito_level14", |b| {
        b.iter(|| euler_maruyama_ito(black_box(&noise), 0.0, &mp, &cfg).unwrap())
    });
    c.bench_function("heun_stratonovich_level14", |b| {
        b.iter(|| heun_stratonovich(black_box(&noise), 0.0, &mp).unwrap())
    });
    c.bench_function("benchmark_path_level14", |b| b.iter(|| benchmark_path(black_box(&noise.b), 0.0, 0.5).unwrap()));
}

fn transforms(c: &mut Criterion) {
    let mp = ModelParams::new(0.5, 0.25, 0.0).unwrap();
    c.bench_function("table_build", |b| b.iter(|| TransformTable::new(black_box(&mp)).unwrap()));
    let table = TransformTable::new(&mp).unwrap();
    let us: Vec<f64> = (0..1024).map(|k| -4.0 + 8.0 * k as f64 / 1023.0).collect();
    c.bench_function("table_inverse_1024", |b| {
        b.iter(|| us.iter().map(|&u| table.inverse(black_box(u)).unwrap()).sum::<f64>())
    });
    c.bench_function("table_forward_1024", |b| {
        b.iter(|| us.iter().map(|&x| table.forward(black_box(x)).unwrap()).sum::<f64>())
    });
}

criterion_group!(benches, sampling, schemes, transforms);
criterion_main!(benches);
