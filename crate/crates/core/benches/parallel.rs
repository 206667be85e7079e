//! Single-thread versus default rayon pool on the three hot paths: Gram
//! assembly and solve, batch prediction, and mixture regression over a grid.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rayon::{ThreadPool, ThreadPoolBuilder};

use quatkmp::gmm::{build_reference, fit_em, EmConfig};
use quatkmp::kmp::{fit, BlockLayout, KernelSpec};
use quatkmp::orient::{transform_demos, uniform_grid};
use quatkmp::quat::{gen_minjerk_demos, UnitQuaternion};

fn pools() -> Vec<(&'static str, ThreadPool)> {
    vec![
        ("1-thread", ThreadPoolBuilder::new().num_threads(1).build().unwrap()),
        ("default", ThreadPoolBuilder::new().build().unwrap()),
    ]
}

fn bench(c: &mut Criterion) {
    let keys = [
        UnitQuaternion::new(0.8, 0.2, 0.4, 0.3).unwrap(),
        UnitQuaternion::new(0.45, 0.6, 0.3, 0.55).unwrap(),
    ];
    let demos = gen_minjerk_demos(&keys, 10.0, 400, 5, 0.05, 7).unwrap();
    let data = transform_demos(&demos, &demos[0].quats[0]).unwrap();
    let gmm = fit_em(&data, 1, &EmConfig::default()).unwrap();
    let grid: Vec<Vec<f64>> = uniform_grid(0.0, 10.0, 300).into_iter().map(|t| vec![t]).collect();
    let reference = build_reference(&gmm, &grid).unwrap();
    let spec = KernelSpec::gaussian(0.01).unwrap();
    let model = fit(&reference, &spec, BlockLayout::TimeDeriv, 1.0).unwrap();
    let queries: Vec<Vec<f64>> = uniform_grid(0.0, 10.0, 2000).into_iter().map(|t| vec![t]).collect();
    let dense: Vec<Vec<f64>> = uniform_grid(0.0, 10.0, 5000).into_iter().map(|t| vec![t]).collect();

    let mut g = c.benchmark_group("parallel");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_with_input(BenchmarkId::new("fit_300", name), &pool, |b, p| {
            b.iter(|| p.install(|| fit(&reference, &spec, BlockLayout::TimeDeriv, 1.0).unwrap()))
        });
        g.bench_with_input(BenchmarkId::new("predict_2000", name), &pool, |b, p| {
            b.iter(|| p.install(|| model.predict_batch(&queries).unwrap()))
        });
        g.bench_with_input(BenchmarkId::new("gmr_5000", name), &pool, |b, p| {
            b.iter(|| p.install(|| build_reference(&gmm, &dense).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
