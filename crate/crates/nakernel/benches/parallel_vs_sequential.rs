//! Throughput comparison of the data-parallel core against a sequential
//! schedule on the three hot estimator paths.
//!
//! Cargo features cannot be flipped inside one benchmark run, so with the
//! default `parallel` feature the comparison is between a 1-thread rayon
//! pool (sequential schedule, identical numerics) and a pool sized to the
//! machine; results are bit-identical between the two by design.  Building
//! the bench with `--no-default-features` instead exercises the plain-loop
//! fallback as the single `sequential-fallback` variant, which can be
//! compared across runs.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nakernel::evolker::estimate_p_sigma;
use nakernel::exec;
use nakernel::expfun::sample_perpetuity;
use nakernel::liegroup::{heisenberg_instance, GroupElement, LinearForm, MetaAbelianGroup};
use nakernel::poisson::{estimate_nu, EstimatorBudget};
use nakernel::randpath::sample_bm_drift;
use nakernel::rng;
use std::hint::black_box;

fn heisenberg() -> MetaAbelianGroup {
    heisenberg_instance(
        1,
        LinearForm::new(vec![1.0, 0.0]).unwrap(),
        LinearForm::new(vec![0.0, 1.0]).unwrap(),
        vec![1.0, 1.0],
        vec![1.0, 1.0],
    )
    .unwrap()
}

fn perpetuity_batch(seed: u64) -> f64 {
    let form = LinearForm::new(vec![1.0]).unwrap();
    let draws = exec::map_indexed(512, |i| {
        sample_perpetuity(2.0, &form, &[1.0], 128, 1e-3, rng::derive_seed(seed, i as u64))
            .unwrap()
    });
    draws.iter().sum()
}

fn skew_product_point(group: &MetaAbelianGroup, seed: u64) -> f64 {
    let sigma = sample_bm_drift(2, &[0.0, 0.0], &[-2.0, -2.0], 1.0, 128, seed).unwrap();
    let point = GroupElement::new(vec![0.5, -0.3], vec![0.8]);
    estimate_p_sigma(group, &sigma, &point, 1.0, 256, rng::derive_seed(seed, 1))
        .unwrap()
        .plain
        .mean
}

fn poisson_point(group: &MetaAbelianGroup, seed: u64) -> f64 {
    let x = GroupElement::new(vec![0.3, -0.2], vec![1.0]);
    let budget = EstimatorBudget {
        horizon: 2.0,
        n_sigma: 32,
        n_eta: 16,
        n_steps: 64,
    };
    estimate_nu(group, &x, &budget, seed).unwrap().value.mean
}

#[cfg(feature = "parallel")]
fn bench_all(c: &mut Criterion) {
    let worker_counts = {
        let machine = std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(2);
        if machine > 1 {
            vec![1usize, machine]
        } else {
            vec![1usize]
        }
    };
    let group_inst = heisenberg();

    let mut g = c.benchmark_group("perpetuity_batch_512");
    g.sample_size(10);
    for &n in &worker_counts {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| pool.install(|| black_box(perpetuity_batch(11))));
        });
    }
    g.finish();

    let mut g = c.benchmark_group("skew_product_point_256_eta");
    g.sample_size(10);
    for &n in &worker_counts {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| pool.install(|| black_box(skew_product_point(&group_inst, 12))));
        });
    }
    g.finish();

    let mut g = c.benchmark_group("poisson_point_32_sigma");
    g.sample_size(10);
    for &n in &worker_counts {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| pool.install(|| black_box(poisson_point(&group_inst, 13))));
        });
    }
    g.finish();
}

#[cfg(not(feature = "parallel"))]
fn bench_all(c: &mut Criterion) {
    let group_inst = heisenberg();
    let mut g = c.benchmark_group("sequential-fallback");
    g.sample_size(10);
    g.bench_function("perpetuity_batch_512", |b| {
        b.iter(|| black_box(perpetuity_batch(11)))
    });
    g.bench_function("skew_product_point_256_eta", |b| {
        b.iter(|| black_box(skew_product_point(&group_inst, 12)))
    });
    g.bench_function("poisson_point_32_sigma", |b| {
        b.iter(|| black_box(poisson_point(&group_inst, 13)))
    });
    g.finish();
}

criterion_group!(benches, bench_all);
criterion_main!(benches);
