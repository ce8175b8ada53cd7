//! Sequential against parallel training of the per-representation models.
//! Without the `parallel` feature both variants run sequentially.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mrseql::multi_rep::{make_config_grid, train_ensemble, DomainSet, GridOptions};
use mrseql::{Dataset, Execution, SeqlParams};

fn toy(n_per_class: usize, len: usize) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    Dataset::from_labeled((0..2 * n_per_class).map(|i| {
        let centre = if i % 2 == 0 { len / 4 } else { 3 * len / 4 } as f64;
        let values: Vec<f64> = (0..len)
            .map(|t| {
                let d = t as f64 - centre;
                (-d * d / 30.0).exp() * 3.0 + rng.gen_range(-0.4..0.4)
            })
            .collect();
        ((i % 2).to_string(), values)
    }))
    .unwrap()
}

fn bench_train(c: &mut Criterion) {
    let data = toy(10, 64);
    let grid = make_config_grid(data.max_length(), DomainSet::Both, &GridOptions::default()).unwrap();
    let params = SeqlParams::default();
    let mut group = c.benchmark_group("train_ensemble");
    group.sample_size(10);
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| train_ensemble(&data, &grid, &params, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_train);
criterion_main!(benches);
