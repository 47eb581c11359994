//! Sequential versus rayon data-parallel timings for the three inner
//! loops that dominate the workload: prime-field elimination, homotopy
//! path tracking, and the Künneth composition sum.
//!
//! Requires the `parallel` feature (on by default):
//! `cargo bench -p critspace`.

use criterion::{criterion_group, criterion_main, Criterion};
use rayon::prelude::*;

use critspace::bbw::{h_e, h_e_seq};
use critspace::exact::{ExactMatrix, PrimeField, DEFAULT_PRIME};
use critspace::format::{beyond_by_one, TensorFormat};
use critspace::solver::{track_path, MinorSystem, PathOutcome, StartSystem, TrackSettings};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bench_rank(c: &mut Criterion) {
    let f = PrimeField::new(DEFAULT_PRIME).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    // a 260x320 product of random factors, rank 200
    let a = ExactMatrix::from_fn(f.clone(), 260, 200, |_, _| rng.gen_range(0..DEFAULT_PRIME));
    let b = ExactMatrix::from_fn(f.clone(), 200, 320, |_, _| rng.gen_range(0..DEFAULT_PRIME));
    let m = a.matmul(&b);
    assert_eq!(m.rank_seq(), 200);

    let mut group = c.benchmark_group("fp_rank_260x320");
    group.sample_size(10);
    group.bench_function("seq", |bench| bench.iter(|| m.rank_seq()));
    group.bench_function("par", |bench| bench.iter(|| m.rank_par()));
    group.finish();
}

fn bench_solver_paths(c: &mut Criterion) {
    let format = TensorFormat::new(vec![2, 2, 2]).unwrap();
    let tensor = critspace::solver::random_real_tensor(&format, 9);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let sys = MinorSystem::build(&tensor, &mut rng);
    let start = StartSystem::build(&sys, &mut rng);
    let settings = TrackSettings::default();
    let paths = start.path_count() as usize;

    let count_finite = |outcomes: Vec<PathOutcome>| {
        outcomes
            .iter()
            .filter(|o| matches!(o, PathOutcome::Finite(_)))
            .count()
    };

    let mut group = c.benchmark_group("track_27_paths_2x2x2");
    group.sample_size(10);
    group.bench_function("seq", |bench| {
        bench.iter(|| {
            let outcomes: Vec<PathOutcome> = (0..paths)
                .map(|i| track_path(&sys, &start, start.start_point(i as u128), &settings))
                .collect();
            count_finite(outcomes)
        })
    });
    group.bench_function("par", |bench| {
        bench.iter(|| {
            let outcomes: Vec<PathOutcome> = (0..paths)
                .into_par_iter()
                .map(|i| track_path(&sys, &start, start.start_point(i as u128), &settings))
                .collect();
            count_finite(outcomes)
        })
    });
    group.finish();
}

fn bench_kunneth(c: &mut Criterion) {
    let format = beyond_by_one(&[3, 4, 5]).unwrap();
    let n = 12i64;
    assert_eq!(h_e(&format, n + 1, n), h_e_seq(&format, n + 1, n));

    let mut group = c.benchmark_group("kunneth_4x5x6x14");
    group.bench_function("seq", |bench| bench.iter(|| h_e_seq(&format, n + 1, n)));
    group.bench_function("par", |bench| bench.iter(|| h_e(&format, n + 1, n)));
    group.finish();
}

criterion_group!(benches, bench_rank, bench_solver_paths, bench_kunneth);
criterion_main!(benches);
