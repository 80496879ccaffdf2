//! Benchmarks of the data-parallel kernels against a single-thread pool.
//!
//! With the default `parallel` feature each group compares the ambient
//! thread pool against a pinned one-thread pool; building the benches with
//! `--no-default-features` measures the plain sequential fallback instead.

use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};

use bistrat::oracle::certify_canonical;
use bistrat::stratify::{canonical_sweep, invertible_relations};
use bistrat::{Bisheaf, Complex};

/// A chain of glued tetrahedra; 16 of them close to 159 simplices.
fn tetrahedron_chain(count: u32) -> Arc<Complex> {
    let maximal: Vec<Vec<u32>> = (0..count).map(|i| vec![i, i + 1, i + 2, i + 3]).collect();
    Arc::new(Complex::build(&maximal).unwrap())
}

/// Uniform 12-dimensional stalks over GF(97) make every derived composite
/// and rank check heavy enough for the parallel split to matter.
fn large_instance() -> Bisheaf {
    Bisheaf::constant(&tetrahedron_chain(24), 97, 12).unwrap()
}

fn oracle_instance() -> Bisheaf {
    let c = Arc::new(Complex::build(&[vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap());
    Bisheaf::random(&c, 2, 2, 3).unwrap()
}

fn run_both<F>(c: &mut Criterion, name: &str, mut op: F)
where
    F: FnMut() + Send,
{
    let mut group = c.benchmark_group(name);
    #[cfg(feature = "parallel")]
    {
        group.bench_function("multi_thread", |bench| bench.iter(&mut op));
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        group.bench_function("single_thread", |bench| {
            bench.iter(|| pool.install(&mut op))
        });
    }
    #[cfg(not(feature = "parallel"))]
    group.bench_function("sequential", |bench| bench.iter(&mut op));
    group.finish();
}

fn bench_invertible_relations(c: &mut Criterion) {
    let b = large_instance();
    run_both(c, "invertible_relations", || {
        black_box(invertible_relations(black_box(&b)).unwrap());
    });
}

fn bench_canonical_sweep(c: &mut Criterion) {
    let b = large_instance();
    run_both(c, "canonical_sweep", || {
        black_box(canonical_sweep(black_box(&b)).unwrap());
    });
}

fn bench_certify(c: &mut Criterion) {
    let b = oracle_instance();
    run_both(c, "certify_hollow_triangle", || {
        black_box(certify_canonical(black_box(&b), 6).unwrap());
    });
}

criterion_group!(
    benches,
    bench_invertible_relations,
    bench_canonical_sweep,
    bench_certify
);
criterion_main!(benches);
