//! Seeded generators for random test complexes.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::Complex;

/// A random face-closed complex with at most `max_size` simplices, built as
/// the closure of a handful of random candidate simplices with at most
/// `max_vertices` vertices each. Deterministic in `seed`.
pub fn random_complex(seed: u64, max_size: usize, max_vertices: usize) -> Arc<Complex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool: u32 = (2 * max_vertices as u32).max(4);
    for _ in 0..64 {
        let count = rng.random_range(1..=4);
        let maximal: Vec<Vec<u32>> = (0..count)
            .map(|_| {
                let size = rng.random_range(1..=max_vertices);
                let mut verts: Vec<u32> = Vec::new();
                while verts.len() < size {
                    let v = rng.random_range(0..pool);
                    if !verts.contains(&v) {
                        verts.push(v);
                    }
                }
                verts
            })
            .collect();
        let c = Complex::build(&maximal).expect("candidates are nonempty");
        if c.len() <= max_size {
            return Arc::new(c);
        }
    }
    Arc::new(Complex::build(&[vec![0]]).unwrap())
}

/// A random pure connected complex: all maximal simplices share one
/// dimension and each is glued to a previous one along a facet.
pub fn random_pure_connected(seed: u64) -> Arc<Complex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = rng.random_range(1..=3usize);
    let mut maximal: Vec<Vec<u32>> = vec![(0..=dim as u32).collect()];
    let extra = rng.random_range(0..=4usize);
    for next_vertex in (dim as u32 + 1..).take(extra) {
        let base = maximal[rng.random_range(0..maximal.len())].clone();
        let drop = rng.random_range(0..base.len());
        let mut fresh: Vec<u32> = base
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != drop)
            .map(|(_, &v)| v)
            .collect();
        fresh.push(next_vertex);
        maximal.push(fresh);
    }
    Arc::new(Complex::build(&maximal).unwrap())
}
