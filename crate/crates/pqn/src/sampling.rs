//! Seeded sample points. ChaCha8 output and rand's uniform float sampling are
//! both platform independent, so a seed fixes the points everywhere.

use pqn_core::{Chart, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` physical points of `R^{2n}` with every coordinate uniform in `[−w, w]`.
pub fn physical_points(n: usize, count: usize, seed: u64, w: f64) -> Vec<Point> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let c = (0..2 * n).map(|_| if w > 0.0 { r.random_range(-w..=w) } else { 0.0 }).collect();
            Point::new(c, Chart::Physical).expect("finite coordinates")
        })
        .collect()
}
