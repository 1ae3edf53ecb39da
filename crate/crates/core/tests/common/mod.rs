#![allow(dead_code)]

use pqn_core::{Chart, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FD_STEP: f64 = 1e-5;
pub const FD_TOL: f64 = 1e-6;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn coords(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// `count` physical points with coordinates uniform in [−1, 1].
pub fn points(n: usize, count: usize, seed: u64) -> Vec<Point> {
    let mut r = rng(seed);
    (0..count).map(|_| Point::new(coords(&mut r, 2 * n), Chart::Physical).unwrap()).collect()
}

/// Central difference of `f` along coordinate `i`.
pub fn central<T, F>(f: F, x: &[f64], i: usize) -> T
where
    F: Fn(&[f64]) -> T,
    T: std::ops::Sub<Output = T> + std::ops::Div<f64, Output = T>,
{
    let mut xp = x.to_vec();
    let mut xm = x.to_vec();
    xp[i] += FD_STEP;
    xm[i] -= FD_STEP;
    (f(&xp) - f(&xm)) / (2.0 * FD_STEP)
}

pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64]) -> Vec<f64> {
    (0..x.len()).map(|i| central(&f, x, i)).collect()
}

/// Jacobian `J[i][m] = ∂_m v_i` of a vector-valued function.
pub fn fd_jacobian(f: impl Fn(&[f64]) -> Vec<f64>, x: &[f64]) -> Vec<Vec<f64>> {
    let d = x.len();
    let cols: Vec<Vec<f64>> = (0..d)
        .map(|m| {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[m] += FD_STEP;
            xm[m] -= FD_STEP;
            f(&xp).iter().zip(f(&xm)).map(|(a, b)| (a - b) / (2.0 * FD_STEP)).collect()
        })
        .collect();
    let rows = cols[0].len();
    (0..rows).map(|i| (0..d).map(|m| cols[m][i]).collect()).collect()
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max)
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

use pqn_core::linalg::dot;
use pqn_core::Jet;
use proptest::prelude::*;

/// A smooth scalar `c_0 e^{a·x} + c_1 sin(b·x) + c_2 x_i x_j`, used to build
/// random test fields.
#[derive(Clone, Debug)]
pub struct Smooth {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: [f64; 3],
    pub i: usize,
    pub j: usize,
}

impl Smooth {
    pub fn eval(&self, x: &[Jet]) -> Jet {
        let lin = |w: &[f64]| -> Jet {
            let w: Vec<Jet> = w.iter().map(|&v| Jet::constant(v)).collect();
            dot(&w, x)
        };
        lin(&self.a).exp().scale(self.c[0])
            + lin(&self.b).sin().scale(self.c[1])
            + (&x[self.i] * &x[self.j]).scale(self.c[2])
    }
}

pub fn smooth(d: usize) -> impl Strategy<Value = Smooth> {
    (
        prop::collection::vec(-0.5..0.5f64, d),
        prop::collection::vec(-1.0..1.0f64, d),
        prop::array::uniform3(-1.0..1.0f64),
        0..d,
        0..d,
    )
        .prop_map(|(a, b, c, i, j)| Smooth { a, b, c, i, j })
}

pub fn smooth_vec(d: usize) -> impl Strategy<Value = Vec<Smooth>> {
    prop::collection::vec(smooth(d), d)
}

pub fn point_strategy(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, d)
}
