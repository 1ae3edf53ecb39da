//! Literal transcriptions of explicit small-size matrices, kept independent of
//! the generic builders so that the two can be compared entrywise.
//!
//! Physical coordinates are `(q_1, …, q_n, p_1, …, p_n)`; Flaschka coordinates
//! are `(a_1, …, a_n, b_1, …, b_n)`. Entries are set with 1-based `(row, col)`.

use crate::jet::Jet;
use crate::linalg::Matrix;

fn put(m: &mut Matrix, i: usize, j: usize, v: Jet) {
    m[(i - 1, j - 1)] = v;
}

fn one() -> Jet {
    Jet::one()
}

fn neg(v: Jet) -> Jet {
    -v
}

/// `C_2` second Poisson structure in stored form.
pub fn c2_pi_prime(x: &[Jet]) -> Matrix {
    let (q1, q2, p1, p2) = (&x[0], &x[1], &x[2], &x[3]);
    let e12 = (q1 - q2).exp();
    let e2 = q2.scale(2.0).exp();
    let mut m = Matrix::zeros(4, 4);
    put(&mut m, 1, 2, p2.scale(2.0));
    put(&mut m, 1, 3, neg(p1 * p1 + e12.scale(2.0)));
    put(&mut m, 1, 4, &e12 - &e2.scale(4.0));
    put(&mut m, 2, 1, p2.scale(-2.0));
    put(&mut m, 2, 3, neg(e12.clone()));
    put(&mut m, 2, 4, neg(p2 * p2 + e2.scale(2.0)));
    put(&mut m, 3, 1, p1 * p1 + e12.scale(2.0));
    put(&mut m, 3, 2, e12.clone());
    put(&mut m, 3, 4, &e12 * &(p1 + p2));
    put(&mut m, 4, 1, &e2.scale(4.0) - &e12);
    put(&mut m, 4, 2, p2 * p2 + e2.scale(2.0));
    put(&mut m, 4, 3, neg(&e12 * &(p1 + p2)));
    m
}

/// `C_2` open recursion operator.
pub fn c2_open_tensor(x: &[Jet]) -> Matrix {
    let (q1, q2, p1, p2) = (&x[0], &x[1], &x[2], &x[3]);
    let e12 = (q1 - q2).exp();
    let e2 = q2.scale(2.0).exp();
    let d1 = neg(p1 * p1 + e12.scale(2.0));
    let d2 = neg(p2 * p2 + e2.scale(2.0));
    let off = &e12 - &e2.scale(4.0);
    let mut m = Matrix::zeros(4, 4);
    put(&mut m, 1, 1, d1.clone());
    put(&mut m, 1, 2, off.clone());
    put(&mut m, 1, 4, p2.scale(-2.0));
    put(&mut m, 2, 1, neg(e12.clone()));
    put(&mut m, 2, 2, d2.clone());
    put(&mut m, 2, 3, p2.scale(2.0));
    put(&mut m, 3, 2, &e12 * &(p1 + p2));
    put(&mut m, 3, 3, d1);
    put(&mut m, 3, 4, neg(e12.clone()));
    put(&mut m, 4, 1, neg(&e12 * &(p1 + p2)));
    put(&mut m, 4, 3, off);
    put(&mut m, 4, 4, d2);
    m
}

/// `C_2` deformed recursion operator.
pub fn c2_deformed_tensor(x: &[Jet]) -> Matrix {
    let mut m = c2_open_tensor(x);
    let w = x[0].scale(-2.0).exp().scale(-2.0);
    m[(0, 0)] = &m[(0, 0)] + &w;
    m[(2, 2)] = &m[(2, 2)] + &w;
    m
}

fn e(x: &[Jet], i: usize, j: usize) -> Jet {
    (&x[i - 1] - &x[j - 1]).exp()
}

/// Open `A_4` recursion operator.
pub fn a4_open_tensor(x: &[Jet]) -> Matrix {
    let mut m = Matrix::zeros(8, 8);
    for i in 1..=4 {
        put(&mut m, i, i, x[3 + i].clone());
        put(&mut m, 4 + i, 4 + i, x[3 + i].clone());
    }
    let upper = [[0., 1., 1., 1.], [-1., 0., 1., 1.], [-1., -1., 0., 1.], [-1., -1., -1., 0.]];
    for i in 0..4 {
        for j in 0..4 {
            put(&mut m, i + 1, j + 5, Jet::constant(upper[i][j]));
        }
    }
    put(&mut m, 5, 2, neg(e(x, 1, 2)));
    put(&mut m, 6, 1, e(x, 1, 2));
    put(&mut m, 6, 3, neg(e(x, 2, 3)));
    put(&mut m, 7, 2, e(x, 2, 3));
    put(&mut m, 7, 4, neg(e(x, 3, 4)));
    put(&mut m, 8, 3, e(x, 3, 4));
    m
}

/// `N_−` for `A_4^(1)`.
pub fn a4_n_minus(x: &[Jet]) -> Matrix {
    let mut m = a4_open_tensor(x);
    put(&mut m, 5, 4, e(x, 4, 1));
    put(&mut m, 8, 1, neg(e(x, 4, 1)));
    m
}

/// `π_{N_−} = N_− π` for `A_4^(1)`.
pub fn a4_pi_n_minus(x: &[Jet]) -> Matrix {
    let mut m = Matrix::zeros(8, 8);
    let upper = [[0., -1., -1., -1.], [1., 0., -1., -1.], [1., 1., 0., -1.], [1., 1., 1., 0.]];
    for i in 0..4 {
        for j in 0..4 {
            put(&mut m, i + 1, j + 1, Jet::constant(upper[i][j]));
        }
        put(&mut m, i + 1, i + 5, x[4 + i].clone());
        put(&mut m, i + 5, i + 1, neg(x[4 + i].clone()));
    }
    put(&mut m, 5, 6, neg(e(x, 1, 2)));
    put(&mut m, 5, 8, e(x, 4, 1));
    put(&mut m, 6, 5, e(x, 1, 2));
    put(&mut m, 6, 7, neg(e(x, 2, 3)));
    put(&mut m, 7, 6, e(x, 2, 3));
    put(&mut m, 7, 8, neg(e(x, 3, 4)));
    put(&mut m, 8, 5, neg(e(x, 4, 1)));
    put(&mut m, 8, 7, e(x, 3, 4));
    m
}

/// `P_0` in Flaschka coordinates, `n = 4`.
pub fn a4_p0(y: &[Jet]) -> Matrix {
    let a = |i: usize| y[i - 1].clone();
    let mut m = Matrix::zeros(8, 8);
    put(&mut m, 1, 5, a(1));
    put(&mut m, 1, 6, neg(a(1)));
    put(&mut m, 2, 6, a(2));
    put(&mut m, 2, 7, neg(a(2)));
    put(&mut m, 3, 7, a(3));
    put(&mut m, 3, 8, neg(a(3)));
    put(&mut m, 4, 5, neg(a(4)));
    put(&mut m, 4, 8, a(4));
    put(&mut m, 5, 1, neg(a(1)));
    put(&mut m, 5, 4, a(4));
    put(&mut m, 6, 1, a(1));
    put(&mut m, 6, 2, neg(a(2)));
    put(&mut m, 7, 2, a(2));
    put(&mut m, 7, 3, neg(a(3)));
    put(&mut m, 8, 3, a(3));
    put(&mut m, 8, 4, neg(a(4)));
    m
}

/// `P_1` in Flaschka coordinates, `n = 4`.
pub fn a4_p1(y: &[Jet]) -> Matrix {
    let a = |i: usize| y[i - 1].clone();
    let b = |i: usize| y[3 + i].clone();
    let ab = |i: usize, j: usize| &a(i) * &b(j);
    let aa = |i: usize, j: usize| &a(i) * &a(j);
    let mut m = Matrix::zeros(8, 8);
    put(&mut m, 1, 2, neg(aa(1, 2)));
    put(&mut m, 1, 4, aa(1, 4));
    put(&mut m, 1, 5, ab(1, 1));
    put(&mut m, 1, 6, neg(ab(1, 2)));
    put(&mut m, 2, 1, aa(1, 2));
    put(&mut m, 2, 3, neg(aa(2, 3)));
    put(&mut m, 2, 6, ab(2, 2));
    put(&mut m, 2, 7, neg(ab(2, 3)));
    put(&mut m, 3, 2, aa(2, 3));
    put(&mut m, 3, 4, neg(aa(3, 4)));
    put(&mut m, 3, 7, ab(3, 3));
    put(&mut m, 3, 8, neg(ab(3, 4)));
    put(&mut m, 4, 1, neg(aa(1, 4)));
    put(&mut m, 4, 3, aa(3, 4));
    put(&mut m, 4, 5, neg(ab(4, 1)));
    put(&mut m, 4, 8, ab(4, 4));
    put(&mut m, 5, 1, neg(ab(1, 1)));
    put(&mut m, 5, 4, ab(4, 1));
    put(&mut m, 5, 6, a(1));
    put(&mut m, 5, 8, neg(a(4)));
    put(&mut m, 6, 1, ab(1, 2));
    put(&mut m, 6, 2, neg(ab(2, 2)));
    put(&mut m, 6, 5, neg(a(1)));
    put(&mut m, 6, 7, a(2));
    put(&mut m, 7, 2, ab(2, 3));
    put(&mut m, 7, 3, neg(ab(3, 3)));
    put(&mut m, 7, 6, neg(a(2)));
    put(&mut m, 7, 8, a(3));
    put(&mut m, 8, 3, ab(3, 4));
    put(&mut m, 8, 4, neg(ab(4, 4)));
    put(&mut m, 8, 5, a(4));
    put(&mut m, 8, 7, neg(a(3)));
    m
}

/// Tangent map of the Flaschka map, `n = 4`, in terms of `a`.
pub fn a4_f_star(a: &[Jet]) -> Matrix {
    let a = |i: usize| a[i - 1].clone();
    let mut m = Matrix::zeros(8, 8);
    put(&mut m, 1, 1, a(1));
    put(&mut m, 1, 2, neg(a(1)));
    put(&mut m, 2, 2, a(2));
    put(&mut m, 2, 3, neg(a(2)));
    put(&mut m, 3, 3, a(3));
    put(&mut m, 3, 4, neg(a(3)));
    put(&mut m, 4, 1, neg(a(4)));
    put(&mut m, 4, 4, a(4));
    for i in 5..=8 {
        put(&mut m, i, i, one());
    }
    m
}
