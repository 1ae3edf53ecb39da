//! Truncated multivariate Taylor jets.
//!
//! A [`Jet`] carries the value of a function together with its gradient and
//! (packed, upper-triangular) Hessian with respect to the seeded coordinates.
//! Arithmetic propagates derivatives exactly up to the jet's order, so every
//! derivative used by the geometric operators is exact to rounding.
//! Coefficients are stored in double-double precision (see [`crate::dd`]).
//!
//! The order of a jet is the highest derivative it still carries. Taking a
//! partial derivative lowers it by one, which is how nested operators such as
//! `d(i_N dω)` consume one level per differentiation.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::dd::Dd;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Highest order a seeded jet can carry.
pub const MAX_ORDER: u8 = 2;

/// Order marker for exact constants: they can be differentiated indefinitely.
const EXACT: u8 = u8::MAX;

#[derive(Clone, PartialEq)]
pub struct Jet {
    value: Dd,
    // Empty means identically zero; otherwise length `dim`.
    grad: Vec<Dd>,
    // Empty means identically zero; otherwise length dim*(dim+1)/2.
    hess: Vec<Dd>,
    dim: usize,
    order: u8,
}

#[inline]
fn packed(i: usize, j: usize, dim: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    a * dim - a * (a + 1) / 2 + b
}

fn merge_dim(a: &Jet, b: &Jet) -> usize {
    match (a.dim, b.dim) {
        (0, d) | (d, 0) => d,
        (d, e) => {
            assert_eq!(d, e, "jets seeded in different dimensions");
            d
        }
    }
}

fn lincomb(ca: Dd, a: &[Dd], cb: Dd, b: &[Dd]) -> Vec<Dd> {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => Vec::new(),
        (false, true) => a.iter().map(|&x| ca * x).collect(),
        (true, false) => b.iter().map(|&x| cb * x).collect(),
        (false, false) => a.iter().zip(b).map(|(&x, &y)| ca * x + cb * y).collect(),
    }
}

// Sum or difference, avoiding the multiplications of `lincomb`.
fn signed_sum(a: &[Dd], sub: bool, b: &[Dd]) -> Vec<Dd> {
    let sb = |y: Dd| if sub { -y } else { y };
    match (a.is_empty(), b.is_empty()) {
        (true, true) => Vec::new(),
        (false, true) => a.to_vec(),
        (true, false) => b.iter().map(|&y| sb(y)).collect(),
        (false, false) => a.iter().zip(b).map(|(&x, &y)| x + sb(y)).collect(),
    }
}

impl Jet {
    /// An exact constant.
    pub fn constant(value: f64) -> Self {
        Self::constant_dd(Dd::from_f64(value))
    }

    /// An exact constant given in extended precision.
    pub fn constant_dd(value: Dd) -> Self {
        Jet { value, grad: Vec::new(), hess: Vec::new(), dim: 0, order: EXACT }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    /// The coordinate function `x_index` on R^dim, valued `value`, seeded to `order`.
    pub fn variable(value: f64, index: usize, dim: usize, order: u8) -> Self {
        assert!(index < dim, "variable index {index} out of range for dimension {dim}");
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        let mut grad = Vec::new();
        if order >= 1 {
            grad = vec![Dd::ZERO; dim];
            grad[index] = Dd::ONE;
        }
        Jet { value: Dd::from_f64(value), grad, hess: Vec::new(), dim, order }
    }

    /// Value rounded to `f64`.
    /// Like [`Jet::variable`] with an extended-precision value.
    pub fn variable_dd(value: Dd, index: usize, dim: usize, order: u8) -> Self {
        let mut v = Self::variable(0.0, index, dim, order);
        v.value = value;
        v
    }

    pub fn value(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn value_dd(&self) -> Dd {
        self.value
    }

    /// `None` for exact constants.
    pub fn order(&self) -> Option<u8> {
        (self.order != EXACT).then_some(self.order)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// First partial derivative in direction `i`, zero when not carried.
    pub fn d1(&self, i: usize) -> f64 {
        self.d1_dd(i).to_f64()
    }

    fn d1_dd(&self, i: usize) -> Dd {
        self.grad.get(i).copied().unwrap_or(Dd::ZERO)
    }

    /// Second partial derivative, zero when not carried.
    pub fn d2(&self, i: usize, j: usize) -> f64 {
        self.d2_dd(i, j).to_f64()
    }

    fn d2_dd(&self, i: usize, j: usize) -> Dd {
        if self.hess.is_empty() {
            Dd::ZERO
        } else {
            self.hess[packed(i, j, self.dim)]
        }
    }

    pub fn gradient(&self, dim: usize) -> Vec<f64> {
        (0..dim).map(|i| self.d1(i)).collect()
    }

    /// The partial derivative `∂_i` as a jet of one lower order.
    ///
    /// # Panics
    /// If the jet has order 0 (no derivative information left).
    pub fn partial(&self, i: usize) -> Jet {
        if self.order == EXACT {
            return Jet::zero();
        }
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let order = self.order - 1;
        let value = self.d1_dd(i);
        let grad = if order >= 1 && !self.hess.is_empty() {
            (0..self.dim).map(|j| self.d2_dd(i, j)).collect()
        } else {
            Vec::new()
        };
        Jet { value, grad, hess: Vec::new(), dim: self.dim, order }
    }

    /// Drop derivative information above `order`.
    pub fn truncate(&self, order: u8) -> Jet {
        if order >= self.order {
            return self.clone();
        }
        let mut out = self.clone();
        out.order = order;
        out.normalize();
        out
    }

    fn normalize(&mut self) {
        if self.order < 2 {
            self.hess.clear();
        }
        if self.order < 1 {
            self.grad.clear();
        }
    }

    /// Apply a scalar function given its value and first two derivatives at `self.value`.
    pub fn chain(&self, f0: Dd, f1: Dd, f2: Dd) -> Jet {
        let order = self.order;
        let mut grad = Vec::new();
        let mut hess = Vec::new();
        if order >= 1 && !self.grad.is_empty() {
            grad = self.grad.iter().map(|&g| f1 * g).collect();
        }
        if order >= 2 && (!self.grad.is_empty() || !self.hess.is_empty()) {
            let d = self.dim;
            hess = vec![Dd::ZERO; d * (d + 1) / 2];
            for i in 0..d {
                let gi = f2 * self.d1_dd(i);
                for j in i..d {
                    hess[packed(i, j, d)] = f1 * self.d2_dd(i, j) + gi * self.d1_dd(j);
                }
            }
        }
        Jet { value: f0, grad, hess, dim: self.dim, order }
    }

    pub fn exp(&self) -> Jet {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    pub fn ln(&self) -> Jet {
        let v = self.value;
        let r = v.recip();
        self.chain(v.ln(), r, -(r * r))
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn sqrt(&self) -> Jet {
        let r = self.value.sqrt();
        let h = r.recip().mul_f64(0.5);
        self.chain(r, h, -(h / self.value).mul_f64(0.5))
    }

    pub fn recip(&self) -> Jet {
        let r = self.value.recip();
        let r2 = r * r;
        self.chain(r, -r2, (r2 * r).mul_f64(2.0))
    }

    pub fn powi(&self, k: i32) -> Jet {
        let v = self.value;
        let p = |e: i32| if e == 0 { Dd::ONE } else { v.powi(e) };
        let kf = k as f64;
        self.chain(p(k), p(k - 1).mul_f64(kf), p(k - 2).mul_f64(kf * (kf - 1.0)))
    }

    pub fn scale(&self, c: f64) -> Jet {
        Jet {
            value: self.value.mul_f64(c),
            grad: self.grad.iter().map(|g| g.mul_f64(c)).collect(),
            hess: self.hess.iter().map(|h| h.mul_f64(c)).collect(),
            dim: self.dim,
            order: self.order,
        }
    }

    /// Exact-to-rounding division by a number, e.g. `1/6` is not an `f64`.
    pub fn div_f64(&self, c: f64) -> Jet {
        self.scale_dd(Dd::from_f64(c).recip())
    }

    pub fn scale_dd(&self, c: Dd) -> Jet {
        Jet {
            value: self.value * c,
            grad: self.grad.iter().map(|&g| g * c).collect(),
            hess: self.hess.iter().map(|&h| h * c).collect(),
            dim: self.dim,
            order: self.order,
        }
    }

    fn add_signed(&self, sub: bool, other: &Jet) -> Jet {
        let order = self.order.min(other.order);
        let ov = if sub { -other.value } else { other.value };
        let mut out = Jet {
            value: self.value + ov,
            grad: if order >= 1 { signed_sum(&self.grad, sub, &other.grad) } else { Vec::new() },
            hess: if order >= 2 { signed_sum(&self.hess, sub, &other.hess) } else { Vec::new() },
            dim: merge_dim(self, other),
            order,
        };
        out.normalize();
        out
    }

    fn mul_jet(&self, other: &Jet) -> Jet {
        let order = self.order.min(other.order);
        let dim = merge_dim(self, other);
        let (a, b) = (self.value, other.value);
        let grad = if order >= 1 { lincomb(b, &self.grad, a, &other.grad) } else { Vec::new() };
        let mut hess = Vec::new();
        if order >= 2 {
            hess = lincomb(b, &self.hess, a, &other.hess);
            if !self.grad.is_empty() && !other.grad.is_empty() {
                if hess.is_empty() {
                    hess = vec![Dd::ZERO; dim * (dim + 1) / 2];
                }
                for i in 0..dim {
                    for j in i..dim {
                        let k = packed(i, j, dim);
                        hess[k] = hess[k] + (self.grad[i] * other.grad[j] + self.grad[j] * other.grad[i]);
                    }
                }
            }
        }
        Jet { value: a * b, grad, hess, dim, order }
    }

    /// True for exact constants, whose derivatives of every order vanish.
    pub fn is_exact_constant(&self) -> bool {
        self.order == EXACT && self.grad.is_empty() && self.hess.is_empty()
    }

    /// True for the exact constant zero, which every operation treats as absent.
    pub fn is_exact_zero(&self) -> bool {
        self.order == EXACT && self.grad.is_empty() && self.hess.is_empty() && self.value == Dd::ZERO
    }

    /// Largest absolute difference in value between two jets.
    pub fn abs_diff(&self, other: &Jet) -> f64 {
        libm::fabs((self.value - other.value).to_f64())
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.order() {
            None => write!(f, "Jet({})", self.value),
            Some(o) => write!(f, "Jet({}, order {o}, grad {:?})", self.value, self.gradient(self.dim)),
        }
    }
}

impl Default for Jet {
    fn default() -> Self {
        Jet::zero()
    }
}

impl From<f64> for Jet {
    fn from(c: f64) -> Self {
        Jet::constant(c)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&Jet> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                let f: fn(&Jet, &Jet) -> Jet = $body;
                f(self, rhs)
            }
        }
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                (&self).$m(rhs)
            }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                self.$m(&rhs)
            }
        }
        impl $tr<f64> for Jet {
            type Output = Jet;
            fn $m(self, rhs: f64) -> Jet {
                (&self).$m(&Jet::constant(rhs))
            }
        }
        impl $tr<f64> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: f64) -> Jet {
                self.$m(&Jet::constant(rhs))
            }
        }
        impl $tr<Jet> for f64 {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                (&Jet::constant(self)).$m(&rhs)
            }
        }
        impl $tr<&Jet> for f64 {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                (&Jet::constant(self)).$m(rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| {
    if a.is_exact_zero() {
        b.clone()
    } else if b.is_exact_zero() {
        a.clone()
    } else {
        a.add_signed(false, b)
    }
});
binop!(Sub, sub, |a, b| if b.is_exact_zero() { a.clone() } else { a.add_signed(true, b) });
binop!(Mul, mul, |a, b| {
    if a.is_exact_zero() || b.is_exact_zero() {
        Jet::zero()
    } else if a.order == EXACT && a.grad.is_empty() {
        b.scale_dd(a.value)
    } else if b.order == EXACT && b.grad.is_empty() {
        a.scale_dd(b.value)
    } else {
        a.mul_jet(b)
    }
});
binop!(Div, div, |a, b| {
    if b.order == EXACT && b.grad.is_empty() {
        a.scale_dd(b.value.recip())
    } else {
        a.mul_jet(&b.recip())
    }
});

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl AddAssign<&Jet> for Jet {
    fn add_assign(&mut self, rhs: &Jet) {
        *self = self.add_signed(false, rhs);
    }
}

impl AddAssign<Jet> for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self = self.add_signed(false, &rhs);
    }
}

impl SubAssign<&Jet> for Jet {
    fn sub_assign(&mut self, rhs: &Jet) {
        *self = self.add_signed(true, rhs);
    }
}

impl SubAssign<Jet> for Jet {
    fn sub_assign(&mut self, rhs: Jet) {
        *self = self.add_signed(true, &rhs);
    }
}

impl MulAssign<f64> for Jet {
    fn mul_assign(&mut self, rhs: f64) {
        *self = self.scale(rhs);
    }
}

impl core::iter::Sum for Jet {
    fn sum<I: Iterator<Item = Jet>>(iter: I) -> Jet {
        iter.fold(Jet::zero(), |acc, x| acc + x)
    }
}

/// Seed the coordinate jets `x_0, …, x_{d-1}` at `x` to the given order.
pub fn seed(x: &[f64], order: u8) -> Vec<Jet> {
    let d = x.len();
    x.iter().enumerate().map(|(i, &v)| Jet::variable(v, i, d, order)).collect()
}

/// Seed at a point given in extended precision.
pub fn seed_dd(x: &[Dd], order: u8) -> Vec<Jet> {
    let d = x.len();
    x.iter().enumerate().map(|(i, &v)| Jet::variable_dd(v, i, d, order)).collect()
}

/// Values of a slice of jets.
pub fn values(v: &[Jet]) -> Vec<f64> {
    v.iter().map(Jet::value).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(x: &[f64]) -> Vec<Jet> {
        seed(x, 2)
    }

    #[test]
    fn exact_constants_are_recognised_conservatively() {
        assert!(Jet::zero().is_exact_zero());
        assert!(Jet::constant(2.0).is_exact_constant() && !Jet::constant(2.0).is_exact_zero());
        let v = vars(&[2.0, 3.0]);
        // the difference is zero in value and derivatives but carries order 2
        let d = &v[0] - &v[0];
        assert!(!d.is_exact_zero() && !d.is_exact_constant());
        assert!(!v[1].is_exact_constant());
    }

    #[test]
    fn product_rule_and_hessian() {
        let v = vars(&[2.0, 3.0]);
        let f = &v[0] * &v[0] * &v[1];
        assert_eq!(f.value(), 12.0);
        assert_eq!(f.d1(0), 12.0);
        assert_eq!(f.d1(1), 4.0);
        assert_eq!(f.d2(0, 0), 6.0);
        assert_eq!(f.d2(0, 1), 4.0);
        assert_eq!(f.d2(1, 1), 0.0);
    }

    #[test]
    fn exp_chain_rule() {
        let v = vars(&[0.5, -0.25]);
        let f = (&v[0] - &v[1]).exp();
        let e = libm::exp(0.75);
        assert!((f.value() - e).abs() < 1e-15);
        assert!((f.d1(0) - e).abs() < 1e-15);
        assert!((f.d1(1) + e).abs() < 1e-15);
        assert!((f.d2(0, 1) + e).abs() < 1e-15);
    }

    #[test]
    fn partial_lowers_order() {
        let v = vars(&[1.5, 0.5]);
        let f = &v[0] * &v[1] * &v[1];
        let fx = f.partial(0);
        assert_eq!(fx.order(), Some(1));
        assert_eq!(fx.value(), 0.25);
        assert_eq!(fx.d1(1), 1.0);
        let fxy = fx.partial(1);
        assert_eq!(fxy.order(), Some(0));
        assert_eq!(fxy.value(), 1.0);
    }

    #[test]
    #[should_panic(expected = "order-0")]
    fn differentiating_order_zero_panics() {
        let x = Jet::variable(1.0, 0, 1, 0);
        let _ = x.partial(0);
    }

    #[test]
    fn constants_stay_exact() {
        let c = Jet::constant(3.0);
        assert_eq!(c.order(), None);
        assert_eq!(c.partial(0).value(), 0.0);
        let x = Jet::variable(2.0, 0, 1, 1);
        assert_eq!((&c * &x).order(), Some(1));
    }

    #[test]
    fn division_and_recip() {
        let v = vars(&[2.0]);
        let f = Jet::one() / &v[0];
        assert!((f.d1(0) + 0.25).abs() < 1e-15);
        assert!((f.d2(0, 0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn cancellation_below_f64_resolution() {
        let v = vars(&[1e8, 1.0]);
        let big = &v[0] * &v[0];
        let f = (&big + &v[1]) - &big;
        assert_eq!(f.value(), 1.0);
        assert_eq!(f.d1(1), 1.0);
        assert_eq!(f.d1(0), 0.0);
    }

    #[test]
    fn truncate_drops_hessian() {
        let v = vars(&[1.0, 1.0]);
        let f = (&v[0] * &v[1]).truncate(1);
        assert_eq!(f.d2(0, 1), 0.0);
        assert_eq!(f.d1(0), 1.0);
    }
}
