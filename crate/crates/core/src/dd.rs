//! Double-double floating point: an unevaluated sum `hi + lo` of two `f64`
//! carrying roughly 32 significant decimal digits.
//!
//! Trace Hamiltonians of high order reach magnitudes of 1e8 and beyond on the
//! sampling box, and their Poisson brackets cancel to zero. Absolute residuals
//! of 1e-8 are then out of reach in plain `f64`; jets therefore compute in
//! this type and round to `f64` only when a residual is reported.
//!
//! Algorithms follow the classic error-free transformations (Knuth two-sum,
//! Dekker product); no fused multiply-add is assumed.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Default, PartialEq)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    pub const PI: Dd = Dd { hi: core::f64::consts::PI, lo: 1.224_646_799_147_353_2e-16 };
    pub const LN2: Dd = Dd { hi: core::f64::consts::LN_2, lo: 2.319_046_813_846_299_6e-17 };
    const TWO_PI: Dd = Dd { hi: core::f64::consts::TAU, lo: 2.449_293_598_294_706_4e-16 };
    const HALF_PI: Dd = Dd { hi: core::f64::consts::FRAC_PI_2, lo: 6.123_233_995_736_766e-17 };

    #[inline]
    pub const fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Nearest `f64`.
    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite()
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Dd {
        let (p1, p2) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p1, p2 + self.lo * b);
        Dd { hi, lo }
    }

    pub fn sqr(self) -> Dd {
        self * self
    }

    fn ldexp(self, k: i32) -> Dd {
        let s = libm::scalbn(1.0, k);
        Dd { hi: self.hi * s, lo: self.lo * s }
    }

    pub fn recip(self) -> Dd {
        Dd::ONE / self
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 { Dd::ZERO } else { Dd::from_f64(f64::NAN) };
        }
        let x = 1.0 / libm::sqrt(self.hi);
        let ax = self.hi * x;
        let corr = (self - Dd::from_f64(ax).sqr()).hi * (x * 0.5);
        let (hi, lo) = two_sum(ax, corr);
        Dd { hi, lo }
    }

    pub fn exp(self) -> Dd {
        if self.hi > 709.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        let k = libm::floor(self.hi / Dd::LN2.hi + 0.5);
        let r = (self - Dd::LN2.mul_f64(k)).mul_f64(1.0 / 512.0);
        // exp(r) − 1 by Taylor series, |r| < 7e-4
        let mut s = r;
        let mut term = r;
        for i in 2..=12 {
            term = (term * r) / Dd::from_f64(i as f64);
            s = s + term;
            if libm::fabs(term.hi) < 1e-36 {
                break;
            }
        }
        // (1+s)^2 − 1 = 2s + s², nine times
        for _ in 0..9 {
            s = s.mul_f64(2.0) + s.sqr();
        }
        (s + Dd::ONE).ldexp(k as i32)
    }

    pub fn ln(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::from_f64(if self.hi == 0.0 { f64::NEG_INFINITY } else { f64::NAN });
        }
        let x = Dd::from_f64(libm::log(self.hi));
        x + self * (-x).exp() - Dd::ONE
    }

    /// `(sin t, cos t)` for `|t| ≤ π/4`.
    fn sin_cos_reduced(t: Dd) -> (Dd, Dd) {
        let t2 = t.sqr();
        let mut s = t;
        let mut term = t;
        let mut i = 1.0;
        loop {
            term = -(term * t2) / Dd::from_f64((i + 1.0) * (i + 2.0));
            s = s + term;
            i += 2.0;
            if libm::fabs(term.hi) < 1e-35 || i > 40.0 {
                break;
            }
        }
        let mut c = Dd::ONE;
        let mut term = Dd::ONE;
        let mut i = 0.0;
        loop {
            term = -(term * t2) / Dd::from_f64((i + 1.0) * (i + 2.0));
            c = c + term;
            i += 2.0;
            if libm::fabs(term.hi) < 1e-35 || i > 40.0 {
                break;
            }
        }
        (s, c)
    }

    pub fn sin_cos(self) -> (Dd, Dd) {
        let z = libm::round(self.hi / Dd::TWO_PI.hi);
        let r = self - Dd::TWO_PI.mul_f64(z);
        let j = libm::round(r.hi / Dd::HALF_PI.hi);
        let t = r - Dd::HALF_PI.mul_f64(j);
        let (s, c) = Self::sin_cos_reduced(t);
        match (j as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }

    pub fn powi(self, k: i32) -> Dd {
        let mut base = if k < 0 { self.recip() } else { self };
        let mut e = k.unsigned_abs();
        let mut acc = Dd::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base.sqr();
            e >>= 1;
        }
        acc
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::from_f64(x)
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, b.hi);
        let (hi, lo) = quick_two_sum(p1, p2 + (self.hi * b.lo + self.lo * b.hi));
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from_f64(q3)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl fmt::Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}{:+e}", self.hi, self.lo)
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_f64(), f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Dd, b: Dd, tol: f64) -> bool {
        libm::fabs((a - b).to_f64()) <= tol * libm::fabs(b.to_f64()).max(1.0)
    }

    #[test]
    fn one_third_times_three() {
        let third = Dd::ONE / Dd::from_f64(3.0);
        let back = third * Dd::from_f64(3.0);
        assert!(libm::fabs((back - Dd::ONE).to_f64()) < 1e-31);
    }

    #[test]
    fn cancellation_is_resolved() {
        // (1 + 2^-60) − 1 is lost in f64
        let tiny = libm::scalbn(1.0, -60);
        let s = Dd::ONE + Dd::from_f64(tiny);
        assert_eq!((s - Dd::ONE).to_f64(), tiny);
    }

    #[test]
    fn exp_ln_roundtrip() {
        for &x in &[-3.7, -1.0, -1e-3, 0.0, 0.25, 1.0, 2.5, 30.0] {
            let v = Dd::from_f64(x);
            assert!(close(v.exp().ln(), v, 1e-30), "x = {x}");
        }
        let e = Dd::ONE.exp();
        // e to 32 digits: 2.7182818284590452353602874713527
        let expect = Dd::from_f64(core::f64::consts::E) + Dd::from_f64(1.445_646_891_729_250_2e-16);
        assert!(close(e, expect, 1e-31));
    }

    #[test]
    fn exp_is_multiplicative() {
        let a = Dd::from_f64(0.7) / Dd::from_f64(3.0);
        let b = Dd::from_f64(-1.3);
        assert!(close((a + b).exp(), a.exp() * b.exp(), 1e-30));
    }

    #[test]
    fn sin_cos_identity() {
        for &x in &[-7.0, -2.0, -0.3, 0.0, 0.5, 1.2, 3.0, 10.0] {
            let (s, c) = Dd::from_f64(x).sin_cos();
            assert!(close(s.sqr() + c.sqr(), Dd::ONE, 1e-30), "x = {x}");
            assert!(libm::fabs(s.to_f64() - libm::sin(x)) < 1e-15);
            assert!(libm::fabs(c.to_f64() - libm::cos(x)) < 1e-15);
        }
    }

    #[test]
    fn sqrt_squares_back() {
        let two = Dd::from_f64(2.0);
        assert!(close(two.sqrt().sqr(), two, 1e-31));
    }

    #[test]
    fn powi_matches_repeated_product() {
        let x = Dd::from_f64(1.1);
        assert!(close(x.powi(5), x * x * x * x * x, 1e-31));
        assert!(close(x.powi(-2) * x.sqr(), Dd::ONE, 1e-31));
    }
}
