//! Finite-difference oracle for jet derivatives.
//!
//! Differences of a field with magnitude `|f|` carry roundoff of order
//! `ε|f|/h`, so every error is divided by `max(1, max |f|)` at the point.

use pqn_core::{Field, Form, Jet, Matrix};

/// Components of a field value as a flat list of jets.
pub trait Components {
    fn components(&self) -> Vec<Jet>;
}

impl Components for Jet {
    fn components(&self) -> Vec<Jet> {
        vec![self.clone()]
    }
}

impl Components for Vec<Jet> {
    fn components(&self) -> Vec<Jet> {
        self.clone()
    }
}

impl Components for Matrix {
    fn components(&self) -> Vec<Jet> {
        (0..self.rows()).flat_map(|i| self.row(i)).collect()
    }
}

impl Components for Form {
    fn components(&self) -> Vec<Jet> {
        Form::components(self).to_vec()
    }
}

pub const STEP: f64 = 2e-4;

/// Fourth-order central difference of a vector-valued function along `i`.
pub fn five_point(f: impl Fn(&[f64]) -> Vec<f64>, x: &[f64], i: usize) -> Vec<f64> {
    let at = |s: f64| {
        let mut y = x.to_vec();
        y[i] += s * STEP;
        f(&y)
    };
    let (m2, m1, p1, p2) = (at(-2.0), at(-1.0), at(1.0), at(2.0));
    (0..p1.len()).map(|k| (m2[k] - 8.0 * m1[k] + 8.0 * p1[k] - p2[k]) / (12.0 * STEP)).collect()
}

fn scale(jets: &[Jet]) -> f64 {
    jets.iter().fold(1.0_f64, |s, c| s.max(c.value().abs()))
}

/// `max |∂_i f_jet − ∂_i f_fd| / max(1, |f|)` over components and coordinates.
pub fn first_derivative_error<T: Components>(f: &dyn Field<T>, x: &[f64]) -> f64 {
    let jet = f.eval(x, 1).components();
    let s = scale(&jet);
    let mut worst: f64 = 0.0;
    for i in 0..x.len() {
        let fd = five_point(|c| f.eval(c, 0).components().iter().map(Jet::value).collect(), x, i);
        for (j, v) in jet.iter().zip(fd) {
            worst = fold_max(worst, (j.d1(i) - v).abs() / s);
        }
    }
    worst
}

/// Same for second derivatives, differencing the jet gradient.
pub fn second_derivative_error<T: Components>(f: &dyn Field<T>, x: &[f64]) -> f64 {
    let d = x.len();
    let jet = f.eval(x, 2).components();
    let s = scale(&jet);
    let gradient = |c: &[f64]| -> Vec<f64> {
        f.eval(c, 1).components().iter().flat_map(|g| (0..d).map(|k| g.d1(k)).collect::<Vec<_>>()).collect()
    };
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for (m, v) in five_point(gradient, x, i).iter().enumerate() {
            worst = fold_max(worst, (jet[m / d].d2(i, m % d) - v).abs() / s);
        }
    }
    worst
}

/// `max` that lets a NaN through instead of discarding it.
pub fn fold_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use pqn_core::field::{from_formula, from_point_fn, ScalarField};

    #[test]
    fn exact_jets_agree_and_wrong_jets_do_not() {
        let f: ScalarField = from_formula(2, |x| x[0].exp() * &x[1].sin());
        let x = [0.3, -0.7];
        assert!(first_derivative_error(f.as_ref(), &x) < 1e-9);
        assert!(second_derivative_error(f.as_ref(), &x) < 1e-8);
        // the value moves with x but the jet claims a zero derivative
        let frozen: ScalarField = from_point_fn(2, |x, _| Jet::constant(x[0]));
        assert!((first_derivative_error(frozen.as_ref(), &x) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn nan_propagates() {
        assert!(fold_max(1.0, f64::NAN).is_nan());
        assert!(fold_max(f64::NAN, 1.0).is_nan());
        assert_eq!(fold_max(1.0, 2.0), 2.0);
    }
}
