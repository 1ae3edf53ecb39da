//! Points and jet-evaluable fields on R^d.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::marker::PhantomData;

use crate::error::{Error, Result};
use crate::form::Form;
use crate::jet::{seed, Jet};
use crate::linalg::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Chart {
    /// Coordinates `(q_1, …, q_n, p_1, …, p_n)`.
    Physical,
    /// Coordinates `(a_1, …, a_n, b_1, …, b_n)` with every `a_i < 0`.
    Flaschka,
}

/// A point of R^{2n} tagged with its chart.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
    chart: Chart,
}

impl Point {
    pub fn new(coords: Vec<f64>, chart: Chart) -> Result<Self> {
        if coords.is_empty() || coords.len() % 2 != 0 {
            return Err(Error::Invalid(format!(
                "phase-space dimension must be even and positive, got {}",
                coords.len()
            )));
        }
        if let Some(v) = coords.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite coordinate {v}")));
        }
        if chart == Chart::Flaschka {
            let n = coords.len() / 2;
            if let Some(i) = (0..n).find(|&i| coords[i] >= 0.0) {
                return Err(Error::Domain(format!("a_{} = {} is not negative", i + 1, coords[i])));
            }
        }
        Ok(Point { coords, chart })
    }

    pub fn physical(q: &[f64], p: &[f64]) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::Dimension { expected: q.len(), found: p.len() });
        }
        Self::new([q, p].concat(), Chart::Physical)
    }

    pub fn flaschka(a: &[f64], b: &[f64]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::Dimension { expected: a.len(), found: b.len() });
        }
        Self::new([a, b].concat(), Chart::Flaschka)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    /// Particle count.
    pub fn n(&self) -> usize {
        self.coords.len() / 2
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// First half of the coordinates (`q` or `a`).
    pub fn positions(&self) -> &[f64] {
        &self.coords[..self.n()]
    }

    /// Second half of the coordinates (`p` or `b`).
    pub fn momenta(&self) -> &[f64] {
        &self.coords[self.n()..]
    }
}

/// A field on R^d evaluated as jets of the requested order.
pub trait Field<T>: Send + Sync {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64], order: u8) -> T;
}

pub type ScalarField = Arc<dyn Field<Jet>>;
/// Vector fields and covector fields share a representation; the role is fixed by use.
pub type VectorField = Arc<dyn Field<Vec<Jet>>>;
pub type CovectorField = Arc<dyn Field<Vec<Jet>>>;
pub type FormField = Arc<dyn Field<Form>>;
/// `(1,1)` tensors with entry `(i, j) = N^i_j`.
pub type Tensor11Field = Arc<dyn Field<Matrix>>;
/// Bivectors in stored-matrix form: entry `(i, j)` is `π^{ji}`.
pub type BivectorField = Arc<dyn Field<Matrix>>;

/// A field given by a formula in the coordinate jets.
pub struct FnField<T, F> {
    dim: usize,
    f: F,
    _t: PhantomData<fn() -> T>,
}

impl<T, F> Field<T> for FnField<T, F>
where
    F: Fn(&[Jet]) -> T + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &[f64], order: u8) -> T {
        debug_assert_eq!(x.len(), self.dim);
        (self.f)(&seed(x, order))
    }
}

/// Wrap a coordinate formula as a shared field.
pub fn from_formula<T: 'static, F>(dim: usize, f: F) -> Arc<dyn Field<T>>
where
    F: Fn(&[Jet]) -> T + Send + Sync + 'static,
{
    Arc::new(FnField { dim, f, _t: PhantomData })
}

/// A field computed directly from the point and the requested order, used for
/// operators that differentiate other fields.
pub struct PointFn<T, F> {
    dim: usize,
    f: F,
    _t: PhantomData<fn() -> T>,
}

impl<T, F> Field<T> for PointFn<T, F>
where
    F: Fn(&[f64], u8) -> T + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &[f64], order: u8) -> T {
        (self.f)(x, order)
    }
}

pub fn from_point_fn<T: 'static, F>(dim: usize, f: F) -> Arc<dyn Field<T>>
where
    F: Fn(&[f64], u8) -> T + Send + Sync + 'static,
{
    Arc::new(PointFn { dim, f, _t: PhantomData })
}

/// Constant vector or covector field.
pub fn constant_vector(v: Vec<f64>) -> VectorField {
    let d = v.len();
    from_formula(d, move |_| v.iter().map(|&c| Jet::constant(c)).collect())
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flaschka_points_need_negative_a() {
        assert!(Point::flaschka(&[-1.0, -0.5], &[0.0, 1.0]).is_ok());
        assert!(matches!(Point::flaschka(&[-1.0, 0.5], &[0.0, 1.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn odd_dimension_rejected() {
        assert!(Point::new(alloc::vec![0.0; 3], Chart::Physical).is_err());
    }

    #[test]
    fn formula_fields_seed_coordinates() {
        let f: ScalarField = from_formula(2, |x: &[Jet]| &x[0] * &x[1]);
        let v = f.eval(&[2.0, 5.0], 1);
        assert_eq!(v.value(), 10.0);
        assert_eq!(v.d1(0), 5.0);
    }
}
