//! Small dense matrices of jets.

use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::jet::Jet;

/// Row-major dense matrix with jet entries.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Jet>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: (0..rows * cols).map(|_| Jet::zero()).collect() }
    }

    pub fn identity(d: usize) -> Self {
        Self::from_fn(d, d, |i, j| if i == j { Jet::one() } else { Jet::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Jet) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Constant matrix from row-major values.
    pub fn from_values(rows: usize, cols: usize, values: &[f64]) -> Self {
        assert_eq!(values.len(), rows * cols);
        Self::from_fn(rows, cols, |i, j| Jet::constant(values[i * cols + j]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Matrix {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn column(&self, j: usize) -> Vec<Jet> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row(&self, i: usize) -> Vec<Jet> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn map(&self, f: impl Fn(&Jet) -> Jet) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn scale(&self, c: f64) -> Matrix {
        self.map(|x| x.scale(c))
    }

    pub fn scale_jet(&self, c: &Jet) -> Matrix {
        self.map(|x| x * c)
    }

    pub fn partial(&self, i: usize) -> Matrix {
        self.map(|x| x.partial(i))
    }

    pub fn truncate(&self, order: u8) -> Matrix {
        self.map(|x| x.truncate(order))
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        Self::from_fn(self.rows, other.cols, |i, j| (0..self.cols).map(|k| &self[(i, k)] * &other[(k, j)]).sum())
    }

    pub fn mul_vec(&self, v: &[Jet]) -> Vec<Jet> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows).map(|i| (0..self.cols).map(|k| &self[(i, k)] * &v[k]).sum()).collect()
    }

    /// `selfᵀ · v`.
    pub fn tr_mul_vec(&self, v: &[Jet]) -> Vec<Jet> {
        assert_eq!(self.rows, v.len(), "matrix-vector dimension mismatch");
        (0..self.cols).map(|j| (0..self.rows).map(|k| &self[(k, j)] * &v[k]).sum()).collect()
    }

    pub fn trace(&self) -> Jet {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).sum()
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_mul(&self, other: &Matrix) -> Jet {
        assert!(self.cols == other.rows && self.rows == other.cols, "trace product dimension mismatch");
        (0..self.rows)
            .flat_map(|i| (0..self.cols).map(move |k| (i, k)))
            .map(|(i, k)| &self[(i, k)] * &other[(k, i)])
            .sum()
    }

    /// Powers `self^0, …, self^k`.
    pub fn powers(&self, k: usize) -> Vec<Matrix> {
        assert!(self.is_square());
        let mut out = Vec::with_capacity(k + 1);
        out.push(Matrix::identity(self.rows));
        for r in 1..=k {
            let next = out[r - 1].matmul(self);
            out.push(next);
        }
        out
    }

    pub fn pow(&self, k: usize) -> Matrix {
        self.powers(k).pop().unwrap()
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    /// Values as row-major f64.
    pub fn values(&self) -> Vec<f64> {
        self.data.iter().map(Jet::value).collect()
    }

    /// Largest absolute entry value.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(libm::fabs(x.value())))
    }

    /// Largest absolute entrywise value difference.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max(a.abs_diff(b)))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Jet;
    fn index(&self, (i, j): (usize, usize)) -> &Jet {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Jet {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add<&Matrix> for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] + &rhs[(i, j)])
    }
}

impl Sub<&Matrix> for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] - &rhs[(i, j)])
    }
}

impl Mul<&Matrix> for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.matmul(rhs)
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale(-1.0)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, " ")?;
            for j in 0..self.cols {
                write!(f, " {:>12.6}", self[(i, j)].value())?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Max-abs value of a slice of jets.
pub fn max_abs(v: &[Jet]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(libm::fabs(x.value())))
}

/// Max-abs entrywise difference between two jet slices.
pub fn max_abs_diff(a: &[Jet], b: &[Jet]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max(x.abs_diff(y)))
}

pub fn dot(a: &[Jet], b: &[Jet]) -> Jet {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn axpy(c: &Jet, x: &[Jet], y: &[Jet]) -> Vec<Jet> {
    x.iter().zip(y).map(|(a, b)| c * a + b).collect()
}

pub fn vsub(a: &[Jet], b: &[Jet]) -> Vec<Jet> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vadd(a: &[Jet], b: &[Jet]) -> Vec<Jet> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vscale(c: f64, a: &[Jet]) -> Vec<Jet> {
    a.iter().map(|x| x.scale(c)).collect()
}

/// Unit covector/vector `e_i` in R^d as exact constants.
pub fn unit(d: usize, i: usize) -> Vec<Jet> {
    (0..d).map(|k| if k == i { Jet::one() } else { Jet::zero() }).collect()
}
