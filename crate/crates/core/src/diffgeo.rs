//! Exterior calculus on R^d: Lie brackets and derivatives, `d`, `i_N`, `d_N`.
//!
//! Each operator comes in two layers. The `*_jets` kernels act on component
//! jets that were evaluated one order above the desired result; the point-level
//! functions evaluate fields, apply a kernel and return order-0 values.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::{check_dim, from_point_fn, Field, FormField, Point, ScalarField, Tensor11Field, VectorField};
use crate::form::Form;
use crate::jet::{values, Jet};
use crate::linalg::Matrix;

/// Gradient of a scalar jet, one order lower.
pub fn gradient_jets(f: &Jet, dim: usize) -> Vec<Jet> {
    (0..dim).map(|i| f.partial(i)).collect()
}

/// `[X, Y]^k = X^m ∂_m Y^k − Y^m ∂_m X^k`.
pub fn lie_bracket_jets(x: &[Jet], y: &[Jet]) -> Vec<Jet> {
    let d = x.len();
    let dx: Vec<Vec<Jet>> = (0..d).map(|m| x.iter().map(|c| c.partial(m)).collect()).collect();
    let dy: Vec<Vec<Jet>> = (0..d).map(|m| y.iter().map(|c| c.partial(m)).collect()).collect();
    (0..d).map(|k| (0..d).map(|m| &x[m] * &dy[m][k] - &y[m] * &dx[m][k]).sum()).collect()
}

/// `(L_X N)^i_j = X^m ∂_m N^i_j − N^m_j ∂_m X^i + N^i_m ∂_j X^m`.
pub fn lie_derivative_tensor_jets(x: &[Jet], n: &Matrix) -> Matrix {
    let d = x.len();
    let dn: Vec<Matrix> = (0..d).map(|m| n.partial(m)).collect();
    // jac[(i, m)] = ∂_m X^i
    let jac = Matrix::from_fn(d, d, |i, m| x[i].partial(m));
    let transport = Matrix::from_fn(d, d, |i, j| (0..d).map(|m| &x[m] * &dn[m][(i, j)]).sum());
    &(&transport - &jac.matmul(n)) + &n.matmul(&jac)
}

/// `(L_X α)_j = X^m ∂_m α_j + α_m ∂_j X^m`.
pub fn lie_derivative_covector_jets(x: &[Jet], alpha: &[Jet]) -> Vec<Jet> {
    let d = x.len();
    (0..d).map(|j| (0..d).map(|m| &x[m] * &alpha[j].partial(m) + &alpha[m] * &x[m].partial(j)).sum()).collect()
}

/// `d_N ω = i_N dω − d i_N ω`, and `N^* df` on functions.
pub fn d_n_jets(n: &Matrix, omega: &Form) -> Form {
    if omega.degree() == 0 {
        let df = gradient_jets(omega.scalar_value(), omega.dim());
        return Form::from_covector(&n.tr_mul_vec(&df));
    }
    omega.exterior_derivative().i_n(n).sub(&omega.i_n(n).exterior_derivative())
}

/// Derived field `d ω`.
pub fn d_field(omega: FormField) -> FormField {
    let d = omega.dim();
    from_point_fn(d, move |x, r| omega.eval(x, r + 1).exterior_derivative())
}

/// Derived field `d_N ω`.
pub fn d_n_field(n: Tensor11Field, omega: FormField) -> FormField {
    let d = omega.dim();
    from_point_fn(d, move |x, r| d_n_jets(&n.eval(x, r + 1), &omega.eval(x, r + 1)).truncate(r))
}

/// Derived field `i_N ω`.
pub fn i_n_field(n: Tensor11Field, omega: FormField) -> FormField {
    let d = omega.dim();
    from_point_fn(d, move |x, r| omega.eval(x, r).i_n(&n.eval(x, r)))
}

/// Differential of a scalar field as a 1-form field.
pub fn differential(f: ScalarField) -> FormField {
    let d = f.dim();
    from_point_fn(d, move |x, r| Form::from_covector(&gradient_jets(&f.eval(x, r + 1), d)))
}

/// A 0-form field wrapping a scalar field.
pub fn scalar_form(f: ScalarField) -> FormField {
    let d = f.dim();
    from_point_fn(d, move |x, r| Form::scalar(d, f.eval(x, r)))
}

/// Derived vector field `[X, Y]`.
pub fn lie_bracket_field(x: VectorField, y: VectorField) -> VectorField {
    let d = x.dim();
    from_point_fn(d, move |p, r| lie_bracket_jets(&x.eval(p, r + 1), &y.eval(p, r + 1)))
}

fn fields_match(dim: usize, x: &Point) -> Result<()> {
    check_dim(dim, x.dim())
}

/// `[X, Y]` at a point.
pub fn lie_bracket(x: &dyn Field<Vec<Jet>>, y: &dyn Field<Vec<Jet>>, at: &Point) -> Result<Vec<f64>> {
    fields_match(x.dim(), at)?;
    fields_match(y.dim(), at)?;
    let c = at.coords();
    Ok(values(&lie_bracket_jets(&x.eval(c, 1), &y.eval(c, 1))))
}

/// `dω` at a point, for `ω` of degree 0, 1 or 2.
pub fn exterior_derivative(omega: &dyn Field<Form>, at: &Point) -> Result<Form> {
    fields_match(omega.dim(), at)?;
    let w = omega.eval(at.coords(), 1);
    if w.degree() > 2 {
        return Err(Error::Degree(w.degree()));
    }
    Ok(w.exterior_derivative())
}

/// `L_X N` at a point.
pub fn lie_derivative_tensor11(x: &dyn Field<Vec<Jet>>, n: &dyn Field<Matrix>, at: &Point) -> Result<Matrix> {
    fields_match(x.dim(), at)?;
    fields_match(n.dim(), at)?;
    let c = at.coords();
    Ok(lie_derivative_tensor_jets(&x.eval(c, 1), &n.eval(c, 1)))
}

/// `i_N ω` at a point; 0-forms are rejected.
pub fn i_n_form(n: &dyn Field<Matrix>, omega: &dyn Field<Form>, at: &Point) -> Result<Form> {
    fields_match(n.dim(), at)?;
    fields_match(omega.dim(), at)?;
    let c = at.coords();
    let w = omega.eval(c, 0);
    if w.degree() == 0 {
        return Err(Error::Degree(0));
    }
    Ok(w.i_n(&n.eval(c, 0)))
}

/// `d_N ω` at a point, for `ω` of degree 0, 1 or 2.
pub fn d_n(n: &dyn Field<Matrix>, omega: &dyn Field<Form>, at: &Point) -> Result<Form> {
    fields_match(n.dim(), at)?;
    fields_match(omega.dim(), at)?;
    let c = at.coords();
    let w = omega.eval(c, 1);
    if w.degree() > 2 {
        return Err(Error::Degree(w.degree()));
    }
    Ok(d_n_jets(&n.eval(c, 1), &w).truncate(0))
}
