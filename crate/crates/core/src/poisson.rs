//! Poisson bivectors, the sharp map, Koszul brackets of forms and the
//! Schouten bracket of bivectors.
//!
//! A bivector is stored as the matrix `A` acting on column covectors, so
//! `A_{ij} = π^{ji}`, `π^♯α = A α` and `{f, g} = df^T A dg`. The transpose that
//! recovers tensor components `π^{ij}` lives only in [`bivector_components`].

use alloc::vec::Vec;

use crate::diffgeo::{gradient_jets, lie_derivative_covector_jets};
use crate::error::Result;
use crate::field::{check_dim, from_formula, from_point_fn, BivectorField, Field, Point, VectorField};
use crate::form::{basis_1form, Form};
use crate::jet::{values, Jet};
use crate::linalg::{dot, unit, vsub, Matrix};

/// Tensor components `P^{ij}` of a bivector given in stored form.
pub fn bivector_components(stored: &Matrix) -> Matrix {
    stored.transpose()
}

/// Stored form of a bivector given by its tensor components.
pub fn stored_from_components(components: &Matrix) -> Matrix {
    components.transpose()
}

/// The canonical stored matrix `[[0, I], [-I, 0]]` on R^{2n}.
pub fn canonical_matrix(n: usize) -> Matrix {
    Matrix::from_fn(2 * n, 2 * n, |i, j| {
        if j == i + n {
            Jet::one()
        } else if i == j + n {
            Jet::constant(-1.0)
        } else {
            Jet::zero()
        }
    })
}

#[derive(Clone)]
pub struct PoissonStructure {
    matrix: BivectorField,
    canonical: bool,
}

impl PoissonStructure {
    /// Canonical structure with `{q_i, p_j} = δ_ij`.
    pub fn canonical(n: usize) -> Self {
        let m = canonical_matrix(n);
        PoissonStructure { matrix: from_formula(2 * n, move |_| m.clone()), canonical: true }
    }

    /// A structure from a stored-matrix field. Jacobi is not assumed; see [`jacobi_residual`].
    pub fn new(matrix: BivectorField) -> Self {
        PoissonStructure { matrix, canonical: false }
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn field(&self) -> &BivectorField {
        &self.matrix
    }

    /// The stored matrix `A` at `x`.
    pub fn stored(&self, x: &[f64], order: u8) -> Matrix {
        self.matrix.eval(x, order)
    }
}

/// `π^♯α = A α`.
pub fn sharp_jets(a: &Matrix, alpha: &[Jet]) -> Vec<Jet> {
    a.mul_vec(alpha)
}

/// `π^♯ Ω^♭` as a `(1,1)` matrix.
pub fn sharp_flat(a: &Matrix, omega: &Form) -> Matrix {
    a.matmul(&omega.flat())
}

/// Contravariant image `π^♯Ω` of a 2-form as bivector components.
pub fn sharp_2form_components(a: &Matrix, omega: &Form) -> Form {
    omega.map_slots(a)
}

/// Poisson bracket `⟨df, π^♯dg⟩` from differentials.
pub fn bracket_jets(a: &Matrix, df: &[Jet], dg: &[Jet]) -> Jet {
    dot(df, &a.mul_vec(dg))
}

/// `[α, f]_π = ⟨df, π^♯α⟩`, the bracket of a 1-form with a function; `f`
/// must carry one order more than the result.
pub fn koszul_function_jets(a: &Matrix, alpha: &[Jet], f: &Jet) -> Jet {
    dot(&gradient_jets(f, alpha.len()), &a.mul_vec(alpha))
}

/// Koszul bracket of 1-forms: `L_{π^♯α}β − L_{π^♯β}α − d⟨β, π^♯α⟩`.
pub fn koszul1_jets(a: &Matrix, alpha: &[Jet], beta: &[Jet]) -> Vec<Jet> {
    let xa = a.mul_vec(alpha);
    let xb = a.mul_vec(beta);
    let pairing = dot(beta, &xa);
    let d = alpha.len();
    vsub(
        &vsub(&lie_derivative_covector_jets(&xa, beta), &lie_derivative_covector_jets(&xb, alpha)),
        &gradient_jets(&pairing, d),
    )
}

/// Brackets `[dx^i, dx^k]` for all index pairs.
pub fn basis_koszul_jets(a: &Matrix) -> Vec<Vec<Vec<Jet>>> {
    let d = a.rows();
    let e: Vec<Vec<Jet>> = (0..d).map(|i| unit(d, i)).collect();
    let mut out = alloc::vec![alloc::vec![Vec::new(); d]; d];
    // the bracket of constant forms only sees derivatives of the structure
    if (0..d).all(|i| a.row(i).iter().all(Jet::is_exact_constant)) {
        return alloc::vec![alloc::vec![alloc::vec![Jet::zero(); d]; d]; d];
    }
    for i in 0..d {
        out[i][i] = alloc::vec![Jet::zero(); d];
        for k in i + 1..d {
            let b = koszul1_jets(a, &e[i], &e[k]);
            out[k][i] = b.iter().map(|c| -c).collect();
            out[i][k] = b;
        }
    }
    out
}

/// Precomputed pieces for brackets against a fixed 2-form `Ω`.
struct TwoFormContext<'a> {
    a: &'a Matrix,
    omega: &'a Form,
    /// `[dx^i, Ω]` for every `i`.
    dx_bracket: Vec<Form>,
}

impl<'a> TwoFormContext<'a> {
    fn new(a: &'a Matrix, omega: &'a Form) -> Self {
        let d = a.rows();
        let basis = basis_koszul_jets(a);
        let theta: Vec<Form> = (0..d).map(|k| omega.interior(&unit(d, k))).collect();
        let grads: Vec<(Vec<usize>, Vec<Jet>)> = crate::form::combinations(d, 2)
            .into_iter()
            .map(|kl| {
                let g = gradient_jets(&omega.get(&kl), d);
                (kl, g)
            })
            .collect();
        let dx_bracket = (0..d)
            .map(|i| {
                let col = a.column(i);
                // derivative part: Σ_{k<l} ⟨dΩ_kl, π^♯dx^i⟩ dx^k∧dx^l
                let mut out = Form::zero(d, 2);
                for (kl, g) in &grads {
                    out.set(kl, dot(g, &col));
                }
                // Σ_k [dx^i, dx^k] ∧ θ_k
                for k in 0..d {
                    let b = Form::from_covector(&basis[i][k]);
                    if !b.is_exact_zero() && !theta[k].is_exact_zero() {
                        out = out.add(&b.wedge(&theta[k]));
                    }
                }
                out
            })
            .collect();
        TwoFormContext { a, omega, dx_bracket }
    }

    /// `[f dx^i, Ω] = f [dx^i, Ω] − dx^i ∧ i_w Ω` with `w_k = [dx^k, f]_π`.
    fn monomial(&self, f: &Jet, i: usize) -> Form {
        let d = self.a.rows();
        // A^T df, i.e. w_k = ⟨df, π^♯dx^k⟩
        let w = self.a.tr_mul_vec(&gradient_jets(f, d));
        let corr = basis_1form(d, i).wedge(&self.omega.interior(&w));
        self.dx_bracket[i].scale_jet(f).sub(&corr)
    }
}

/// `[β, Ω]_π` for a 1-form `β` and a 2-form `Ω` (a 2-form).
pub fn koszul_1form_2form_jets(a: &Matrix, beta: &[Jet], omega: &Form) -> Form {
    let ctx = TwoFormContext::new(a, omega);
    let d = a.rows();
    (0..d).fold(Form::zero(d, 2), |acc, i| acc.add(&ctx.monomial(&beta[i], i)))
}

/// `[Ω, Ω']_π` for two 2-forms (a 3-form).
///
/// `Ω'` is expanded as `Σ_{i<j} (Ω'_{ij} dx^i) ∧ dx^j` and reduced with the
/// graded derivation rule, using `[Ω, β] = −[β, Ω]` for a 1-form `β`.
pub fn koszul2_jets(a: &Matrix, omega: &Form, omega2: &Form) -> Form {
    let ctx = TwoFormContext::new(a, omega);
    let d = a.rows();
    let mut out = Form::zero(d, 3);
    for ij in crate::form::combinations(d, 2) {
        let (i, j) = (ij[0], ij[1]);
        let c = omega2.get(&ij);
        if c.is_exact_zero() {
            continue;
        }
        let dxj = basis_1form(d, j);
        let beta = basis_1form(d, i).scale_jet(&c);
        let left = ctx.monomial(&c, i).wedge(&dxj);
        let right = beta.wedge(&ctx.dx_bracket[j]);
        out = out.sub(&left).add(&right);
    }
    out
}

/// Schouten bracket of two bivectors given in stored form, as components
/// `[P, Q]^{ijk}` for `i < j < k`:
/// `[P, Q]^{ijk} = −Σ_cyc Σ_l (P^{li} ∂_l Q^{jk} + Q^{li} ∂_l P^{jk})`.
///
/// The overall sign is the one for which a Poisson quasi-Nijenhuis structure
/// satisfies `[π_N, π_N] = 2 π^♯φ` with [`sharp_3form_components`].
pub fn schouten_jets(p_stored: &Matrix, q_stored: &Matrix) -> Form {
    let p = bivector_components(p_stored);
    let q = bivector_components(q_stored);
    let d = p.rows();
    let dp: Vec<Matrix> = (0..d).map(|l| p.partial(l)).collect();
    let dq: Vec<Matrix> = (0..d).map(|l| q.partial(l)).collect();
    Form::from_fn(d, 3, |ix| {
        let mut acc = Jet::zero();
        for (i, j, k) in [(ix[0], ix[1], ix[2]), (ix[1], ix[2], ix[0]), (ix[2], ix[0], ix[1])] {
            for l in 0..d {
                acc -= &p[(l, i)] * &dq[l][(j, k)] + &q[(l, i)] * &dp[l][(j, k)];
            }
        }
        acc
    })
}

/// `π^♯φ` of a 3-form, `(π^♯φ)(α, β, γ) = φ(π^♯α, π^♯β, π^♯γ)`, as trivector components.
pub fn sharp_3form_components(a: &Matrix, phi: &Form) -> Form {
    assert_eq!(phi.degree(), 3, "expected a 3-form");
    phi.map_slots(a)
}

/// `π^♯ α` at a point.
pub fn sharp(pi: &PoissonStructure, alpha: &[f64], x: &Point) -> Result<Vec<f64>> {
    check_dim(pi.dim(), x.dim())?;
    check_dim(pi.dim(), alpha.len())?;
    let a = pi.stored(x.coords(), 0);
    let al: Vec<Jet> = alpha.iter().map(|&c| Jet::constant(c)).collect();
    Ok(values(&sharp_jets(&a, &al)))
}

/// `{f, g}` at a point.
pub fn poisson_bracket(pi: &PoissonStructure, f: &dyn Field<Jet>, g: &dyn Field<Jet>, x: &Point) -> Result<f64> {
    check_dim(pi.dim(), x.dim())?;
    let c = x.coords();
    let d = c.len();
    let df = gradient_jets(&f.eval(c, 1), d);
    let dg = gradient_jets(&g.eval(c, 1), d);
    Ok(bracket_jets(&pi.stored(c, 0), &df, &dg).value())
}

/// `[α, β]_π` of two 1-form fields at a point.
pub fn koszul_bracket_1forms(
    pi: &PoissonStructure,
    alpha: &dyn Field<Vec<Jet>>,
    beta: &dyn Field<Vec<Jet>>,
    x: &Point,
) -> Result<Vec<f64>> {
    check_dim(pi.dim(), x.dim())?;
    let c = x.coords();
    Ok(values(&koszul1_jets(&pi.stored(c, 1), &alpha.eval(c, 1), &beta.eval(c, 1))))
}

/// `[Ω, Ω']_π` of two 2-form fields at a point.
pub fn koszul_bracket_2forms(
    pi: &PoissonStructure,
    omega: &dyn Field<Form>,
    omega2: &dyn Field<Form>,
    x: &Point,
) -> Result<Form> {
    check_dim(pi.dim(), x.dim())?;
    let c = x.coords();
    let (w1, w2) = (omega.eval(c, 1), omega2.eval(c, 1));
    if w1.degree() != 2 || w2.degree() != 2 {
        return Err(crate::error::Error::Degree(if w1.degree() != 2 { w1.degree() } else { w2.degree() }));
    }
    Ok(koszul2_jets(&pi.stored(c, 1), &w1, &w2).truncate(0))
}

/// `[P, Q]` of two stored-form bivector fields at a point.
pub fn schouten_bracket_bivectors(p: &dyn Field<Matrix>, q: &dyn Field<Matrix>, x: &Point) -> Result<Form> {
    check_dim(p.dim(), x.dim())?;
    check_dim(q.dim(), x.dim())?;
    let c = x.coords();
    Ok(schouten_jets(&p.eval(c, 1), &q.eval(c, 1)).truncate(0))
}

/// Max-abs of `[π, π]` at a point.
pub fn jacobi_residual(pi: &PoissonStructure, x: &Point) -> Result<f64> {
    Ok(schouten_bracket_bivectors(pi.field().as_ref(), pi.field().as_ref(), x)?.max_abs())
}

/// The vector field `π^♯ dH`.
pub fn hamiltonian_vector_field(pi: &PoissonStructure, h: crate::field::ScalarField) -> VectorField {
    let pi = pi.clone();
    let d = pi.dim();
    from_point_fn(d, move |x, r| {
        let dh = gradient_jets(&h.eval(x, r + 1), d);
        sharp_jets(&pi.stored(x, r), &dh)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{from_formula, ScalarField};

    #[test]
    fn canonical_sharp_signs() {
        let pi = PoissonStructure::canonical(2);
        let x = Point::physical(&[0.1, 0.2], &[0.3, 0.4]).unwrap();
        assert_eq!(sharp(&pi, &[1.0, 0.0, 0.0, 0.0], &x).unwrap(), [0.0, 0.0, -1.0, 0.0]);
        assert_eq!(sharp(&pi, &[0.0, 0.0, 1.0, 0.0], &x).unwrap(), [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn q_p_bracket_is_one() {
        let pi = PoissonStructure::canonical(1);
        let q: ScalarField = from_formula(2, |x: &[Jet]| x[0].clone());
        let p: ScalarField = from_formula(2, |x: &[Jet]| x[1].clone());
        let x = Point::physical(&[0.5], &[-0.5]).unwrap();
        assert_eq!(poisson_bracket(&pi, q.as_ref(), p.as_ref(), &x).unwrap(), 1.0);
    }

    #[test]
    fn canonical_is_jacobi() {
        let pi = PoissonStructure::canonical(3);
        let x = Point::physical(&[0.1, 0.2, 0.3], &[0.0, 0.5, -0.5]).unwrap();
        assert_eq!(jacobi_residual(&pi, &x).unwrap(), 0.0);
    }
}
