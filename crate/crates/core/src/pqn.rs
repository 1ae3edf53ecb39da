//! Nijenhuis torsion, Poisson quasi-Nijenhuis structures, deformations by
//! closed 2-forms and the trace Hamiltonian chains they generate.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::OnceCell;

use crate::diffgeo::{d_n_jets, gradient_jets, lie_bracket_jets, lie_derivative_tensor_jets};
use crate::error::{Error, Result};
use crate::field::{from_formula, from_point_fn, Field, FormField, Point, ScalarField, Tensor11Field, VectorField};
use crate::form::{combinations, Form};
use crate::jet::Jet;
use crate::linalg::{dot, max_abs, max_abs_diff, unit, vscale, vsub, Matrix};
use crate::poisson::{koszul2_jets, sharp_flat, PoissonStructure};

/// Tolerance used to accept a deformation 2-form as closed.
pub const CLOSEDNESS_TOL: f64 = 1e-10;

/// `T_N(X, Y) = [NX, NY] − N([NX, Y] + [X, NY] − N[X, Y])`.
pub fn torsion_jets(n: &Matrix, x: &[Jet], y: &[Jet]) -> Vec<Jet> {
    let nx = n.mul_vec(x);
    let ny = n.mul_vec(y);
    let inner = lie_bracket_jets(&nx, y);
    let inner2 = lie_bracket_jets(x, &ny);
    let xy = lie_bracket_jets(x, y);
    let correction = vsub(&crate::linalg::vadd(&inner, &inner2), &n.mul_vec(&xy));
    vsub(&lie_bracket_jets(&nx, &ny), &n.mul_vec(&correction))
}

/// `i_X T_N = L_{NX} N − N L_X N` as a matrix whose column `j` is `T_N(X, ∂_j)`.
pub fn i_x_torsion_jets(n: &Matrix, x: &[Jet]) -> Matrix {
    let nx = n.mul_vec(x);
    &lie_derivative_tensor_jets(&nx, n) - &n.matmul(&lie_derivative_tensor_jets(x, n))
}

/// Torsion on coordinate pairs: entry `a` is the matrix `i_{∂_a} T_N`, i.e.
/// column `b` of entry `a` is `T_N(∂_a, ∂_b)`.
///
/// Expands the defining formula on coordinate fields:
/// `T^k_{ab} = N^m_a ∂_m N^k_b − N^m_b ∂_m N^k_a − N^k_m (∂_a N^m_b − ∂_b N^m_a)`.
pub fn torsion_basis_jets(n: &Matrix) -> Vec<Matrix> {
    let d = n.rows();
    let n0 = n.truncate(0);
    let dn: Vec<Matrix> = (0..d).map(|m| n.partial(m)).collect();
    let mut t = vec![Matrix::zeros(d, d); d];
    for ab in combinations(d, 2) {
        let (a, b) = (ab[0], ab[1]);
        let curl: Vec<Jet> = (0..d).map(|m| &dn[a][(m, b)] - &dn[b][(m, a)]).collect();
        let ncurl = n0.mul_vec(&curl);
        for k in 0..d {
            let mut v = -&ncurl[k];
            for m in 0..d {
                v += &(&n0[(m, a)] * &dn[m][(k, b)]);
                v -= &(&n0[(m, b)] * &dn[m][(k, a)]);
            }
            t[b][(k, a)] = -&v;
            t[a][(k, b)] = v;
        }
    }
    t
}

/// Both compatibility residuals for a stored Poisson matrix `a` and tensor `n`
/// evaluated one order above the result.
pub fn compatibility_jets(a: &Matrix, n: &Matrix) -> (f64, f64) {
    let d = a.rows();
    let r1 = (&n.matmul(a) - &a.matmul(&n.transpose())).max_abs();
    let dn: Vec<Matrix> = (0..d).map(|m| n.partial(m)).collect();
    let mut r2: f64 = 0.0;
    for alpha in 0..d {
        let lie = lie_derivative_tensor_jets(&a.column(alpha), n);
        for b in 0..d {
            // L_{π♯dx^a}(N)∂_b − π♯ ∂_b(N^* dx^a) + π♯ d(N^a_b)
            let row_deriv: Vec<Jet> = (0..d).map(|j| dn[b][(alpha, j)].clone()).collect();
            let grad_entry: Vec<Jet> = (0..d).map(|j| dn[j][(alpha, b)].clone()).collect();
            let w = vsub(&grad_entry, &row_deriv);
            let res = crate::linalg::vadd(&lie.column(b), &a.mul_vec(&w));
            r2 = r2.max(max_abs(&res));
        }
    }
    (r1, r2)
}

/// Second compatibility expression for arbitrary `α` and `X`, built directly from
/// Lie derivatives: `L_{π♯α}(N)X − π♯L_X(N^*α) + π♯L_{NX}α`.
pub fn compatibility_general_jets(a: &Matrix, n: &Matrix, alpha: &[Jet], x: &[Jet]) -> Vec<Jet> {
    use crate::diffgeo::lie_derivative_covector_jets as lie_cov;
    let pa = a.mul_vec(alpha);
    let first = lie_derivative_tensor_jets(&pa, n).mul_vec(x);
    let second = a.mul_vec(&lie_cov(x, &n.tr_mul_vec(alpha)));
    let third = a.mul_vec(&lie_cov(&n.mul_vec(x), alpha));
    crate::linalg::vadd(&vsub(&first, &second), &third)
}

/// A Poisson quasi-Nijenhuis candidate `(π, N, φ)`. Nothing is assumed: every
/// axiom is reported as a residual by [`PqnStructure::axioms_at`].
#[derive(Clone)]
pub struct PqnStructure {
    pub pi: PoissonStructure,
    pub n: Tensor11Field,
    pub phi: FormField,
}

/// Residuals of the defining axioms at one point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AxiomResiduals {
    pub compatibility_matrix: f64,
    pub compatibility_lie: f64,
    pub d_phi: f64,
    pub d_i_n_phi: f64,
    pub torsion: f64,
}

impl AxiomResiduals {
    pub fn max(&self) -> f64 {
        [self.compatibility_matrix, self.compatibility_lie, self.d_phi, self.d_i_n_phi, self.torsion]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn merge(&self, other: &Self) -> Self {
        AxiomResiduals {
            compatibility_matrix: self.compatibility_matrix.max(other.compatibility_matrix),
            compatibility_lie: self.compatibility_lie.max(other.compatibility_lie),
            d_phi: self.d_phi.max(other.d_phi),
            d_i_n_phi: self.d_i_n_phi.max(other.d_i_n_phi),
            torsion: self.torsion.max(other.torsion),
        }
    }
}

/// The zero 3-form field.
pub fn zero_phi(dim: usize) -> FormField {
    from_formula(dim, move |_| Form::zero(dim, 3))
}

impl PqnStructure {
    /// A Poisson–Nijenhuis pair, i.e. `φ = 0`.
    pub fn pn(pi: PoissonStructure, n: Tensor11Field) -> Self {
        let d = pi.dim();
        PqnStructure { pi, n, phi: zero_phi(d) }
    }

    pub fn dim(&self) -> usize {
        self.pi.dim()
    }

    /// `T_N(∂_a, ∂_b) − π♯(i_{∂_a∧∂_b} φ)` over all coordinate pairs.
    pub fn torsion_residual(&self, x: &[f64]) -> f64 {
        let d = self.dim();
        let t = torsion_basis_jets(&self.n.eval(x, 1));
        let a = self.pi.stored(x, 0);
        let phi = self.phi.eval(x, 0);
        let mut r: f64 = 0.0;
        for ab in combinations(d, 2) {
            let contracted = phi.interior(&unit(d, ab[0])).interior(&unit(d, ab[1])).to_covector();
            r = r.max(max_abs_diff(&t[ab[0]].column(ab[1]), &a.mul_vec(&contracted)));
        }
        r
    }

    /// Residuals of all axioms at `x`.
    pub fn axioms_at(&self, x: &Point) -> Result<AxiomResiduals> {
        crate::field::check_dim(self.dim(), x.dim())?;
        let c = x.coords();
        let (compatibility_matrix, compatibility_lie) = compatibility_jets(&self.pi.stored(c, 1), &self.n.eval(c, 1));
        let phi1 = self.phi.eval(c, 1);
        let d_phi = phi1.exterior_derivative().max_abs();
        let d_i_n_phi = phi1.i_n(&self.n.eval(c, 1)).exterior_derivative().max_abs();
        Ok(AxiomResiduals {
            compatibility_matrix,
            compatibility_lie,
            d_phi,
            d_i_n_phi,
            torsion: self.torsion_residual(c),
        })
    }

    /// Deform by the closed 2-form `sign·Ω`:
    /// `N ↦ N + sign·π♯Ω♭`, `φ ↦ φ + sign·d_NΩ + ½[Ω, Ω]_π`.
    ///
    /// `Ω` is checked for closedness at each probe point.
    pub fn deform(&self, omega: FormField, sign: f64, probes: &[Point]) -> Result<PqnStructure> {
        for p in probes {
            let r = omega.eval(p.coords(), 1).exterior_derivative().max_abs();
            if !(r <= CLOSEDNESS_TOL) {
                return Err(Error::NotClosed(r));
            }
        }
        let d = self.dim();
        let (pi, n, phi) = (self.pi.clone(), self.n.clone(), self.phi.clone());
        let (pi2, n2, om2) = (pi.clone(), n.clone(), omega.clone());
        let new_n: Tensor11Field = from_point_fn(d, move |x, r| {
            let a = pi2.stored(x, r);
            &n2.eval(x, r) + &sharp_flat(&a, &om2.eval(x, r)).scale(sign)
        });
        let new_phi: FormField = from_point_fn(d, move |x, r| {
            let a = pi.stored(x, r + 1);
            let w = omega.eval(x, r + 1);
            let dn = d_n_jets(&n.eval(x, r + 1), &w).scale(sign);
            let half = koszul2_jets(&a, &w, &w).scale(0.5);
            phi.eval(x, r).add(&dn).add(&half).truncate(r)
        });
        Ok(PqnStructure { pi: self.pi.clone(), n: new_n, phi: new_phi })
    }
}

/// `H_k = Tr(N^k) / 2k` as a scalar field.
pub fn trace_hamiltonian(n: Tensor11Field, k: usize) -> ScalarField {
    assert!(k >= 1, "trace Hamiltonians start at k = 1");
    let d = n.dim();
    from_point_fn(d, move |x, r| n.eval(x, r).pow(k).trace().div_f64((2 * k) as f64))
}

/// Data of a trace-Hamiltonian chain: the Poisson structure, the tensor whose
/// traces define `H_k`, and optionally the deformation `(Ω, sign)` that
/// defines the coefficients `f_k = −sign·Tr(N^{k−1} π♯Ω♭)`.
#[derive(Clone)]
pub struct ChainData {
    pub pi: PoissonStructure,
    pub n: Tensor11Field,
    pub deformation: Option<(FormField, f64)>,
    pub kmax: usize,
}

impl ChainData {
    pub fn new(pi: PoissonStructure, n: Tensor11Field, kmax: usize) -> Self {
        ChainData { pi, n, deformation: None, kmax }
    }

    pub fn with_deformation(mut self, omega: FormField, sign: f64) -> Self {
        self.deformation = Some((omega, sign));
        self
    }

    pub fn hamiltonian(&self, k: usize) -> ScalarField {
        trace_hamiltonian(self.n.clone(), k)
    }

    pub fn vector_field(&self, k: usize) -> VectorField {
        crate::poisson::hamiltonian_vector_field(&self.pi, self.hamiltonian(k))
    }

    /// The coefficient field `f_k`; zero for an undeformed chain.
    pub fn coefficient(&self, k: usize) -> ScalarField {
        let d = self.pi.dim();
        let (pi, n) = (self.pi.clone(), self.n.clone());
        let def = self.deformation.clone();
        from_point_fn(d, move |x, r| match &def {
            None => Jet::zero(),
            Some((omega, sign)) => {
                let ps = sharp_flat(&pi.stored(x, r), &omega.eval(x, r));
                n.eval(x, r).pow(k - 1).matmul(&ps).trace().scale(-sign)
            }
        })
    }

    /// Evaluate everything needed by the chain checks at one point.
    pub fn at(&self, x: &[f64]) -> ChainPoint {
        let d = x.len();
        let top = self.kmax + 1;
        let n1 = self.n.eval(x, 1);
        let powers1 = n1.powers(top);
        let a = self.pi.stored(x, 0);
        let mut h = vec![0.0];
        let mut dh = vec![vec![Jet::zero(); d]];
        for k in 1..=top {
            let hk = powers1[k].trace().div_f64((2 * k) as f64);
            h.push(hk.value());
            dh.push(gradient_jets(&hk, d));
        }
        let xs = dh.iter().map(|g| a.mul_vec(g)).collect();
        let powers: Vec<Matrix> = powers1.iter().map(|m| m.truncate(0)).collect();
        let deformation = self.deformation.as_ref().map(|(w, s)| w.eval(x, 0).scale(*s));
        ChainPoint { a, powers, h, dh, x: xs, n1, torsion: OnceCell::new(), deformation }
    }
}

/// Chain quantities at one point (values only).
#[derive(Clone, Debug)]
pub struct ChainPoint {
    pub a: Matrix,
    /// `N^0 … N^{kmax+1}`.
    pub powers: Vec<Matrix>,
    /// `H_k` for `k = 1..=kmax+1`; index 0 unused.
    pub h: Vec<f64>,
    pub dh: Vec<Vec<Jet>>,
    /// `X_k = π♯dH_k`.
    pub x: Vec<Vec<Jet>>,
    /// `N` carrying first derivatives.
    n1: Matrix,
    torsion: OnceCell<Vec<Matrix>>,
    /// The deformation 2-form including its sign.
    pub deformation: Option<Form>,
}

impl ChainPoint {
    pub fn kmax(&self) -> usize {
        self.h.len() - 2
    }

    pub fn n(&self) -> &Matrix {
        &self.powers[1]
    }

    /// `⟨φ_k, ∂_i⟩ = ½ Tr(N^k i_{∂_i}T_N)`.
    pub fn phi(&self, k: usize) -> Vec<Jet> {
        self.torsion().iter().map(|t| self.powers[k].trace_mul(t).scale(0.5)).collect()
    }

    /// `i_{∂_a} T_N`, computed on first use.
    pub fn torsion(&self) -> &[Matrix] {
        self.torsion.get_or_init(|| torsion_basis_jets(&self.n1))
    }

    fn omega(&self) -> &Form {
        self.deformation.as_ref().expect("chain has no deformation form")
    }

    /// `π♯Ω♭` of the deformation form.
    pub fn sharp_flat(&self) -> Matrix {
        sharp_flat(&self.a, self.omega())
    }

    /// `2Ω♭(N^k X_1) − Tr(N^k π♯Ω♭) dH_1` for the signed deformation form `Ω`.
    pub fn phi_closed_form(&self, k: usize) -> Vec<Jet> {
        let flat = self.omega().flat();
        let first = vscale(2.0, &flat.mul_vec(&self.powers[k].mul_vec(&self.x[1])));
        let tr = self.powers[k].trace_mul(&self.sharp_flat());
        vsub(&first, &self.dh[1].iter().map(|c| c * &tr).collect::<Vec<_>>())
    }

    /// `f_k = −Tr(N^{k−1} π♯Ω♭)` for the signed form, zero without a deformation.
    pub fn f_jet(&self, k: usize) -> Jet {
        match &self.deformation {
            None => Jet::zero(),
            Some(_) => -self.powers[k - 1].trace_mul(&self.sharp_flat()),
        }
    }

    pub fn f(&self, k: usize) -> f64 {
        self.f_jet(k).value()
    }

    /// `Y_k = N^{k−1}X_1 − X_k`.
    pub fn y(&self, k: usize) -> Vec<Jet> {
        vsub(&self.powers[k - 1].mul_vec(&self.x[1]), &self.x[k])
    }

    /// `π♯ Σ_{l=0}^{k−2} (N^*)^{k−l−2} φ_l`.
    pub fn y_from_phi(&self, k: usize) -> Vec<Jet> {
        let d = self.a.rows();
        let mut acc = vec![Jet::zero(); d];
        for l in 0..k.saturating_sub(1) {
            let term = self.powers[k - l - 2].tr_mul_vec(&self.phi(l));
            acc = crate::linalg::vadd(&acc, &term);
        }
        self.a.mul_vec(&acc)
    }

    /// `N^* dH_k − dH_{k+1} − φ_{k−1}`.
    pub fn recursion_residual(&self, k: usize) -> f64 {
        let lhs = self.n().tr_mul_vec(&self.dh[k]);
        max_abs(&vsub(&vsub(&lhs, &self.dh[k + 1]), &self.phi(k - 1)))
    }

    /// `{H_j, H_k}`.
    pub fn bracket(&self, j: usize, k: usize) -> f64 {
        self.bracket_jet(j, k).value()
    }

    fn bracket_jet(&self, j: usize, k: usize) -> Jet {
        dot(&self.dh[j], &self.x[k])
    }

    /// `{H_k,H_j} − {H_{k−1},H_{j+1}} + ⟨φ_{j−1}, X_{k−1}⟩ + ⟨φ_{k−2}, X_j⟩`.
    pub fn recadd_residual(&self, k: usize, j: usize) -> f64 {
        assert!(k > j && j >= 1);
        let v = self.bracket_jet(k, j) - self.bracket_jet(k - 1, j + 1)
            + dot(&self.phi(j - 1), &self.x[k - 1])
            + dot(&self.phi(k - 2), &self.x[j]);
        libm::fabs(v.value())
    }

    /// `‖M^* dH_k − dH_{k+1} − f_k dH_1‖` for another tensor `M` (values).
    pub fn lenard_magri_residual(&self, other: &Matrix, k: usize) -> f64 {
        let lhs = other.tr_mul_vec(&self.dh[k]);
        let f = self.f_jet(k);
        let rhs: Vec<Jet> = self.dh[k + 1].iter().zip(&self.dh[1]).map(|(a, b)| a + &(b * &f)).collect();
        max_abs_diff(&lhs, &rhs)
    }
}

/// `‖φ + 2 dH_1 ∧ Ω‖` at a point.
pub fn condition_a_residual(structure: &PqnStructure, omega: &dyn Field<Form>, x: &Point) -> Result<f64> {
    crate::field::check_dim(structure.dim(), x.dim())?;
    let c = x.coords();
    let h1 = trace_hamiltonian(structure.n.clone(), 1).eval(c, 1);
    let dh1 = Form::from_covector(&gradient_jets(&h1, c.len()));
    let expected = dh1.wedge(&omega.eval(c, 0)).scale(-2.0);
    Ok(structure.phi.eval(c, 0).max_abs_diff(&expected))
}

/// Condition (b) diagnostics for a chain with a deformation form.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConditionB {
    /// `max_k ‖Ω♭(Y_k)‖`.
    pub strong: f64,
    /// `max_{j,k} |Ω(X_j, Y_k)|`.
    pub weak: f64,
    /// `max_k ‖Y_k − π♯Σ (N^*)^{k−l−2} φ_l‖`.
    pub dual_route: f64,
}

pub fn condition_b(point: &ChainPoint, kmax: usize) -> ConditionB {
    let flat = point.omega().flat();
    let mut out = ConditionB::default();
    for k in 1..=kmax {
        let y = point.y(k);
        let wy = flat.mul_vec(&y);
        out.strong = out.strong.max(max_abs(&wy));
        for j in 1..=kmax {
            // Ω(X_j, Y_k) = ⟨Ω♭ X_j, Y_k⟩
            let v = dot(&flat.mul_vec(&point.x[j]), &y).value();
            out.weak = out.weak.max(libm::fabs(v));
        }
        out.dual_route = out.dual_route.max(max_abs_diff(&y, &point.y_from_phi(k)));
    }
    out
}

/// Closed-form Hamiltonian checked against the trace route, as a residual field.
pub fn trace_vs_closed(n: Tensor11Field, k: usize, closed: ScalarField) -> ScalarField {
    let tr = trace_hamiltonian(n, k);
    let d = closed.dim();
    from_point_fn(d, move |x, r| tr.eval(x, r) - closed.eval(x, r))
}

/// A (1,1) tensor field given entrywise by a formula.
pub fn tensor_from_formula<F>(dim: usize, f: F) -> Tensor11Field
where
    F: Fn(&[Jet]) -> Matrix + Send + Sync + 'static,
{
    from_formula(dim, f)
}

/// Max-abs of `M^* dH_k − dH_{k+1} − f_k dH_1` computed from fields.
pub fn generalized_lm_residual(other: &dyn Field<Matrix>, chain: &ChainData, k: usize, x: &Point) -> Result<f64> {
    crate::field::check_dim(chain.pi.dim(), x.dim())?;
    if k == 0 || k > chain.kmax {
        return Err(Error::Invalid(format!("chain index {k} outside 1..={}", chain.kmax)));
    }
    let c = x.coords();
    Ok(chain.at(c).lenard_magri_residual(&other.eval(c, 0), k))
}

/// `|{H_j, H_k}|` for `j, k ≤ kmax`. Only `j < k` is evaluated; the table is
/// symmetric with a zero diagonal by antisymmetry of the bracket.
pub fn involutivity_table(chain: &ChainData, x: &Point) -> Result<Vec<Vec<f64>>> {
    crate::field::check_dim(chain.pi.dim(), x.dim())?;
    let p = chain.at(x.coords());
    let k = chain.kmax;
    let mut t = vec![vec![0.0; k]; k];
    for j in 0..k {
        for l in j + 1..k {
            let v = libm::fabs(p.bracket(j + 1, l + 1));
            t[j][l] = v;
            t[l][j] = v;
        }
    }
    Ok(t)
}

/// Convenience: share a structure's tensor as a field of `N^k`.
pub fn power_field(n: Tensor11Field, k: usize) -> Tensor11Field {
    let d = n.dim();
    from_point_fn(d, move |x, r| n.eval(x, r).pow(k))
}
