//! The Flaschka map `a_i = −e^{q_i − q_{i+1}}`, `b_i = p_i` (with
//! `q_{n+1} = q_1`) and the bi-Hamiltonian pair `(P_0, P_1)` it induces from
//! `(π, π_{N_−})` of the closed `A_n^(1)` lattice.
//!
//! Block matrices use the stored bivector layout of [`crate::poisson`], which
//! coincides with the displayed one: entry `(i, j)` is `{y_i, y_j}`.
//! Indices in the block formulas are 1-based and `δ^{(n)}` is the periodic
//! Kronecker symbol, `δ^{(n)}_{k,j} = 1` iff `k ≡ j (mod n)`.

use alloc::format;
use alloc::vec::Vec;

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::field::{from_formula, Chart, Field, Point, ScalarField};
use crate::form::Form;
use crate::jet::{seed, seed_dd, Jet};
use crate::linalg::{max_abs, Matrix};
use crate::poisson::{canonical_matrix, schouten_jets, sharp_2form_components, PoissonStructure};
use crate::toda::{an_deformed_tensor, an_trace_hamiltonian, Family, TodaModel};

/// `ε(ℓ)`: the sign of an integer.
pub fn sign(l: i64) -> i64 {
    l.signum()
}

/// `δ^{(n)}_{k,j}`.
pub fn periodic_delta(k: i64, j: i64, n: usize) -> i64 {
    i64::from(k.rem_euclid(n as i64) == j.rem_euclid(n as i64))
}

fn dn(k: usize, j: i64, n: usize) -> f64 {
    periodic_delta(k as i64, j, n) as f64
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::ParticleCount(n));
    }
    Ok(())
}

fn require_chart(x: &Point, chart: Chart) -> Result<()> {
    if x.chart() != chart {
        return Err(Error::Invalid(format!("expected a {chart:?} point, got {:?}", x.chart())));
    }
    Ok(())
}

/// The Flaschka map on coordinate jets `(q, p) ↦ (a, b)`.
pub fn flaschka_jets(x: &[Jet]) -> Vec<Jet> {
    let n = x.len() / 2;
    let a = (0..n).map(|i| -(&x[i] - &x[(i + 1) % n]).exp());
    a.chain(x[n..].iter().cloned()).collect()
}

pub fn flaschka_map(x: &Point) -> Result<Point> {
    require_chart(x, Chart::Physical)?;
    let y: Vec<f64> = flaschka_jets(&seed(x.coords(), 0)).iter().map(Jet::value).collect();
    Point::new(y, Chart::Flaschka)
}

/// Jacobian of the Flaschka map at `x`, computed by differentiating the map.
pub fn flaschka_jacobian(x: &[f64]) -> Matrix {
    let y = flaschka_jets(&seed(x, 1));
    Matrix::from_fn(y.len(), x.len(), |i, j| y[i].partial(j))
}

/// `A_{k,j} = a_k δ_{k,j} − a_k δ^{(n)}_{k,j−1}`.
pub fn a_block(a: &[Jet]) -> Matrix {
    let n = a.len();
    Matrix::from_fn(n, n, |k, j| {
        let (k1, j1) = (k + 1, j as i64 + 1);
        a[k].scale(f64::from(u8::from(k == j)) - dn(k1, j1 - 1, n))
    })
}

/// `F_* = [[A, 0], [0, I]]` evaluated at Flaschka coordinates `y`.
pub fn pushforward(y: &[Jet]) -> Matrix {
    let n = y.len() / 2;
    let a = a_block(&y[..n]);
    Matrix::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
        (true, true) => a[(i, j)].clone(),
        (false, false) if i == j => Jet::one(),
        _ => Jet::zero(),
    })
}

/// The block formula for `F_*` at the image of a physical point.
pub fn pushforward_at(x: &Point) -> Result<Matrix> {
    let y = flaschka_map(x)?;
    Ok(pushforward(&seed(y.coords(), 0)))
}

/// `ε_{k,j} = ε(k − j)`, the upper-left block of `π_{N_−}`.
pub fn epsilon_matrix(n: usize) -> Matrix {
    Matrix::from_fn(n, n, |k, j| Jet::constant(sign(k as i64 - j as i64) as f64))
}

/// `ε(j − k)`, the opposite sign convention; kept for diagnostics.
pub fn epsilon_matrix_transposed(n: usize) -> Matrix {
    epsilon_matrix(n).transpose()
}

/// `Ã_{k,j} = −a_k a_j δ^{(n)}_{k,j−1} + a_k a_j δ^{(n)}_{k,j+1}`.
pub fn a_tilde(a: &[Jet]) -> Matrix {
    let n = a.len();
    Matrix::from_fn(n, n, |k, j| {
        let c = dn(k + 1, j as i64 + 1 + 1, n) - dn(k + 1, j as i64 + 1 - 1, n);
        // δ_{k,j+1} − δ_{k,j−1}
        (&a[k] * &a[j]).scale(c)
    })
}

/// `B_{k,j} = a_k b_k δ_{k,j} − a_k b_j δ^{(n)}_{k,j−1}`.
pub fn b_block(a: &[Jet], b: &[Jet]) -> Matrix {
    let n = a.len();
    Matrix::from_fn(n, n, |k, j| {
        let diag = if k == j { &a[k] * &b[k] } else { Jet::zero() };
        diag - (&a[k] * &b[j]).scale(dn(k + 1, j as i64, n))
    })
}

/// `C_{k,j} = a_k δ^{(n)}_{k,j−1} − a_j δ^{(n)}_{k,j+1}`.
pub fn c_block(a: &[Jet]) -> Matrix {
    let n = a.len();
    Matrix::from_fn(n, n, |k, j| a[k].scale(dn(k + 1, j as i64, n)) - a[j].scale(dn(k + 1, j as i64 + 2, n)))
}

/// `D_{k,j} = b_k δ_{k,j}`.
pub fn d_block(b: &[Jet]) -> Matrix {
    let n = b.len();
    Matrix::from_fn(n, n, |k, j| if k == j { b[k].clone() } else { Jet::zero() })
}

/// `E_{k,j} = a_k δ^{(n)}_{k,j−1} − a_j δ^{(n)}_{k−1,j}`.
pub fn e_block(a: &[Jet]) -> Matrix {
    let n = a.len();
    Matrix::from_fn(n, n, |k, j| {
        a[k].scale(dn(k + 1, j as i64, n)) - a[j].scale(periodic_delta(k as i64, j as i64 + 1, n) as f64)
    })
}

fn blocks(tl: &Matrix, tr: &Matrix, bl: &Matrix, br: &Matrix) -> Matrix {
    let n = tl.rows();
    Matrix::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
        (true, true) => tl[(i, j)].clone(),
        (true, false) => tr[(i, j - n)].clone(),
        (false, true) => bl[(i - n, j)].clone(),
        (false, false) => br[(i - n, j - n)].clone(),
    })
}

/// `P_0 = [[0, A], [−A^T, 0]]` at Flaschka coordinates `y`.
pub fn p0_stored(y: &[Jet]) -> Matrix {
    let n = y.len() / 2;
    let a = a_block(&y[..n]);
    blocks(&Matrix::zeros(n, n), &a, &a.transpose().scale(-1.0), &Matrix::zeros(n, n))
}

/// `P_1 = [[Ã, B], [−B^T, C]]` at Flaschka coordinates `y`.
pub fn p1_stored(y: &[Jet]) -> Matrix {
    let n = y.len() / 2;
    let (a, b) = (&y[..n], &y[n..]);
    let bb = b_block(a, b);
    blocks(&a_tilde(a), &bb, &bb.transpose().scale(-1.0), &c_block(a))
}

/// `π_{N_−} = [[ε, D], [−D, E]]` at physical coordinates, with `a = F(x)`.
pub fn pi_n_minus_blocks(x: &[Jet]) -> Matrix {
    let n = x.len() / 2;
    let y = flaschka_jets(x);
    let d = d_block(&x[n..]);
    blocks(&epsilon_matrix(n), &d, &d.scale(-1.0), &e_block(&y[..n]))
}

/// `C(a, b) = Π a_i`.
pub fn casimir_jets(y: &[Jet]) -> Jet {
    let n = y.len() / 2;
    y[..n].iter().fold(Jet::one(), |acc, a| &acc * a)
}

/// The reduced bi-Hamiltonian manifold data for `n` particles.
#[derive(Clone)]
pub struct FlaschkaData {
    pub n: usize,
    pub p0: PoissonStructure,
    pub p1: PoissonStructure,
    pub casimir: ScalarField,
}

impl FlaschkaData {
    pub fn new(n: usize) -> Result<Self> {
        check_n(n)?;
        let d = 2 * n;
        Ok(FlaschkaData {
            n,
            p0: PoissonStructure::new(from_formula(d, p0_stored)),
            p1: PoissonStructure::new(from_formula(d, p1_stored)),
            casimir: from_formula(d, casimir_jets),
        })
    }

    pub fn a(&self, y: &[f64]) -> Matrix {
        a_block(&seed(&y[..self.n], 0))
    }

    pub fn epsilon(&self) -> Matrix {
        epsilon_matrix(self.n)
    }

    /// `max(|P_0^♯dC|, |P_1^♯dC|)` at `y`.
    pub fn casimir_residual(&self, y: &Point) -> Result<f64> {
        require_chart(y, Chart::Flaschka)?;
        let c = y.coords();
        let dc: Vec<Jet> = {
            let v = self.casimir.eval(c, 1);
            (0..c.len()).map(|i| v.partial(i)).collect()
        };
        let r0 = max_abs(&self.p0.stored(c, 0).mul_vec(&dc));
        let r1 = max_abs(&self.p1.stored(c, 0).mul_vec(&dc));
        Ok(r0.max(r1))
    }

    /// `max |[P_i, P_j]|` over the three Schouten brackets of the pair.
    pub fn jacobi_residual(&self, y: &Point) -> Result<f64> {
        require_chart(y, Chart::Flaschka)?;
        let (s0, s1) = (self.p0.stored(y.coords(), 1), self.p1.stored(y.coords(), 1));
        Ok([schouten_jets(&s0, &s0), schouten_jets(&s1, &s1), schouten_jets(&s0, &s1)]
            .iter()
            .map(Form::max_abs)
            .fold(0.0, f64::max))
    }
}

/// `max |F_* M(P_phys)(x) F_*^T − M(P_flaschka)(F(x))|`.
pub fn check_f_related(p_phys: &dyn Field<Matrix>, p_flaschka: &dyn Field<Matrix>, x: &Point) -> Result<f64> {
    require_chart(x, Chart::Physical)?;
    let y = flaschka_map(x)?;
    let j = pushforward(&seed(y.coords(), 0));
    let lhs = j.matmul(&p_phys.eval(x.coords(), 0)).matmul(&j.transpose());
    Ok(lhs.max_abs_diff(&p_flaschka.eval(y.coords(), 0)))
}

/// `2ε(k−ℓ) − ε(k−ℓ−1) − ε(k−ℓ+1)`, the non-periodic second difference.
pub fn linear_second_difference(l: i64, k: i64) -> i64 {
    2 * sign(k - l) - sign(k - l - 1) - sign(k - l + 1)
}

/// `ε_{ℓ,k} − ε_{ℓ,k⁺} − ε_{ℓ⁺,k} + ε_{ℓ⁺,k⁺}` with `ε_{i,j} = ε(i − j)` and
/// `i⁺` the cyclic successor in `1..=n`: the coefficient of `a_ℓ a_k` in
/// `(A ε A^T)_{ℓ,k}`.
pub fn cyclic_second_difference(l: usize, k: usize, n: usize) -> i64 {
    let next = |i: usize| i % n + 1;
    let e = |i: usize, j: usize| sign(i as i64 - j as i64);
    e(l, k) - e(l, next(k)) - e(next(l), k) + e(next(l), next(k))
}

/// Agreement of the routes to `A ε A^T = Ã`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AeaResidual {
    /// `|A ε A^T − Ã|` by matrix products.
    pub product_vs_tilde: f64,
    /// `|a_ℓ a_k c(ℓ,k) − Ã|` with the cyclic closed form `c`.
    pub closed_vs_tilde: f64,
    pub product_vs_closed: f64,
    /// Diagnostic: `|A ε' A^T − Ã|` with the transposed sign convention `ε(j − k)`.
    pub transposed_epsilon: f64,
    /// Diagnostic: `|a_ℓ a_k (2ε(k−ℓ) − ε(k−ℓ−1) − ε(k−ℓ+1)) − A ε' A^T|`,
    /// the non-periodic closed form against the product it describes.
    pub linear_closed_form: f64,
}

impl AeaResidual {
    /// Three-route agreement.
    pub fn max(&self) -> f64 {
        self.product_vs_tilde.max(self.closed_vs_tilde).max(self.product_vs_closed)
    }
}

pub fn aea_identity(a: &[f64]) -> Result<AeaResidual> {
    let n = a.len();
    check_n(n)?;
    let aj: Vec<Jet> = a.iter().map(|&v| Jet::constant(v)).collect();
    let am = a_block(&aj);
    let tilde = a_tilde(&aj);
    let product = am.matmul(&epsilon_matrix(n)).matmul(&am.transpose());
    let closed =
        Matrix::from_fn(n, n, |l, k| (&aj[l] * &aj[k]).scale(cyclic_second_difference(l + 1, k + 1, n) as f64));
    let transposed = am.matmul(&epsilon_matrix_transposed(n)).matmul(&am.transpose());
    let linear = Matrix::from_fn(n, n, |l, k| {
        (&aj[l] * &aj[k]).scale(linear_second_difference(l as i64 + 1, k as i64 + 1) as f64)
    });
    Ok(AeaResidual {
        product_vs_tilde: product.max_abs_diff(&tilde),
        closed_vs_tilde: closed.max_abs_diff(&tilde),
        product_vs_closed: product.max_abs_diff(&closed),
        transposed_epsilon: transposed.max_abs_diff(&tilde),
        linear_closed_form: linear.max_abs_diff(&transposed),
    })
}

/// Exhaustive integer check of the ε identities for one `n`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EpsilonTable {
    pub n: usize,
    pub cases: usize,
    /// `(ℓ, k)` where `2ε(k−ℓ) − ε(k−ℓ−1) − ε(k−ℓ+1) ≠ δ^{(n)}_{k,ℓ+1} − δ^{(n)}_{k,ℓ−1}`.
    pub linear_failures: Vec<(usize, usize)>,
    /// `(ℓ, k)` where the cyclic difference `≠ δ^{(n)}_{ℓ,k+1} − δ^{(n)}_{ℓ,k−1}`.
    pub cyclic_failures: Vec<(usize, usize)>,
}

pub fn epsilon_identity_table(n: usize) -> Result<EpsilonTable> {
    check_n(n)?;
    let mut t = EpsilonTable { n, ..Default::default() };
    for l in 1..=n {
        for k in 1..=n {
            t.cases += 1;
            let (li, ki) = (l as i64, k as i64);
            let rhs = periodic_delta(ki, li + 1, n) - periodic_delta(ki, li - 1, n);
            if linear_second_difference(li, ki) != rhs {
                t.linear_failures.push((l, k));
            }
            let rhs = periodic_delta(li, ki + 1, n) - periodic_delta(li, ki - 1, n);
            if cyclic_second_difference(l, k, n) != rhs {
                t.cyclic_failures.push((l, k));
            }
        }
    }
    Ok(t)
}

/// Preimage of `y` with `q_n = 0`: `q_i = q_{i+1} + ln(−a_i)` for `i < n`.
pub fn section_jets(y: &[Jet]) -> Vec<Jet> {
    let n = y.len() / 2;
    let mut q = alloc::vec![Jet::zero(); n];
    for i in (0..n - 1).rev() {
        q[i] = &q[i + 1] + &(-&y[i]).ln();
    }
    q.extend(y[n..].iter().cloned());
    q
}

pub fn canonical_section(y: &Point) -> Result<Point> {
    require_chart(y, Chart::Flaschka)?;
    let x: Vec<f64> = section_jets(&seed(y.coords(), 0)).iter().map(Jet::value).collect();
    Point::new(x, Chart::Physical)
}

/// `H̃_k^±`, the trace Hamiltonian evaluated through the canonical section.
pub fn reduced_hamiltonian(n: usize, sign: f64, k: usize) -> ScalarField {
    from_formula(2 * n, move |y: &[Jet]| an_trace_hamiltonian(&section_jets(y), sign, k))
}

fn require_a1(model: &TodaModel) -> Result<()> {
    if model.family != Family::A1 {
        return Err(Error::Invalid(format!("the Flaschka reduction applies to a1, not {}", model.family)));
    }
    Ok(())
}

/// `F(x)` in extended precision, so that it lies on the image of `F` to
/// double-double accuracy.
fn flaschka_dd(x: &[f64]) -> Vec<Dd> {
    flaschka_jets(&seed(x, 0)).iter().map(Jet::value_dd).collect()
}

/// `H̃_k^+` and `dH̃_k^+` for `k = 1..=kmax` at `y` (index 0 unused).
fn reduced_chain_at(y: &[Dd], kmax: usize) -> (Vec<Jet>, Vec<Vec<Jet>>) {
    let d = y.len();
    let x = section_jets(&seed_dd(y, 1));
    let powers = an_deformed_tensor(&x, 1.0).powers(kmax);
    let mut h = alloc::vec![Jet::zero()];
    let mut dh = alloc::vec![Vec::new()];
    for (k, p) in powers.iter().enumerate().skip(1) {
        let hk = p.trace().div_f64((2 * k) as f64);
        dh.push((0..d).map(|i| hk.partial(i)).collect());
        h.push(hk.truncate(0));
    }
    (h, dh)
}

/// Reduction diagnostics for one chain index `k`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ReductionResidual {
    pub k: usize,
    /// `‖π_{N_−}^♯dH_k^+ − π^♯dH_{k+1}^+ − f_k X_1‖` at `x`.
    pub physical: f64,
    /// `‖P_1^♯dH̃_k^+ − P_0^♯dH̃_{k+1}^+‖` at `F(x)`.
    pub reduced: f64,
    /// `|X_1(H_k^+)|`, projectability along the shift flow.
    pub projectability: f64,
    /// `|H_k^+(x) − H̃_k^+(F(x))|`, preimage independence of the section.
    pub section: f64,
}

/// [`ReductionResidual`] for `k = 1..=kmax` at a physical point of `A_n^(1)`.
pub fn reduction_residuals(model: &TodaModel, kmax: usize, x: &Point) -> Result<Vec<ReductionResidual>> {
    require_a1(model)?;
    require_chart(x, Chart::Physical)?;
    if kmax == 0 {
        return Err(Error::Invalid("chain index starts at 1".into()));
    }
    let c = x.coords();
    let cp = model.chain(1.0, kmax).at(c);
    let n_minus = model.deformed(-1.0).n.eval(c, 0);
    let y = flaschka_dd(c);
    let (h, dh) = reduced_chain_at(&y, kmax + 1);
    let (p0, p1) = (p0_stored(&seed_dd(&y, 0)), p1_stored(&seed_dd(&y, 0)));
    let mut out = Vec::with_capacity(kmax);
    for k in 1..=kmax {
        let f = cp.f_jet(k);
        let lhs = n_minus.mul_vec(&cp.x[k]);
        let physical: Vec<Jet> = (0..c.len()).map(|i| &lhs[i] - &cp.x[k + 1][i] - &f * &cp.x[1][i]).collect();
        let reduced =
            p1.mul_vec(&dh[k]).iter().zip(p0.mul_vec(&dh[k + 1])).fold(0.0_f64, |m, (a, b)| m.max(a.abs_diff(&b)));
        let direct = cp.powers[k].trace().div_f64((2 * k) as f64);
        out.push(ReductionResidual {
            k,
            physical: max_abs(&physical),
            reduced,
            projectability: libm::fabs(cp.bracket(k, 1)),
            section: direct.abs_diff(&h[k]),
        });
    }
    Ok(out)
}

/// `(physical, reduced)` chain residuals for a single `k`.
pub fn reduced_chain_residual(model: &TodaModel, k: usize, x: &Point) -> Result<(f64, f64)> {
    let r = reduction_residuals(model, k, x)?;
    let last = r.last().expect("k ≥ 1");
    Ok((last.physical, last.reduced))
}

/// `max(|P_0^♯dH̃_1^+|, |P_0^♯dH_1^+|)`, the second with `H_1 = Σb` directly.
pub fn p0_kernel_residual(model: &TodaModel, x: &Point) -> Result<f64> {
    require_a1(model)?;
    require_chart(x, Chart::Physical)?;
    let y = flaschka_dd(x.coords());
    let (_, dh) = reduced_chain_at(&y, 1);
    let p0 = p0_stored(&seed_dd(&y, 0));
    let n = model.n;
    let direct: Vec<Jet> = (0..2 * n).map(|i| Jet::constant(if i < n { 0.0 } else { 1.0 })).collect();
    Ok(max_abs(&p0.mul_vec(&dh[1])).max(max_abs(&p0.mul_vec(&direct))))
}

/// The Schouten-bracket transfer checks at a physical point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SchoutenTransfer {
    /// `|[π, π_{N_−}]|`.
    pub compatibility: f64,
    /// `|[π_{N_−}, π_{N_−}] − 4 X_1 ∧ π^♯Ω|`.
    pub self_bracket: f64,
    /// `|F_*[π_{N_−}, π_{N_−}]|`.
    pub pushed: f64,
    /// `|F_* X_1|`.
    pub shift_kernel: f64,
}

pub fn schouten_transfer(model: &TodaModel, x: &Point) -> Result<SchoutenTransfer> {
    require_a1(model)?;
    require_chart(x, Chart::Physical)?;
    let c = x.coords();
    let n = model.n;
    let pi = canonical_matrix(n);
    let nm = model.deformed(-1.0).n;
    let pnm = nm.eval(c, 1).matmul(&pi);
    let s = schouten_jets(&pnm, &pnm);
    let x1 = model.chain(1.0, 1).at(c).x[1].clone();
    let rhs = Form::from_covector(&x1).wedge(&sharp_2form_components(&pi, &model.omega.eval(c, 0))).scale(4.0);
    let jac = flaschka_jacobian(c);
    Ok(SchoutenTransfer {
        compatibility: schouten_jets(&pi, &pnm).max_abs(),
        self_bracket: s.max_abs_diff(&rhs),
        pushed: s.map_slots(&jac).max_abs(),
        shift_kernel: max_abs(&jac.mul_vec(&x1)),
    })
}
