//! Closed Toda lattices of type `A_n^(1)`, `C_n^(1)` and `A_{2n}^(2)` as
//! deformations of open-lattice Poisson–Nijenhuis pairs.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::field::{from_formula, BivectorField, FormField, Point, ScalarField, Tensor11Field};
use crate::fixtures;
use crate::form::Form;
use crate::jet::Jet;
use crate::linalg::Matrix;
use crate::poisson::{canonical_matrix, PoissonStructure};
use crate::pqn::{ChainData, PqnStructure};

/// Largest exponent magnitude accepted by the domain guard.
pub const MAX_EXPONENT: f64 = 40.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// `A_n^(1)`, the classical closed Toda lattice.
    A1,
    /// `C_n^(1)`, exponent `m = 2`.
    C1,
    /// `A_{2n}^(2)`, exponent `m = 1`.
    A2Twisted,
}

impl Family {
    pub fn id(self) -> &'static str {
        match self {
            Family::A1 => "a1",
            Family::C1 => "c1",
            Family::A2Twisted => "a2t",
        }
    }

    /// Exponent of the last-particle wall, `None` for `A_n^(1)`.
    pub fn m(self) -> Option<u32> {
        match self {
            Family::A1 => None,
            Family::C1 => Some(2),
            Family::A2Twisted => Some(1),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a1" => Ok(Family::A1),
            "c1" => Ok(Family::C1),
            "a2t" => Ok(Family::A2Twisted),
            other => Err(Error::Invalid(format!("unknown model family '{other}' (expected a1, c1 or a2t)"))),
        }
    }
}

/// A Toda lattice: canonical `π`, open-lattice `N`, deformation form `Ω` and
/// the closed-lattice Hamiltonian.
#[derive(Clone)]
pub struct TodaModel {
    pub family: Family,
    pub n: usize,
    pub pi: PoissonStructure,
    pub n_open: Tensor11Field,
    pub omega: FormField,
    /// Closed-lattice Hamiltonian in physical units (`H_2^+` for `A_n^(1)`).
    pub hamiltonian: ScalarField,
    /// Second Poisson structure `π' = N π` in stored form.
    pub pi_prime: BivectorField,
}

impl fmt::Debug for TodaModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TodaModel").field("family", &self.family).field("n", &self.n).finish()
    }
}

fn q(x: &[Jet], i: usize) -> &Jet {
    &x[i - 1]
}

fn p(x: &[Jet], i: usize) -> &Jet {
    &x[x.len() / 2 + i - 1]
}

fn e(arg: Jet) -> Jet {
    arg.exp()
}

/// Open `A_n` Toda recursion operator in the `(i, j) = N^i_j` layout.
pub fn an_open_tensor(x: &[Jet]) -> Matrix {
    let n = x.len() / 2;
    let mut m = Matrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(i, i)] = x[n + i].clone();
        m[(n + i, n + i)] = x[n + i].clone();
        for j in 0..n {
            if i < j {
                m[(i, n + j)] = Jet::one();
            } else if i > j {
                m[(i, n + j)] = Jet::constant(-1.0);
            }
        }
    }
    for i in 0..n - 1 {
        let w = (&x[i] - &x[i + 1]).exp();
        m[(n + i + 1, i)] = w.clone();
        m[(n + i, i + 1)] = -w;
    }
    m
}

/// `Ω = e^{q_n − q_1} dq_n ∧ dq_1`.
pub fn an_omega(x: &[Jet]) -> Form {
    let n = x.len() / 2;
    let mut f = Form::zero(2 * n, 2);
    f.set(&[n - 1, 0], (&x[n - 1] - &x[0]).exp());
    f
}

/// `N_± = N + (±π^♯Ω^♭)` for `A_n^(1)` as a formula in the coordinate jets.
pub fn an_deformed_tensor(x: &[Jet], sign: f64) -> Matrix {
    let n = x.len() / 2;
    let shift = canonical_matrix(n).matmul(&an_omega(x).flat()).scale(sign);
    &an_open_tensor(x) + &shift
}

/// `H_k^± = Tr(N_±^k) / 2k` for `A_n^(1)`.
pub fn an_trace_hamiltonian(x: &[Jet], sign: f64, k: usize) -> Jet {
    an_deformed_tensor(x, sign).pow(k).trace().div_f64((2 * k) as f64)
}

/// `Ω_1 = −2 e^{−2q_1} dq_1 ∧ dp_1`.
pub fn c_omega(x: &[Jet]) -> Form {
    let n = x.len() / 2;
    let mut f = Form::zero(2 * n, 2);
    f.set(&[0, n], x[0].scale(-2.0).exp().scale(-2.0));
    f
}

/// Entry `{x_a, x_b}'` of the orthogonal open-Toda bracket list, 0-based
/// indices into `(q, p)`. Only the listed brackets and their antisymmetric
/// partners are nonzero.
fn orthogonal_bracket(x: &[Jet], m: u32, a: usize, b: usize) -> Jet {
    let n = x.len() / 2;
    let listed = |a: usize, b: usize| -> Option<Jet> {
        let (qa, qb) = (a < n, b < n);
        let (i, j) = (a % n + 1, b % n + 1);
        let wall = || (q(x, n).scale(m as f64)).exp();
        let link = |k: usize| e(q(x, k) - q(x, k + 1));
        match (qa, qb) {
            // {q_i, q_j}' = 2 p_i for j < i
            (true, true) if j < i => Some(p(x, i).scale(2.0)),
            // {p_i, q_j}' for j ≤ i − 2
            (false, true) if j + 2 <= i => {
                if i == n {
                    Some(link(n - 1).scale(2.0) - wall().scale(2.0 * m as f64))
                } else if i >= 3 {
                    Some((link(i - 1) - link(i)).scale(2.0))
                } else {
                    None
                }
            }
            (true, false) if i == j => {
                Some(if i < n { p(x, i) * p(x, i) + link(i).scale(2.0) } else { p(x, n) * p(x, n) + wall().scale(2.0) })
            }
            // {q_{i+1}, p_i}'
            (true, false) if i == j + 1 => Some(link(j)),
            // {q_i, p_{i+1}}'
            (true, false) if j == i + 1 => Some(if i + 1 < n {
                link(i + 1).scale(2.0) - link(i)
            } else {
                wall().scale(2.0 * m as f64) - link(n - 1)
            }),
            // {p_i, p_{i+1}}'
            (false, false) if j == i + 1 => Some(-(link(i) * (p(x, i) + p(x, i + 1)))),
            _ => None,
        }
    };
    if let Some(v) = listed(a, b) {
        v
    } else if let Some(v) = listed(b, a) {
        -v
    } else {
        Jet::zero()
    }
}

/// Stored matrix of `π'` assembled from the bracket list: entry `(i, j)` is `{x_j, x_i}'`.
pub fn orthogonal_pi_prime(x: &[Jet], m: u32) -> Matrix {
    let d = x.len();
    Matrix::from_fn(d, d, |i, j| orthogonal_bracket(x, m, j, i))
}

/// `N = π' π^{-1}` for the canonical `π`, i.e. blocks `[[Qp, −Qq], [Pp, −Pq]]`.
pub fn orthogonal_open_tensor(x: &[Jet], m: u32) -> Matrix {
    let n = x.len() / 2;
    let pp = orthogonal_pi_prime(x, m);
    let inv = canonical_matrix(n).scale(-1.0);
    pp.matmul(&inv)
}

/// `½Σp² + Σ e^{q_i − q_{i+1}} + e^{m q_n} + e^{−2q_1}`.
pub fn orthogonal_closed_hamiltonian(x: &[Jet], m: u32) -> Jet {
    let n = x.len() / 2;
    let kinetic: Jet = (1..=n).map(|i| p(x, i) * p(x, i)).sum::<Jet>().scale(0.5);
    let links: Jet = (1..n).map(|i| e(q(x, i) - q(x, i + 1))).sum();
    kinetic + links + q(x, n).scale(m as f64).exp() + q(x, 1).scale(-2.0).exp()
}

/// `H_2^± = ½Σp² + Σ e^{q_i − q_{i+1}} ± e^{q_n − q_1}`.
pub fn an_closed_energy(x: &[Jet], sign: f64) -> Jet {
    let n = x.len() / 2;
    let kinetic: Jet = (1..=n).map(|i| p(x, i) * p(x, i)).sum::<Jet>().scale(0.5);
    let links: Jet = (1..n).map(|i| e(q(x, i) - q(x, i + 1))).sum();
    kinetic + links + e(q(x, n) - q(x, 1)).scale(sign)
}

/// Open-lattice `H_2 = ½Σp² + Σ e^{q_i − q_{i+1}}`.
pub fn an_open_energy(x: &[Jet]) -> Jet {
    an_closed_energy(x, 0.0)
}

/// Total momentum.
pub fn total_momentum(x: &[Jet]) -> Jet {
    let n = x.len() / 2;
    (1..=n).map(|i| p(x, i).clone()).sum()
}

/// The `3`-form obtained by expanding `d_N Ω_1` by hand for the orthogonal lattices.
pub fn orthogonal_phi_expansion(x: &[Jet], m: u32) -> Form {
    let n = x.len() / 2;
    let d = 2 * n;
    let pref = q(x, 1).scale(-2.0).exp().scale(-8.0);
    let link = |k: usize| e(q(x, k) - q(x, k + 1));
    let mut f = Form::zero(d, 3);
    let (q1, p1) = (0, n);
    for i in 2..n {
        f.add_to(&[q1, i - 1, p1], &(&pref * &(link(i - 1) - link(i))));
    }
    let last = link(n - 1) - q(x, n).scale(m as f64).exp().scale(m as f64);
    f.add_to(&[q1, n - 1, p1], &(&pref * &last));
    for i in 2..=n {
        f.add_to(&[q1, p1, n + i - 1], &(&pref * p(x, i)));
    }
    f
}

impl TodaModel {
    pub fn build(family: Family, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::ParticleCount(n));
        }
        let d = 2 * n;
        let pi = PoissonStructure::canonical(n);
        let model = match family {
            Family::A1 => {
                let n_open: Tensor11Field = from_formula(d, an_open_tensor);
                let pi_prime = from_formula(d, move |x: &[Jet]| an_open_tensor(x).matmul(&canonical_matrix(n)));
                TodaModel {
                    family,
                    n,
                    pi,
                    n_open,
                    omega: from_formula(d, an_omega),
                    hamiltonian: from_formula(d, |x: &[Jet]| an_closed_energy(x, 1.0)),
                    pi_prime,
                }
            }
            Family::C1 | Family::A2Twisted => {
                let m = family.m().unwrap();
                let (n_open, pi_prime): (Tensor11Field, BivectorField) = if family == Family::C1 && n == 2 {
                    (from_formula(d, fixtures::c2_open_tensor), from_formula(d, fixtures::c2_pi_prime))
                } else {
                    (
                        from_formula(d, move |x: &[Jet]| orthogonal_open_tensor(x, m)),
                        from_formula(d, move |x: &[Jet]| orthogonal_pi_prime(x, m)),
                    )
                };
                TodaModel {
                    family,
                    n,
                    pi,
                    n_open,
                    omega: from_formula(d, c_omega),
                    hamiltonian: from_formula(d, move |x: &[Jet]| orthogonal_closed_hamiltonian(x, m)),
                    pi_prime,
                }
            }
        };
        Ok(model)
    }

    pub fn an1(n: usize) -> Result<Self> {
        Self::build(Family::A1, n)
    }

    pub fn cn1(n: usize) -> Result<Self> {
        Self::build(Family::C1, n)
    }

    pub fn a2n2(n: usize) -> Result<Self> {
        Self::build(Family::A2Twisted, n)
    }

    pub fn id(&self) -> String {
        format!("{}-n{}", self.family.id(), self.n)
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// Exponent parameter `m` (absent for `A_n^(1)`).
    pub fn m(&self) -> Option<u32> {
        self.family.m()
    }

    /// The undeformed Poisson–Nijenhuis pair.
    pub fn pn_structure(&self) -> PqnStructure {
        PqnStructure::pn(self.pi.clone(), self.n_open.clone())
    }

    /// The structure deformed by `sign·Ω`. `Ω` is closed by construction, so
    /// no probe points are needed.
    pub fn deformed(&self, sign: f64) -> PqnStructure {
        self.pn_structure()
            .deform(self.omega.clone(), sign, &[])
            .expect("deformation forms of the Toda models are closed")
    }

    /// Trace-Hamiltonian chain of the `sign`-deformed tensor.
    pub fn chain(&self, sign: f64, kmax: usize) -> ChainData {
        ChainData::new(self.pi.clone(), self.deformed(sign).n, kmax).with_deformation(self.omega.clone(), sign)
    }

    /// Arguments of every exponential in the model at `x`.
    pub fn exponents(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out: Vec<f64> = (0..n - 1).map(|i| x[i] - x[i + 1]).collect();
        match self.m() {
            None => out.push(x[n - 1] - x[0]),
            Some(m) => {
                out.push(m as f64 * x[n - 1]);
                out.push(-2.0 * x[0]);
            }
        }
        out
    }

    /// Reject points where an exponential would leave the safe range.
    pub fn check_domain(&self, x: &Point) -> Result<()> {
        crate::field::check_dim(self.dim(), x.dim())?;
        if let Some(v) = self.exponents(x.coords()).into_iter().find(|v| libm::fabs(*v) > MAX_EXPONENT) {
            return Err(Error::Domain(format!("exponent {v} exceeds ±{MAX_EXPONENT}")));
        }
        Ok(())
    }
}
