//! Alternating tensors on R^d stored by strictly increasing index tuples.
//!
//! Components are kept only for sorted tuples; reading any other tuple applies
//! the permutation sign (and returns zero on a repeated index). The wedge uses
//! the determinant convention, so `(α∧β)_{ij} = α_i β_j − α_j β_i`.
//! The same storage holds totally antisymmetric contravariant tensors such as
//! Schouten brackets of bivectors.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::jet::Jet;
use crate::linalg::Matrix;

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Colexicographic rank of a strictly increasing tuple.
fn rank(idx: &[usize]) -> usize {
    idx.iter().enumerate().map(|(k, &t)| binomial(t, k + 1)).sum()
}

/// All strictly increasing `p`-tuples in `0..d`, ordered by rank.
pub fn combinations(d: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); binomial(d, p)];
    let mut cur: Vec<usize> = (0..p).collect();
    if p > d {
        return Vec::new();
    }
    loop {
        out[rank(&cur)] = cur.clone();
        // advance lexicographically
        let mut k = p;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if cur[k] < d - p + k {
                cur[k] += 1;
                for j in k + 1..p {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Sort a small index tuple, returning the permutation sign, or `None` on repeats.
pub fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, f64)> {
    let mut v = idx.to_vec();
    let mut sign = 1.0;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((v, sign))
    }
}

#[derive(Clone, PartialEq)]
pub struct Form {
    dim: usize,
    degree: usize,
    comps: Vec<Jet>,
}

impl Form {
    pub fn zero(dim: usize, degree: usize) -> Self {
        Form { dim, degree, comps: vec![Jet::zero(); binomial(dim, degree)] }
    }

    pub fn scalar(dim: usize, f: Jet) -> Self {
        Form { dim, degree: 0, comps: vec![f] }
    }

    pub fn from_covector(a: &[Jet]) -> Self {
        Form { dim: a.len(), degree: 1, comps: a.to_vec() }
    }

    /// 2-form with components `ω_{ij} = m[(i, j)]`, read from the strict upper triangle.
    pub fn from_matrix(m: &Matrix) -> Self {
        assert!(m.is_square());
        let d = m.rows();
        let mut f = Form::zero(d, 2);
        for (r, ij) in combinations(d, 2).iter().enumerate() {
            f.comps[r] = m[(ij[0], ij[1])].clone();
        }
        f
    }

    /// Build from a component function on sorted tuples.
    pub fn from_fn(dim: usize, degree: usize, mut f: impl FnMut(&[usize]) -> Jet) -> Self {
        let comps = combinations(dim, degree).iter().map(|ix| f(ix)).collect();
        Form { dim, degree, comps }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Components in rank order.
    pub fn components(&self) -> &[Jet] {
        &self.comps
    }

    /// Component for an arbitrary index tuple, with the permutation sign applied.
    pub fn get(&self, idx: &[usize]) -> Jet {
        assert_eq!(idx.len(), self.degree, "index tuple length differs from degree");
        match sort_with_sign(idx) {
            None => Jet::zero(),
            Some((s, sign)) => {
                let c = &self.comps[rank(&s)];
                if sign > 0.0 {
                    c.clone()
                } else {
                    -c
                }
            }
        }
    }

    /// Value-only read, exact sign flip.
    pub fn value(&self, idx: &[usize]) -> f64 {
        self.get(idx).value()
    }

    /// Set the component of a tuple (any order); the stored sorted entry absorbs the sign.
    pub fn set(&mut self, idx: &[usize], v: Jet) {
        let (s, sign) = sort_with_sign(idx).expect("repeated index in alternating tensor");
        self.comps[rank(&s)] = if sign > 0.0 { v } else { -v };
    }

    pub fn add_to(&mut self, idx: &[usize], v: &Jet) {
        if let Some((s, sign)) = sort_with_sign(idx) {
            let r = rank(&s);
            self.comps[r] = if sign > 0.0 { &self.comps[r] + v } else { &self.comps[r] - v };
        }
    }

    /// The antisymmetric matrix of a 2-form.
    pub fn to_matrix(&self) -> Matrix {
        assert_eq!(self.degree, 2);
        Matrix::from_fn(self.dim, self.dim, |i, j| self.get(&[i, j]))
    }

    pub fn to_covector(&self) -> Vec<Jet> {
        assert_eq!(self.degree, 1);
        self.comps.clone()
    }

    pub fn scalar_value(&self) -> &Jet {
        assert_eq!(self.degree, 0);
        &self.comps[0]
    }

    fn zip(&self, other: &Form, f: impl Fn(&Jet, &Jet) -> Jet) -> Form {
        assert_eq!((self.dim, self.degree), (other.dim, other.degree), "form shape mismatch");
        Form {
            dim: self.dim,
            degree: self.degree,
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &Form) -> Form {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Form) -> Form {
        self.zip(other, |a, b| a - b)
    }

    pub fn map(&self, f: impl Fn(&Jet) -> Jet) -> Form {
        Form { dim: self.dim, degree: self.degree, comps: self.comps.iter().map(f).collect() }
    }

    pub fn scale(&self, c: f64) -> Form {
        self.map(|x| x.scale(c))
    }

    pub fn scale_jet(&self, c: &Jet) -> Form {
        self.map(|x| x * c)
    }

    pub fn partial(&self, i: usize) -> Form {
        self.map(|x| x.partial(i))
    }

    pub fn truncate(&self, order: u8) -> Form {
        self.map(|x| x.truncate(order))
    }

    /// Every component is the exact constant zero.
    pub fn is_exact_zero(&self) -> bool {
        self.comps.iter().all(Jet::is_exact_zero)
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, x| m.max(libm::fabs(x.value())))
    }

    pub fn max_abs_diff(&self, other: &Form) -> f64 {
        assert_eq!((self.dim, self.degree), (other.dim, other.degree), "form shape mismatch");
        self.comps.iter().zip(&other.comps).fold(0.0, |m, (a, b)| m.max(a.abs_diff(b)))
    }

    /// Exterior product with the shuffle sign.
    pub fn wedge(&self, other: &Form) -> Form {
        assert_eq!(self.dim, other.dim, "form dimension mismatch");
        let (p, q) = (self.degree, other.degree);
        let n = p + q;
        if n > self.dim {
            return Form::zero(self.dim, n);
        }
        Form::from_fn(self.dim, n, |ix| {
            let mut acc = Jet::zero();
            for mask in 0u32..(1 << n) {
                if mask.count_ones() as usize != p {
                    continue;
                }
                let mut left = Vec::with_capacity(p);
                let mut right = Vec::with_capacity(q);
                let mut inversions = 0usize;
                for (pos, &i) in ix.iter().enumerate() {
                    if mask & (1 << pos) != 0 {
                        left.push(i);
                        inversions += right.len();
                    } else {
                        right.push(i);
                    }
                }
                let term = &self.comps[rank(&left)] * &other.comps[rank(&right)];
                if inversions % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        })
    }

    /// Apply a linear map to every slot of a totally antisymmetric tensor:
    /// `out^{i_1…i_p} = Σ M_{i_1 a_1} ⋯ M_{i_p a_p} t^{a_1…a_p}`.
    ///
    /// Used for `π^♯` of forms (with `M` the stored Poisson matrix) and for
    /// pushing multivectors forward along a Jacobian (which may be rectangular).
    pub fn map_slots(&self, m: &Matrix) -> Form {
        assert_eq!(m.cols(), self.dim, "slot map dimension mismatch");
        let (p, d_in, d_out) = (self.degree, self.dim, m.rows());
        if p == 0 {
            return Form::scalar(d_out, self.comps[0].clone());
        }
        // Dense tensor over mixed index ranges: the first `done` slots range
        // over d_out, the rest over d_in.
        let size = |done: usize| d_out.pow(done as u32) * d_in.pow((p - done) as u32);
        let decode = |mut r: usize, done: usize| -> Vec<usize> {
            let mut ix = vec![0; p];
            for s in (0..p).rev() {
                let base = if s < done { d_out } else { d_in };
                ix[s] = r % base;
                r /= base;
            }
            ix
        };
        let encode = |ix: &[usize], done: usize| -> usize {
            ix.iter().enumerate().fold(0, |r, (s, &i)| r * if s < done { d_out } else { d_in } + i)
        };
        let mut t: Vec<Jet> = (0..size(0)).map(|r| self.get(&decode(r, 0))).collect();
        for slot in 0..p {
            let next: Vec<Jet> = (0..size(slot + 1))
                .map(|r| {
                    let mut ix = decode(r, slot + 1);
                    let i = ix[slot];
                    let mut acc = Jet::zero();
                    for a in 0..d_in {
                        ix[slot] = a;
                        acc += &m[(i, a)] * &t[encode(&ix, slot)];
                    }
                    acc
                })
                .collect();
            t = next;
        }
        Form::from_fn(d_out, p, |ix| t[encode(ix, p)].clone())
    }

    /// Interior product `i_X ω`, contracting the first slot.
    pub fn interior(&self, x: &[Jet]) -> Form {
        assert_eq!(x.len(), self.dim, "vector dimension mismatch");
        assert!(self.degree >= 1, "interior product of a 0-form");
        Form::from_fn(self.dim, self.degree - 1, |ix| {
            let mut acc = Jet::zero();
            let mut full = Vec::with_capacity(self.degree);
            for (k, xk) in x.iter().enumerate() {
                full.clear();
                full.push(k);
                full.extend_from_slice(ix);
                if let Some((s, sign)) = sort_with_sign(&full) {
                    let t = xk * &self.comps[rank(&s)];
                    if sign > 0.0 {
                        acc += t;
                    } else {
                        acc -= t;
                    }
                }
            }
            acc
        })
    }

    /// `i_N ω`: sum over slots of ω with N applied in that slot. `N` uses the
    /// `(i, j) = N^i_j` convention, so `N ∂_j` is column `j`.
    pub fn i_n(&self, n: &Matrix) -> Form {
        assert_eq!(n.rows(), self.dim);
        assert!(self.degree >= 1, "i_N is not defined on 0-forms");
        Form::from_fn(self.dim, self.degree, |ix| {
            let mut acc = Jet::zero();
            let mut idx = ix.to_vec();
            for s in 0..ix.len() {
                for m in 0..self.dim {
                    idx[s] = m;
                    if let Some((sorted, sign)) = sort_with_sign(&idx) {
                        let t = &n[(m, ix[s])] * &self.comps[rank(&sorted)];
                        if sign > 0.0 {
                            acc += t;
                        } else {
                            acc -= t;
                        }
                    }
                }
                idx[s] = ix[s];
            }
            acc
        })
    }

    /// Coordinate exterior derivative; the result has one jet order less.
    pub fn exterior_derivative(&self) -> Form {
        let parts: Vec<Form> = (0..self.dim).map(|i| self.partial(i)).collect();
        Form::from_fn(self.dim, self.degree + 1, |ix| {
            let mut acc = Jet::zero();
            let mut rest = Vec::with_capacity(self.degree);
            for k in 0..ix.len() {
                rest.clear();
                rest.extend(ix.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &v)| v));
                let c = &parts[ix[k]].comps[rank(&rest)];
                if k % 2 == 0 {
                    acc += c;
                } else {
                    acc -= c;
                }
            }
            acc
        })
    }

    /// `ω^♭` of a 2-form as a matrix acting on column vectors: `(ω^♭ X)_j = ω(X, ∂_j)`.
    pub fn flat(&self) -> Matrix {
        self.to_matrix().transpose()
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Form(dim {}, degree {}) {{", self.dim, self.degree)?;
        for (ix, c) in combinations(self.dim, self.degree).iter().zip(&self.comps) {
            if c.value() != 0.0 {
                write!(f, " {ix:?}: {}", c.value())?;
            }
        }
        write!(f, " }}")
    }
}

/// `dx^i` in R^d.
pub fn basis_1form(d: usize, i: usize) -> Form {
    let mut f = Form::zero(d, 1);
    f.set(&[i], Jet::one());
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::seed;

    #[test]
    fn combinations_are_rank_ordered() {
        let c = combinations(4, 2);
        assert_eq!(c.len(), 6);
        for (r, ix) in c.iter().enumerate() {
            assert_eq!(rank(ix), r);
        }
        assert_eq!(combinations(5, 3).len(), 10);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn exact_zero_forms() {
        let mut f = Form::zero(3, 2);
        assert!(f.is_exact_zero());
        f.set(&[0, 2], seed(&[1.0, 0.0, 0.0], 1)[1].clone());
        assert!(!f.is_exact_zero());
    }

    #[test]
    fn permuted_reads_flip_sign() {
        let mut f = Form::zero(4, 3);
        f.set(&[2, 0, 3], Jet::constant(1.5));
        assert_eq!(f.value(&[0, 2, 3]), -1.5);
        assert_eq!(f.value(&[3, 2, 0]), 1.5);
        assert_eq!(f.value(&[0, 0, 3]), 0.0);
    }

    #[test]
    fn wedge_of_one_forms_is_determinant() {
        let a = Form::from_covector(&[1.0, 2.0, 3.0].map(Jet::constant));
        let b = Form::from_covector(&[-1.0, 0.5, 4.0].map(Jet::constant));
        let w = a.wedge(&b);
        assert_eq!(w.value(&[0, 1]), 1.0 * 0.5 - 2.0 * -1.0);
        assert_eq!(w.value(&[1, 2]), 2.0 * 4.0 - 3.0 * 0.5);
        let w3 = w.wedge(&basis_1form(3, 0));
        // (a∧b)∧dx^0 evaluated on (0,1,2) is (a∧b)_{12}
        assert_eq!(w3.value(&[0, 1, 2]), w.value(&[1, 2]));
    }

    #[test]
    fn exterior_derivative_of_q1_dq2() {
        // ω = x_0 dx_1 on R^4, dω = dx_0 ∧ dx_1
        let x = seed(&[0.3, -0.2, 0.1, 0.7], 1);
        let mut w = Form::zero(4, 1);
        w.set(&[1], x[0].clone());
        let dw = w.exterior_derivative();
        for ix in combinations(4, 2) {
            let expect = if ix == [0, 1] { 1.0 } else { 0.0 };
            assert_eq!(dw.value(&ix), expect);
        }
    }

    #[test]
    fn interior_of_wedge() {
        let a = basis_1form(3, 0);
        let b = basis_1form(3, 1);
        let w = a.wedge(&b);
        let e0 = [1.0, 0.0, 0.0].map(Jet::constant);
        let i = w.interior(&e0);
        assert_eq!(i.value(&[1]), 1.0);
        assert_eq!(i.value(&[0]), 0.0);
    }

    #[test]
    fn i_n_on_diagonal() {
        let lam = [2.0, 3.0, 5.0];
        let n = Matrix::from_fn(3, 3, |i, j| Jet::constant(if i == j { lam[i] } else { 0.0 }));
        let w = basis_1form(3, 0).wedge(&basis_1form(3, 2));
        let r = w.i_n(&n);
        assert_eq!(r.value(&[0, 2]), lam[0] + lam[2]);
        assert_eq!(r.value(&[0, 1]), 0.0);
    }
}
