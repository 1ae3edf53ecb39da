mod common;

use common::*;
use pqn_core::diffgeo::gradient_jets;
use pqn_core::field::{from_formula, from_point_fn, BivectorField, CovectorField, FormField, ScalarField};
use pqn_core::flaschka::FlaschkaData;
use pqn_core::form::Form;
use pqn_core::jet::{seed, values};
use pqn_core::linalg::{dot, Matrix};
use pqn_core::poisson::*;
use pqn_core::toda::{an_omega, c_omega, total_momentum, TodaModel};
use pqn_core::{Chart, Jet, Point};
use proptest::prelude::*;

fn pt(c: &[f64]) -> Point {
    Point::new(c.to_vec(), Chart::Physical).unwrap()
}

fn scalar(d: usize, f: impl Fn(&[Jet]) -> Jet + Send + Sync + 'static) -> ScalarField {
    from_formula(d, f)
}

fn pi_n(model: &TodaModel, sign: f64) -> BivectorField {
    let n = model.deformed(sign).n;
    let a = canonical_matrix(model.n);
    from_point_fn(model.dim(), move |x, r| n.eval(x, r).matmul(&a))
}

#[test]
fn canonical_sharp_of_basis_covectors() {
    let pi = PoissonStructure::canonical(2);
    let x = pt(&[0.3, -0.4, 1.0, 0.2]);
    assert_eq!(sharp(&pi, &[1.0, 0.0, 0.0, 0.0], &x).unwrap(), [0.0, 0.0, -1.0, 0.0]);
    assert_eq!(sharp(&pi, &[0.0, 0.0, 1.0, 0.0], &x).unwrap(), [1.0, 0.0, 0.0, 0.0]);
}

#[test]
fn zero_structure_has_zero_sharp() {
    let pi = PoissonStructure::new(from_formula(4, |_: &[Jet]| Matrix::zeros(4, 4)));
    assert_eq!(sharp(&pi, &[1.0, 2.0, 3.0, 4.0], &pt(&[0.0; 4])).unwrap(), [0.0; 4]);
}

#[test]
fn c2_second_structure_sharp_of_dq1() {
    let m = TodaModel::cn1(2).unwrap();
    let pi = PoissonStructure::new(m.pi_prime.clone());
    let v = sharp(&pi, &[1.0, 0.0, 0.0, 0.0], &pt(&[0.0; 4])).unwrap();
    assert_eq!(v[2], 2.0);
}

#[test]
fn canonical_q_p_bracket() {
    let pi = PoissonStructure::canonical(2);
    let q1 = scalar(4, |x| x[0].clone());
    let p1 = scalar(4, |x| x[2].clone());
    assert_eq!(poisson_bracket(&pi, q1.as_ref(), p1.as_ref(), &pt(&[0.1, 0.2, 0.3, 0.4])).unwrap(), 1.0);
}

#[test]
fn bracket_of_a_function_with_itself_vanishes() {
    let m = TodaModel::cn1(3).unwrap();
    let pi = PoissonStructure::new(m.pi_prime.clone());
    for p in points(3, 20, 21) {
        assert!(poisson_bracket(&pi, m.hamiltonian.as_ref(), m.hamiltonian.as_ref(), &p).unwrap().abs() < 1e-12);
    }
}

#[test]
fn first_two_closed_toda_hamiltonians_commute() {
    for n in 2..=5 {
        let m = TodaModel::an1(n).unwrap();
        let chain = m.chain(1.0, 2);
        let (h1, h2) = (chain.hamiltonian(1), chain.hamiltonian(2));
        for p in points(n, 100, 22) {
            assert!(poisson_bracket(&m.pi, h1.as_ref(), h2.as_ref(), &p).unwrap().abs() < 1e-10);
        }
    }
}

#[test]
fn pairing_is_antisymmetric() {
    let mut r = rng(23);
    for model in [TodaModel::cn1(3).unwrap(), TodaModel::a2n2(4).unwrap()] {
        let d = model.dim();
        for _ in 0..50 {
            let x = coords(&mut r, d);
            let a = model.pi_prime.eval(&x, 0);
            let (al, be) = (seed(&coords(&mut r, d), 0), seed(&coords(&mut r, d), 0));
            let lhs = dot(&be, &a.mul_vec(&al)).value();
            let rhs = dot(&al, &a.mul_vec(&be)).value();
            assert_eq!(lhs, -rhs);
        }
    }
}

fn covector(d: usize, f: impl Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static) -> CovectorField {
    from_formula(d, f)
}

#[test]
fn koszul_bracket_of_exact_forms_is_exact() {
    // [df, dg] = d π(df, dg) = d{g, f} with {f, g} = ⟨df, π^♯dg⟩
    let pi = PoissonStructure::canonical(2);
    let f = |x: &[Jet]| (&x[0] * &x[3]).exp() + x[1].sin();
    let g = |x: &[Jet]| &x[2] * &x[2] * &x[1] + x[0].cos();
    let df: CovectorField = from_point_fn(4, move |x, r| gradient_jets(&f(&seed(x, r + 1)), 4));
    let dg: CovectorField = from_point_fn(4, move |x, r| gradient_jets(&g(&seed(x, r + 1)), 4));
    let gf: ScalarField = from_point_fn(4, move |x, r| {
        let s = seed(x, r + 1);
        bracket_jets(&canonical_matrix(2), &gradient_jets(&g(&s), 4), &gradient_jets(&f(&s), 4))
    });
    for p in points(2, 50, 24) {
        let got = koszul_bracket_1forms(&pi, df.as_ref(), dg.as_ref(), &p).unwrap();
        let expect = values(&gradient_jets(&gf.eval(p.coords(), 1), 4));
        assert!(max_diff(&got, &expect) < 1e-12);
        // and against finite differences of {g, f}
        let fd = fd_gradient(|c| gf.eval(c, 0).value(), p.coords());
        assert!(max_diff(&got, &fd) < FD_TOL);
    }
}

#[test]
fn koszul_bracket_of_constant_forms_with_constant_structure_vanishes() {
    let pi = PoissonStructure::canonical(2);
    for i in 0..4 {
        for j in 0..4 {
            let a = covector(4, move |_| (0..4).map(|k| Jet::constant(f64::from(u8::from(k == i)))).collect());
            let b = covector(4, move |_| (0..4).map(|k| Jet::constant(f64::from(u8::from(k == j)))).collect());
            let got = koszul_bracket_1forms(&pi, a.as_ref(), b.as_ref(), &pt(&[0.5, 0.1, -0.2, 0.3])).unwrap();
            assert_eq!(got, [0.0; 4]);
        }
    }
}

#[test]
fn function_slot_is_the_pairing_with_df() {
    // [α, f]_π = ⟨df, π^♯α⟩ with no sign
    let m = TodaModel::cn1(2).unwrap();
    for p in points(2, 20, 25) {
        let x1 = seed(p.coords(), 1);
        let a = m.pi_prime.eval(p.coords(), 0);
        let f = (&x1[0] * &x1[2]).exp();
        let alpha = seed(&[0.3, -1.0, 2.0, 0.5], 0);
        let got = koszul_function_jets(&a, &alpha, &f).value();
        let df = fd_gradient(|c| (c[0] * c[2]).exp(), p.coords());
        let pa: Vec<f64> = values(&a.mul_vec(&alpha));
        let expect: f64 = df.iter().zip(&pa).map(|(u, v)| u * v).sum();
        assert!((got - expect).abs() < FD_TOL);
    }
}

fn two_form(d: usize, f: impl Fn(&[Jet]) -> Form + Send + Sync + 'static) -> FormField {
    from_formula(d, f)
}

#[test]
fn deformation_forms_have_vanishing_self_bracket() {
    for n in 2..=5 {
        let pi = PoissonStructure::canonical(n);
        let (a, c) = (two_form(2 * n, an_omega), two_form(2 * n, c_omega));
        for p in points(n, 100, 26) {
            assert!(koszul_bracket_2forms(&pi, a.as_ref(), a.as_ref(), &p).unwrap().max_abs() < 1e-10);
            assert!(koszul_bracket_2forms(&pi, c.as_ref(), c.as_ref(), &p).unwrap().max_abs() < 1e-10);
        }
    }
}

#[test]
fn constant_two_forms_have_vanishing_bracket() {
    let pi = PoissonStructure::canonical(2);
    let w = two_form(4, |_| Form::from_fn(4, 2, |ix| Jet::constant((ix[0] + 2 * ix[1]) as f64)));
    let r = koszul_bracket_2forms(&pi, w.as_ref(), w.as_ref(), &pt(&[0.2; 4])).unwrap();
    assert_eq!(r.max_abs(), 0.0);
}

#[test]
fn canonical_structure_is_poisson() {
    let pi = PoissonStructure::canonical(3);
    for p in points(3, 10, 27) {
        assert_eq!(jacobi_residual(&pi, &p).unwrap(), 0.0);
    }
}

#[test]
fn closed_toda_schouten_identities() {
    for n in 2..=5 {
        let m = TodaModel::an1(n).unwrap();
        let pnm = pi_n(&m, -1.0);
        let omega = two_form(2 * n, an_omega);
        let a = canonical_matrix(n);
        for p in points(n, 100, 28) {
            let c = p.coords();
            assert!(schouten_bracket_bivectors(m.pi.field().as_ref(), pnm.as_ref(), &p).unwrap().max_abs() < 1e-8);
            let s = schouten_bracket_bivectors(pnm.as_ref(), pnm.as_ref(), &p).unwrap();
            // X_1 = π^♯dH_1 with H_1 = Σp
            let x1 = values(&a.mul_vec(&gradient_jets(&total_momentum(&seed(c, 1)), 2 * n)));
            let x1 = Form::from_covector(&seed(&x1, 0));
            let rhs = x1.wedge(&sharp_2form_components(&a, &omega.eval(c, 0))).scale(4.0);
            assert!(s.max_abs_diff(&rhs) < 1e-8, "n = {n}");
            assert!(s.max_abs() > 1e-3 || rhs.max_abs() < 1e-3);
        }
    }
}

#[test]
fn second_structures_and_flaschka_pairs_are_poisson() {
    for m in [
        TodaModel::an1(3).unwrap(),
        TodaModel::cn1(3).unwrap(),
        TodaModel::a2n2(3).unwrap(),
        TodaModel::cn1(2).unwrap(),
    ] {
        let pi2 = PoissonStructure::new(m.pi_prime.clone());
        for p in points(m.n, 100, 29) {
            assert!(jacobi_residual(&pi2, &p).unwrap() < 1e-10, "{}", m.id());
        }
    }
    for n in [2, 4] {
        let fd = FlaschkaData::new(n).unwrap();
        for p in points(n, 100, 30) {
            let y = pqn_core::flaschka::flaschka_map(&p).unwrap();
            assert!(jacobi_residual(&fd.p0, &y).unwrap() < 1e-10);
            assert!(jacobi_residual(&fd.p1, &y).unwrap() < 1e-10);
        }
    }
}

#[test]
fn hamiltonian_vector_fields() {
    let n = 3;
    let pi = PoissonStructure::canonical(n);
    let h1 = scalar(6, total_momentum);
    let x1 = hamiltonian_vector_field(&pi, h1);
    let c = scalar(6, |_| Jet::constant(4.5));
    let xc = hamiltonian_vector_field(&pi, c);
    for p in points(n, 10, 31) {
        assert_eq!(values(&x1.eval(p.coords(), 0)), [1.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(values(&xc.eval(p.coords(), 0)), [0.0; 6]);
    }
    let m = TodaModel::an1(2).unwrap();
    let x2 = hamiltonian_vector_field(&m.pi, m.hamiltonian.clone());
    assert_eq!(values(&x2.eval(&[0.0; 4], 0)), [0.0; 4]);
    // off the symmetric point: ṗ_1 = −∂_{q_1} H by finite differences
    let at = [0.3, -0.2, 0.5, 0.1];
    let v = values(&x2.eval(&at, 0));
    let g = fd_gradient(|c| m.hamiltonian.eval(c, 0).value(), &at);
    assert!(max_diff(&v, &[g[2], g[3], -g[0], -g[1]]) < FD_TOL);
}

fn jets(c: &[Smooth], x: &[Jet]) -> Vec<Jet> {
    c.iter().map(|s| s.eval(x)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn one_form_bracket_is_antisymmetric(a in smooth_vec(4), b in smooth_vec(4), x in point_strategy(4)) {
        let m = TodaModel::cn1(2).unwrap();
        let xs = seed(&x, 1);
        let s = m.pi_prime.eval(&x, 1);
        let ab = koszul1_jets(&s, &jets(&a, &xs), &jets(&b, &xs));
        let ba = koszul1_jets(&s, &jets(&b, &xs), &jets(&a, &xs));
        for (u, v) in ab.iter().zip(&ba) {
            prop_assert!((u.value() + v.value()).abs() < 1e-12 * (1.0 + u.value().abs()));
        }
    }

    #[test]
    fn leibniz_in_the_second_slot(a in smooth_vec(4), b in smooth_vec(4), f in smooth(4), x in point_strategy(4)) {
        // [α, f β] = [α, f] β + f [α, β]
        let m = TodaModel::a2n2(2).unwrap();
        let xs = seed(&x, 1);
        let s = m.pi_prime.eval(&x, 1);
        let (al, be, fv) = (jets(&a, &xs), jets(&b, &xs), f.eval(&xs));
        let fbe: Vec<Jet> = be.iter().map(|c| c * &fv).collect();
        let lhs = koszul1_jets(&s, &al, &fbe);
        let k2 = koszul_function_jets(&s.truncate(0), &values(&al).iter().map(|&v| Jet::constant(v)).collect::<Vec<_>>(), &fv);
        let ab = koszul1_jets(&s, &al, &be);
        for i in 0..4 {
            let rhs = k2.value() * be[i].value() + fv.value() * ab[i].value();
            prop_assert!((lhs[i].value() - rhs).abs() < 1e-10 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn graded_jacobi_on_one_forms(a in smooth_vec(4), b in smooth_vec(4), c in smooth_vec(4), x in point_strategy(4)) {
        // [α, [β, γ]] = [[α, β], γ] + [β, [α, γ]]
        let m = TodaModel::cn1(2).unwrap();
        let xs = seed(&x, 2);
        let s = m.pi_prime.eval(&x, 2);
        let s1 = s.truncate(1);
        let (al, be, ga) = (jets(&a, &xs), jets(&b, &xs), jets(&c, &xs));
        let tr = |v: &[Jet]| v.iter().map(|j| j.truncate(1)).collect::<Vec<_>>();
        let lhs = koszul1_jets(&s1, &tr(&al), &koszul1_jets(&s, &be, &ga));
        let r1 = koszul1_jets(&s1, &koszul1_jets(&s, &al, &be), &tr(&ga));
        let r2 = koszul1_jets(&s1, &tr(&be), &koszul1_jets(&s, &al, &ga));
        for i in 0..4 {
            let rhs = r1[i].value() + r2[i].value();
            prop_assert!((lhs[i].value() - rhs).abs() < 1e-8 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn one_form_acts_on_wedges_as_a_derivation(a in smooth_vec(4), b in smooth_vec(4), c in smooth_vec(4), x in point_strategy(4)) {
        // [α, β∧γ] = [α, β]∧γ + β∧[α, γ]
        let m = TodaModel::cn1(2).unwrap();
        let xs = seed(&x, 1);
        let s = m.pi_prime.eval(&x, 1);
        let (al, be, ga) = (jets(&a, &xs), jets(&b, &xs), jets(&c, &xs));
        let w = Form::from_covector(&be).wedge(&Form::from_covector(&ga));
        let lhs = koszul_1form_2form_jets(&s, &al, &w);
        let t = |v: &[Jet]| Form::from_covector(&v.iter().map(|j| j.truncate(0)).collect::<Vec<_>>());
        let rhs = Form::from_covector(&koszul1_jets(&s, &al, &be)).wedge(&t(&ga))
            .add(&t(&be).wedge(&Form::from_covector(&koszul1_jets(&s, &al, &ga))));
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10 * (1.0 + rhs.max_abs()));
    }
}
