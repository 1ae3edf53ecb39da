//! Negative controls: deliberately broken inputs run through the ordinary
//! checks. Each returned check is expected to fail.

use anyhow::Result;
use pqn_core::field::{from_formula, from_point_fn, BivectorField, FormField, ScalarField};
use pqn_core::flaschka::{check_f_related, FlaschkaData};
use pqn_core::poisson::{canonical_matrix, PoissonStructure};
use pqn_core::pqn::{condition_a_residual, tensor_from_formula, PqnStructure};
use pqn_core::toda::TodaModel;
use pqn_core::{Jet, Matrix};

use crate::oracle::{first_derivative_error, fold_max};
use crate::report::Check;
use crate::sampling::physical_points;
use crate::suites::tol;

pub fn negative_controls(samples: usize, seed: u64) -> Result<Vec<Check>> {
    let n = 3;
    let m = TodaModel::an1(n)?;
    let pts = physical_points(n, samples, seed, 1.0);
    let worst = |f: &dyn Fn(&pqn_core::Point) -> pqn_core::Result<f64>| -> Result<f64> {
        let mut w: f64 = 0.0;
        for p in &pts {
            w = fold_max(w, f(p)?);
        }
        Ok(w)
    };
    let mut out = Vec::new();

    let plus = m.deformed(1.0);
    let phi = plus.phi.clone();
    let doubled: FormField = from_point_fn(2 * n, move |x, r| phi.eval(x, r).scale(2.0));
    let broken = PqnStructure { pi: plus.pi.clone(), n: plus.n.clone(), phi: doubled };
    out.push(Check::new(
        "control: N_+ with doubled φ",
        "T_N(X,Y) = π♯(i_{X∧Y}φ)",
        worst(&|p| Ok(broken.torsion_residual(p.coords())))?,
        tol::AXIOMS,
    ));

    // N^1_2 = q_1 on two particles is not compatible with the canonical structure
    let incompatible = PqnStructure::pn(
        PoissonStructure::canonical(2),
        tensor_from_formula(4, |x| {
            Matrix::from_fn(4, 4, |i, j| if (i, j) == (0, 1) { x[0].clone() } else { Jet::zero() })
        }),
    );
    let pts2 = physical_points(2, samples, seed, 1.0);
    let mut w: f64 = 0.0;
    for p in &pts2 {
        let r = incompatible.axioms_at(p)?;
        w = fold_max(w, fold_max(r.compatibility_matrix, r.compatibility_lie));
    }
    out.push(Check::new("control: N^1_2 = q_1", "Nπ♯ = π♯N^*, C_π(N) = 0", w, tol::PN));

    let minus = m.deformed(-1.0);
    out.push(Check::new(
        "control: φ_− against the + form of condition (a)",
        "φ + 2 dH_1 ∧ Ω = 0",
        worst(&|p| condition_a_residual(&minus, m.omega.as_ref(), p))?,
        tol::CONDITION_A,
    ));

    let fd = FlaschkaData::new(n)?;
    let np = plus.n.clone();
    let a = canonical_matrix(n);
    let pi_plus: BivectorField = from_point_fn(2 * n, move |x, r| np.eval(x, r).matmul(&a));
    out.push(Check::new(
        "control: P_1 against π_{N_+}",
        "F_* π_{N_+} F^* = P_1",
        worst(&|p| check_f_related(pi_plus.as_ref(), fd.p1.field().as_ref(), p))?,
        tol::F_RELATED,
    ));

    // the value moves with q_1 but the jet claims a zero derivative
    let frozen: ScalarField = from_point_fn(2 * n, |x, _| Jet::constant(x[0]));
    out.push(Check::new(
        "control: jet with a dropped derivative",
        "|∂f_jet − ∂f_fd| / max(1, |f|)",
        worst(&|p| Ok(first_derivative_error(frozen.as_ref(), p.coords())))?,
        tol::JET_FD,
    ));

    // v·curl v ≠ 0 for v = (q_2, 0, 1) on (q_1, q_2, p_1)
    let nonpoisson: BivectorField = from_formula(4, |x| {
        Matrix::from_fn(4, 4, |i, j| match (i, j) {
            (0, 1) => Jet::one(),
            (1, 0) => -Jet::one(),
            (1, 2) => x[1].clone(),
            (2, 1) => -&x[1],
            _ => Jet::zero(),
        })
    });
    let mut w: f64 = 0.0;
    for p in &pts2 {
        let s = pqn_core::poisson::schouten_bracket_bivectors(nonpoisson.as_ref(), nonpoisson.as_ref(), p)?;
        w = fold_max(w, s.max_abs());
    }
    out.push(Check::new("control: {q_1,q_2} = 1, {q_2,p_1} = q_2", "[P, P] = 0", w, tol::SCHOUTEN));
    Ok(out)
}
