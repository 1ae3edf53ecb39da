//! Check suites over seeded sample points.
//!
//! Residuals are evaluated at every point in parallel, collected, and folded
//! in point order, so a report does not depend on thread scheduling.

use anyhow::{Context as _, Result};
use pqn_core::diffgeo::d_n_jets;
use pqn_core::field::{from_formula, from_point_fn, BivectorField, FormField, VectorField};
use pqn_core::fixtures;
use pqn_core::flaschka::{
    aea_identity, check_f_related, epsilon_identity_table, flaschka_jets, flaschka_map, p0_kernel_residual,
    pushforward, reduction_residuals, schouten_transfer, FlaschkaData, ReductionResidual,
};
use pqn_core::jet::seed;
use pqn_core::poisson::{canonical_matrix, koszul2_jets, sharp_flat};
use pqn_core::pqn::{condition_a_residual, condition_b, PqnStructure};
use pqn_core::toda::{Family, TodaModel};
use pqn_core::Point;
use rayon::prelude::*;

use crate::oracle::{first_derivative_error, fold_max, second_derivative_error};
use crate::report::{Check, Settings};
use crate::sampling::physical_points;

/// Tolerances of every check.
pub mod tol {
    pub const PN: f64 = 1e-10;
    pub const AXIOMS: f64 = 1e-8;
    pub const CONDITION_A: f64 = 1e-10;
    pub const CONDITION_B: f64 = 1e-8;
    pub const INVOLUTIVITY: f64 = 1e-8;
    pub const LENARD_MAGRI: f64 = 1e-8;
    pub const F1: f64 = 1e-12;
    pub const RECADD: f64 = 1e-8;
    /// Highest `k` in the `{H_k, H_j}` recursion check.
    pub const RECADD_KMAX: usize = 6;
    pub const FIXTURE: f64 = 1e-12;
    pub const F_RELATED: f64 = 1e-10;
    pub const AEA: f64 = 1e-12;
    pub const CASIMIR: f64 = 1e-10;
    pub const SCHOUTEN: f64 = 1e-8;
    pub const REDUCED_JACOBI: f64 = 1e-10;
    pub const REDUCED_CHAIN: f64 = 1e-8;
    pub const PROJECTABILITY: f64 = 1e-10;
    pub const SECTION: f64 = 1e-12;
    pub const P0_KERNEL: f64 = 1e-12;
    pub const JET_FD: f64 = 1e-6;
}

struct Spec {
    name: String,
    anchor: &'static str,
    tolerance: f64,
}

fn spec(name: impl Into<String>, anchor: &'static str, tolerance: f64) -> Spec {
    Spec { name: name.into(), anchor, tolerance }
}

/// Largest value of each residual column over all points.
fn sweep<F>(points: &[Point], specs: Vec<Spec>, f: F) -> Result<Vec<Check>>
where
    F: Fn(&Point) -> pqn_core::Result<Vec<f64>> + Sync,
{
    let rows: Vec<_> = points.par_iter().map(&f).collect();
    let mut worst = vec![0.0; specs.len()];
    for (i, row) in rows.into_iter().enumerate() {
        let row = row.with_context(|| format!("evaluating sample point {i}"))?;
        assert_eq!(row.len(), specs.len(), "one residual per check");
        for (w, v) in worst.iter_mut().zip(row) {
            *w = fold_max(*w, v);
        }
    }
    Ok(specs.into_iter().zip(worst).map(|(s, w)| Check::new(s.name, s.anchor, w, s.tolerance)).collect())
}

/// Deformation signs checked for a family: both for `A_n^(1)`, `+` otherwise.
pub fn signs(m: &TodaModel) -> &'static [f64] {
    if m.family == Family::A1 {
        &[1.0, -1.0]
    } else {
        &[1.0]
    }
}

fn label(m: &TodaModel, sign: f64) -> &'static str {
    match (m.family, sign > 0.0) {
        (Family::A1, true) => "N_+",
        (Family::A1, false) => "N_−",
        _ => "N̂",
    }
}

fn signed_omega(m: &TodaModel, sign: f64) -> FormField {
    let w = m.omega.clone();
    from_point_fn(m.dim(), move |x, r| w.eval(x, r).scale(sign))
}

/// `π_N = Nπ` as a stored bivector field.
fn pi_n(nf: pqn_core::field::Tensor11Field, n: usize) -> BivectorField {
    let a = canonical_matrix(n);
    from_point_fn(2 * n, move |x, r| nf.eval(x, r).matmul(&a))
}

/// Sample points for a model, rejecting any outside the overflow-safe domain.
pub fn model_points(m: &TodaModel, s: &Settings) -> Result<Vec<Point>> {
    let pts = physical_points(m.n, s.samples, s.seed, s.half_width);
    for (i, p) in pts.iter().enumerate() {
        m.check_domain(p).with_context(|| format!("sample point {i} with box {}", s.half_width))?;
    }
    Ok(pts)
}

/// The open lattice is a Poisson–Nijenhuis pair with the canonical structure.
pub fn pn_baseline(m: &TodaModel, pts: &[Point]) -> Result<Vec<Check>> {
    let s = m.pn_structure();
    let specs = vec![
        spec("open N: torsion", "T_N = 0", tol::PN),
        spec("open N: compatibility", "Nπ♯ = π♯N^*, C_π(N) = 0", tol::PN),
    ];
    sweep(pts, specs, |p| {
        let r = s.axioms_at(p)?;
        Ok(vec![r.torsion, fold_max(r.compatibility_matrix, r.compatibility_lie)])
    })
}

/// The four quasi-Nijenhuis axioms of every deformed structure.
pub fn axioms(m: &TodaModel, pts: &[Point]) -> Result<Vec<Check>> {
    let structures: Vec<(&str, PqnStructure)> = signs(m).iter().map(|&s| (label(m, s), m.deformed(s))).collect();
    let mut specs = Vec::new();
    for (l, _) in &structures {
        specs.push(spec(format!("{l}: compatibility"), "Nπ♯ = π♯N^*, C_π(N) = 0", tol::AXIOMS));
        specs.push(spec(format!("{l}: dφ"), "dφ = 0", tol::AXIOMS));
        specs.push(spec(format!("{l}: d(i_N φ)"), "d(i_N φ) = 0", tol::AXIOMS));
        specs.push(spec(format!("{l}: torsion"), "T_N(X,Y) = π♯(i_{X∧Y}φ)", tol::AXIOMS));
    }
    sweep(pts, specs, |p| {
        let mut row = Vec::new();
        for (_, s) in &structures {
            let r = s.axioms_at(p)?;
            row.extend([fold_max(r.compatibility_matrix, r.compatibility_lie), r.d_phi, r.d_i_n_phi, r.torsion]);
        }
        Ok(row)
    })
}

/// `φ + 2dH_1∧Ω = 0`, `[Ω, Ω]_π = 0`, and hence `φ = ±d_NΩ`.
pub fn condition_a(m: &TodaModel, pts: &[Point]) -> Result<Vec<Check>> {
    let cases: Vec<(&str, f64, PqnStructure, FormField)> =
        signs(m).iter().map(|&s| (label(m, s), s, m.deformed(s), signed_omega(m, s))).collect();
    let mut specs = vec![spec("[Ω, Ω]_π", "[Ω, Ω]_π = 0", tol::CONDITION_A)];
    for (l, ..) in &cases {
        specs.push(spec(format!("{l}: condition (a)"), "φ + 2 dH_1 ∧ Ω = 0", tol::CONDITION_A));
        specs.push(spec(format!("{l}: φ = ±d_N Ω"), "φ = ±d_N Ω", tol::CONDITION_A));
    }
    sweep(pts, specs, |p| {
        let c = p.coords();
        let (a, w) = (m.pi.stored(c, 1), m.omega.eval(c, 1));
        let n_open = m.n_open.eval(c, 1);
        let mut row = vec![koszul2_jets(&a, &w, &w).max_abs()];
        for (_, sign, s, omega) in &cases {
            row.push(condition_a_residual(s, omega.as_ref(), p)?);
            row.push(s.phi.eval(c, 0).max_abs_diff(&d_n_jets(&n_open, &w).scale(*sign).truncate(0)));
        }
        Ok(row)
    })
}

/// Condition (b), involutivity, the generalized Lenard–Magri chain (`A_n^(1)`)
/// and the torsion-corrected bracket recursion, from one chain evaluation per
/// point and sign.
pub fn chain_checks(m: &TodaModel, pts: &[Point], kmax: usize) -> Result<Vec<Check>> {
    let top = kmax.max(tol::RECADD_KMAX);
    let is_a = m.family == Family::A1;
    let cases: Vec<_> =
        signs(m).iter().map(|&s| (label(m, s), m.chain(s, top), is_a.then(|| m.deformed(-s).n))).collect();
    let mut specs = Vec::new();
    for (l, _, other) in &cases {
        specs.push(spec(format!("{l}: condition (b), k ≤ {kmax}"), "Ω♭(Y_k) = 0", tol::CONDITION_B));
        specs.push(spec(
            format!("{l}: Y_k two routes, k ≤ {kmax}"),
            "Y_k = π♯ Σ_l (N^*)^{k−l−2} φ_l",
            tol::CONDITION_B,
        ));
        specs.push(spec(format!("{l}: involutivity, j,k ≤ {kmax}"), "{H_j, H_k} = 0", tol::INVOLUTIVITY));
        if other.is_some() {
            let o = if l.contains('+') { "N_−" } else { "N_+" };
            specs.push(spec(
                format!("{l}: Lenard–Magri via {o}^*, k ≤ {kmax}"),
                "N_∓^* dH_k = dH_{k+1} + f_k dH_1",
                tol::LENARD_MAGRI,
            ));
            specs.push(spec(format!("{l}: f_1"), "f_1 = 0", tol::F1));
        }
        specs.push(spec(
            format!("{l}: bracket recursion, j < k ≤ {}", tol::RECADD_KMAX),
            "{H_k,H_j} − {H_{k−1},H_{j+1}} + ⟨φ_{j−1},X_{k−1}⟩ + ⟨φ_{k−2},X_j⟩ = 0",
            tol::RECADD,
        ));
    }
    sweep(pts, specs, |p| {
        let c = p.coords();
        let mut row = Vec::new();
        for (_, chain, other) in &cases {
            let cp = chain.at(c);
            let b = condition_b(&cp, kmax);
            row.extend([b.strong, b.dual_route]);
            let mut inv: f64 = 0.0;
            for j in 1..=kmax {
                for k in j + 1..=kmax {
                    inv = fold_max(inv, cp.bracket(j, k).abs());
                }
            }
            row.push(inv);
            if let Some(other) = other {
                let o = other.eval(c, 0);
                row.push((1..=kmax).map(|k| cp.lenard_magri_residual(&o, k)).fold(0.0, fold_max));
                row.push(cp.f(1).abs());
            }
            let mut rec: f64 = 0.0;
            for k in 2..=tol::RECADD_KMAX {
                for j in 1..k {
                    rec = fold_max(rec, cp.recadd_residual(k, j));
                }
            }
            row.push(rec);
        }
        Ok(row)
    })
}

/// Entrywise comparison of builders with the explicit matrices for `C_2^(1)`
/// and for `A_4^(1)`; empty for every other model.
pub fn fixtures(m: &TodaModel, pts: &[Point]) -> Result<Vec<Check>> {
    const ANCHOR: &str = "builder = explicit matrix, entrywise";
    match (m.family, m.n) {
        (Family::C1, 2) => {
            let n_hat = m.deformed(1.0).n;
            let specs = vec![
                spec("fixture: C_2 π′", ANCHOR, tol::FIXTURE),
                spec("fixture: C_2 open N", ANCHOR, tol::FIXTURE),
                spec("fixture: C_2 N̂", ANCHOR, tol::FIXTURE),
            ];
            sweep(pts, specs, |p| {
                let c = p.coords();
                let x = seed(c, 0);
                Ok(vec![
                    m.pi_prime.eval(c, 0).max_abs_diff(&fixtures::c2_pi_prime(&x)),
                    m.n_open.eval(c, 0).max_abs_diff(&fixtures::c2_open_tensor(&x)),
                    n_hat.eval(c, 0).max_abs_diff(&fixtures::c2_deformed_tensor(&x)),
                ])
            })
        }
        (Family::A1, 4) => {
            let n_minus = m.deformed(-1.0).n;
            let pi_minus = pi_n(n_minus.clone(), 4);
            let specs = vec![
                spec("fixture: n = 4 open N", ANCHOR, tol::FIXTURE),
                spec("fixture: n = 4 N_−", ANCHOR, tol::FIXTURE),
                spec("fixture: n = 4 π_{N_−}", ANCHOR, tol::FIXTURE),
                spec("fixture: n = 4 F_*", ANCHOR, tol::FIXTURE),
            ];
            let mut out = sweep(pts, specs, |p| {
                let c = p.coords();
                let x = seed(c, 0);
                let y = flaschka_map(p)?;
                Ok(vec![
                    m.n_open.eval(c, 0).max_abs_diff(&fixtures::a4_open_tensor(&x)),
                    n_minus.eval(c, 0).max_abs_diff(&fixtures::a4_n_minus(&x)),
                    pi_minus.eval(c, 0).max_abs_diff(&fixtures::a4_pi_n_minus(&x)),
                    pushforward(&seed(y.coords(), 0)).max_abs_diff(&fixtures::a4_f_star(&seed(y.positions(), 0))),
                ])
            })?;
            out.extend(flaschka_fixtures(4, pts)?);
            Ok(out)
        }
        _ => Ok(Vec::new()),
    }
}

/// `P_0` and `P_1` against their explicit `n = 4` matrices at `F(x)`.
fn flaschka_fixtures(n: usize, pts: &[Point]) -> Result<Vec<Check>> {
    if n != 4 {
        return Ok(Vec::new());
    }
    const ANCHOR: &str = "builder = explicit matrix, entrywise";
    let fd = FlaschkaData::new(n)?;
    let specs =
        vec![spec("fixture: n = 4 P_0", ANCHOR, tol::FIXTURE), spec("fixture: n = 4 P_1", ANCHOR, tol::FIXTURE)];
    sweep(pts, specs, |p| {
        let y = flaschka_map(p)?;
        let (c, s) = (y.coords(), seed(y.coords(), 0));
        Ok(vec![
            fd.p0.stored(c, 0).max_abs_diff(&fixtures::a4_p0(&s)),
            fd.p1.stored(c, 0).max_abs_diff(&fixtures::a4_p1(&s)),
        ])
    })
}

/// Jet derivatives of every model field against five-point differences.
pub fn jet_consistency(m: &TodaModel, pts: &[Point], kmax: usize) -> Result<Vec<Check>> {
    let d = m.dim();
    let structures: Vec<PqnStructure> = signs(m).iter().map(|&s| m.deformed(s)).collect();
    let chain = m.chain(1.0, kmax);
    // all H_k and f_k from one set of matrix powers
    let nf = structures[0].n.clone();
    let traces: VectorField = from_point_fn(d, move |x, r| {
        let pw = nf.eval(x, r).powers(kmax);
        (1..=kmax).map(|k| pw[k].trace().div_f64((2 * k) as f64)).collect()
    });
    let (pi, nf, om) = (m.pi.clone(), structures[0].n.clone(), m.omega.clone());
    let coefficients: VectorField = from_point_fn(d, move |x, r| {
        let s = sharp_flat(&pi.stored(x, r), &om.eval(x, r));
        nf.eval(x, r).powers(kmax).iter().take(kmax).map(|p| -p.trace_mul(&s)).collect()
    });
    let h1 = chain.vector_field(1);
    let specs = vec![spec("jet derivatives vs five-point differences", "|∂f_jet − ∂f_fd| / max(1, |f|)", tol::JET_FD)];
    sweep(pts, specs, |p| {
        let c = p.coords();
        let mut e = vec![
            first_derivative_error(m.pi.field().as_ref(), c),
            first_derivative_error(m.pi_prime.as_ref(), c),
            first_derivative_error(m.n_open.as_ref(), c),
            first_derivative_error(m.omega.as_ref(), c),
            first_derivative_error(m.hamiltonian.as_ref(), c),
            second_derivative_error(m.hamiltonian.as_ref(), c),
            first_derivative_error(traces.as_ref(), c),
            first_derivative_error(coefficients.as_ref(), c),
            first_derivative_error(h1.as_ref(), c),
        ];
        for s in &structures {
            e.push(first_derivative_error(s.n.as_ref(), c));
            e.push(first_derivative_error(s.phi.as_ref(), c));
        }
        Ok(vec![e.into_iter().fold(0.0, fold_max)])
    })
}

/// Every check of the `verify` command.
pub fn verify(m: &TodaModel, s: &Settings) -> Result<Vec<Check>> {
    let pts = model_points(m, s)?;
    let mut out = pn_baseline(m, &pts)?;
    out.extend(axioms(m, &pts)?);
    out.extend(condition_a(m, &pts)?);
    out.extend(chain_checks(m, &pts, s.kmax)?);
    out.extend(fixtures(m, &pts)?);
    out.extend(jet_consistency(m, &pts, s.kmax)?);
    Ok(out)
}

/// Reduction checks through the Flaschka map for `n` particles. The
/// `A_n^(1)` model supplies the physical side; `s.kmax` bounds the chain.
pub fn flaschka(n: usize, s: &Settings) -> Result<Vec<Check>> {
    let m = TodaModel::an1(n)?;
    let pts = model_points(&m, s)?;
    let fd = FlaschkaData::new(n)?;
    let canonical: BivectorField = from_formula(2 * n, move |_| canonical_matrix(n));
    let pi_minus = pi_n(m.deformed(-1.0).n, n);
    let kmax = s.kmax;
    let specs = vec![
        spec("P_0 F-related to π", "F_* π F^* = P_0", tol::F_RELATED),
        spec("P_1 F-related to π_{N_−}", "F_* π_{N_−} F^* = P_1", tol::F_RELATED),
        spec("AεA^T three routes", "AεA^T = Ã = closed form", tol::AEA),
        spec("Casimir", "P_0♯dC = P_1♯dC = 0", tol::CASIMIR),
        spec("[P_i, P_j]", "[P_0,P_0] = [P_1,P_1] = [P_0,P_1] = 0", tol::REDUCED_JACOBI),
        spec("[π, π_{N_−}]", "[π, π_{N_−}] = 0", tol::SCHOUTEN),
        spec("[π_{N_−}, π_{N_−}]", "[π_{N_−}, π_{N_−}] = 4 X_1 ∧ π♯Ω", tol::SCHOUTEN),
        spec("F_*[π_{N_−}, π_{N_−}]", "F_*[π_{N_−}, π_{N_−}] = 0", tol::SCHOUTEN),
        spec("F_* X_1", "F_* X_1 = 0", tol::P0_KERNEL),
        spec(format!("physical chain, k ≤ {kmax}"), "N_−^* dH_k = dH_{k+1} + f_k dH_1", tol::REDUCED_CHAIN),
        spec(format!("reduced chain, k ≤ {kmax}"), "P_1♯dH̃_k = P_0♯dH̃_{k+1}", tol::REDUCED_CHAIN),
        spec(format!("projectability, k ≤ {kmax}"), "{H_k, H_1} = 0", tol::PROJECTABILITY),
        spec(format!("H̃_k ∘ F = H_k, k ≤ {kmax}"), "H̃_k(F(x)) = H_k(x)", tol::SECTION),
        spec("P_0♯dH_1", "P_0♯dH_1 = 0", tol::P0_KERNEL),
    ];
    let mut out = sweep(&pts, specs, |p| {
        let y = flaschka_map(p)?;
        let t = schouten_transfer(&m, p)?;
        let mut row = vec![
            check_f_related(canonical.as_ref(), fd.p0.field().as_ref(), p)?,
            check_f_related(pi_minus.as_ref(), fd.p1.field().as_ref(), p)?,
            aea_identity(y.positions())?.max(),
            fd.casimir_residual(&y)?,
            fd.jacobi_residual(&y)?,
            t.compatibility,
            t.self_bracket,
            t.pushed,
            t.shift_kernel,
        ];
        let red = reduction_residuals(&m, kmax, p)?;
        let worst = |f: fn(&ReductionResidual) -> f64| red.iter().map(f).fold(0.0, fold_max);
        row.extend([worst(|r| r.physical), worst(|r| r.reduced), worst(|r| r.projectability), worst(|r| r.section)]);
        row.push(p0_kernel_residual(&m, p)?);
        Ok(row)
    })?;
    let table = epsilon_identity_table(n)?;
    out.push(Check::new(
        format!("periodic ε identity, {} integer cases", table.cases),
        "ε(ℓ−k) − ε(ℓ−k⁺) − ε(ℓ⁺−k) + ε(ℓ⁺−k⁺) = δ_{ℓ,k+1} − δ_{ℓ,k−1} (mod n)",
        table.cyclic_failures.len() as f64,
        0.0,
    ));
    out.extend(flaschka_fixtures(n, &pts)?);
    out.extend(flaschka_jet_consistency(n, &pts)?);
    Ok(out)
}

/// The integer identity `2ε(k−ℓ) − ε(k−ℓ−1) − ε(k−ℓ+1) = δ^{(n)}_{k,ℓ+1} −
/// δ^{(n)}_{k,ℓ−1}` over all `ℓ, k ≤ n`, with periodic deltas on the right and
/// the linear second difference on the left. The residual is the number of
/// failing pairs; it fails at `(1, n)` and `(n, 1)`, where the deltas wrap
/// around and the linear second difference does not.
pub fn epsilon_literal(n: usize) -> Result<Check> {
    let t = epsilon_identity_table(n)?;
    Ok(Check::new(
        format!("literal ε identity, n = {n}, {} integer cases", t.cases),
        "2ε(k−ℓ) − ε(k−ℓ−1) − ε(k−ℓ+1) = δ^{(n)}_{k,ℓ+1} − δ^{(n)}_{k,ℓ−1}",
        t.linear_failures.len() as f64,
        0.0,
    ))
}

fn flaschka_jet_consistency(n: usize, pts: &[Point]) -> Result<Vec<Check>> {
    let fd = FlaschkaData::new(n)?;
    let map: VectorField = from_formula(2 * n, flaschka_jets);
    let specs = vec![spec("jet derivatives vs five-point differences", "|∂f_jet − ∂f_fd| / max(1, |f|)", tol::JET_FD)];
    sweep(pts, specs, |p| {
        let y = flaschka_map(p)?;
        let c = y.coords();
        let e = [
            first_derivative_error(map.as_ref(), p.coords()),
            first_derivative_error(fd.p0.field().as_ref(), c),
            first_derivative_error(fd.p1.field().as_ref(), c),
            first_derivative_error(fd.casimir.as_ref(), c),
            second_derivative_error(fd.casimir.as_ref(), c),
        ];
        Ok(vec![e.into_iter().fold(0.0, fold_max)])
    })
}
