//! Acceptance criteria, one test per criterion. Each test prints one
//! `PASS`/`FAIL` line for its criterion followed by one line per check, and
//! fails unless every check meets its pinned tolerance. Negative controls
//! are listed as `caught` when their check fails as designed.

use std::io::Write;
use std::sync::OnceLock;

use pqn::controls::negative_controls;
use pqn::flows::{dynamics_suite, DynamicsOutcome};
use pqn::report::{Check, Report, Settings};
use pqn::suites;
use pqn_core::toda::{Family, TodaModel};
use pqn_core::Point;

const SAMPLES: usize = 100;
const SEED: u64 = 0;
const HALF_WIDTH: f64 = 1.0;
const DT: f64 = 1e-3;
const T_END: f64 = 10.0;

struct Case {
    model: TodaModel,
    points: Vec<Point>,
}

fn settings(n: usize) -> Settings {
    Settings { samples: SAMPLES, seed: SEED, kmax: 2 * n, half_width: HALF_WIDTH }
}

/// `A_n^(1)` for n = 2..5, `C_n^(1)` and `A_{2n}^(2)` for n = 2..4.
fn cases() -> &'static [Case] {
    static CASES: OnceLock<Vec<Case>> = OnceLock::new();
    CASES.get_or_init(|| {
        let sizes = [(Family::A1, 2..=5), (Family::C1, 2..=4), (Family::A2Twisted, 2..=4)];
        sizes
            .into_iter()
            .flat_map(|(f, ns)| ns.map(move |n| (f, n)))
            .map(|(f, n)| {
                let model = TodaModel::build(f, n).unwrap();
                let points = suites::model_points(&model, &settings(n)).unwrap();
                Case { model, points }
            })
            .collect()
    })
}

type Labelled = Vec<(String, Check)>;

fn per_model(f: impl Fn(&Case) -> anyhow::Result<Vec<Check>>) -> Labelled {
    cases().iter().flat_map(|c| f(c).unwrap().into_iter().map(|k| (c.model.id().to_string(), k))).collect()
}

fn chain() -> &'static Labelled {
    static CHAIN: OnceLock<Labelled> = OnceLock::new();
    CHAIN.get_or_init(|| per_model(|c| suites::chain_checks(&c.model, &c.points, 2 * c.model.n)))
}

fn flaschka() -> &'static Labelled {
    static FLASCHKA: OnceLock<Labelled> = OnceLock::new();
    FLASCHKA.get_or_init(|| {
        (2..=8)
            .flat_map(|n| {
                suites::flaschka(n, &settings(n)).unwrap().into_iter().map(move |k| (format!("flaschka-n{n}"), k))
            })
            .collect()
    })
}

fn dynamics() -> &'static DynamicsOutcome {
    static DYNAMICS: OnceLock<DynamicsOutcome> = OnceLock::new();
    DYNAMICS.get_or_init(|| dynamics_suite(DT, T_END).unwrap())
}

fn chain_subset(keys: &[&str]) -> Labelled {
    chain().iter().filter(|(_, c)| keys.iter().any(|k| c.name.contains(k))).cloned().collect()
}

fn residual(c: &Check) -> String {
    c.max_residual.map_or("non-finite".into(), |r| format!("{r:.3e}"))
}

/// Prints the criterion and its checks, bypassing the test harness capture so
/// the lines appear in every run.
fn report(criterion: u32, title: &str, checks: &Labelled, controls: &Labelled) {
    let failed: Vec<&(String, Check)> = checks.iter().filter(|(_, c)| !c.pass).collect();
    let missed: Vec<&(String, Check)> = controls.iter().filter(|(_, c)| c.pass).collect();
    let ok = !checks.is_empty() && failed.is_empty() && missed.is_empty();
    let caught = match controls.len() {
        0 => String::new(),
        k => format!(", {} of {k} controls caught", k - missed.len()),
    };
    // the harness prints `test name ... ` without a newline first
    let mut s = format!(
        "\n{} criterion {criterion}: {title} ({} of {} checks pass{caught})\n",
        if ok { "PASS" } else { "FAIL" },
        checks.len() - failed.len(),
        checks.len(),
    );
    for (m, c) in checks {
        let verdict = if c.pass { "pass" } else { "FAIL" };
        s += &format!("    {verdict:<6} {m:<12} {}: {} ≤ {:e}\n", c.name, residual(c), c.tolerance);
    }
    for (m, c) in controls {
        let verdict = if c.pass { "MISSED" } else { "caught" };
        s += &format!("    {verdict:<6} {m:<12} {}: {} vs {:e}\n", c.name, residual(c), c.tolerance);
    }
    std::io::stdout().lock().write_all(s.as_bytes()).unwrap();
    let names = |v: &[&(String, Check)]| v.iter().map(|(m, c)| format!("{m} {}", c.name)).collect::<Vec<_>>();
    assert!(!checks.is_empty(), "criterion {criterion} ran no checks");
    assert!(failed.is_empty(), "criterion {criterion} failed: {:?}", names(&failed));
    assert!(missed.is_empty(), "criterion {criterion} controls passed: {:?}", names(&missed));
}

#[test]
fn criterion_01_open_lattice_is_poisson_nijenhuis() {
    report(1, "open N torsion-free and compatible", &per_model(|c| suites::pn_baseline(&c.model, &c.points)), &vec![]);
}

#[test]
fn criterion_02_deformed_structures_satisfy_the_axioms() {
    report(
        2,
        "quasi-Nijenhuis axioms of the deformed structures",
        &per_model(|c| suites::axioms(&c.model, &c.points)),
        &vec![],
    );
}

#[test]
fn criterion_03_condition_a() {
    report(
        3,
        "condition (a), [Ω,Ω]_π = 0 and φ = ±d_NΩ",
        &per_model(|c| suites::condition_a(&c.model, &c.points)),
        &vec![],
    );
}

#[test]
fn criterion_04_condition_b() {
    report(
        4,
        "condition (b) and the two routes to Y_k, k ≤ 2n",
        &chain_subset(&["condition (b)", "two routes"]),
        &vec![],
    );
}

#[test]
fn criterion_05_involutivity() {
    report(5, "involutivity of H_j, H_k for j, k ≤ 2n", &chain_subset(&["involutivity"]), &vec![]);
}

#[test]
fn criterion_06_lenard_magri_and_bracket_recursion() {
    let checks = chain_subset(&["Lenard–Magri", "f_1", "bracket recursion"]);
    report(6, "generalized Lenard–Magri chain, f_1 = 0 and bracket recursion", &checks, &vec![]);
}

#[test]
fn criterion_07_fixtures() {
    let checks = per_model(|c| suites::fixtures(&c.model, &c.points));
    let count = |id: &str| checks.iter().filter(|(m, _)| m == id).count();
    assert_eq!((count("c1-n2"), count("a1-n4")), (3, 6));
    report(7, "builders reproduce the explicit C_2 and n = 4 matrices", &checks, &vec![]);
}

#[test]
fn criterion_08_flaschka_reduction() {
    let mut checks: Labelled = flaschka().iter().filter(|(_, c)| !c.name.starts_with("jet")).cloned().collect();
    for n in 2..=8 {
        checks.push((format!("flaschka-n{n}"), suites::epsilon_literal(n).unwrap()));
    }
    report(8, "Flaschka reduction and the exact ε identity", &checks, &vec![]);
}

#[test]
fn criterion_09_dynamics() {
    let d = dynamics();
    let label = |v: &[Check]| v.iter().map(|c| ("a1-n3".to_string(), c.clone())).collect::<Labelled>();
    report(9, "closed Toda leapfrog, n = 3, dt = 1e-3, T = 10", &label(&d.checks), &label(&d.controls));
}

#[test]
fn criterion_10_infrastructure() {
    let mut checks = per_model(|c| suites::jet_consistency(&c.model, &c.points, 2 * c.model.n));
    checks.extend(flaschka().iter().filter(|(_, c)| c.name.starts_with("jet")).cloned());

    let m = TodaModel::build(Family::A2Twisted, 3).unwrap();
    let run = || {
        let s = settings(3);
        let mut r = Report::new("verify", m.id(), &s, suites::verify(&m, &s).unwrap());
        r.environment.timestamp.clear();
        r.to_json()
    };
    let (a, b) = (run(), run());
    let same = if a == b { 0.0 } else { 1.0 };
    checks.push((
        "a2t-n3".into(),
        Check::new("reports identical under a fixed seed", "report(seed) = report(seed)", same, 0.0),
    ));

    let mut controls: Labelled =
        negative_controls(SAMPLES, SEED).unwrap().into_iter().map(|c| ("control".into(), c)).collect();
    controls.extend(dynamics().controls.iter().map(|c| ("a1-n3".to_string(), c.clone())));
    report(10, "jets vs finite differences, determinism and negative controls", &checks, &controls);
}
