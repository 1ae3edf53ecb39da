mod common;

use common::*;
use pqn_core::dynamics::*;
use pqn_core::field::{from_formula, ScalarField};
use pqn_core::flaschka::{flaschka_map, FlaschkaData};
use pqn_core::poisson::PoissonStructure;
use pqn_core::pqn::ChainData;
use pqn_core::toda::TodaModel;
use pqn_core::{Error, Jet, Point};

fn kinetic(d: usize) -> ScalarField {
    from_formula(d, |x: &[Jet]| {
        let n = x.len() / 2;
        x[n..].iter().map(|p| p * p).sum::<Jet>().scale(0.5)
    })
}

fn x0() -> Point {
    Point::physical(&[0.0; 3], &[0.1, -0.2, 0.1]).unwrap()
}

fn closed_run(dt: f64, t_end: f64) -> (Trajectory, Vec<Drift>) {
    let m = TodaModel::an1(3).unwrap();
    let mut traj = integrate(&m.pi, &m.hamiltonian, &x0(), t_end, dt, Scheme::Leapfrog).unwrap();
    let drifts = conservation_report(&mut traj, &m.chain(1.0, 6));
    (traj, drifts)
}

#[test]
fn schemes_parse_and_print() {
    for s in [Scheme::Leapfrog, Scheme::Rk4] {
        assert_eq!(s.to_string().parse::<Scheme>().unwrap(), s);
    }
    assert!("euler".parse::<Scheme>().is_err());
}

#[test]
fn free_particle_moves_linearly() {
    let x = Point::physical(&[0.5, -1.0], &[0.3, 2.0]).unwrap();
    for scheme in [Scheme::Leapfrog, Scheme::Rk4] {
        let traj = integrate(&PoissonStructure::canonical(2), &kinetic(4), &x, 2.0, 0.01, scheme).unwrap();
        assert_eq!(traj.len(), 201);
        for (t, s) in traj.times.iter().zip(&traj.states) {
            assert!(max_diff(s.positions(), &[0.5 + 0.3 * t, -1.0 + 2.0 * t]) < 1e-12);
            assert_eq!(s.momenta(), [0.3, 2.0]);
        }
    }
}

#[test]
fn closed_toda_conserves_its_chain() {
    let (traj, drifts) = closed_run(1e-3, 10.0);
    assert_eq!(traj.len(), 10_001);
    assert!((traj.times[10_000] - 10.0).abs() < 1e-12);
    assert_eq!(drifts.len(), 6);
    assert!(drifts[1].relative < 1e-8, "{:?}", drifts[1]);
    for d in &drifts {
        assert!(d.relative < 1e-6, "{d:?}");
    }
    assert!(traj.monitored.contains_key("H_6"));
    // H_1 = Σp is a momentum map of the translation symmetry
    assert!(drifts[0].max_abs < 1e-12);
}

#[test]
fn leapfrog_energy_error_is_second_order() {
    let (_, coarse) = closed_run(1e-3, 10.0);
    let (_, fine) = closed_run(5e-4, 10.0);
    let ratio = coarse[1].max_abs / fine[1].max_abs;
    assert!((ratio - 4.0).abs() < 0.8, "ratio {ratio}");
}

#[test]
fn open_chain_is_not_conserved_by_the_closed_flow() {
    let m = TodaModel::an1(3).unwrap();
    let mut traj = integrate(&m.pi, &m.hamiltonian, &x0(), 10.0, 1e-3, Scheme::Leapfrog).unwrap();
    let open = ChainData::new(m.pi.clone(), m.n_open.clone(), 6);
    let drifts = conservation_report(&mut traj, &open);
    for d in &drifts[1..] {
        assert!(d.max_abs > 1e-3, "{d:?}");
    }
}

#[test]
fn energy_error_does_not_grow() {
    let m = TodaModel::an1(3).unwrap();
    let traj = integrate(&m.pi, &m.hamiltonian, &x0(), 10.0, 1e-2, Scheme::Leapfrog).unwrap();
    let h: Vec<f64> = traj.states.iter().map(|s| m.hamiltonian.eval(s.coords(), 0).value()).collect();
    let full = drift("H", &h).max_abs;
    let half = drift("H", &h[..=h.len() / 2]).max_abs;
    assert!(full <= 2.0 * half, "{full} vs {half}");
}

#[test]
fn rk4_and_leapfrog_agree_for_small_steps() {
    let m = TodaModel::an1(3).unwrap();
    let a = integrate(&m.pi, &m.hamiltonian, &x0(), 1.0, 1e-4, Scheme::Leapfrog).unwrap();
    let b = integrate(&m.pi, &m.hamiltonian, &x0(), 1.0, 1e-4, Scheme::Rk4).unwrap();
    assert!(max_diff(a.last().coords(), b.last().coords()) < 1e-6);
}

#[test]
fn leapfrog_is_time_reversible() {
    let m = TodaModel::cn1(3).unwrap();
    let start = Point::physical(&[0.2, -0.1, 0.3], &[0.4, 0.0, -0.3]).unwrap();
    let fwd = integrate(&m.pi, &m.hamiltonian, &start, 5.0, 1e-3, Scheme::Leapfrog).unwrap();
    let end = fwd.last();
    let flipped: Vec<f64> = end.momenta().iter().map(|p| -p).collect();
    let back = integrate(
        &m.pi,
        &m.hamiltonian,
        &Point::physical(end.positions(), &flipped).unwrap(),
        5.0,
        1e-3,
        Scheme::Leapfrog,
    )
    .unwrap();
    let r = back.last();
    let p: Vec<f64> = r.momenta().iter().map(|p| -p).collect();
    assert!(max_diff(r.positions(), start.positions()) < 1e-7);
    assert!(max_diff(&p, start.momenta()) < 1e-7);
}

#[test]
fn zero_time_gives_the_initial_state() {
    let m = TodaModel::an1(3).unwrap();
    let traj = integrate(&m.pi, &m.hamiltonian, &x0(), 0.0, 1e-3, Scheme::Leapfrog).unwrap();
    assert_eq!(traj.len(), 1);
    assert_eq!(traj.last(), &x0());
}

#[test]
fn invalid_requests_are_rejected() {
    let m = TodaModel::an1(3).unwrap();
    let h = &m.hamiltonian;
    for (t, dt) in [(1.0, 0.0), (1.0, -1e-3), (-1.0, 1e-3), (f64::NAN, 1e-3), (1.0, f64::INFINITY)] {
        assert!(matches!(integrate(&m.pi, h, &x0(), t, dt, Scheme::Rk4), Err(Error::Invalid(_))));
    }
    let small = Point::physical(&[0.0; 2], &[0.0; 2]).unwrap();
    assert!(matches!(integrate(&m.pi, h, &small, 1.0, 1e-3, Scheme::Rk4), Err(Error::Dimension { .. })));
    // non-canonical structure
    let pi2 = PoissonStructure::new(m.pi_prime.clone());
    assert!(matches!(integrate(&pi2, h, &x0(), 1.0, 1e-3, Scheme::Leapfrog), Err(Error::Invalid(_))));
    assert!(integrate(&pi2, h, &x0(), 0.01, 1e-3, Scheme::Rk4).is_ok());
    // non-separable Hamiltonian
    let mixed: ScalarField = from_formula(6, |x: &[Jet]| &x[0] * &x[3]);
    assert!(mixed_hessian(mixed.as_ref(), x0().coords()) == 1.0);
    assert!(matches!(integrate(&m.pi, &mixed, &x0(), 1.0, 1e-3, Scheme::Leapfrog), Err(Error::Invalid(_))));
    assert_eq!(mixed_hessian(h.as_ref(), x0().coords()), 0.0);
}

#[test]
fn blow_up_reports_the_last_finite_time() {
    // V = −q⁴ escapes to infinity in finite time
    let h: ScalarField = from_formula(2, |x: &[Jet]| (&x[1] * &x[1]).scale(0.5) - x[0].powi(4));
    let start = Point::physical(&[1.0], &[0.0]).unwrap();
    match integrate(&PoissonStructure::canonical(1), &h, &start, 100.0, 1e-2, Scheme::Leapfrog) {
        Err(Error::BlowUp { last_time }) => assert!(last_time > 0.0 && last_time < 5.0, "{last_time}"),
        other => panic!("expected a blow-up, got {:?}", other.map(|t| t.len())),
    }
}

#[test]
fn flaschka_flow_keeps_the_casimir() {
    let n = 4;
    let fd = FlaschkaData::new(n).unwrap();
    let y0 = flaschka_map(&Point::physical(&[0.1, -0.2, 0.3, 0.0], &[0.2, 0.1, -0.4, 0.3]).unwrap()).unwrap();
    let traj = integrate(&fd.p1, &kinetic(2 * n), &y0, 2.0, 1e-3, Scheme::Rk4).unwrap();
    let c: Vec<f64> = traj.states.iter().map(|s| fd.casimir.eval(s.coords(), 0).value()).collect();
    assert!(drift("C", &c).max_abs < 1e-10);
    assert!(matches!(integrate(&fd.p1, &kinetic(2 * n), &y0, 2.0, 1e-3, Scheme::Leapfrog), Err(Error::Invalid(_))));
}

#[test]
fn drift_statistics() {
    let d = drift("H_2", &[2.0, 2.5, 1.0, 2.0]);
    assert_eq!((d.initial, d.max_abs, d.relative), (2.0, 1.0, 0.5));
    let d = drift("H_1", &[0.0, 1e-3]);
    assert_eq!(d.relative, 1e-3);
}
