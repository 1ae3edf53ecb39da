//! Physical and reduced Toda flows with conservation monitoring and CSV export.

use std::io::Write;

use anyhow::Result;
use pqn_core::dynamics::{conservation_report, drift, integrate, Drift, Scheme, Trajectory};
use pqn_core::flaschka::{flaschka_map, reduced_hamiltonian, FlaschkaData};
use pqn_core::pqn::ChainData;
use pqn_core::toda::TodaModel;
use pqn_core::Point;

use crate::report::Check;

pub struct Simulation {
    pub trajectory: Trajectory,
    /// Names of the coordinate columns, in order.
    pub coordinates: Vec<String>,
    /// Drifts of the monitored functions, in column order.
    pub drifts: Vec<Drift>,
}

impl Simulation {
    pub fn header(&self) -> Vec<String> {
        let mut h = vec!["t".to_string()];
        h.extend(self.coordinates.iter().cloned());
        h.extend(self.drifts.iter().map(|d| d.name.clone()));
        h
    }

    /// RFC-4180 CSV with shortest round-trip float formatting.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header())?;
        let t = &self.trajectory;
        let columns: Vec<&Vec<f64>> = self.drifts.iter().map(|d| &t.monitored[&d.name]).collect();
        for (i, (time, state)) in t.times.iter().zip(&t.states).enumerate() {
            let mut row = vec![*time];
            row.extend_from_slice(state.coords());
            row.extend(columns.iter().map(|c| c[i]));
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary(&self) -> String {
        let mut s = format!("{:<5} {:>14} {:>12} {:>12}\n", "", "initial", "max |ΔH|", "relative");
        for d in &self.drifts {
            s += &format!("{:<5} {:>14.6e} {:>12.3e} {:>12.3e}\n", d.name, d.initial, d.max_abs, d.relative);
        }
        s
    }
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}_{i}")).collect()
}

/// The closed flow `ẋ = π♯dH` of a model, monitoring `H_k^+` for `k ≤ 2n`.
pub fn physical(m: &TodaModel, x0: &Point, t_end: f64, dt: f64, scheme: Scheme) -> pqn_core::Result<Simulation> {
    m.check_domain(x0)?;
    let mut trajectory = integrate(&m.pi, &m.hamiltonian, x0, t_end, dt, scheme)?;
    let drifts = conservation_report(&mut trajectory, &m.chain(1.0, 2 * m.n));
    let mut coordinates = names("q", m.n);
    coordinates.extend(names("p", m.n));
    Ok(Simulation { trajectory, coordinates, drifts })
}

/// The reduced flow `ẏ = P_1♯dH̃_1` started at `F(x0)`, monitoring `H̃_k` for
/// `k ≤ 2n` and the Casimir `C`.
pub fn reduced(n: usize, x0: &Point, t_end: f64, dt: f64, scheme: Scheme) -> pqn_core::Result<Simulation> {
    TodaModel::an1(n)?.check_domain(x0)?;
    let fd = FlaschkaData::new(n)?;
    let y0 = flaschka_map(x0)?;
    let mut trajectory = integrate(&fd.p1, &reduced_hamiltonian(n, 1.0, 1), &y0, t_end, dt, scheme)?;
    let mut monitored = names("H", 2 * n);
    for (k, name) in monitored.iter().enumerate() {
        trajectory.monitor(name, reduced_hamiltonian(n, 1.0, k + 1).as_ref());
    }
    trajectory.monitor("C", fd.casimir.as_ref());
    monitored.push("C".into());
    let drifts = monitored.iter().map(|name| drift(name, &trajectory.monitored[name])).collect();
    let mut coordinates = names("a", n);
    coordinates.extend(names("b", n));
    Ok(Simulation { trajectory, coordinates, drifts })
}

/// Default initial momenta `(0.1, −0.2, 0.1, 0, …)` truncated to `n`.
pub fn default_momenta(n: usize) -> Vec<f64> {
    (0..n).map(|i| [0.1, -0.2, 0.1].get(i).copied().unwrap_or(0.0)).collect()
}

pub mod tol {
    /// Relative drift of every `H_k^+` under the closed flow.
    pub const DRIFT: f64 = 1e-6;
    /// Allowed deviation of `drift(dt) / drift(dt/2)` from 4, relative.
    pub const ORDER: f64 = 0.2;
    /// Open-chain `H_k` must drift by more than this under the closed flow.
    pub const OPEN_CHAIN: f64 = 1e-3;
}

pub struct DynamicsOutcome {
    pub checks: Vec<Check>,
    /// Checks expected to fail.
    pub controls: Vec<Check>,
}

/// Closed Toda with three particles, leapfrog, from `q = 0`, `p = (0.1, −0.2, 0.1)`.
pub fn dynamics_suite(dt: f64, t_end: f64) -> Result<DynamicsOutcome> {
    let n = 3;
    let m = TodaModel::an1(n)?;
    let x0 = Point::physical(&vec![0.0; n], &default_momenta(n))?;
    let coarse = physical(&m, &x0, t_end, dt, Scheme::Leapfrog)?;
    let fine = physical(&m, &x0, t_end, dt / 2.0, Scheme::Leapfrog)?;
    let worst = coarse.drifts.iter().map(|d| d.relative).fold(0.0, crate::oracle::fold_max);
    // energy drift ratio under dt → dt/2
    let ratio = coarse.drifts[1].max_abs / fine.drifts[1].max_abs;
    let checks = vec![
        Check::new(
            format!("closed flow: relative drift of H_1..H_{}", 2 * n),
            "max_t |H_k(x(t)) − H_k(x_0)| / max(|H_k(x_0)|, 1)",
            worst,
            tol::DRIFT,
        ),
        Check::new(
            format!("closed flow: order 2, drift ratio {ratio:.4}"),
            "|drift(dt) / drift(dt/2) / 4 − 1|",
            (ratio / 4.0 - 1.0).abs(),
            tol::ORDER,
        ),
    ];
    let open = ChainData::new(m.pi.clone(), m.n_open.clone(), 2 * n);
    let mut traj = coarse.trajectory.clone();
    let open_drift = conservation_report(&mut traj, &open);
    // H_1 = Σp is also conserved by the closed flow, so the control starts at k = 2
    let least = open_drift[1..].iter().map(|d| d.relative).fold(f64::INFINITY, f64::min);
    let controls = vec![Check::new(
        format!("open-chain H_2..H_{} conserved by the closed flow", 2 * n),
        "min_k relative drift ≤ 1e-3",
        least,
        tol::OPEN_CHAIN,
    )];
    Ok(DynamicsOutcome { checks, controls })
}
