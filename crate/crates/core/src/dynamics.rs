//! Integration of Hamiltonian flows `ẋ = π^♯dH` and conservation monitoring.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::field::{check_dim, Field, Point, ScalarField};
use crate::poisson::PoissonStructure;
use crate::pqn::ChainData;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Störmer–Verlet splitting; canonical structure and separable `H` only.
    Leapfrog,
    /// Classical fourth-order Runge–Kutta on `π^♯dH`.
    Rk4,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Leapfrog => "leapfrog",
            Scheme::Rk4 => "rk4",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "leapfrog" => Ok(Scheme::Leapfrog),
            "rk4" => Ok(Scheme::Rk4),
            other => Err(Error::Invalid(format!("unknown scheme '{other}' (expected leapfrog or rk4)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Point>,
    /// Named functions evaluated along the trajectory.
    pub monitored: BTreeMap<String, Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &Point {
        self.states.last().expect("trajectories hold at least the initial state")
    }

    /// Evaluate `f` at every state and store it under `name`.
    pub fn monitor(&mut self, name: &str, f: &dyn Field<crate::Jet>) {
        let v = self.states.iter().map(|s| f.eval(s.coords(), 0).value()).collect();
        self.monitored.insert(name.into(), v);
    }
}

/// Largest `|∂²H/∂q_i∂p_j|` at `x`; zero for `H = T(p) + V(q)`.
pub fn mixed_hessian(h: &dyn Field<crate::Jet>, x: &[f64]) -> f64 {
    let n = x.len() / 2;
    let v = h.eval(x, 2);
    let mut r: f64 = 0.0;
    for i in 0..n {
        for j in n..2 * n {
            r = r.max(libm::fabs(v.d2(i, j)));
        }
    }
    r
}

const SEPARABILITY_TOL: f64 = 1e-12;

fn gradient(h: &dyn Field<crate::Jet>, x: &[f64]) -> Vec<f64> {
    let v = h.eval(x, 1);
    (0..x.len()).map(|i| v.d1(i)).collect()
}

fn vector_field(pi: &PoissonStructure, h: &dyn Field<crate::Jet>, x: &[f64]) -> Vec<f64> {
    let v = h.eval(x, 1);
    let dh: Vec<crate::Jet> = (0..x.len()).map(|i| v.partial(i)).collect();
    pi.stored(x, 0).mul_vec(&dh).iter().map(crate::Jet::value).collect()
}

fn leapfrog_step(h: &dyn Field<crate::Jet>, x: &mut [f64], dt: f64) {
    let n = x.len() / 2;
    let g = gradient(h, x);
    for i in 0..n {
        x[n + i] -= 0.5 * dt * g[i];
    }
    let g = gradient(h, x);
    for i in 0..n {
        x[i] += dt * g[n + i];
    }
    let g = gradient(h, x);
    for i in 0..n {
        x[n + i] -= 0.5 * dt * g[i];
    }
}

fn rk4_step(pi: &PoissonStructure, h: &dyn Field<crate::Jet>, x: &mut [f64], dt: f64) {
    let f = |y: &[f64]| vector_field(pi, h, y);
    let shifted = |y: &[f64], k: &[f64], c: f64| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + c * b).collect() };
    let k1 = f(x);
    let k2 = f(&shifted(x, &k1, 0.5 * dt));
    let k3 = f(&shifted(x, &k2, 0.5 * dt));
    let k4 = f(&shifted(x, &k3, dt));
    for i in 0..x.len() {
        x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

/// Integrate `ẋ = π^♯dH` from `x0` up to time `t_end`, sampling every step.
///
/// The number of steps is `round(t_end / dt)`; `t_end = 0` yields the
/// initial state only.
pub fn integrate(
    pi: &PoissonStructure,
    h: &ScalarField,
    x0: &Point,
    t_end: f64,
    dt: f64,
    scheme: Scheme,
) -> Result<Trajectory> {
    check_dim(pi.dim(), x0.dim())?;
    check_dim(h.dim(), x0.dim())?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Invalid(format!("time step must be positive, got {dt}")));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::Invalid(format!("final time must be non-negative, got {t_end}")));
    }
    if scheme == Scheme::Leapfrog {
        if !pi.is_canonical() {
            return Err(Error::Invalid("leapfrog requires the canonical Poisson structure; use rk4".into()));
        }
        let r = mixed_hessian(h.as_ref(), x0.coords());
        if r > SEPARABILITY_TOL {
            return Err(Error::Invalid(format!("leapfrog requires a separable Hamiltonian (mixed Hessian {r:e})")));
        }
    }
    let steps = libm::round(t_end / dt) as usize;
    let chart = x0.chart();
    let mut x = x0.coords().to_vec();
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(x0.clone());
    for s in 1..=steps {
        match scheme {
            Scheme::Leapfrog => leapfrog_step(h.as_ref(), &mut x, dt),
            Scheme::Rk4 => rk4_step(pi, h.as_ref(), &mut x, dt),
        }
        let next = match Point::new(x.clone(), chart) {
            Ok(p) => p,
            Err(_) => return Err(Error::BlowUp { last_time: (s - 1) as f64 * dt }),
        };
        times.push(s as f64 * dt);
        states.push(next);
    }
    Ok(Trajectory { times, states, monitored: BTreeMap::new() })
}

/// Drift of one monitored function along a trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct Drift {
    pub name: String,
    pub initial: f64,
    /// `max_t |H(x(t)) − H(x_0)|`.
    pub max_abs: f64,
    /// `max_abs / max(|H(x_0)|, 1)`.
    pub relative: f64,
}

pub fn drift(name: &str, values: &[f64]) -> Drift {
    let initial = values.first().copied().unwrap_or(0.0);
    let max_abs = values.iter().fold(0.0, |m: f64, v| m.max(libm::fabs(v - initial)));
    Drift { name: name.into(), initial, max_abs, relative: max_abs / libm::fabs(initial).max(1.0) }
}

/// `H_k` for `k = 1..=kmax` of a chain at every state, stored as `H_k` in the
/// trajectory's monitor table, and their drifts.
pub fn conservation_report(traj: &mut Trajectory, chain: &ChainData) -> Vec<Drift> {
    let kmax = chain.kmax;
    let mut columns = alloc::vec![Vec::with_capacity(traj.len()); kmax];
    for s in &traj.states {
        let powers = chain.n.eval(s.coords(), 0).powers(kmax);
        for k in 1..=kmax {
            columns[k - 1].push(powers[k].trace().div_f64((2 * k) as f64).value());
        }
    }
    let mut out = Vec::with_capacity(kmax);
    for (k, col) in columns.into_iter().enumerate() {
        let name = format!("H_{}", k + 1);
        out.push(drift(&name, &col));
        traj.monitored.insert(name, col);
    }
    out
}
