//! Fixed-step simulation of the fault-on and post-fault dynamics, and the
//! checks that compare trajectories against certificates.
//!
//! States are stored relative to an equilibrium (`Trajectory::origin`), with
//! the same layout as the Lur'e system.

use crate::certify::{polytope_extent, Certificate};
use crate::equilibrium::EquilibriumPoint;
use crate::error::{Error, Result};
use crate::lure::LureSystem;
use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

pub const DEFAULT_STEP: f64 = 1e-3;
/// Integrator slack used by the trajectory checks.
pub const ORACLE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorSettings {
    pub step: f64,
    /// Keep every `record_every`-th step (the last step is always kept).
    pub record_every: usize,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        IntegratorSettings {
            step: DEFAULT_STEP,
            record_every: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// States relative to `origin`.
    pub states: Vec<DVector<f64>>,
    /// Absolute state of the reference equilibrium.
    pub origin: DVector<f64>,
    /// First index of the post-fault phase, when there was a fault phase.
    pub switch_index: Option<usize>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn absolute(&self, i: usize) -> DVector<f64> {
        &self.states[i] + &self.origin
    }

    pub fn last(&self) -> &DVector<f64> {
        self.states.last().expect("trajectory is empty")
    }

    /// CSV with header `t,<labels>` and absolute states.
    pub fn to_csv(&self, labels: &[String]) -> String {
        let mut out = String::from("t");
        for l in labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for i in 0..self.len() {
            let _ = write!(out, "{:.6}", self.times[i]);
            for v in self.absolute(i).iter() {
                let _ = write!(out, ",{v:.12e}");
            }
            out.push('\n');
        }
        out
    }
}

/// `Ax - B F(Cx)` for `x` relative to `eq`.
pub fn rhs_post_fault(sys: &LureSystem, eq: &EquilibriumPoint, x: &DVector<f64>) -> DVector<f64> {
    &sys.a * x - &sys.b * sys.nonlinearity(x, &eq.edge_diffs)
}

/// Post-fault right-hand side plus `B D_e sin(delta_e)`: the coupling of
/// line `e` is removed while the injections stay.
pub fn rhs_fault_on(
    sys: &LureSystem,
    eq: &EquilibriumPoint,
    line: usize,
    x: &DVector<f64>,
) -> Result<DVector<f64>> {
    if line >= sys.n_edges() {
        return Err(Error::InvalidArgument(format!("edge {line} out of range")));
    }
    let mut f = sys.nonlinearity(x, &eq.edge_diffs);
    let y = sys.c.row(line).dot(&x.transpose()) + eq.edge_diffs[line];
    f[line] -= y.sin();
    Ok(&sys.a * x - &sys.b * f)
}

fn rk4_step<F: Fn(&DVector<f64>) -> DVector<f64>>(rhs: &F, x: &DVector<f64>, h: f64) -> DVector<f64> {
    let k1 = rhs(x);
    let k2 = rhs(&(x + &k1 * (h / 2.0)));
    let k3 = rhs(&(x + &k2 * (h / 2.0)));
    let k4 = rhs(&(x + &k3 * h));
    x + (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0)
}

fn check_settings(horizon: f64, cfg: &IntegratorSettings) -> Result<usize> {
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!("horizon {horizon} must be non-negative")));
    }
    if !(cfg.step > 0.0) || cfg.record_every == 0 {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    Ok((horizon / cfg.step + 1e-9).floor() as usize)
}

/// Classical RK4 from `t0` over `steps` steps, appending to `traj`.
fn run<F: Fn(&DVector<f64>) -> DVector<f64>>(
    rhs: &F,
    traj: &mut Trajectory,
    mut x: DVector<f64>,
    t0: f64,
    steps: usize,
    cfg: &IntegratorSettings,
) -> Result<DVector<f64>> {
    let mut t_last = t0;
    for i in 1..=steps {
        x = rk4_step(rhs, &x, cfg.step);
        let t = t0 + i as f64 * cfg.step;
        if !x.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite { last_finite_time: t_last });
        }
        t_last = t;
        if i % cfg.record_every == 0 || i == steps {
            traj.times.push(t);
            traj.states.push(x.clone());
        }
    }
    Ok(x)
}

/// Integrates `rhs` from `x0` at `t = 0` for `horizon` seconds. The horizon
/// is rounded down to the step grid.
pub fn integrate<F: Fn(&DVector<f64>) -> DVector<f64>>(
    rhs: F,
    x0: &DVector<f64>,
    horizon: f64,
    cfg: &IntegratorSettings,
) -> Result<Trajectory> {
    let steps = check_settings(horizon, cfg)?;
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![x0.clone()],
        origin: DVector::zeros(x0.len()),
        switch_index: None,
    };
    run(&rhs, &mut traj, x0.clone(), 0.0, steps, cfg)?;
    Ok(traj)
}

/// `|x_h - x_{h/2}| / |x_{h/2} - x_{h/4}|` for the end states; about 16
/// for a fourth-order method on a smooth problem.
pub fn step_halving_ratio<F: Fn(&DVector<f64>) -> DVector<f64>>(
    rhs: F,
    x0: &DVector<f64>,
    horizon: f64,
    step: f64,
) -> Result<f64> {
    let end = |h: f64| -> Result<DVector<f64>> {
        let cfg = IntegratorSettings {
            step: h,
            record_every: usize::MAX,
        };
        Ok(integrate(&rhs, x0, horizon, &cfg)?.last().clone())
    };
    let (a, b, c) = (end(step)?, end(step / 2.0)?, end(step / 4.0)?);
    Ok((&a - &b).amax() / (&b - &c).amax())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultScenario {
    /// Edge index of the tripped line.
    pub line: usize,
    pub clearing_time: f64,
    pub pre_eq: EquilibriumPoint,
    pub post_eq: EquilibriumPoint,
}

impl FaultScenario {
    pub fn new(
        sys: &LureSystem,
        line: usize,
        clearing_time: f64,
        pre_eq: EquilibriumPoint,
        post_eq: EquilibriumPoint,
    ) -> Result<Self> {
        if line >= sys.n_edges() {
            return Err(Error::InvalidArgument(format!("edge {line} out of range")));
        }
        if !(clearing_time >= 0.0) {
            return Err(Error::InvalidArgument("clearing time must be non-negative".into()));
        }
        Ok(FaultScenario {
            line,
            clearing_time,
            pre_eq,
            post_eq,
        })
    }
}

/// Equilibrium with the given per-bus angles, edge differences taken from
/// the system's incidence.
pub fn equilibrium_at(sys: &LureSystem, angles: Vec<f64>) -> EquilibriumPoint {
    let d = &sys.incidence * DVector::from_column_slice(&angles);
    let edge_diffs: Vec<f64> = d.iter().copied().collect();
    let margin = edge_diffs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    EquilibriumPoint {
        angles,
        edge_diffs,
        margin,
        gamma: None,
    }
}

/// Fault-on dynamics from `pre_eq` until the clearing time (rounded down to
/// the step grid), then post-fault dynamics until `horizon`. States are
/// relative to `post_eq`. Returns the trajectory and the clearing time used.
pub fn simulate_fault(
    sys: &LureSystem,
    scenario: &FaultScenario,
    horizon: f64,
    cfg: &IntegratorSettings,
) -> Result<(Trajectory, f64)> {
    let total = check_settings(horizon, cfg)?;
    let fault_steps = check_settings(scenario.clearing_time, cfg)?.min(total);
    let eq = &scenario.post_eq;
    let origin = sys.layout.pad_angles(&eq.angles);
    let x0 = sys.layout.pad_angles(&scenario.pre_eq.angles) - &origin;
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![x0.clone()],
        origin,
        switch_index: None,
    };
    rhs_fault_on(sys, eq, scenario.line, &x0)?;
    let fault = |x: &DVector<f64>| rhs_fault_on(sys, eq, scenario.line, x).expect("edge checked");
    let fault_cfg = IntegratorSettings {
        record_every: 1,
        ..*cfg
    };
    let xf = run(&fault, &mut traj, x0, 0.0, fault_steps, &fault_cfg)?;
    traj.switch_index = Some(traj.len() - 1);
    let t_switch = fault_steps as f64 * cfg.step;
    run(
        &|x: &DVector<f64>| rhs_post_fault(sys, eq, x),
        &mut traj,
        xf,
        t_switch,
        total - fault_steps,
        cfg,
    )?;
    Ok((traj, t_switch))
}

/// Post-fault dynamics from the absolute state `x0`, relative to `eq`.
pub fn simulate_post_fault(
    sys: &LureSystem,
    eq: &EquilibriumPoint,
    x0: &[f64],
    horizon: f64,
    cfg: &IntegratorSettings,
) -> Result<Trajectory> {
    if x0.len() != sys.dim() {
        return Err(Error::Dimension(format!("state has {} entries, expected {}", x0.len(), sys.dim())));
    }
    let origin = sys.layout.pad_angles(&eq.angles);
    let rel = DVector::from_column_slice(x0) - &origin;
    let mut traj = integrate(|x| rhs_post_fault(sys, eq, x), &rel, horizon, cfg)?;
    traj.origin = origin;
    Ok(traj)
}

/// Max-norm distance of the final state from `eq` (angles and zero
/// velocities). Without an infinite bus a uniform angle shift is removed
/// first, since it is a neutral direction of the dynamics.
pub fn terminal_error(traj: &Trajectory, sys: &LureSystem, eq: &EquilibriumPoint) -> f64 {
    let x = traj.absolute(traj.len() - 1) - sys.layout.pad_angles(&eq.angles);
    let l = sys.layout;
    let angle_rows: Vec<usize> = (0..l.n_gen + l.n_load).filter_map(|k| l.angle_index(k)).collect();
    let shift = if sys.has_shift_mode() && !angle_rows.is_empty() {
        let lo = angle_rows.iter().map(|&i| x[i]).fold(f64::INFINITY, f64::min);
        let hi = angle_rows.iter().map(|&i| x[i]).fold(f64::NEG_INFINITY, f64::max);
        (lo + hi) / 2.0
    } else {
        0.0
    };
    let mut err = 0.0f64;
    for &i in &angle_rows {
        err = err.max((x[i] - shift).abs());
    }
    for k in 0..l.n_gen {
        err = err.max(x[l.velocity_index(k).unwrap()].abs());
    }
    err
}

/// True iff the final state is within `tol` of `eq` and every velocity stays
/// below `tol` over the final 10% of the horizon.
pub fn verify_convergence(traj: &Trajectory, sys: &LureSystem, eq: &EquilibriumPoint, tol: f64) -> bool {
    if traj.is_empty() {
        return false;
    }
    if !(terminal_error(traj, sys, eq) <= tol) {
        return false;
    }
    let t_end = *traj.times.last().unwrap();
    let l = sys.layout;
    traj.times
        .iter()
        .zip(&traj.states)
        .filter(|(t, _)| **t >= 0.9 * t_end)
        .all(|(_, x)| (0..l.n_gen).all(|k| x[l.velocity_index(k).unwrap()].abs() < tol))
}

/// Outcome of replaying a certificate in simulation. Each flag is a claim
/// of the certificate; a failed flag on a certified scenario is a bug.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub converged: bool,
    pub terminal_error: f64,
    /// Post-fault states stayed in `{x in P : V(x) < V_min}`.
    pub stayed_in_region: bool,
    pub max_post_fault_v: f64,
    /// Largest increase of `V` between samples inside `P`.
    pub max_v_increase: f64,
    pub monotone: bool,
    /// Largest `V(x_F(t)) - V(x_F(0)) - t/mu` during the fault, if any.
    pub max_growth_excess: Option<f64>,
    pub growth_bound_holds: bool,
    pub clearing_time: Option<f64>,
    /// Requested minus used clearing time.
    pub clearing_discrepancy: f64,
    pub v_min: f64,
}

impl OracleReport {
    pub fn violations(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.converged {
            out.push("no-convergence");
        }
        if !self.stayed_in_region {
            out.push("left-region");
        }
        if !self.monotone {
            out.push("lyapunov-increase");
        }
        if !self.growth_bound_holds {
            out.push("fault-on-growth");
        }
        out
    }

    pub fn confirmed(&self) -> bool {
        self.violations().is_empty()
    }
}

fn quad(p: &nalgebra::DMatrix<f64>, x: &DVector<f64>) -> f64 {
    x.dot(&(p * x))
}

fn inside(sys: &LureSystem, traj: &Trajectory, i: usize) -> bool {
    polytope_extent(sys, traj.absolute(i).as_slice()).is_ok_and(|e| e <= FRAC_PI_2)
}

/// Region and monotonicity checks over `traj` from index `from`.
fn post_fault_checks(
    sys: &LureSystem,
    cert: &Certificate,
    traj: &Trajectory,
    from: usize,
    v_min: f64,
) -> (bool, f64, f64) {
    let mut stayed = true;
    let mut max_v = f64::NEG_INFINITY;
    let mut max_inc = f64::NEG_INFINITY;
    let mut prev: Option<f64> = None;
    for i in from..traj.len() {
        let v = quad(&cert.p, &traj.states[i]);
        let in_p = inside(sys, traj, i);
        max_v = max_v.max(v);
        if !in_p || v >= v_min + ORACLE_TOL {
            stayed = false;
        }
        if in_p {
            if let Some(pv) = prev {
                max_inc = max_inc.max(v - pv);
            }
            prev = Some(v);
        } else {
            prev = None;
        }
    }
    (stayed, max_v, max_inc)
}

/// Replays a fault scenario: fault-on from `pre_eq` for the clearing time,
/// then post-fault towards `post_eq`, checking convergence within
/// `conv_tol`, region invariance, monotonicity and the fault-on growth
/// bound. `V_min` is recomputed at `post_eq`.
pub fn verify_certificate_by_simulation(
    sys: &LureSystem,
    cert: &Certificate,
    scenario: &FaultScenario,
    horizon: f64,
    conv_tol: f64,
    cfg: &IntegratorSettings,
) -> Result<OracleReport> {
    let mu = cert
        .mu
        .ok_or_else(|| Error::InvalidArgument("fault replay needs a resiliency certificate".into()))?;
    let v_min = crate::certify::compute_vmin(&cert.p, &scenario.post_eq.edge_diffs, sys)?;
    let (traj, used) = simulate_fault(sys, scenario, horizon, cfg)?;
    let switch = traj.switch_index.unwrap_or(0);
    let v0 = quad(&cert.p, &traj.states[0]);
    let mut excess = f64::NEG_INFINITY;
    for i in 0..=switch {
        if inside(sys, &traj, i) {
            excess = excess.max(quad(&cert.p, &traj.states[i]) - v0 - traj.times[i] / mu);
        }
    }
    let (stayed, max_v, max_inc) = post_fault_checks(sys, cert, &traj, switch, v_min);
    let err = terminal_error(&traj, sys, &scenario.post_eq);
    Ok(OracleReport {
        converged: verify_convergence(&traj, sys, &scenario.post_eq, conv_tol),
        terminal_error: err,
        stayed_in_region: stayed,
        max_post_fault_v: max_v,
        max_v_increase: max_inc,
        monotone: max_inc <= ORACLE_TOL,
        max_growth_excess: excess.is_finite().then_some(excess),
        growth_bound_holds: !(excess > ORACLE_TOL),
        clearing_time: Some(used),
        clearing_discrepancy: scenario.clearing_time - used,
        v_min,
    })
}

/// Replays a stability claim: post-fault dynamics from the absolute state
/// `x0` towards `eq`, without a fault phase.
pub fn verify_stability_by_simulation(
    sys: &LureSystem,
    cert: &Certificate,
    x0: &[f64],
    eq: &EquilibriumPoint,
    horizon: f64,
    conv_tol: f64,
    cfg: &IntegratorSettings,
) -> Result<OracleReport> {
    let v_min = crate::certify::compute_vmin(&cert.p, &eq.edge_diffs, sys)?;
    let traj = simulate_post_fault(sys, eq, x0, horizon, cfg)?;
    let (stayed, max_v, max_inc) = post_fault_checks(sys, cert, &traj, 0, v_min);
    Ok(OracleReport {
        converged: verify_convergence(&traj, sys, eq, conv_tol),
        terminal_error: terminal_error(&traj, sys, eq),
        stayed_in_region: stayed,
        max_post_fault_v: max_v,
        max_v_increase: max_inc,
        monotone: max_inc <= ORACLE_TOL,
        max_growth_excess: None,
        growth_bound_holds: true,
        clearing_time: None,
        clearing_discrepancy: 0.0,
        v_min,
    })
}
