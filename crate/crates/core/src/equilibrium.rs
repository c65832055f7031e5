//! Equilibrium angles, the synchronization test and sector gains.

use crate::error::{Error, Result};
use crate::network::{BusKind, PowerNetwork};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

const MAX_ITER: usize = 40;
const RESIDUAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumPoint {
    /// One angle per bus; reference buses are pinned to 0.
    pub angles: Vec<f64>,
    pub edge_diffs: Vec<f64>,
    /// Largest `|edge difference|`.
    pub margin: f64,
    /// Angle bound this point was checked against, if any.
    pub gamma: Option<f64>,
}

impl EquilibriumPoint {
    /// Builds a point from per-bus angles.
    pub fn from_angles(net: &PowerNetwork, angles: Vec<f64>) -> Self {
        let edge_diffs: Vec<f64> = net
            .lines
            .iter()
            .map(|l| angles[l.from] - angles[l.to])
            .collect();
        let margin = edge_diffs.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        EquilibriumPoint {
            angles,
            edge_diffs,
            margin,
            gamma: None,
        }
    }

    /// Records `gamma` and reports whether every edge difference is within
    /// it, up to a relative rounding slack of `1e-12`.
    pub fn check_gamma(&mut self, gamma: f64) -> bool {
        self.gamma = Some(gamma);
        self.margin <= gamma * (1.0 + 1e-12)
    }
}

/// Reference bus per component: the infinite bus when present, else the
/// lowest-indexed bus.
pub fn reference_buses(net: &PowerNetwork) -> Vec<usize> {
    let comp = net.components();
    let mut refs: Vec<usize> = Vec::new();
    for (i, &c) in comp.iter().enumerate() {
        if i == c {
            let inf = (0..net.n_buses())
                .find(|&k| comp[k] == c && net.buses[k].kind == BusKind::Infinite);
            refs.push(inf.unwrap_or(i));
        }
    }
    refs
}

fn mismatch(net: &PowerNetwork, theta: &[f64], out: &mut [f64]) {
    for (k, b) in net.buses.iter().enumerate() {
        out[k] = -b.injection;
    }
    for l in &net.lines {
        let f = l.coupling * (theta[l.from] - theta[l.to]).sin();
        out[l.from] += f;
        out[l.to] -= f;
    }
}

/// Damped Newton solve of the power-flow equations from `guess` (flat start
/// when `None`).
pub fn solve_equilibrium(net: &PowerNetwork, guess: Option<&[f64]>) -> Result<EquilibriumPoint> {
    let n = net.n_buses();
    let refs = reference_buses(net);
    let comp = net.components();
    for &r in &refs {
        if net.buses[r].kind == BusKind::Infinite {
            continue;
        }
        let imbalance: f64 = (0..n)
            .filter(|&k| comp[k] == comp[r])
            .map(|k| net.buses[k].injection)
            .sum();
        if imbalance.abs() > 1e-9 {
            return Err(Error::Unbalanced(imbalance));
        }
    }
    let unknown: Vec<usize> = (0..n).filter(|k| !refs.contains(k)).collect();
    let mut pos = vec![usize::MAX; n];
    for (i, &k) in unknown.iter().enumerate() {
        pos[k] = i;
    }
    let mut theta = match guess {
        Some(g) if g.len() == n => g.to_vec(),
        Some(g) => {
            return Err(Error::Dimension(format!(
                "guess has {} angles, network has {n} buses",
                g.len()
            )))
        }
        None => vec![0.0; n],
    };
    // Shift each component so its reference sits at zero.
    for &r in &refs {
        let off = theta[r];
        for k in 0..n {
            if comp[k] == comp[r] {
                theta[k] -= off;
            }
        }
    }
    let mut f = vec![0.0; n];
    let norm = |f: &[f64]| unknown.iter().map(|&k| f[k] * f[k]).sum::<f64>().sqrt();
    mismatch(net, &theta, &mut f);
    let mut res = norm(&f);
    let mut iterations = 0;
    while unknown.iter().map(|&k| f[k].abs()).fold(0.0, f64::max) > RESIDUAL_TOL {
        if iterations == MAX_ITER {
            return Err(Error::NoConvergence {
                iterations,
                residual: res,
            });
        }
        iterations += 1;
        let m = unknown.len();
        let mut jac = DMatrix::zeros(m, m);
        for l in &net.lines {
            let w = l.coupling * (theta[l.from] - theta[l.to]).cos();
            let (i, j) = (pos[l.from], pos[l.to]);
            if i != usize::MAX {
                jac[(i, i)] += w;
            }
            if j != usize::MAX {
                jac[(j, j)] += w;
            }
            if i != usize::MAX && j != usize::MAX {
                jac[(i, j)] -= w;
                jac[(j, i)] -= w;
            }
        }
        let rhs = DVector::from_iterator(m, unknown.iter().map(|&k| -f[k]));
        let step = jac
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Numerical("singular power-flow Jacobian".into()))?;
        let mut alpha = 1.0;
        let mut trial = theta.clone();
        loop {
            for (i, &k) in unknown.iter().enumerate() {
                trial[k] = theta[k] + alpha * step[i];
            }
            mismatch(net, &trial, &mut f);
            let r = norm(&f);
            if r < res || alpha < 1e-9 {
                res = r;
                break;
            }
            alpha *= 0.5;
        }
        theta.clone_from(&trial);
        if alpha < 1e-9 {
            return Err(Error::NoConvergence {
                iterations,
                residual: res,
            });
        }
    }
    let eq = EquilibriumPoint::from_angles(net, theta);
    if eq.margin >= FRAC_PI_2 {
        return Err(Error::EquilibriumOutsidePolytope { margin: eq.margin });
    }
    Ok(eq)
}

/// How edges are weighted in the Laplacian of the synchronization test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LaplacianWeighting {
    /// Entries are the couplings `a_kj`.
    #[default]
    Coupling,
    /// Unit edge weights.
    Combinatorial,
}

/// `max_e |(L^+ p)_k - (L^+ p)_j|` with the coupling-weighted Laplacian.
pub fn sync_condition_margin(net: &PowerNetwork) -> f64 {
    sync_condition_margin_with(net, LaplacianWeighting::Coupling)
}

pub fn sync_condition_margin_with(net: &PowerNetwork, weighting: LaplacianWeighting) -> f64 {
    let n = net.n_buses();
    let comp = net.components();
    let refs = reference_buses(net);
    // Injection vector over all buses; an infinite bus absorbs the imbalance
    // of its component, other components are projected to zero sum.
    let mut p = net.injections();
    for &r in &refs {
        let members: Vec<usize> = (0..n).filter(|&k| comp[k] == comp[r]).collect();
        let sum: f64 = members.iter().map(|&k| p[k]).sum();
        if net.buses[r].kind == BusKind::Infinite {
            p[r] = -(sum - p[r]);
        } else {
            for &k in &members {
                p[k] -= sum / members.len() as f64;
            }
        }
    }
    let unknown: Vec<usize> = (0..n).filter(|k| !refs.contains(k)).collect();
    let mut pos = vec![usize::MAX; n];
    for (i, &k) in unknown.iter().enumerate() {
        pos[k] = i;
    }
    let m = unknown.len();
    let mut lap = DMatrix::zeros(m, m);
    for l in &net.lines {
        let w = match weighting {
            LaplacianWeighting::Coupling => l.coupling,
            LaplacianWeighting::Combinatorial => 1.0,
        };
        let (i, j) = (pos[l.from], pos[l.to]);
        if i != usize::MAX {
            lap[(i, i)] += w;
        }
        if j != usize::MAX {
            lap[(j, j)] += w;
        }
        if i != usize::MAX && j != usize::MAX {
            lap[(i, j)] -= w;
            lap[(j, i)] -= w;
        }
    }
    let rhs = DVector::from_iterator(m, unknown.iter().map(|&k| p[k]));
    let sol = match lap.cholesky() {
        Some(ch) => ch.solve(&rhs),
        None => return f64::NAN,
    };
    let mut theta = vec![0.0; n];
    for (i, &k) in unknown.iter().enumerate() {
        theta[k] = sol[i];
    }
    net.lines
        .iter()
        .map(|l| (theta[l.from] - theta[l.to]).abs())
        .fold(0.0, f64::max)
}

/// Sector gain `(1 - sin t)/(pi/2 - t)` of one edge with `|t| < pi/2`.
pub fn sector_gain(t: f64) -> Result<f64> {
    let t = t.abs();
    if !(t < FRAC_PI_2) {
        return Err(Error::AngleOutOfRange(t));
    }
    Ok((1.0 - t.sin()) / (FRAC_PI_2 - t))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorGains {
    pub per_edge: Vec<f64>,
    pub global: f64,
}

/// Gains for an equilibrium checked against `gamma`.
pub fn sector_gains(eq: &EquilibriumPoint, gamma: f64) -> Result<SectorGains> {
    Ok(SectorGains {
        per_edge: eq
            .edge_diffs
            .iter()
            .map(|&d| sector_gain(d))
            .collect::<Result<_>>()?,
        global: sector_gain(gamma)?,
    })
}
