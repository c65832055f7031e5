//! Heuristic searches over `mu` and over `P`.

use super::{
    assemble_resiliency_lmi, assemble_stability_lmi, solve_lmi, solve_with, Backend, FaultTarget,
    FeasibilityStatus, Objective, SolverSettings, Validation,
};
use crate::certify::{gamma_vertices, robust_evaluation, RobustEvaluation, DEFAULT_VERTEX_CAP, RELATIVE_SLACK};
use crate::certify::compute_vmin;
use crate::equilibrium::EquilibriumPoint;
use crate::lure::LureSystem;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

#[derive(Debug, Clone)]
pub struct MuSearch {
    pub p: DMatrix<f64>,
    pub mu: f64,
    pub v_min: f64,
    pub mu_vmin: f64,
    pub validation: Validation,
    pub backend: Backend,
    /// Every evaluated `(mu, mu * V_min)`; infeasible points score `-inf`.
    pub evaluations: Vec<(f64, f64)>,
}

struct Point {
    mu: f64,
    score: f64,
    found: Option<(DMatrix<f64>, f64, Validation, Backend)>,
}

fn evaluate(
    sys: &LureSystem,
    g: f64,
    target: FaultTarget,
    eq: &EquilibriumPoint,
    settings: &SolverSettings,
    mu: f64,
) -> Point {
    let miss = Point {
        mu,
        score: f64::NEG_INFINITY,
        found: None,
    };
    let Ok(spec) = assemble_resiliency_lmi(sys, g, mu, target) else {
        return miss;
    };
    let r = solve_lmi(&spec, settings);
    let (FeasibilityStatus::Feasible, Some(p)) = (r.status, r.p) else {
        return miss;
    };
    let Ok(v) = compute_vmin(&p, &eq.edge_diffs, sys) else {
        return miss;
    };
    Point {
        mu,
        score: mu * v,
        found: Some((
            p,
            v,
            Validation {
                residual: r.residual,
                min_eig_p: r.min_eig_p,
            },
            r.backend,
        )),
    }
}

pub const MU_GRID: usize = 24;
const GOLDEN_STEPS: usize = 30;

/// Maximizes `mu * V_min(P(mu))`: log grid on `[1e-3, 1e3]`, then
/// golden-section refinement around the best grid point.
pub fn search_mu(
    sys: &LureSystem,
    g: f64,
    target: FaultTarget,
    eq: &EquilibriumPoint,
    settings: &SolverSettings,
) -> Option<MuSearch> {
    let grid: Vec<f64> = (0..MU_GRID)
        .map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / (MU_GRID - 1) as f64))
        .collect();
    let mut points: Vec<Point> = grid
        .par_iter()
        .map(|&mu| evaluate(sys, g, target, eq, settings, mu))
        .collect();
    let j = (0..points.len())
        .filter(|&i| points[i].found.is_some())
        .max_by(|&a, &b| points[a].score.total_cmp(&points[b].score))?;
    let lo = grid[j.saturating_sub(1)].ln();
    let hi = grid[(j + 1).min(grid.len() - 1)].ln();
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = evaluate(sys, g, target, eq, settings, c.exp());
    let mut fd = evaluate(sys, g, target, eq, settings, d.exp());
    for _ in 0..GOLDEN_STEPS {
        if fc.score >= fd.score {
            b = d;
            d = c;
            points.push(std::mem::replace(&mut fd, fc));
            c = b - phi * (b - a);
            fc = evaluate(sys, g, target, eq, settings, c.exp());
        } else {
            a = c;
            c = d;
            points.push(std::mem::replace(&mut fc, fd));
            d = a + phi * (b - a);
            fd = evaluate(sys, g, target, eq, settings, d.exp());
        }
    }
    points.push(fc);
    points.push(fd);
    let evaluations = points.iter().map(|p| (p.mu, p.score)).collect();
    let best = points
        .into_iter()
        .filter(|p| p.found.is_some())
        .max_by(|x, y| x.score.total_cmp(&y.score))?;
    let (p, v_min, validation, backend) = best.found?;
    Some(MuSearch {
        p,
        mu: best.mu,
        v_min,
        mu_vmin: best.score,
        validation,
        backend,
        evaluations,
    })
}

#[derive(Debug, Clone)]
pub struct PSearch {
    pub p: DMatrix<f64>,
    pub evaluation: RobustEvaluation,
    pub validation: Validation,
    pub backend: Backend,
    /// Number of LMI solves used.
    pub solves: usize,
    /// The robust margin clears the relative slack.
    pub certified: bool,
}

/// Finds a stability-LMI solution certifying `delta0` for every equilibrium
/// with edge differences within `gamma`. Tries the max-margin solution, then
/// the one minimizing `delta0' P delta0`, then cutting planes on the robust
/// margin. Without a certifying `P` the best one tried is returned with
/// `certified == false`; `None` means the LMI itself has no solution.
pub fn search_p_for_state(
    sys: &LureSystem,
    g: f64,
    delta0: &[f64],
    gamma: f64,
    settings: &SolverSettings,
    max_iter: usize,
) -> Option<PSearch> {
    let spec = assemble_stability_lmi(sys, g).ok()?;
    let verts = gamma_vertices(sys, gamma, DEFAULT_VERTEX_CAP).ok()?;
    let d0 = DVector::from_column_slice(delta0);
    let mut solves = 0;
    let mut best: Option<PSearch> = None;

    let r = solve_lmi(&spec, settings);
    solves += 1;
    let mut next = r.p;
    let mut backend = r.backend;
    let mut cuts: Vec<DMatrix<f64>> = Vec::new();
    for round in 0..max_iter + 2 {
        if let Some(p) = next.take() {
            let evaluation = robust_evaluation(&p, sys, delta0, &verts, true).ok()?;
            let cand = PSearch {
                validation: spec.validate(&p),
                backend,
                p,
                certified: evaluation.margin > RELATIVE_SLACK * evaluation.v_min.abs().max(1.0),
                evaluation,
                solves,
            };
            if cand.certified {
                return Some(cand);
            }
            let ev = &cand.evaluation;
            if best.as_ref().is_none_or(|b| ev.margin > b.evaluation.margin) {
                best = Some(cand);
            }
        }
        let obj = if round == 0 {
            Objective::MinLinear(&d0 * d0.transpose())
        } else {
            // Cut at the current best: V_min is at most y'Py for the face
            // minimizer y, so margin(P) <= <P, yy' - x0x0'>.
            let ev = &best.as_ref()?.evaluation;
            let y = DVector::from_column_slice(&ev.critical_face.point);
            let x0 = &d0 - sys.layout.pad_angles(&ev.critical_equilibrium);
            cuts.push(&y * y.transpose() - &x0 * x0.transpose());
            Objective::MaxMinCuts(cuts.clone())
        };
        let r = solve_with(&spec, &obj, settings);
        solves += 1;
        next = r.p;
        backend = r.backend;
    }
    best
}
