//! Minimum of `x'Px` over the faces `|delta_e| = pi/2` of the polytope.

use crate::error::{Error, Result};
use crate::lure::LureSystem;
use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceMinimum {
    pub edge: usize,
    /// +1 or -1: the face `delta_e = sign * pi/2`.
    pub sign: i8,
    pub value: f64,
    /// Minimizer, relative to the equilibrium.
    pub point: Vec<f64>,
    /// The flow-out inequality was active at the minimizer.
    pub inequality_active: bool,
}

/// Cached `P^-1` for repeated face queries.
pub struct FaceSolver<'a> {
    sys: &'a LureSystem,
    p_inv: DMatrix<f64>,
}

impl<'a> FaceSolver<'a> {
    pub fn new(p: &DMatrix<f64>, sys: &'a LureSystem) -> Result<Self> {
        if p.shape() != (sys.dim(), sys.dim()) {
            return Err(Error::Dimension(format!(
                "P is {}x{}, state dimension is {}",
                p.nrows(),
                p.ncols(),
                sys.dim()
            )));
        }
        let sym = (p + p.transpose()) * 0.5;
        let ch = sym
            .cholesky()
            .ok_or_else(|| Error::Numerical("P is not positive definite".into()))?;
        Ok(FaceSolver {
            sys,
            p_inv: ch.inverse(),
        })
    }

    /// Minimum on face `(e, sign)` for equilibrium edge difference `d`.
    /// With `flow_out`, edges without a load endpoint also impose
    /// `sign * w_e x >= 0` (velocity difference pointing outward).
    pub fn face(&self, e: usize, sign: i8, d: f64, flow_out: bool) -> FaceMinimum {
        let c = self.sys.c.row(e).transpose();
        let h = sign as f64 * FRAC_PI_2 - d;
        let u = &self.p_inv * &c;
        let cu = c.dot(&u);
        let x = &u * (h / cu);
        let mut best = FaceMinimum {
            edge: e,
            sign,
            value: h * h / cu,
            point: x.as_slice().to_vec(),
            inequality_active: false,
        };
        if !flow_out {
            return best;
        }
        let Some(w) = self.sys.velocity_difference_row(e) else {
            return best;
        };
        let w: DVector<f64> = w * sign as f64;
        if w.dot(&x) >= 0.0 {
            return best;
        }
        let pw = &self.p_inv * &w;
        let gram = Matrix2::new(cu, c.dot(&pw), w.dot(&u), w.dot(&pw));
        if let Some(lam) = gram.try_inverse().map(|gi| gi * Vector2::new(h, 0.0)) {
            let x = &u * lam[0] + &pw * lam[1];
            best.value = lam[0] * h;
            best.point = x.as_slice().to_vec();
            best.inequality_active = true;
        }
        best
    }

    /// All `2|E|` face minima, ordered by edge then sign (+, -).
    pub fn faces(&self, edge_diffs: &[f64], flow_out: bool) -> Vec<FaceMinimum> {
        let mut out = Vec::with_capacity(2 * edge_diffs.len());
        for (e, &d) in edge_diffs.iter().enumerate() {
            for s in [1i8, -1] {
                out.push(self.face(e, s, d, flow_out));
            }
        }
        out
    }
}

fn minimum(faces: Vec<FaceMinimum>) -> Result<FaceMinimum> {
    faces
        .into_iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .ok_or_else(|| Error::InvalidNetwork("network has no lines".into()))
}

/// Flow-out minimizer over all faces.
pub fn critical_face(p: &DMatrix<f64>, edge_diffs: &[f64], sys: &LureSystem) -> Result<FaceMinimum> {
    minimum(FaceSolver::new(p, sys)?.faces(edge_diffs, true))
}

/// `V_min` over the flow-out boundary.
pub fn compute_vmin(p: &DMatrix<f64>, edge_diffs: &[f64], sys: &LureSystem) -> Result<f64> {
    Ok(critical_face(p, edge_diffs, sys)?.value)
}

/// `V_min` over the full faces (no flow-out inequality).
pub fn compute_vmin_full_face(p: &DMatrix<f64>, edge_diffs: &[f64], sys: &LureSystem) -> Result<f64> {
    Ok(minimum(FaceSolver::new(p, sys)?.faces(edge_diffs, false))?.value)
}
