//! Certificates built on `V(x) = x'Px` and the checks that use them.

pub mod vertices;
pub mod vmin;

use crate::equilibrium::EquilibriumPoint;
use crate::error::{Error, Result};
use crate::lmi::{Backend, FaultTarget, Validation};
use crate::lure::LureSystem;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;
use vertices::{delta_vertices, Vertices};
use vmin::{FaceMinimum, FaceSolver};

pub use vertices::DEFAULT_VERTEX_CAP;
pub use vmin::{compute_vmin, compute_vmin_full_face, critical_face};

/// Relative slack required by strict certificate inequalities.
pub const RELATIVE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    Stability,
    RobustStability,
    ResiliencyLine,
    ResiliencyAll,
}

impl CertificateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CertificateKind::Stability => "stability",
            CertificateKind::RobustStability => "robust-stability",
            CertificateKind::ResiliencyLine => "resiliency-line",
            CertificateKind::ResiliencyAll => "resiliency-all",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub residual: f64,
    pub min_eig_p: f64,
    pub backend: Backend,
    pub network_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    #[serde(with = "crate::matrix_json")]
    pub p: DMatrix<f64>,
    pub g: f64,
    pub gamma: f64,
    pub mu: Option<f64>,
    /// Edge index of the covered line (`ResiliencyLine`).
    pub line: Option<usize>,
    /// Per-bus angles of the equilibrium `v_min` refers to; empty for
    /// robust certificates.
    pub equilibrium: Vec<f64>,
    pub v_min: f64,
    pub tau_max: Option<f64>,
    pub provenance: Provenance,
}

impl Certificate {
    /// Builds a certificate for a validated `p`. `mu`/`target` are given for
    /// resiliency kinds; `eq` is `None` only for robust certificates.
    #[allow(clippy::too_many_arguments)]
    pub fn issue(
        kind: CertificateKind,
        p: DMatrix<f64>,
        sys: &LureSystem,
        eq: Option<&EquilibriumPoint>,
        g: f64,
        gamma: f64,
        mu_target: Option<(f64, FaultTarget)>,
        validation: Validation,
        backend: Backend,
        network_hash: String,
    ) -> Result<Self> {
        let angles = match (kind, eq) {
            (CertificateKind::RobustStability, _) => Vec::new(),
            (_, Some(eq)) => eq.angles.clone(),
            (_, None) => {
                return Err(Error::InvalidArgument(
                    "an equilibrium is required for this certificate kind".into(),
                ))
            }
        };
        let v_min = match eq {
            Some(eq) if kind != CertificateKind::RobustStability => {
                compute_vmin(&p, &eq.edge_diffs, sys)?
            }
            // smallest V_min over the vertices of the equilibrium set
            _ => {
                let verts = gamma_vertices(sys, gamma, DEFAULT_VERTEX_CAP)
                    .map_err(|n| Error::InvalidArgument(format!("{n} vertex candidates exceed the cap")))?;
                let solver = FaceSolver::new(&p, sys)?;
                let mut lowest = f64::INFINITY;
                for v in &verts {
                    let d = &sys.c * sys.layout.pad_angles(v);
                    for f in solver.faces(d.as_slice(), true) {
                        lowest = lowest.min(f.value);
                    }
                }
                lowest
            }
        };
        let (mu, line) = match mu_target {
            Some((mu, FaultTarget::Line(e))) => (Some(mu), Some(e)),
            Some((mu, FaultTarget::AllLines)) => (Some(mu), None),
            None => (None, None),
        };
        let expected_mu = matches!(kind, CertificateKind::ResiliencyLine | CertificateKind::ResiliencyAll);
        if expected_mu != mu.is_some()
            || (kind == CertificateKind::ResiliencyLine) != line.is_some()
        {
            return Err(Error::InvalidArgument(format!(
                "fault target does not match certificate kind {}",
                kind.as_str()
            )));
        }
        Ok(Certificate {
            kind,
            g,
            gamma,
            mu,
            line,
            equilibrium: angles,
            tau_max: mu.map(|m| m * v_min),
            v_min,
            p,
            provenance: Provenance {
                residual: validation.residual,
                min_eig_p: validation.min_eig_p,
                backend,
                network_hash,
            },
        })
    }

    fn require(&self, kinds: &[CertificateKind], expected: &'static str) -> Result<()> {
        if kinds.contains(&self.kind) {
            Ok(())
        } else {
            Err(Error::WrongCertificateKind {
                expected,
                found: self.kind.as_str(),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Certified,
    /// Inconclusive: no claim of instability.
    NotCertified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Detail {
    OutsidePolytope,
    EquilibriumOutsideDeltaGamma,
    LyapunovLevelExceeded,
    EnumerationCap,
    PrefaultOutsideR,
    ClearingTimeExceeded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertResult {
    pub verdict: Verdict,
    pub margin: f64,
    pub detail: Option<Detail>,
}

impl CertResult {
    fn decide(margin: f64, scale: f64, fail: Detail) -> Self {
        let ok = margin > RELATIVE_SLACK * scale.abs().max(1.0);
        CertResult {
            verdict: if ok { Verdict::Certified } else { Verdict::NotCertified },
            margin,
            detail: (!ok).then_some(fail),
        }
    }

    fn fail(margin: f64, detail: Detail) -> Self {
        CertResult {
            verdict: Verdict::NotCertified,
            margin,
            detail: Some(detail),
        }
    }

    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }
}

fn state(sys: &LureSystem, v: &[f64]) -> Result<DVector<f64>> {
    if v.len() != sys.dim() {
        return Err(Error::Dimension(format!(
            "state has {} entries, expected {}",
            v.len(),
            sys.dim()
        )));
    }
    Ok(DVector::from_column_slice(v))
}

/// `(delta - delta*)' P (delta - delta*)` with zero equilibrium velocities.
pub fn lyapunov_value(
    p: &DMatrix<f64>,
    delta: &[f64],
    eq: &EquilibriumPoint,
    sys: &LureSystem,
) -> Result<f64> {
    let x = state(sys, delta)? - sys.layout.pad_angles(&eq.angles);
    if p.shape() != (x.len(), x.len()) {
        return Err(Error::Dimension("P does not match the state".into()));
    }
    Ok(x.dot(&(p * &x)))
}

/// Largest `|delta_e|` over edges for an absolute state.
pub fn polytope_extent(sys: &LureSystem, delta: &[f64]) -> Result<f64> {
    let d = &sys.c * state(sys, delta)?;
    Ok(d.amax())
}

pub fn certify_stability(
    cert: &Certificate,
    sys: &LureSystem,
    delta0: &[f64],
    eq: &EquilibriumPoint,
) -> Result<CertResult> {
    cert.require(
        &[
            CertificateKind::Stability,
            CertificateKind::ResiliencyLine,
            CertificateKind::ResiliencyAll,
        ],
        "stability",
    )?;
    if eq.margin > cert.gamma * (1.0 + 1e-12) {
        return Ok(CertResult::fail(f64::NAN, Detail::EquilibriumOutsideDeltaGamma));
    }
    let v_min = compute_vmin(&cert.p, &eq.edge_diffs, sys)?;
    let v0 = lyapunov_value(&cert.p, delta0, eq, sys)?;
    if polytope_extent(sys, delta0)? > FRAC_PI_2 {
        return Ok(CertResult::fail(v_min - v0, Detail::OutsidePolytope));
    }
    Ok(CertResult::decide(v_min - v0, v_min, Detail::LyapunovLevelExceeded))
}

/// Worst case of `V_min(delta*) - V_{delta*}(x0)` over a set of equilibria.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustEvaluation {
    pub margin: f64,
    /// `V_min` at the critical equilibrium.
    pub v_min: f64,
    pub critical_equilibrium: Vec<f64>,
    pub critical_face: FaceMinimum,
    pub vertices: usize,
}

/// Evaluates the robust condition over explicit equilibria (per-bus angles).
pub fn robust_evaluation(
    p: &DMatrix<f64>,
    sys: &LureSystem,
    delta0: &[f64],
    equilibria: &[Vec<f64>],
    flow_out: bool,
) -> Result<RobustEvaluation> {
    let x_abs = state(sys, delta0)?;
    let solver = FaceSolver::new(p, sys)?;
    let mut best: Option<RobustEvaluation> = None;
    for angles in equilibria {
        let offset = sys.layout.pad_angles(angles);
        let d: Vec<f64> = (&sys.c * &offset).iter().copied().collect();
        let face = solver
            .faces(&d, flow_out)
            .into_iter()
            .min_by(|a, b| a.value.total_cmp(&b.value))
            .ok_or_else(|| Error::InvalidNetwork("network has no lines".into()))?;
        let x0 = &x_abs - &offset;
        let margin = face.value - x0.dot(&(p * &x0));
        if best.as_ref().is_none_or(|b| margin < b.margin) {
            best = Some(RobustEvaluation {
                margin,
                v_min: face.value,
                critical_equilibrium: angles.clone(),
                critical_face: face,
                vertices: equilibria.len(),
            });
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("empty equilibrium set".into()))
}

/// Vertices of the equilibrium set for `gamma`, or the candidate count when
/// the cap is hit.
pub fn gamma_vertices(sys: &LureSystem, gamma: f64, cap: u64) -> std::result::Result<Vec<Vec<f64>>, u64> {
    let reference = frame_reference(sys);
    match delta_vertices(sys.n_buses, &sys.edges, reference, gamma, cap) {
        Vertices::Found(v) => Ok(v),
        Vertices::CapExceeded(n) => Err(n),
    }
}

/// Bus pinned to 0 in shared-frame vectors: the infinite bus, else bus 0.
pub fn frame_reference(sys: &LureSystem) -> usize {
    sys.kinds
        .iter()
        .position(|k| *k == crate::network::BusKind::Infinite)
        .unwrap_or(0)
}

/// Both robust margins: over the flow-out faces (used for the verdict) and
/// over the full faces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustMargins {
    pub flow_out: RobustEvaluation,
    pub full_face: RobustEvaluation,
}

pub fn robust_margins(
    p: &DMatrix<f64>,
    sys: &LureSystem,
    delta0: &[f64],
    gamma: f64,
    cap: u64,
) -> Result<std::result::Result<RobustMargins, u64>> {
    let verts = match gamma_vertices(sys, gamma, cap) {
        Ok(v) => v,
        Err(n) => return Ok(Err(n)),
    };
    Ok(Ok(RobustMargins {
        flow_out: robust_evaluation(p, sys, delta0, &verts, true)?,
        full_face: robust_evaluation(p, sys, delta0, &verts, false)?,
    }))
}

/// Certified iff `delta0` lies in the polytope and
/// `V_min(delta*) > V_{delta*}(delta0)` for every vertex `delta*` of the
/// equilibrium set, which is equivalent to the robust condition because
/// that condition is affine in `delta*`.
pub fn certify_robust_stability(
    cert: &Certificate,
    sys: &LureSystem,
    delta0: &[f64],
    gamma: f64,
    cap: u64,
) -> Result<CertResult> {
    cert.require(
        &[CertificateKind::RobustStability, CertificateKind::Stability],
        "robust-stability",
    )?;
    let comps = component_count(sys);
    if comps > 1 {
        return Err(Error::Disconnected { components: comps });
    }
    let verts = match gamma_vertices(sys, gamma, cap) {
        Ok(v) => v,
        Err(_) => return Ok(CertResult::fail(f64::NAN, Detail::EnumerationCap)),
    };
    certify_robust_over(cert, sys, delta0, &verts)
}

/// The robust check over an explicit equilibrium set.
pub fn certify_robust_over(
    cert: &Certificate,
    sys: &LureSystem,
    delta0: &[f64],
    equilibria: &[Vec<f64>],
) -> Result<CertResult> {
    let ev = robust_evaluation(&cert.p, sys, delta0, equilibria, true)?;
    if polytope_extent(sys, delta0)? > FRAC_PI_2 {
        return Ok(CertResult::fail(ev.margin, Detail::OutsidePolytope));
    }
    Ok(CertResult::decide(ev.margin, ev.v_min, Detail::LyapunovLevelExceeded))
}

fn component_count(sys: &LureSystem) -> usize {
    let mut parent: Vec<usize> = (0..sys.n_buses).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            i = p[i];
        }
        i
    }
    for &(u, v) in &sys.edges {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        parent[a] = b;
    }
    (0..sys.n_buses).filter(|&i| find(&mut parent, i) == i).count()
}

/// Clearing-time check: `tau < mu (V_min - V(x_pre))`.
pub fn certify_resiliency(
    cert: &Certificate,
    sys: &LureSystem,
    tau: f64,
    pre_eq: Option<&EquilibriumPoint>,
) -> Result<CertResult> {
    cert.require(
        &[CertificateKind::ResiliencyLine, CertificateKind::ResiliencyAll],
        "resiliency",
    )?;
    let mu = cert.mu.expect("resiliency certificates carry mu");
    let v_pre = match pre_eq {
        Some(pre) => {
            let x = sys.layout.pad_angles(&pre.angles) - sys.layout.pad_angles(&cert.equilibrium);
            x.dot(&(&cert.p * &x))
        }
        None => 0.0,
    };
    if v_pre >= cert.v_min {
        return Ok(CertResult::fail(
            mu * (cert.v_min - v_pre) - tau,
            Detail::PrefaultOutsideR,
        ));
    }
    let bound = mu * (cert.v_min - v_pre);
    Ok(CertResult::decide(bound - tau, bound, Detail::ClearingTimeExceeded))
}

/// Clearing-time check valid for every single-line trip.
pub fn certify_robust_resiliency(cert: &Certificate, tau: f64) -> Result<CertResult> {
    cert.require(&[CertificateKind::ResiliencyAll], "resiliency-all")?;
    let bound = cert.mu.expect("resiliency certificates carry mu") * cert.v_min;
    Ok(CertResult::decide(bound - tau, bound, Detail::ClearingTimeExceeded))
}
