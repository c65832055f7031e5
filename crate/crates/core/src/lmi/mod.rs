//! Schur-form LMIs for stability and resiliency and their solution.

mod gauge;
pub mod search;

use crate::error::{Error, Result};
use crate::lure::LureSystem;
use crate::riccati::{solve_bounded_real, RiccatiOutcome};
use crate::sdp::{solve_sdp, IpmSettings, IpmStatus, SdpProblem};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use search::{search_mu, search_p_for_state, MuSearch, PSearch};

/// Which tripped line(s) the resiliency LMI must cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FaultTarget {
    /// Edge index of a single line.
    Line(usize),
    AllLines,
}

/// `[A_bar'P + P A_bar + (1-g)^2/4 C'C, P B_bar; B_bar'P, -I] <= 0`,
/// `P >= eps I`, with `A_bar = A - (1+g)/2 B C`.
#[derive(Debug, Clone, PartialEq)]
pub struct LmiSpec {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub g: f64,
    /// Zero for the plain stability LMI.
    pub mu: f64,
    pub target: Option<FaultTarget>,
    pub epsilon: f64,
}

pub const DEFAULT_EPSILON: f64 = 1e-6;

pub fn assemble_stability_lmi(sys: &LureSystem, g: f64) -> Result<LmiSpec> {
    if !(g > 0.0 && g < 1.0) {
        return Err(Error::GainOutOfRange(g));
    }
    Ok(LmiSpec {
        a: sys.a.clone(),
        b: sys.b.clone(),
        c: sys.c.clone(),
        g,
        mu: 0.0,
        target: None,
        epsilon: DEFAULT_EPSILON,
    })
}

pub fn assemble_resiliency_lmi(
    sys: &LureSystem,
    g: f64,
    mu: f64,
    target: FaultTarget,
) -> Result<LmiSpec> {
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(Error::InvalidArgument(format!("mu must be nonnegative, got {mu}")));
    }
    if let FaultTarget::Line(e) = target {
        if e >= sys.n_edges() {
            return Err(Error::InvalidArgument(format!("edge index {e} out of range")));
        }
    }
    let mut spec = assemble_stability_lmi(sys, g)?;
    spec.mu = mu;
    spec.target = Some(target);
    Ok(spec)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Validation {
    /// Largest eigenvalue of the constraint block.
    pub residual: f64,
    pub min_eig_p: f64,
}

impl LmiSpec {
    pub fn decision_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn a_bar(&self) -> DMatrix<f64> {
        &self.a - &self.b * &self.c * (0.5 * (1.0 + self.g))
    }

    pub fn b_bar(&self) -> DMatrix<f64> {
        let extra = match self.target {
            Some(_) if self.mu == 0.0 => None,
            Some(FaultTarget::Line(e)) => Some(self.b.columns(e, 1).into_owned()),
            Some(FaultTarget::AllLines) => Some(self.b.clone()),
            None => None,
        };
        match extra {
            None => self.b.clone(),
            Some(x) => {
                let n = self.b.nrows();
                let mut out = DMatrix::zeros(n, self.b.ncols() + x.ncols());
                out.columns_mut(0, self.b.ncols()).copy_from(&self.b);
                out.columns_mut(self.b.ncols(), x.ncols())
                    .copy_from(&(x * self.mu.sqrt()));
                out
            }
        }
    }

    pub fn q0(&self) -> DMatrix<f64> {
        self.c.transpose() * &self.c * ((1.0 - self.g).powi(2) / 4.0)
    }

    pub fn block_dim(&self) -> usize {
        self.decision_dim() + self.b_bar().ncols()
    }

    /// The constraint block evaluated at `p`.
    pub fn block(&self, p: &DMatrix<f64>) -> DMatrix<f64> {
        schur_block(&self.a_bar(), &self.b_bar(), &self.q0(), p)
    }

    /// Independent eigenvalue check of a candidate `p`.
    pub fn validate(&self, p: &DMatrix<f64>) -> Validation {
        let sym = (p + p.transpose()) * 0.5;
        let blk = self.block(&sym);
        Validation {
            residual: blk.symmetric_eigenvalues().max(),
            min_eig_p: sym.symmetric_eigenvalues().min(),
        }
    }

    /// The max-margin problem in SDPA sparse format, in full coordinates.
    pub fn to_sdpa(&self) -> String {
        let core = Core {
            a_bar: self.a_bar(),
            b_bar: self.b_bar(),
            q0: self.q0(),
        };
        build_sdp(&core, &Objective::MaxMargin, self.epsilon, trace_cap(self.decision_dim()))
            .to_sdpa("max t: Schur-form Lyapunov LMI")
    }
}

fn schur_block(a: &DMatrix<f64>, b: &DMatrix<f64>, q: &DMatrix<f64>, p: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let q_cols = b.ncols();
    let mut blk = DMatrix::zeros(n + q_cols, n + q_cols);
    let tl = a.transpose() * p + p * a + q;
    let pb = p * b;
    blk.view_mut((0, 0), (n, n)).copy_from(&tl);
    blk.view_mut((0, n), (n, q_cols)).copy_from(&pb);
    blk.view_mut((n, 0), (q_cols, n)).copy_from(&pb.transpose());
    for i in 0..q_cols {
        blk[(n + i, n + i)] = -1.0;
    }
    (&blk + blk.transpose()) * 0.5
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    /// Interior point for small problems, Riccati above `auto_riccati_above`.
    #[default]
    Auto,
    InteriorPoint,
    Riccati,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverSettings {
    pub backend: Backend,
    /// Acceptance bound on the validated residual.
    pub tol: f64,
    pub epsilon: f64,
    pub ipm: IpmSettings,
    /// Reduced block dimension above which `Auto` uses the Riccati route.
    pub auto_riccati_above: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            backend: Backend::Auto,
            tol: 1e-8,
            epsilon: DEFAULT_EPSILON,
            ipm: IpmSettings::default(),
            auto_riccati_above: 80,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeasibilityStatus {
    Feasible,
    Infeasible,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityResult {
    pub status: FeasibilityStatus,
    pub p: Option<DMatrix<f64>>,
    /// Validated residual of the returned `p` (or of the last iterate).
    pub residual: f64,
    pub min_eig_p: f64,
    /// Optimal `t` of the max-margin problem, when that was solved.
    pub margin: Option<f64>,
    pub backend: Backend,
    pub iterations: usize,
    pub note: Option<String>,
}

impl FeasibilityResult {
    fn failed(backend: Backend, note: String) -> Self {
        FeasibilityResult {
            status: FeasibilityStatus::Inconclusive,
            p: None,
            residual: f64::NAN,
            min_eig_p: f64::NAN,
            margin: None,
            backend,
            iterations: 0,
            note: Some(note),
        }
    }
}

/// Objective in full state coordinates.
#[derive(Debug, Clone)]
pub(crate) enum Objective {
    /// Maximize `t` with the block `<= -t I`.
    MaxMargin,
    /// Minimize `<W, P>`.
    MinLinear(DMatrix<f64>),
    /// Maximize `min_j <Y_j, P>`.
    MaxMinCuts(Vec<DMatrix<f64>>),
}

/// Block margin enforced when the objective is not the margin itself.
const FLOOR: f64 = 1e-7;

struct Core {
    a_bar: DMatrix<f64>,
    b_bar: DMatrix<f64>,
    q0: DMatrix<f64>,
}

fn trace_cap(n: usize) -> f64 {
    1e4 * n as f64
}

/// Orthonormal basis of symmetric matrices, in `svec` order.
fn sym_basis(n: usize) -> Vec<DMatrix<f64>> {
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..n {
        for i in 0..=j {
            let mut e = DMatrix::zeros(n, n);
            if i == j {
                e[(i, i)] = 1.0;
            } else {
                e[(i, j)] = r;
                e[(j, i)] = r;
            }
            out.push(e);
        }
    }
    out
}

fn build_sdp(core: &Core, obj: &Objective, eps: f64, cap: f64) -> SdpProblem {
    let n = core.a_bar.nrows();
    let q = core.b_bar.ncols();
    let basis = sym_basis(n);
    let nb = basis.len();
    let cuts = match obj {
        Objective::MaxMinCuts(c) => c.len(),
        _ => 0,
    };
    let extra_var = matches!(obj, Objective::MaxMargin | Objective::MaxMinCuts(_));
    let n_vars = nb + usize::from(extra_var);
    let mut blocks = vec![n + q, n, 1];
    blocks.extend(std::iter::repeat_n(1, cuts));
    let mut p = SdpProblem::new(blocks, n_vars);

    // Block 0: -(F0 + G(P) + t I) >= 0, F0 = diag(Q0, -I).
    let mut c0 = DMatrix::zeros(n + q, n + q);
    c0.view_mut((0, 0), (n, n)).copy_from(&(-&core.q0));
    for i in 0..q {
        c0[(n + i, n + i)] = 1.0;
    }
    if !matches!(obj, Objective::MaxMargin) {
        for i in 0..n + q {
            c0[(i, i)] -= FLOOR;
        }
    }
    p.c[0] = c0;
    p.c[1] = DMatrix::identity(n, n) * (-eps);
    p.c[2] = DMatrix::from_element(1, 1, cap);
    for (k, e) in basis.iter().enumerate() {
        let mut gk = DMatrix::zeros(n + q, n + q);
        gk.view_mut((0, 0), (n, n))
            .copy_from(&(core.a_bar.transpose() * e + e * &core.a_bar));
        let eb = e * &core.b_bar;
        gk.view_mut((0, n), (n, q)).copy_from(&eb);
        gk.view_mut((n, 0), (q, n)).copy_from(&eb.transpose());
        let mut terms = vec![(0, gk), (1, -e), (2, DMatrix::from_element(1, 1, e.trace()))];
        if let Objective::MaxMinCuts(ys) = obj {
            for (j, y) in ys.iter().enumerate() {
                let v: f64 = y.component_mul(e).sum();
                terms.push((3 + j, DMatrix::from_element(1, 1, -v)));
            }
        }
        p.a[k] = terms;
        if let Objective::MinLinear(w) = obj {
            p.b[k] = -w.component_mul(e).sum();
        }
    }
    if extra_var {
        let t = nb;
        p.b[t] = 1.0;
        p.a[t] = match obj {
            Objective::MaxMargin => vec![(0, DMatrix::identity(n + q, n + q))],
            _ => (0..cuts)
                .map(|j| (3 + j, DMatrix::from_element(1, 1, 1.0)))
                .collect(),
        };
    }
    p
}

/// Solves `spec` for maximal margin.
pub fn solve_lmi(spec: &LmiSpec, settings: &SolverSettings) -> FeasibilityResult {
    solve_with(spec, &Objective::MaxMargin, settings)
}

pub(crate) fn solve_with(
    spec: &LmiSpec,
    obj: &Objective,
    settings: &SolverSettings,
) -> FeasibilityResult {
    let eps = spec.epsilon.max(settings.epsilon);
    let a_bar = spec.a_bar();
    let b_bar = spec.b_bar();
    let gauge = gauge::detect(&spec.a, &spec.b, &spec.c);
    let core = match &gauge {
        Some(gz) => Core {
            a_bar: gz.u.transpose() * &a_bar * &gz.u,
            b_bar: gz.u.transpose() * &b_bar,
            q0: {
                let cr = &spec.c * &gz.u;
                cr.transpose() * cr * ((1.0 - spec.g).powi(2) / 4.0)
            },
        },
        None => Core {
            a_bar,
            b_bar,
            q0: spec.q0(),
        },
    };
    let reduce = |w: &DMatrix<f64>| match &gauge {
        Some(gz) => &gz.g * w * gz.g.transpose(),
        None => w.clone(),
    };
    let lift = |pr: &DMatrix<f64>| match &gauge {
        Some(gz) => gz.lift(pr, eps),
        None => (pr + pr.transpose()) * 0.5,
    };
    let backend = match settings.backend {
        Backend::Auto => {
            let dim = core.a_bar.nrows() + core.b_bar.ncols();
            if dim > settings.auto_riccati_above && matches!(obj, Objective::MaxMargin) {
                Backend::Riccati
            } else {
                Backend::InteriorPoint
            }
        }
        b => b,
    };
    let check = |p: DMatrix<f64>, margin: Option<f64>, iterations: usize, note: Option<String>| {
        let v = spec.validate(&p);
        let ok = v.residual <= settings.tol && v.min_eig_p >= eps - settings.tol;
        let status = if ok {
            FeasibilityStatus::Feasible
        } else if margin.is_some_and(|t| t < -1e3 * settings.ipm.tol) {
            FeasibilityStatus::Infeasible
        } else {
            FeasibilityStatus::Inconclusive
        };
        FeasibilityResult {
            status,
            p: ok.then_some(p),
            residual: v.residual,
            min_eig_p: v.min_eig_p,
            margin,
            backend,
            iterations,
            note,
        }
    };

    match backend {
        Backend::Riccati => match solve_bounded_real(&core.a_bar, &core.b_bar, &core.q0) {
            RiccatiOutcome::Solution(pr) => {
                let mut r = check(lift(&pr), None, 0, None);
                if r.status == FeasibilityStatus::Feasible {
                    r.margin = Some(-r.residual);
                }
                r
            }
            RiccatiOutcome::Infeasible(why) => FeasibilityResult {
                status: FeasibilityStatus::Infeasible,
                note: Some(why),
                ..FeasibilityResult::failed(backend, String::new())
            },
            RiccatiOutcome::Failed(why) => FeasibilityResult::failed(backend, why),
        },
        _ => {
            let robj = match obj {
                Objective::MaxMargin => Objective::MaxMargin,
                Objective::MinLinear(w) => Objective::MinLinear(reduce(w)),
                Objective::MaxMinCuts(ys) => Objective::MaxMinCuts(ys.iter().map(reduce).collect()),
            };
            let n = core.a_bar.nrows();
            let prob = build_sdp(&core, &robj, eps, trace_cap(n));
            let res = solve_sdp(&prob, &settings.ipm);
            let basis = sym_basis(n);
            let mut pr = DMatrix::zeros(n, n);
            for (k, e) in basis.iter().enumerate() {
                pr += e * res.y[k];
            }
            let margin = match (obj, res.status) {
                (Objective::MaxMargin, IpmStatus::Optimal) => Some(res.y[basis.len()]),
                _ => None,
            };
            let note = (res.status != IpmStatus::Optimal)
                .then(|| format!("interior point stopped: {:?}", res.status));
            check(lift(&pr), margin, res.iterations, note)
        }
    }
}
