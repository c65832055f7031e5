//! Small dense primal-dual interior point solver for block-diagonal SDPs.
//!
//! Dual form: maximize `b'y` subject to `Z = C - sum_i y_i A_i` positive
//! semidefinite. The primal is minimize `<C, X>` subject to
//! `<A_i, X> = b_i`, `X` positive semidefinite. Search directions are HKM
//! with a Mehrotra predictor-corrector; iterates may be infeasible.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    pub blocks: Vec<usize>,
    /// One constant matrix per block.
    pub c: Vec<DMatrix<f64>>,
    /// Per variable, the nonzero blocks `(block, A_i restricted to block)`.
    pub a: Vec<Vec<(usize, DMatrix<f64>)>>,
    pub b: DVector<f64>,
}

impl SdpProblem {
    pub fn new(blocks: Vec<usize>, n_vars: usize) -> Self {
        let c = blocks.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        SdpProblem {
            blocks,
            c,
            a: vec![Vec::new(); n_vars],
            b: DVector::zeros(n_vars),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.a.len()
    }

    /// `C - sum_i y_i A_i` for every block.
    pub fn slack(&self, y: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let mut z = self.c.clone();
        for (i, terms) in self.a.iter().enumerate() {
            for (j, a) in terms {
                z[*j] -= a * y[i];
            }
        }
        z
    }

    /// Standard sparse SDPA text (`minimize c'x, sum F_i x_i - F_0 >= 0`).
    pub fn to_sdpa(&self, comment: &str) -> String {
        let mut s = String::new();
        s.push_str(&format!("\"{comment}\"\n{}\n{}\n", self.n_vars(), self.blocks.len()));
        let sizes: Vec<String> = self.blocks.iter().map(|n| n.to_string()).collect();
        s.push_str(&sizes.join(" "));
        s.push('\n');
        let obj: Vec<String> = self.b.iter().map(|v| format!("{:.17e}", -v)).collect();
        s.push_str(&obj.join(" "));
        s.push('\n');
        let emit = |mat: usize, blk: usize, m: &DMatrix<f64>, s: &mut String| {
            for r in 0..m.nrows() {
                for c in r..m.ncols() {
                    let v = -m[(r, c)];
                    if v != 0.0 {
                        s.push_str(&format!("{mat} {} {} {} {v:.17e}\n", blk + 1, r + 1, c + 1));
                    }
                }
            }
        };
        for (j, m) in self.c.iter().enumerate() {
            emit(0, j, m, &mut s);
        }
        for (i, terms) in self.a.iter().enumerate() {
            for (j, m) in terms {
                emit(i + 1, *j, m, &mut s);
            }
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IpmSettings {
    pub max_iter: usize,
    /// Relative gap and infeasibility target.
    pub tol: f64,
    /// Fraction of the distance to the cone boundary taken per step.
    pub step_fraction: f64,
}

impl Default for IpmSettings {
    fn default() -> Self {
        IpmSettings {
            max_iter: 100,
            tol: 1e-9,
            step_fraction: 0.95,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IpmStatus {
    Optimal,
    /// Dual objective diverged: the primal problem is infeasible.
    DualUnbounded,
    MaxIterations,
    Stalled,
    NumericalError,
}

#[derive(Debug, Clone)]
pub struct IpmResult {
    pub status: IpmStatus,
    pub y: DVector<f64>,
    pub x: Vec<DMatrix<f64>>,
    pub z: Vec<DMatrix<f64>>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub iterations: usize,
}

fn inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Largest `alpha` keeping `x + alpha dx` positive semidefinite.
fn max_step(x: &DMatrix<f64>, dx: &DMatrix<f64>) -> Option<f64> {
    let l = x.clone().cholesky()?.unpack();
    let w = l.solve_lower_triangular(dx)?;
    let w = l.solve_lower_triangular(&w.transpose())?;
    let lmin = sym(&w).symmetric_eigenvalues().min();
    Some(if lmin >= 0.0 { f64::INFINITY } else { -1.0 / lmin })
}

struct Workspace<'a> {
    p: &'a SdpProblem,
}

impl Workspace<'_> {
    fn apply(&self, g: &[DMatrix<f64>]) -> DVector<f64> {
        DVector::from_iterator(
            self.p.n_vars(),
            self.p
                .a
                .iter()
                .map(|terms| terms.iter().map(|(j, a)| inner(a, &g[*j])).sum()),
        )
    }

    fn combine(&self, y: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let mut out: Vec<DMatrix<f64>> =
            self.p.blocks.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        for (i, terms) in self.p.a.iter().enumerate() {
            if y[i] != 0.0 {
                for (j, a) in terms {
                    out[*j] += a * y[i];
                }
            }
        }
        out
    }
}

/// Runs the interior point method.
pub fn solve_sdp(p: &SdpProblem, s: &IpmSettings) -> IpmResult {
    let ws = Workspace { p };
    let m = p.n_vars();
    let n_total: usize = p.blocks.iter().sum();
    let bnorm = p.b.norm();
    let cnorm = p.c.iter().map(|c| c.norm_squared()).sum::<f64>().sqrt();

    let mut xi = Vec::with_capacity(p.blocks.len());
    let mut eta = Vec::with_capacity(p.blocks.len());
    for (j, &nj) in p.blocks.iter().enumerate() {
        let nj_f = nj as f64;
        let mut ratio = 0.0f64;
        let mut anorm = 0.0f64;
        for (i, terms) in p.a.iter().enumerate() {
            for (jj, a) in terms {
                if *jj == j {
                    let an = a.norm();
                    ratio = ratio.max((1.0 + p.b[i].abs()) / (1.0 + an));
                    anorm = anorm.max(an);
                }
            }
        }
        xi.push(10f64.max(nj_f.sqrt()).max(nj_f * ratio));
        eta.push(10f64.max(nj_f.sqrt()).max(anorm.max(p.c[j].norm())));
    }
    let mut x: Vec<DMatrix<f64>> = p
        .blocks
        .iter()
        .zip(&xi)
        .map(|(&n, &v)| DMatrix::identity(n, n) * v)
        .collect();
    let mut z: Vec<DMatrix<f64>> = p
        .blocks
        .iter()
        .zip(&eta)
        .map(|(&n, &v)| DMatrix::identity(n, n) * v)
        .collect();
    let mut y = DVector::zeros(m);
    let mut stalls = 0;

    let finish = |status, y: DVector<f64>, x: Vec<DMatrix<f64>>, z, it| {
        let pobj = p.c.iter().zip(&x).map(|(c, x)| inner(c, x)).sum();
        IpmResult {
            status,
            dual_objective: p.b.dot(&y),
            primal_objective: pobj,
            y,
            x,
            z,
            iterations: it,
        }
    };

    for it in 0..s.max_iter {
        let ay = ws.combine(&y);
        let rd: Vec<DMatrix<f64>> = (0..p.blocks.len())
            .map(|j| &p.c[j] - &z[j] - &ay[j])
            .collect();
        let rp = &p.b - ws.apply(&x);
        let pobj: f64 = p.c.iter().zip(&x).map(|(c, x)| inner(c, x)).sum();
        let dobj = p.b.dot(&y);
        let xz: f64 = x.iter().zip(&z).map(|(x, z)| inner(x, z)).sum();
        let mu = xz / n_total as f64;
        let scale = 1.0 + pobj.abs() + dobj.abs();
        let gap = xz.max((pobj - dobj).abs()) / scale;
        let pinf = rp.norm() / (1.0 + bnorm);
        let dinf = rd.iter().map(|r| r.norm_squared()).sum::<f64>().sqrt() / (1.0 + cnorm);
        if gap < s.tol && pinf < s.tol && dinf < s.tol {
            return finish(IpmStatus::Optimal, y, x, z, it);
        }
        if dinf < s.tol.sqrt() && dobj > 1e10 * (1.0 + bnorm) {
            return finish(IpmStatus::DualUnbounded, y, x, z, it);
        }

        let mut zinv = Vec::with_capacity(z.len());
        for zj in &z {
            match zj.clone().cholesky() {
                Some(ch) => zinv.push(ch.inverse()),
                None => return finish(IpmStatus::NumericalError, y, x, z, it),
            }
        }
        // Schur complement M_ik = <A_k, X A_i Z^-1>.
        let mut schur = DMatrix::zeros(m, m);
        let mut g: Vec<Vec<Option<DMatrix<f64>>>> = Vec::with_capacity(m);
        for terms in &p.a {
            let mut gi = vec![None; p.blocks.len()];
            for (j, a) in terms {
                gi[*j] = Some(&x[*j] * a * &zinv[*j]);
            }
            g.push(gi);
        }
        for i in 0..m {
            for k in i..m {
                let v: f64 = p.a[k]
                    .iter()
                    .filter_map(|(j, a)| g[i][*j].as_ref().map(|gij| inner(a, gij)))
                    .sum();
                schur[(i, k)] = v;
                schur[(k, i)] = v;
            }
        }
        let diag_max = (0..m).map(|i| schur[(i, i)].abs()).fold(0.0, f64::max);
        let chol = schur.clone().cholesky().or_else(|| {
            let mut reg = schur.clone();
            for i in 0..m {
                reg[(i, i)] += 1e-13 * diag_max.max(1e-300);
            }
            reg.cholesky()
        });
        let lu = if chol.is_none() { Some(schur.clone().lu()) } else { None };
        let solve_m = |h: &DVector<f64>| -> Option<DVector<f64>> {
            match (&chol, &lu) {
                (Some(c), _) => Some(c.solve(h)),
                (None, Some(l)) => l.solve(h),
                _ => None,
            }
        };
        let xrdz: Vec<DMatrix<f64>> = (0..x.len()).map(|j| &x[j] * &rd[j] * &zinv[j]).collect();
        let a_xrdz = ws.apply(&xrdz);
        #[allow(clippy::type_complexity)]
        let direction = |rc: &[DMatrix<f64>]| -> Option<(DVector<f64>, Vec<DMatrix<f64>>, Vec<DMatrix<f64>>)> {
            let rcz: Vec<DMatrix<f64>> = (0..rc.len()).map(|j| &rc[j] * &zinv[j]).collect();
            let h = &rp - ws.apply(&rcz) + &a_xrdz;
            let dy = solve_m(&h)?;
            let ady = ws.combine(&dy);
            let dz: Vec<DMatrix<f64>> = (0..rd.len()).map(|j| &rd[j] - &ady[j]).collect();
            let dx: Vec<DMatrix<f64>> = (0..x.len())
                .map(|j| sym(&(&rcz[j] - &x[j] * &dz[j] * &zinv[j])))
                .collect();
            Some((dy, dx, dz))
        };
        let steps = |dx: &[DMatrix<f64>], dz: &[DMatrix<f64>]| -> Option<(f64, f64)> {
            let mut ap = f64::INFINITY;
            let mut ad = f64::INFINITY;
            for j in 0..x.len() {
                ap = ap.min(max_step(&x[j], &dx[j])?);
                ad = ad.min(max_step(&z[j], &dz[j])?);
            }
            Some(((s.step_fraction * ap).min(1.0), (s.step_fraction * ad).min(1.0)))
        };

        let rc_aff: Vec<DMatrix<f64>> = (0..x.len()).map(|j| -(&x[j] * &z[j])).collect();
        let Some((_, dxa, dza)) = direction(&rc_aff) else {
            return finish(IpmStatus::NumericalError, y, x, z, it);
        };
        let Some((apa, ada)) = steps(&dxa, &dza) else {
            return finish(IpmStatus::NumericalError, y, x, z, it);
        };
        let mu_aff: f64 = (0..x.len())
            .map(|j| inner(&(&x[j] + &dxa[j] * apa), &(&z[j] + &dza[j] * ada)))
            .sum::<f64>()
            / n_total as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);
        let rc: Vec<DMatrix<f64>> = (0..x.len())
            .map(|j| {
                let n = p.blocks[j];
                DMatrix::identity(n, n) * (sigma * mu) - &x[j] * &z[j] - &dxa[j] * &dza[j]
            })
            .collect();
        let Some((dy, dx, dz)) = direction(&rc) else {
            return finish(IpmStatus::NumericalError, y, x, z, it);
        };
        let Some((ap, ad)) = steps(&dx, &dz) else {
            return finish(IpmStatus::NumericalError, y, x, z, it);
        };
        for j in 0..x.len() {
            x[j] = sym(&(&x[j] + &dx[j] * ap));
            z[j] = sym(&(&z[j] + &dz[j] * ad));
        }
        y += dy * ad;
        if ap.max(ad) < 1e-8 {
            stalls += 1;
            if stalls >= 3 {
                return finish(IpmStatus::Stalled, y, x, z, it + 1);
            }
        } else {
            stalls = 0;
        }
    }
    finish(IpmStatus::MaxIterations, y, x, z, s.max_iter)
}
