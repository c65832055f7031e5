//! Bounded-real Riccati route to the Schur-form LMI.
//!
//! `[A'P + PA + Q, PB; B'P, -I] < 0` with `P > 0` is strictly feasible iff
//! `A` is Hurwitz and the Hamiltonian `[A, BB'; -Q, -A']` has no eigenvalue
//! on the imaginary axis. A feasible `P` is the stabilizing solution of
//! `A'P + PA + PBB'P + Q + dI = 0` for a small `d > 0`.

use nalgebra::DMatrix;

#[derive(Debug, Clone)]
pub enum RiccatiOutcome {
    Solution(DMatrix<f64>),
    /// Certified infeasible; the string names the failed condition.
    Infeasible(String),
    Failed(String),
}

fn max_real_part(m: &DMatrix<f64>) -> f64 {
    m.complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

fn min_abs_real_part(m: &DMatrix<f64>) -> f64 {
    m.complex_eigenvalues()
        .iter()
        .map(|z| z.re.abs())
        .fold(f64::INFINITY, f64::min)
}

fn hamiltonian(a: &DMatrix<f64>, r: &DMatrix<f64>, q: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let mut h = DMatrix::zeros(2 * n, 2 * n);
    h.view_mut((0, 0), (n, n)).copy_from(a);
    h.view_mut((0, n), (n, n)).copy_from(r);
    h.view_mut((n, 0), (n, n)).copy_from(&(-q));
    h.view_mut((n, n), (n, n)).copy_from(&(-a.transpose()));
    h
}

/// Matrix sign function by scaled Newton iteration.
fn sign(h: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = h.nrows();
    let mut s = h.clone();
    for _ in 0..100 {
        let lu = s.clone().lu();
        let inv = lu.try_inverse()?;
        let lu = s.clone().lu();
        let logdet: f64 = (0..n).map(|i| lu.u()[(i, i)].abs().ln()).sum();
        let c = (-logdet / n as f64).exp();
        let c = if c.is_finite() && c > 0.0 { c } else { 1.0 };
        let next = (&s * c + inv / c) * 0.5;
        let delta = (&next - &s).norm();
        let scale = next.norm();
        s = next;
        if delta <= 1e-13 * scale {
            return Some(s);
        }
    }
    let check = &s * &s - DMatrix::identity(n, n);
    (check.norm() < 1e-8 * (n as f64)).then_some(s)
}

/// Solves for `P` with `a`, `b` and `q = Q` of the Schur-form block.
pub fn solve_bounded_real(a: &DMatrix<f64>, b: &DMatrix<f64>, q: &DMatrix<f64>) -> RiccatiOutcome {
    let n = a.nrows();
    let anorm = a.norm().max(1.0);
    let alpha = max_real_part(a);
    if alpha >= -1e-10 * anorm {
        return RiccatiOutcome::Infeasible(format!(
            "closed-loop matrix is not Hurwitz (max real part {alpha:e})"
        ));
    }
    let r = b * b.transpose();
    let h0 = hamiltonian(a, &r, q);
    let hnorm = h0.norm().max(1.0);
    let gap = min_abs_real_part(&h0);
    if gap <= 1e-9 * hnorm {
        return RiccatiOutcome::Infeasible(format!(
            "Hamiltonian has imaginary-axis eigenvalues (min |Re| {gap:e}): gain bound exceeds 1"
        ));
    }
    let d = (1e-6 * q.norm().max(1.0)).min(1e-2 * gap);
    let qd = q + DMatrix::identity(n, n) * d;
    let h = hamiltonian(a, &r, &qd);
    let Some(s) = sign(&h) else {
        return RiccatiOutcome::Failed("sign iteration did not converge".into());
    };
    let mut lhs = DMatrix::zeros(2 * n, n);
    lhs.view_mut((0, 0), (n, n)).copy_from(&s.view((0, n), (n, n)));
    let mut s22 = s.view((n, n), (n, n)).into_owned();
    for i in 0..n {
        s22[(i, i)] += 1.0;
    }
    lhs.view_mut((n, 0), (n, n)).copy_from(&s22);
    let mut rhs = DMatrix::zeros(2 * n, n);
    let mut s11 = s.view((0, 0), (n, n)).into_owned();
    for i in 0..n {
        s11[(i, i)] += 1.0;
    }
    rhs.view_mut((0, 0), (n, n)).copy_from(&(-s11));
    rhs.view_mut((n, 0), (n, n)).copy_from(&(-s.view((n, 0), (n, n)).into_owned()));
    let svd = lhs.svd(true, true);
    let Ok(p) = svd.solve(&rhs, 1e-14) else {
        return RiccatiOutcome::Failed("least-squares solve failed".into());
    };
    let p = (&p + p.transpose()) * 0.5;
    RiccatiOutcome::Solution(p)
}
