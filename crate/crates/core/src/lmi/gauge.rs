//! Removal of the uniform-shift direction.
//!
//! Without an infinite bus, `v` (unit angles, zero velocities) satisfies
//! `A v = 0` and `C v = 0`, and a conserved combination `l` satisfies
//! `l'A = 0`, `l'B = 0`. The LMI is then invariant under `P -> P + k l l'`,
//! which leaves no strictly feasible margin. The problem is solved on the
//! complement of `l` and lifted back.

use nalgebra::{DMatrix, SymmetricEigen};

#[derive(Debug, Clone)]
pub(crate) struct Gauge {
    /// Orthonormal basis of `ker l'` (n x r).
    pub u: DMatrix<f64>,
    /// Reduction map `U' (I - V (L'V)^-1 L')` (r x n).
    pub g: DMatrix<f64>,
    /// Orthonormal conserved directions (n x k).
    pub l: DMatrix<f64>,
}

fn null_space(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.ncols();
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let smax = svd.singular_values.max().max(1.0);
    let mut cols = Vec::new();
    for i in 0..n {
        let s = if i < svd.singular_values.len() { svd.singular_values[i] } else { 0.0 };
        if s <= 1e-10 * smax {
            cols.push(vt.row(i).transpose());
        }
    }
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

pub(crate) fn detect(a: &DMatrix<f64>, b: &DMatrix<f64>, c: &DMatrix<f64>) -> Option<Gauge> {
    let n = a.nrows();
    let mut ac = DMatrix::zeros(a.nrows() + c.nrows(), n);
    ac.rows_mut(0, n).copy_from(a);
    ac.rows_mut(n, c.nrows()).copy_from(c);
    let v = null_space(&ac);
    let mut ab = DMatrix::zeros(n + b.ncols(), n);
    ab.rows_mut(0, n).copy_from(&a.transpose());
    ab.rows_mut(n, b.ncols()).copy_from(&b.transpose());
    let l = null_space(&ab);
    let k = v.ncols();
    if k == 0 || l.ncols() != k {
        return None;
    }
    let ltv = l.transpose() * &v;
    let inv = ltv.try_inverse()?;
    let proj = DMatrix::identity(n, n) - &l * l.transpose();
    let eig = SymmetricEigen::new(proj);
    let cols: Vec<_> = (0..n)
        .filter(|&i| eig.eigenvalues[i] > 0.5)
        .map(|i| eig.eigenvectors.column(i).into_owned())
        .collect();
    let u = DMatrix::from_columns(&cols);
    let pi = DMatrix::identity(n, n) - &v * inv * l.transpose();
    let g = u.transpose() * pi;
    Some(Gauge { u, g, l })
}

impl Gauge {
    /// `G' P_r G + k L L'` with the smallest tried `k` keeping every
    /// eigenvalue at least `eps`.
    pub fn lift(&self, pr: &DMatrix<f64>, eps: f64) -> DMatrix<f64> {
        let base = self.g.transpose() * pr * &self.g;
        let ll = &self.l * self.l.transpose();
        let mut kappa = pr.clone().symmetric_eigenvalues().min().max(eps);
        let mut p = &base + &ll * kappa;
        for _ in 0..60 {
            if p.clone().symmetric_eigenvalues().min() >= eps {
                break;
            }
            kappa *= 2.0;
            p = &base + &ll * kappa;
        }
        (&p + p.transpose()) * 0.5
    }
}
