//! State-space form `x' = A x - B F(C x)` of the structure-preserving model.
//!
//! The state is `[generator angles, generator velocities, load angles]`,
//! all measured relative to the equilibrium. An infinite bus has no state.

use crate::network::{build_incidence, BusKind, PowerNetwork};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateLayout {
    pub n_gen: usize,
    pub n_load: usize,
}

impl StateLayout {
    pub fn dim(&self) -> usize {
        2 * self.n_gen + self.n_load
    }

    /// State row holding the angle of bus `k` (bus indices are generators
    /// first, then loads, then the infinite bus).
    pub fn angle_index(&self, k: usize) -> Option<usize> {
        if k < self.n_gen {
            Some(k)
        } else if k < self.n_gen + self.n_load {
            Some(self.n_gen + k)
        } else {
            None
        }
    }

    pub fn velocity_index(&self, k: usize) -> Option<usize> {
        (k < self.n_gen).then_some(self.n_gen + k)
    }

    /// Pads a per-bus angle vector into a state vector with zero velocities.
    pub fn pad_angles(&self, angles: &[f64]) -> DVector<f64> {
        let mut x = DVector::zeros(self.dim());
        for k in 0..self.n_gen + self.n_load {
            x[self.angle_index(k).unwrap()] = angles[k];
        }
        x
    }

    /// Inverse of `pad_angles`; the infinite bus (if any) gets angle 0.
    pub fn angles_of(&self, x: &[f64], n_buses: usize) -> Vec<f64> {
        (0..n_buses)
            .map(|k| self.angle_index(k).map_or(0.0, |i| x[i]))
            .collect()
    }

    pub fn labels(&self, net: &PowerNetwork) -> Vec<String> {
        let mut out = vec![String::new(); self.dim()];
        for (k, b) in net.buses.iter().enumerate() {
            if let Some(i) = self.angle_index(k) {
                out[i] = format!("delta_{}", b.id);
            }
            if let Some(i) = self.velocity_index(k) {
                out[i] = format!("omega_{}", b.id);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LureSystem {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    /// Edge-by-bus incidence over all buses, including an infinite bus.
    pub incidence: DMatrix<f64>,
    /// Diagonal of `S`: one coupling per edge.
    pub coupling: DVector<f64>,
    /// Edge ordering as bus-index pairs.
    pub edges: Vec<(usize, usize)>,
    pub layout: StateLayout,
    pub kinds: Vec<BusKind>,
    pub n_buses: usize,
}

/// Assembles `A`, `B` and `C` for a normalized network.
pub fn build_lure_system(net: &PowerNetwork) -> LureSystem {
    let layout = StateLayout {
        n_gen: net.n_generators(),
        n_load: net.n_loads(),
    };
    let n = layout.dim();
    let ne = net.lines.len();
    let incidence = build_incidence(net);
    let coupling = DVector::from_iterator(ne, net.lines.iter().map(|l| l.coupling));

    let mut a = DMatrix::zeros(n, n);
    for k in 0..layout.n_gen {
        let bus = &net.buses[k];
        a[(k, layout.n_gen + k)] = 1.0;
        a[(layout.n_gen + k, layout.n_gen + k)] = -bus.damping / bus.inertia;
    }
    let mut b = DMatrix::zeros(n, ne);
    let mut c = DMatrix::zeros(ne, n);
    for (e, l) in net.lines.iter().enumerate() {
        for &k in &[l.from, l.to] {
            let sign = incidence[(e, k)];
            if let Some(i) = layout.angle_index(k) {
                c[(e, i)] = sign;
            }
            let bus = &net.buses[k];
            match bus.kind {
                BusKind::Generator => {
                    b[(layout.velocity_index(k).unwrap(), e)] = sign * l.coupling / bus.inertia;
                }
                BusKind::Load => {
                    b[(layout.angle_index(k).unwrap(), e)] = sign * l.coupling / bus.damping;
                }
                BusKind::Infinite => {}
            }
        }
    }
    LureSystem {
        a,
        b,
        c,
        incidence,
        coupling,
        edges: net.lines.iter().map(|l| (l.from, l.to)).collect(),
        layout,
        kinds: net.buses.iter().map(|b| b.kind).collect(),
        n_buses: net.n_buses(),
    }
}

impl LureSystem {
    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let key = (a.min(b), a.max(b));
        self.edges.iter().position(|&e| e == key)
    }

    /// True when no bus is infinite, so a uniform angle shift is a
    /// neutral direction of the dynamics.
    pub fn has_shift_mode(&self) -> bool {
        !self.kinds.contains(&BusKind::Infinite)
    }

    /// Row `w_e` with `w_e x` the velocity difference across edge `e`, or
    /// `None` when an endpoint is a load bus.
    pub fn velocity_difference_row(&self, e: usize) -> Option<DVector<f64>> {
        let mut w = DVector::zeros(self.dim());
        let (u, v) = self.edges[e];
        for &k in &[u, v] {
            match self.kinds[k] {
                BusKind::Generator => {
                    w[self.layout.velocity_index(k).unwrap()] = self.incidence[(e, k)]
                }
                BusKind::Infinite => {}
                BusKind::Load => return None,
            }
        }
        Some(w)
    }

    /// `F(Cx)` with `F_e = sin(y_e + d_e) - sin(d_e)` for equilibrium
    /// edge differences `d`.
    pub fn nonlinearity(&self, x: &DVector<f64>, edge_diffs: &[f64]) -> DVector<f64> {
        let y = &self.c * x;
        DVector::from_iterator(
            y.len(),
            y.iter()
                .zip(edge_diffs)
                .map(|(y, d)| (y + d).sin() - d.sin()),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_bus_matrices() {
        let sys = build_lure_system(&fixtures::two_bus());
        let want = [0.0, 0.0, 1.0, -1.5];
        for (a, w) in sys.a.iter().zip(want) {
            assert!((a - w).abs() < 1e-15);
        }
        assert!((sys.b[(0, 0)]).abs() < 1e-15 && (sys.b[(1, 0)] - 2.0).abs() < 1e-12);
        assert_eq!(sys.c.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn three_gen_dims() {
        let sys = build_lure_system(&fixtures::three_gen());
        assert_eq!(sys.a.shape(), (6, 6));
        assert_eq!(sys.b.shape(), (6, 3));
        assert_eq!(sys.c.shape(), (3, 6));
    }

    proptest! {
        #[test]
        fn structure_on_random_networks(seed in 0u64..10_000, n in 2usize..=10) {
            let net = fixtures::random_network(seed, n, 0.4);
            let sys = build_lure_system(&net);
            let l = sys.layout;
            // C = E [I 0 0; 0 0 I] on the dynamic buses
            let mut sel = DMatrix::zeros(net.n_buses(), sys.dim());
            for k in 0..net.n_dynamic() {
                sel[(k, l.angle_index(k).unwrap())] = 1.0;
            }
            prop_assert_eq!(&sys.c, &(&sys.incidence * &sel));
            for k in 0..l.n_gen {
                for j in 0..sys.dim() {
                    let want = if j == l.n_gen + k { 1.0 } else { 0.0 };
                    prop_assert_eq!(sys.a[(k, j)], want);
                }
            }
            for r in 2 * l.n_gen..sys.dim() {
                prop_assert!(sys.a.row(r).iter().all(|&v| v == 0.0));
            }
            for (e, &(u, v)) in sys.edges.iter().enumerate() {
                for r in 0..sys.dim() {
                    let val = sys.b[(r, e)];
                    let owner = (0..net.n_buses()).find(|&k| {
                        l.velocity_index(k) == Some(r)
                            || (net.buses[k].kind == BusKind::Load && l.angle_index(k) == Some(r))
                    });
                    match owner {
                        Some(k) if k == u || k == v => {
                            let b = &net.buses[k];
                            let den = if b.kind == BusKind::Generator { b.inertia } else { b.damping };
                            prop_assert!((val.abs() - sys.coupling[e] / den).abs() < 1e-12);
                        }
                        _ => prop_assert_eq!(val, 0.0),
                    }
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = DVector::from_fn(sys.dim(), |_, _| rng.random_range(-3.0..3.0));
            let y = &sys.c * &x;
            let angles = l.angles_of(x.as_slice(), net.n_buses());
            for (e, &(u, v)) in sys.edges.iter().enumerate() {
                prop_assert!((y[e] - (angles[u] - angles[v])).abs() < 1e-12);
            }
        }
    }
}
