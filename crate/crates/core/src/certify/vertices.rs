//! Vertices of the equilibrium set `{delta : |delta_k - delta_j| <= gamma}`
//! in the shared frame (reference bus at 0).
//!
//! Every vertex makes `n - 1` independent edge constraints tight, and
//! independent edge sets of that size are spanning trees. Vertices are
//! therefore collected over all spanning trees and all `+-gamma` patterns
//! on the tree edges, keeping those that satisfy the remaining edges.

use std::collections::BTreeSet;

pub const DEFAULT_VERTEX_CAP: u64 = 1 << 20;

/// Outcome of the enumeration.
#[derive(Debug, Clone, PartialEq)]
pub enum Vertices {
    /// Per-bus angle vectors, one per vertex.
    Found(Vec<Vec<f64>>),
    /// Candidate count (trees times sign patterns) exceeded the cap.
    CapExceeded(u64),
}

fn binomial(n: u64, k: u64) -> u64 {
    let mut r: u64 = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

/// Enumerates vertices for `n_buses` buses joined by `edges`, with bus
/// `reference` pinned to 0. The graph must be connected.
pub fn delta_vertices(
    n_buses: usize,
    edges: &[(usize, usize)],
    reference: usize,
    gamma: f64,
    cap: u64,
) -> Vertices {
    if n_buses <= 1 || gamma == 0.0 {
        return Vertices::Found(vec![vec![0.0; n_buses]]);
    }
    let k = n_buses - 1;
    let candidates = binomial(edges.len() as u64, k as u64)
        .saturating_mul(1u64.checked_shl(k as u32).unwrap_or(u64::MAX));
    if candidates > cap {
        return Vertices::CapExceeded(candidates);
    }
    let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut out = Vec::new();
    let mut combo: Vec<usize> = (0..k).collect();
    loop {
        if let Some(order) = tree_order(n_buses, edges, &combo, reference) {
            for pattern in 0u64..(1u64 << k) {
                // multiples of gamma along the tree
                let mut units = vec![0i64; n_buses];
                for &(slot, child, parent, child_is_from) in &order {
                    let s = if pattern >> slot & 1 == 1 { 1 } else { -1 };
                    // delta_from - delta_to = s * gamma
                    units[child] = if child_is_from { units[parent] + s } else { units[parent] - s };
                }
                if edges.iter().all(|&(u, v)| (units[u] - units[v]).abs() <= 1) && seen.insert(units.clone()) {
                    out.push(units.iter().map(|&m| m as f64 * gamma).collect());
                }
            }
        }
        // next combination
        let mut i = k;
        loop {
            if i == 0 {
                return Vertices::Found(out);
            }
            i -= 1;
            if combo[i] < edges.len() - k + i {
                break;
            }
        }
        combo[i] += 1;
        for j in i + 1..k {
            combo[j] = combo[j - 1] + 1;
        }
    }
}

/// BFS order `(slot in combo, child, parent, child is the edge's first
/// endpoint)` when the chosen edges form a spanning tree.
fn tree_order(
    n: usize,
    edges: &[(usize, usize)],
    combo: &[usize],
    root: usize,
) -> Option<Vec<(usize, usize, usize, bool)>> {
    let mut visited = vec![false; n];
    visited[root] = true;
    let mut order = Vec::with_capacity(n - 1);
    let mut frontier = vec![root];
    while let Some(node) = frontier.pop() {
        for (slot, &e) in combo.iter().enumerate() {
            let (u, v) = edges[e];
            let (child, is_from) = if u == node {
                (v, false)
            } else if v == node {
                (u, true)
            } else {
                continue;
            };
            if !visited[child] {
                visited[child] = true;
                order.push((slot, child, node, is_from));
                frontier.push(child);
            }
        }
    }
    (order.len() == n - 1).then_some(order)
}
