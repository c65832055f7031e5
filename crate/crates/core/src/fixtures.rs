//! Bundled example networks and a random network generator for tests.

use crate::equilibrium::sync_condition_margin;
use crate::network::{
    normalize_network, parse_matpower_case, parse_network_native, Bus, BusKind, LineFlag,
    NormalizeOptions, PowerNetwork, RawLine,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TWO_BUS_NET: &str = include_str!("../data/2bus.net");
pub const THREE_GEN_NET: &str = include_str!("../data/3gen.net");
pub const CASE118_M: &str = include_str!("../data/case118.m");

/// Generator (m = 0.1, d = 0.15, P = 0.1) tied to an infinite bus by a 0.2 line.
pub fn two_bus() -> PowerNetwork {
    parse_network_native(TWO_BUS_NET).expect("bundled 2-bus network parses")
}

/// Three generators on a triangle.
pub fn three_gen() -> PowerNetwork {
    parse_network_native(THREE_GEN_NET).expect("bundled 3-generator network parses")
}

/// IEEE 118-bus case as parsed, before normalization.
pub fn case118_raw() -> PowerNetwork {
    parse_matpower_case(CASE118_M).expect("bundled 118-bus case parses")
}

/// 118-bus case with zero-susceptance lines dropped and parallel lines
/// merged. The result has two islands, so `allow_islands` is set.
pub fn case118() -> PowerNetwork {
    let opts = NormalizeOptions {
        allow_islands: true,
        ..NormalizeOptions::default()
    };
    normalize_network(&case118_raw(), &opts)
        .expect("bundled 118-bus case normalizes")
        .0
}

/// Connected random network with `n` buses, balanced injections and a
/// synchronization margin of at most 0.5. Roughly `load_fraction` of the
/// buses after the first are loads; every fourth seed ends in an infinite bus.
pub fn random_network(seed: u64, n: usize, load_fraction: f64) -> PowerNetwork {
    random_graph(seed, n, load_fraction, 0.3)
}

/// As `random_network` but the line graph is a spanning tree.
pub fn random_tree(seed: u64, n: usize, load_fraction: f64) -> PowerNetwork {
    random_graph(seed, n, load_fraction, 0.0)
}

fn random_graph(seed: u64, n: usize, load_fraction: f64, extra: f64) -> PowerNetwork {
    assert!(n >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let with_inf = seed.is_multiple_of(4);
    let mut buses = Vec::with_capacity(n);
    for i in 0..n {
        let kind = if i == 0 {
            BusKind::Generator
        } else if with_inf && i == n - 1 {
            BusKind::Infinite
        } else if rng.random_bool(load_fraction) {
            BusKind::Load
        } else {
            BusKind::Generator
        };
        buses.push(Bus {
            id: i as i64 + 1,
            kind,
            voltage: rng.random_range(0.95..1.05),
            inertia: if kind == BusKind::Generator { rng.random_range(0.5..4.0) } else { 0.0 },
            damping: if kind == BusKind::Infinite { 0.0 } else { rng.random_range(0.5..2.0) },
            injection: if kind == BusKind::Infinite { 0.0 } else { rng.random_range(-1.0..1.0) },
        });
    }
    let mut lines = Vec::new();
    for i in 1..n {
        let j = rng.random_range(0..i);
        lines.push((j, i));
    }
    for i in 0..n {
        for j in i + 1..n {
            if !lines.contains(&(i, j)) && rng.random_bool(extra) {
                lines.push((i, j));
            }
        }
    }
    let raw: Vec<RawLine> = lines
        .into_iter()
        .map(|(i, j)| RawLine {
            from: i as i64 + 1,
            to: j as i64 + 1,
            susceptance: rng.random_range(0.5..2.0),
            flag: LineFlag::None,
        })
        .collect();
    if !with_inf {
        let mean = buses.iter().map(|b| b.injection).sum::<f64>() / n as f64;
        for b in &mut buses {
            b.injection -= mean;
        }
    }
    let mut net = PowerNetwork::from_raw(buses, raw).expect("random network is valid");
    let margin = sync_condition_margin(&net);
    if margin > 0.5 {
        for b in &mut net.buses {
            b.injection *= 0.5 / margin;
        }
    }
    net
}
