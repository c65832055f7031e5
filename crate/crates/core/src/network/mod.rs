//! Grid description: buses, lines, parsing and normalization.

mod matpower;
mod native;

pub use matpower::parse_matpower_case;
pub use native::parse_network_native;

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BusKind {
    Generator,
    Load,
    Infinite,
}

impl BusKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BusKind::Generator => "generator",
            BusKind::Load => "load",
            BusKind::Infinite => "infinite",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    /// External identifier from the input file.
    pub id: i64,
    pub kind: BusKind,
    pub voltage: f64,
    /// Zero for load and infinite buses.
    pub inertia: f64,
    /// Zero for infinite buses.
    pub damping: f64,
    /// Net injection in per unit; ignored for infinite buses.
    pub injection: f64,
}

/// Marks lines that `normalize_network` is expected to act on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LineFlag {
    None,
    /// The source lists zero susceptance for this branch (MATPOWER `b` column,
    /// or `B = 0` in a native file).
    ZeroSusceptance,
    /// Zero series reactance; the coupling is undefined.
    ZeroReactance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Line {
    /// Bus index (position in `PowerNetwork::buses`), always `from < to`.
    pub from: usize,
    pub to: usize,
    pub susceptance: f64,
    /// `V_from * V_to * susceptance`.
    pub coupling: f64,
    pub flag: LineFlag,
}

/// Line as read from a file, endpoints given by external bus id.
#[derive(Debug, Clone, PartialEq)]
pub struct RawLine {
    pub from: i64,
    pub to: i64,
    pub susceptance: f64,
    pub flag: LineFlag,
}

/// Buses are ordered generators, loads, infinite; lines are sorted by
/// `(from, to)` and that order defines the edge ordering everywhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerNetwork {
    pub buses: Vec<Bus>,
    pub lines: Vec<Line>,
}

impl PowerNetwork {
    /// Validates, reorders and indexes a raw bus/line description.
    pub fn from_raw(buses: Vec<Bus>, lines: Vec<RawLine>) -> Result<Self> {
        let mut seen = BTreeMap::new();
        for b in &buses {
            if seen.insert(b.id, ()).is_some() {
                return Err(Error::DuplicateBus(b.id));
            }
            check_bus(b)?;
        }
        if buses.iter().filter(|b| b.kind == BusKind::Infinite).count() > 1 {
            return Err(Error::InvalidNetwork(
                "at most one infinite bus is supported".into(),
            ));
        }
        let mut ordered = buses;
        ordered.sort_by_key(|b| b.kind);
        let index: BTreeMap<i64, usize> =
            ordered.iter().enumerate().map(|(i, b)| (b.id, i)).collect();
        let mut out = Vec::with_capacity(lines.len());
        for l in lines {
            let f = *index.get(&l.from).ok_or(Error::UnknownEndpoint(l.from))?;
            let t = *index.get(&l.to).ok_or(Error::UnknownEndpoint(l.to))?;
            if f == t {
                return Err(Error::InvalidNetwork(format!("self-loop at bus {}", l.from)));
            }
            if !(l.susceptance >= 0.0) || !l.susceptance.is_finite() {
                return Err(Error::InvalidNetwork(format!(
                    "line {}-{}: susceptance must be finite and nonnegative",
                    l.from, l.to
                )));
            }
            let (from, to) = (f.min(t), f.max(t));
            let mut flag = l.flag;
            if flag == LineFlag::None && l.susceptance == 0.0 {
                flag = LineFlag::ZeroSusceptance;
            }
            out.push(Line {
                from,
                to,
                susceptance: l.susceptance,
                coupling: ordered[from].voltage * ordered[to].voltage * l.susceptance,
                flag,
            });
        }
        out.sort_by_key(|a| (a.from, a.to));
        Ok(PowerNetwork {
            buses: ordered,
            lines: out,
        })
    }

    pub fn n_buses(&self) -> usize {
        self.buses.len()
    }

    pub fn n_generators(&self) -> usize {
        self.count(BusKind::Generator)
    }

    pub fn n_loads(&self) -> usize {
        self.count(BusKind::Load)
    }

    /// Buses carrying state (generators and loads).
    pub fn n_dynamic(&self) -> usize {
        self.n_generators() + self.n_loads()
    }

    pub fn infinite_bus(&self) -> Option<usize> {
        self.buses.iter().position(|b| b.kind == BusKind::Infinite)
    }

    fn count(&self, kind: BusKind) -> usize {
        self.buses.iter().filter(|b| b.kind == kind).count()
    }

    pub fn bus_index(&self, id: i64) -> Option<usize> {
        self.buses.iter().position(|b| b.id == id)
    }

    /// Edge index of the line joining buses with external ids `u` and `v`.
    pub fn line_by_ids(&self, u: i64, v: i64) -> Result<usize> {
        let err = || Error::UnknownLine(u, v);
        let a = self.bus_index(u).ok_or_else(err)?;
        let b = self.bus_index(v).ok_or_else(err)?;
        self.line_index(a, b).ok_or_else(err)
    }

    /// Edge index of the line joining bus indices `a` and `b`.
    pub fn line_index(&self, a: usize, b: usize) -> Option<usize> {
        let key = (a.min(b), a.max(b));
        self.lines
            .binary_search_by(|l| (l.from, l.to).cmp(&key))
            .ok()
    }

    pub fn injections(&self) -> Vec<f64> {
        self.buses.iter().map(|b| b.injection).collect()
    }

    /// Component label per bus (labels are the smallest bus index in each component).
    pub fn components(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.n_buses()).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for l in &self.lines {
            let (a, b) = (find(&mut parent, l.from), find(&mut parent, l.to));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        (0..self.n_buses()).map(|i| find(&mut parent, i)).collect()
    }

    pub fn n_components(&self) -> usize {
        let c = self.components();
        c.iter().enumerate().filter(|&(i, &r)| i == r).count()
    }

    pub fn require_connected(&self) -> Result<()> {
        match self.n_components() {
            0 | 1 => Ok(()),
            components => Err(Error::Disconnected { components }),
        }
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("network encodes to JSON");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    /// Replaces generator inertia and generator/load damping with uniform draws.
    pub fn randomize_dynamics(
        &mut self,
        seed: u64,
        inertia: (f64, f64),
        damping: (f64, f64),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for b in &mut self.buses {
            match b.kind {
                BusKind::Generator => {
                    b.inertia = rng.random_range(inertia.0..=inertia.1);
                    b.damping = rng.random_range(damping.0..=damping.1);
                }
                BusKind::Load => b.damping = rng.random_range(damping.0..=damping.1),
                BusKind::Infinite => {}
            }
        }
    }
}

fn check_bus(b: &Bus) -> Result<()> {
    let pos = |field: &'static str, value: f64| {
        if value > 0.0 && value.is_finite() {
            Ok(())
        } else {
            Err(Error::NonPositive { id: b.id, field, value })
        }
    };
    pos("V", b.voltage)?;
    match b.kind {
        BusKind::Generator => {
            pos("m", b.inertia)?;
            pos("d", b.damping)?;
        }
        BusKind::Load => pos("d", b.damping)?,
        BusKind::Infinite => {}
    }
    if !b.injection.is_finite() {
        return Err(Error::InvalidNetwork(format!("bus {}: non-finite P", b.id)));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizeOptions {
    pub drop_zero_susceptance: bool,
    pub merge_parallel: bool,
    pub project_injections: bool,
    /// Imbalance below this is left alone.
    pub balance_tolerance: f64,
    /// Accept a disconnected result instead of failing.
    pub allow_islands: bool,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        NormalizeOptions {
            drop_zero_susceptance: true,
            merge_parallel: true,
            project_injections: true,
            balance_tolerance: 1e-9,
            allow_islands: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationReport {
    pub removed_lines: usize,
    pub merged_lines: usize,
    /// Uniform shift added to every dynamic bus of each unbalanced island,
    /// as `(component label, shift)`.
    pub injection_shifts: Vec<(usize, f64)>,
}

/// Removes flagged lines, merges parallel lines and balances injections.
pub fn normalize_network(
    net: &PowerNetwork,
    opts: &NormalizeOptions,
) -> Result<(PowerNetwork, NormalizationReport)> {
    let mut report = NormalizationReport {
        removed_lines: 0,
        merged_lines: 0,
        injection_shifts: Vec::new(),
    };
    let mut lines: Vec<Line> = Vec::with_capacity(net.lines.len());
    for l in &net.lines {
        let drop = match l.flag {
            LineFlag::None => false,
            LineFlag::ZeroSusceptance => opts.drop_zero_susceptance,
            LineFlag::ZeroReactance => true,
        };
        if drop {
            report.removed_lines += 1;
            continue;
        }
        match lines.last_mut() {
            Some(prev) if opts.merge_parallel && (prev.from, prev.to) == (l.from, l.to) => {
                prev.susceptance += l.susceptance;
                prev.coupling += l.coupling;
                report.merged_lines += 1;
            }
            _ => lines.push(l.clone()),
        }
    }
    let mut out = PowerNetwork {
        buses: net.buses.clone(),
        lines,
    };
    if !opts.allow_islands {
        out.require_connected()?;
    }
    if opts.project_injections {
        let comp = out.components();
        let mut groups: BTreeMap<usize, (f64, usize, bool)> = BTreeMap::new();
        for (i, b) in out.buses.iter().enumerate() {
            let g = groups.entry(comp[i]).or_insert((0.0, 0, false));
            if b.kind == BusKind::Infinite {
                g.2 = true;
            } else {
                g.0 += b.injection;
                g.1 += 1;
            }
        }
        for (label, (sum, count, has_inf)) in groups {
            if has_inf || count == 0 || sum.abs() <= opts.balance_tolerance {
                continue;
            }
            let shift = -sum / count as f64;
            for (i, b) in out.buses.iter_mut().enumerate() {
                if comp[i] == label && b.kind != BusKind::Infinite {
                    b.injection += shift;
                }
            }
            report.injection_shifts.push((label, shift));
        }
    }
    Ok((out, report))
}

/// Edge-by-bus incidence matrix, +1 at the lower-indexed endpoint.
pub fn build_incidence(net: &PowerNetwork) -> DMatrix<f64> {
    let mut e = DMatrix::zeros(net.lines.len(), net.n_buses());
    for (k, l) in net.lines.iter().enumerate() {
        e[(k, l.from)] = 1.0;
        e[(k, l.to)] = -1.0;
    }
    e
}
