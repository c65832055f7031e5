//! Native text format.
//!
//! ```text
//! # comments start with '#', blank lines are ignored
//! [buses]
//! # id  kind       V      m    d     P
//! 1     generator  1.0    0.1  0.15  0.1
//! 2     infinite   1.0    -    -     -
//! [lines]
//! # from  to  B
//! 1       2   0.2
//! ```
//!
//! `kind` is `generator`, `load` or `infinite`. Fields that do not apply to a
//! kind (`m` for loads, `m d P` for infinite buses) may be written as `-`.
//! Columns are separated by whitespace or commas.

use super::{Bus, BusKind, LineFlag, PowerNetwork, RawLine};
use crate::error::{Error, Result};

enum Section {
    None,
    Buses,
    Lines,
}

pub fn parse_network_native(text: &str) -> Result<PowerNetwork> {
    let mut section = Section::None;
    let mut buses = Vec::new();
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if body.starts_with('[') {
            section = match body {
                "[buses]" => Section::Buses,
                "[lines]" => Section::Lines,
                other => return Err(perr(lineno, format!("unknown section {other}"))),
            };
            continue;
        }
        let cols: Vec<&str> = body
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .collect();
        match section {
            Section::None => return Err(perr(lineno, "data outside a section".into())),
            Section::Buses => buses.push(parse_bus(lineno, &cols)?),
            Section::Lines => {
                if cols.len() != 3 {
                    return Err(perr(lineno, format!("expected 3 columns, found {}", cols.len())));
                }
                lines.push(RawLine {
                    from: int(lineno, "from", cols[0])?,
                    to: int(lineno, "to", cols[1])?,
                    susceptance: num(lineno, "B", cols[2])?,
                    flag: LineFlag::None,
                });
            }
        }
    }
    if buses.is_empty() {
        return Err(perr(0, "no [buses] entries".into()));
    }
    let net = PowerNetwork::from_raw(buses, lines)?;
    let live = PowerNetwork {
        buses: net.buses.clone(),
        lines: net
            .lines
            .iter()
            .filter(|l| l.flag == LineFlag::None)
            .cloned()
            .collect(),
    };
    live.require_connected()?;
    Ok(net)
}

fn parse_bus(lineno: usize, cols: &[&str]) -> Result<Bus> {
    if cols.len() != 6 {
        return Err(perr(lineno, format!("expected 6 columns, found {}", cols.len())));
    }
    let kind = match cols[1] {
        "generator" => BusKind::Generator,
        "load" => BusKind::Load,
        "infinite" => BusKind::Infinite,
        other => return Err(perr(lineno, format!("field kind: unknown bus kind {other:?}"))),
    };
    let opt = |name: &str, s: &str| -> Result<f64> {
        if s == "-" {
            Ok(0.0)
        } else {
            num(lineno, name, s)
        }
    };
    let bus = Bus {
        id: int(lineno, "id", cols[0])?,
        kind,
        voltage: num(lineno, "V", cols[2])?,
        inertia: opt("m", cols[3])?,
        damping: opt("d", cols[4])?,
        injection: opt("P", cols[5])?,
    };
    Ok(match kind {
        BusKind::Generator => bus,
        BusKind::Load => Bus { inertia: 0.0, ..bus },
        BusKind::Infinite => Bus {
            inertia: 0.0,
            damping: 0.0,
            injection: 0.0,
            ..bus
        },
    })
}

fn perr(line: usize, msg: String) -> Error {
    Error::Parse { line, msg }
}

fn num(line: usize, field: &str, s: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| perr(line, format!("field {field}: cannot parse {s:?} as a number")))
}

fn int(line: usize, field: &str, s: &str) -> Result<i64> {
    s.parse::<i64>()
        .map_err(|_| perr(line, format!("field {field}: cannot parse {s:?} as an integer")))
}
