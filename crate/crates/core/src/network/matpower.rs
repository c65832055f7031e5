//! Numeric subset of MATPOWER case files.
//!
//! Recognized statements are `mpc.baseMVA = <num>;` and the `mpc.bus`,
//! `mpc.gen` and `mpc.branch` matrices; everything else is skipped.
//! Dynamic parameters are not part of the format, so every generator gets
//! `m = d = 1` and every load `d = 1`; see `PowerNetwork::randomize_dynamics`.

use super::{Bus, BusKind, LineFlag, PowerNetwork, RawLine};
use crate::error::{Error, Result};
use std::collections::BTreeMap;

struct Matrix {
    rows: Vec<(usize, Vec<f64>)>,
}

pub fn parse_matpower_case(text: &str) -> Result<PowerNetwork> {
    let mut base_mva = None;
    let mut mats: BTreeMap<String, Matrix> = BTreeMap::new();
    let mut current: Option<(String, Matrix)> = None;
    let mut skipping = false;

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('%').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if skipping {
            if line.contains("];") || line.contains("};") {
                skipping = false;
            }
            continue;
        }
        if let Some((_, m)) = current.as_mut() {
            let (body, done) = match line.find(']') {
                Some(p) => (&line[..p], true),
                None => (line, false),
            };
            for row in body.split(';') {
                let vals = parse_row(lineno, row)?;
                if !vals.is_empty() {
                    m.rows.push((lineno, vals));
                }
            }
            if done {
                let (name, m) = current.take().unwrap();
                mats.insert(name, m);
            }
            continue;
        }
        let Some(rest) = line.strip_prefix("mpc.") else {
            continue;
        };
        let Some((name, value)) = rest.split_once('=') else {
            continue;
        };
        let name = name.trim();
        let value = value.trim();
        if name == "baseMVA" {
            let v = value.trim_end_matches(';').trim();
            base_mva = Some(v.parse::<f64>().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("cannot parse baseMVA value {v:?}"),
            })?);
        } else if let Some(after) = value.strip_prefix('[') {
            let wanted = matches!(name, "bus" | "gen" | "branch");
            let closes = after.contains(']');
            if !wanted {
                skipping = !closes;
                continue;
            }
            let mut m = Matrix { rows: Vec::new() };
            let body = after.split(']').next().unwrap_or("");
            for row in body.split(';') {
                let vals = parse_row(lineno, row)?;
                if !vals.is_empty() {
                    m.rows.push((lineno, vals));
                }
            }
            if closes {
                mats.insert(name.to_string(), m);
            } else {
                current = Some((name.to_string(), m));
            }
        } else if value.starts_with('{') && !value.contains('}') {
            skipping = true;
        }
    }
    if current.is_some() {
        return Err(Error::Parse {
            line: text.lines().count(),
            msg: "unterminated matrix".into(),
        });
    }
    let base = base_mva.ok_or(Error::MissingBaseMva)?;
    let get = |name: &str| {
        mats.get(name).ok_or_else(|| Error::Parse {
            line: 0,
            msg: format!("missing mpc.{name} matrix"),
        })
    };
    let bus_m = get("bus")?;
    let gen_m = get("gen")?;
    let br_m = get("branch")?;

    let mut pg: BTreeMap<i64, f64> = BTreeMap::new();
    for (lineno, r) in &gen_m.rows {
        need(*lineno, r, 8, "gen")?;
        let e = pg.entry(r[0] as i64).or_insert(0.0);
        if r[7] > 0.0 {
            *e += r[1];
        }
    }
    let mut buses = Vec::with_capacity(bus_m.rows.len());
    for (lineno, r) in &bus_m.rows {
        need(*lineno, r, 8, "bus")?;
        let id = r[0] as i64;
        let is_gen = pg.contains_key(&id);
        let p = (pg.get(&id).copied().unwrap_or(0.0) - r[2]) / base;
        buses.push(Bus {
            id,
            kind: if is_gen { BusKind::Generator } else { BusKind::Load },
            voltage: r[7],
            inertia: if is_gen { 1.0 } else { 0.0 },
            damping: 1.0,
            injection: p,
        });
    }
    let mut lines = Vec::with_capacity(br_m.rows.len());
    for (lineno, r) in &br_m.rows {
        need(*lineno, r, 11, "branch")?;
        if r[10] <= 0.0 {
            continue;
        }
        let x = r[3];
        let (susceptance, flag) = if x == 0.0 {
            (0.0, LineFlag::ZeroReactance)
        } else if r[4] == 0.0 {
            (1.0 / x.abs(), LineFlag::ZeroSusceptance)
        } else {
            (1.0 / x.abs(), LineFlag::None)
        };
        lines.push(RawLine {
            from: r[0] as i64,
            to: r[1] as i64,
            susceptance,
            flag,
        });
    }
    PowerNetwork::from_raw(buses, lines)
}

fn need(line: usize, r: &[f64], n: usize, what: &str) -> Result<()> {
    if r.len() < n {
        return Err(Error::Parse {
            line,
            msg: format!("{what} row has {} columns, need at least {n}", r.len()),
        });
    }
    Ok(())
}

fn parse_row(line: usize, row: &str) -> Result<Vec<f64>> {
    row.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>().map_err(|_| Error::Parse {
                line,
                msg: format!("malformed matrix entry {s:?}"),
            })
        })
        .collect()
}
