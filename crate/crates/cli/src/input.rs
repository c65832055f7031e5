//! Parsing of command-line values and input files.

use gridcert_core::network::NormalizeOptions;
use gridcert_core::{
    fixtures, normalize_network, parse_matpower_case, parse_network_native, Error, LureSystem,
    PowerNetwork, Result, SolverSettings,
};
use std::path::Path;

pub fn load_network(spec: &str, seed: Option<u64>) -> Result<PowerNetwork> {
    let mut net = match spec {
        "2bus" => fixtures::two_bus(),
        "3gen" => fixtures::three_gen(),
        "case118" => fixtures::case118(),
        path => {
            let text = std::fs::read_to_string(path)?;
            if Path::new(path).extension().is_some_and(|e| e == "m") {
                let opts = NormalizeOptions {
                    allow_islands: true,
                    ..NormalizeOptions::default()
                };
                normalize_network(&parse_matpower_case(&text)?, &opts)?.0
            } else {
                parse_network_native(&text)?
            }
        }
    };
    if let Some(seed) = seed {
        net.randomize_dynamics(seed, (2.0, 4.0), (1.0, 2.0));
    }
    Ok(net)
}

/// Accepts a number, `pi`, `pi/N`, `K*pi/N` or `Kpi/N`.
pub fn parse_angle(text: &str) -> Result<f64> {
    let bad = || Error::InvalidArgument(format!("cannot read angle {text:?}"));
    let t = text.trim().to_ascii_lowercase();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim().parse::<f64>().map_err(|_| bad())?),
        None => (t.as_str(), 1.0),
    };
    let value = if let Some(k) = num.strip_suffix("pi") {
        let k = k.trim().trim_end_matches('*').trim();
        let k: f64 = match k {
            "" | "+" => 1.0,
            "-" => -1.0,
            k => k.parse().map_err(|_| bad())?,
        };
        k * std::f64::consts::PI
    } else {
        num.parse::<f64>().map_err(|_| bad())?
    };
    let v = value / den;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

/// Comma-separated state. A vector with one entry per non-infinite bus is
/// read as angles and padded with zero velocities.
pub fn parse_state(text: &str, sys: &LureSystem) -> Result<Vec<f64>> {
    let vals: Vec<f64> = text
        .split(',')
        .map(|s| {
            parse_angle(s).map_err(|_| Error::InvalidArgument(format!("cannot read state entry {s:?}")))
        })
        .collect::<Result<_>>()?;
    let l = sys.layout;
    if vals.len() == l.dim() {
        Ok(vals)
    } else if vals.len() == l.n_gen + l.n_load {
        let mut angles = vals;
        angles.resize(sys.n_buses, 0.0);
        Ok(l.pad_angles(&angles).as_slice().to_vec())
    } else {
        Err(Error::Dimension(format!(
            "state has {} entries, expected {} (full state) or {} (angles)",
            vals.len(),
            l.dim(),
            l.n_gen + l.n_load
        )))
    }
}

/// `u-v` bus ids to an edge index.
pub fn parse_edge(text: &str, net: &PowerNetwork) -> Result<usize> {
    let (u, v) = text
        .split_once('-')
        .ok_or_else(|| Error::InvalidArgument(format!("line {text:?} is not of the form u-v")))?;
    let id = |s: &str| {
        s.trim()
            .parse::<i64>()
            .map_err(|_| Error::InvalidArgument(format!("bad bus id {s:?}")))
    };
    net.line_by_ids(id(u)?, id(v)?)
}

pub fn edge_label(net: &PowerNetwork, e: usize) -> String {
    let l = &net.lines[e];
    format!("{}-{}", net.buses[l.from].id, net.buses[l.to].id)
}

/// Settings from `path`, else from the environment variable, else defaults.
pub fn load_settings(path: Option<&Path>) -> Result<SolverSettings> {
    let from_env = std::env::var_os(crate::SETTINGS_ENV).map(std::path::PathBuf::from);
    match path.map(Path::to_path_buf).or(from_env) {
        Some(p) => Ok(serde_json::from_str(&std::fs::read_to_string(p)?)?),
        None => Ok(SolverSettings::default()),
    }
}

/// `u-v tau` per line; blank lines and `#` comments are skipped.
pub fn parse_contingencies(text: &str, net: &PowerNetwork) -> Result<Vec<(usize, f64)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let err = |msg: String| Error::Parse { line: i + 1, msg };
        let (Some(edge), Some(tau), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(err("expected `u-v tau`".into()));
        };
        let e = parse_edge(edge, net).map_err(|e| err(e.to_string()))?;
        let tau: f64 = tau.parse().map_err(|_| err(format!("bad clearing time {tau:?}")))?;
        if !(tau >= 0.0) {
            return Err(err("clearing time must be non-negative".into()));
        }
        out.push((e, tau));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use gridcert_core::build_lure_system;
    use std::f64::consts::PI;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi/6").unwrap(), PI / 6.0);
        assert_eq!(parse_angle("2*pi/7").unwrap(), 2.0 * PI / 7.0);
        assert_eq!(parse_angle("2pi/7").unwrap(), 2.0 * PI / 7.0);
        assert_eq!(parse_angle(" 0.5 ").unwrap(), 0.5);
        assert_eq!(parse_angle("-pi/6").unwrap(), -PI / 6.0);
        assert!(parse_angle("pie").is_err());
        assert!(parse_angle("1/0").is_err());
    }

    #[test]
    fn states() {
        let net = fixtures::three_gen();
        let sys = build_lure_system(&net);
        assert_eq!(parse_state("0.1,0.2,0.3", &sys).unwrap(), vec![0.1, 0.2, 0.3, 0.0, 0.0, 0.0]);
        assert_eq!(parse_state("1,2,3,4,5,6", &sys).unwrap().len(), 6);
        assert!(parse_state("1,2", &sys).is_err());
    }

    #[test]
    fn contingencies() {
        let net = fixtures::three_gen();
        let list = parse_contingencies("# header\n1-2 0.1\n\n3-2 0.05 # reversed\n", &net).unwrap();
        assert_eq!(list, vec![(0, 0.1), (2, 0.05)]);
        assert!(parse_contingencies("1-4 0.1\n", &net).is_err());
        assert!(parse_contingencies("1-2\n", &net).is_err());
        assert!(parse_contingencies("1-2 -1\n", &net).is_err());
        assert!(parse_contingencies("", &net).unwrap().is_empty());
    }
}
