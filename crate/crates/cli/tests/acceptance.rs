//! Acceptance criteria 1-10, one PASS/FAIL line each. Exits non-zero when
//! any criterion fails. Set `GRIDCERT_SLOW=1` to add the optional 118-bus
//! resiliency solve.

use gridcert_core::certify::{compute_vmin_full_face, DEFAULT_VERTEX_CAP, RELATIVE_SLACK};
use gridcert_core::lmi::Validation;
use gridcert_core::sim::{equilibrium_at, verify_stability_by_simulation};
use gridcert_core::*;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, PI};
use std::process::Command;
use std::time::Instant;

const ROBUST_P: [f64; 4] = [0.8228, 0.1402, 0.1402, 0.5797];
const RESILIENCY_P: [f64; 4] = [0.0822, 0.0370, 0.0370, 0.0603];
const THREE_GEN_P: [f64; 36] = [
    2.4376, 1.7501, 1.8190, 4.0789, 3.9566, 3.9780, //
    1.7501, 2.3991, 1.8576, 3.9639, 4.0710, 3.9785, //
    1.8190, 1.8576, 2.3302, 3.9707, 3.9859, 4.0569, //
    4.0789, 3.9639, 3.9707, 17.2977, 16.6333, 16.7452, //
    3.9566, 4.0710, 3.9859, 16.6333, 17.2425, 16.8003, //
    3.9780, 3.9785, 4.0569, 16.7452, 16.8003, 17.1306,
];

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(cond: bool, what: String, notes: &mut Vec<String>) -> bool {
    if !cond {
        notes.push(format!("FAILED {what}"));
    } else {
        notes.push(what);
    }
    cond
}

fn finish(ok: bool, notes: Vec<String>, started: Instant, budget: f64) -> Outcome {
    let secs = started.elapsed().as_secs_f64();
    let in_time = secs <= budget;
    Outcome {
        pass: ok && in_time,
        detail: format!(
            "{}; {secs:.2} s (budget {budget} s{})",
            notes.join("; "),
            if in_time { "" } else { ", EXCEEDED" }
        ),
    }
}

fn two_bus() -> (PowerNetwork, LureSystem, EquilibriumPoint) {
    let net = fixtures::two_bus();
    let sys = build_lure_system(&net);
    let eq = solve_equilibrium(&net, None).unwrap();
    (net, sys, eq)
}

fn issue(
    kind: CertificateKind,
    p: DMatrix<f64>,
    sys: &LureSystem,
    eq: Option<&EquilibriumPoint>,
    gamma: f64,
    mu_target: Option<(f64, FaultTarget)>,
    validation: Validation,
) -> Certificate {
    Certificate::issue(
        kind,
        p,
        sys,
        eq,
        sector_gain(gamma).unwrap(),
        gamma,
        mu_target,
        validation,
        Backend::InteriorPoint,
        String::new(),
    )
    .unwrap()
}

fn unvalidated() -> Validation {
    Validation {
        residual: f64::NAN,
        min_eig_p: f64::NAN,
    }
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = f64::INFINITY;
    for _ in 0..100_000 {
        let gamma = rng.random_range(0.0..FRAC_PI_2);
        let d = rng.random_range(-FRAC_PI_2..=FRAC_PI_2);
        let ds = rng.random_range(-gamma..=gamma);
        let g = sector_gain(gamma).unwrap();
        let u = d - ds;
        let f = d.sin() - ds.sin();
        worst = worst.min(u * f - g * u * u).min(u * u - u * f);
    }
    let mut notes = Vec::new();
    let ok = check(worst >= -1e-12, format!("worst slack {worst:.3e} over 1e5 samples"), &mut notes);
    finish(ok, notes, t, 5.0)
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let mut notes = Vec::new();
    let (_, _, eq) = two_bus();
    let e2 = (eq.angles[0] - PI / 6.0).abs();
    let mut ok = check(e2 <= 1e-10, format!("2-bus |delta* - pi/6| = {e2:.2e}"), &mut notes);
    let eq3 = solve_equilibrium(&fixtures::three_gen(), None).unwrap();
    let want = [-0.6634, -0.5046, -0.5640];
    let shift = (0..3).map(|k| want[k] - eq3.angles[k]).sum::<f64>() / 3.0;
    let e3 = (0..3).map(|k| (eq3.angles[k] + shift - want[k]).abs()).fold(0.0, f64::max);
    ok &= check(e3 <= 5e-4, format!("3-gen aligned max error {e3:.2e}"), &mut notes);
    finish(ok, notes, t, 1.0)
}

fn criterion_3() -> Outcome {
    let t = Instant::now();
    let mut notes = Vec::new();
    let (_, sys, _) = two_bus();
    let g = sector_gain(PI / 6.0).unwrap();
    let specs = [
        ("stability", assemble_stability_lmi(&sys, g).unwrap(), ROBUST_P),
        (
            "resiliency mu=6",
            assemble_resiliency_lmi(&sys, g, 6.0, FaultTarget::Line(0)).unwrap(),
            RESILIENCY_P,
        ),
    ];
    let mut ok = true;
    for (name, spec, printed) in &specs {
        let v = spec.validate(&DMatrix::from_row_slice(2, 2, printed));
        ok &= check(
            v.residual <= 5e-3 && v.min_eig_p > 0.0,
            format!("printed {name} P residual {:.2e}", v.residual),
            &mut notes,
        );
        let r = solve_lmi(spec, &SolverSettings::default());
        ok &= check(
            r.status == FeasibilityStatus::Feasible && r.residual <= 1e-8,
            format!("own {name} P {:?} residual {:.2e}", r.status, r.residual),
            &mut notes,
        );
    }
    finish(ok, notes, t, 10.0)
}

fn criterion_4() -> Outcome {
    let t = Instant::now();
    let mut notes = Vec::new();
    let (_, sys, eq) = two_bus();
    let v = compute_vmin(&DMatrix::from_row_slice(2, 2, &RESILIENCY_P), &eq.edge_diffs, &sys).unwrap();
    let mut ok = check((v - 0.0901).abs() <= 2e-3, format!("2-bus V_min {v:.4}"), &mut notes);
    ok &= check(
        (6.0 * v - 0.5406).abs() <= 1.2e-2,
        format!("2-bus mu*V_min {:.4}", 6.0 * v),
        &mut notes,
    );
    let net3 = fixtures::three_gen();
    let sys3 = build_lure_system(&net3);
    let eq3 = solve_equilibrium(&net3, None).unwrap();
    let p3 = DMatrix::from_row_slice(6, 6, &THREE_GEN_P);
    let v3 = compute_vmin(&p3, &eq3.edge_diffs, &sys3).unwrap();
    let full = compute_vmin_full_face(&p3, &eq3.edge_diffs, &sys3).unwrap();
    ok &= check(
        (v3 - 0.5536).abs() <= 1e-2,
        format!("3-gen V_min {v3:.4} (target 0.5536; full-face value {full:.4})"),
        &mut notes,
    );
    finish(ok, notes, t, 1.0)
}

/// Oracle reports of criterion 5 and 6, reused by criterion 7.
#[derive(Default)]
struct Trajectories {
    reports: Vec<(String, OracleReport)>,
}

fn criterion_5(traj: &mut Trajectories) -> Outcome {
    let t = Instant::now();
    let mut notes = Vec::new();
    let (_, sys, eq) = two_bus();
    let gamma = PI / 6.0;
    let g = sector_gain(gamma).unwrap();
    let x0 = [0.5, 0.5];
    let found = search_p_for_state(&sys, g, &x0, gamma, &SolverSettings::default(), 40).expect("stability LMI is feasible");
    let cert = issue(
        CertificateKind::RobustStability,
        found.p.clone(),
        &sys,
        None,
        gamma,
        None,
        found.validation,
    );
    let r = certify_robust_stability(&cert, &sys, &x0, gamma, DEFAULT_VERTEX_CAP).unwrap();
    let mut ok = check(
        r.is_certified(),
        format!("robust verdict {:?}, margin {:.4e}", r.verdict, r.margin),
        &mut notes,
    );
    let stab = issue(CertificateKind::Stability, found.p, &sys, Some(&eq), gamma, None, found.validation);
    for d in [-gamma, 0.0, gamma] {
        let target = equilibrium_at(&sys, vec![d, 0.0]);
        let rep = verify_stability_by_simulation(&sys, &stab, &x0, &target, 50.0, 1e-3, &IntegratorSettings::default())
            .unwrap();
        ok &= check(
            rep.converged,
            format!("converges to {d:+.4} (error {:.1e})", rep.terminal_error),
            &mut notes,
        );
        traj.reports.push((format!("robust 2-bus delta*={d:+.4}"), rep));
    }
    finish(ok, notes, t, 30.0)
}

fn criterion_6(traj: &mut Trajectories) -> Outcome {
    let t = Instant::now();
    let mut notes = Vec::new();
    let gamma = PI / 6.0;
    let cfg = IntegratorSettings::default();
    let (_, sys, eq) = two_bus();
    let cert = issue(
        CertificateKind::ResiliencyLine,
        DMatrix::from_row_slice(2, 2, &RESILIENCY_P),
        &sys,
        Some(&eq),
        gamma,
        Some((6.0, FaultTarget::Line(0))),
        unvalidated(),
    );
    let mut ok = true;
    let r = certify_resiliency(&cert, &sys, 0.5, None).unwrap();
    ok &= check(r.is_certified(), format!("2-bus tau=0.5 {:?}", r.verdict), &mut notes);
    let sc = FaultScenario::new(&sys, 0, 0.5, eq.clone(), eq.clone()).unwrap();
    let rep = verify_certificate_by_simulation(&sys, &cert, &sc, 50.0, 1e-3, &cfg).unwrap();
    ok &= check(rep.confirmed(), format!("2-bus tau=0.5 oracle {:?}", rep.violations()), &mut notes);
    traj.reports.push(("2-bus tau=0.5".into(), rep));
    let r = certify_resiliency(&cert, &sys, 0.6, None).unwrap();
    ok &= check(!r.is_certified(), format!("2-bus tau=0.6 {:?}", r.verdict), &mut notes);

    let net = fixtures::three_gen();
    let sys = build_lure_system(&net);
    let eq = solve_equilibrium(&net, None).unwrap();
    let g = sector_gain(gamma).unwrap();
    let spec = assemble_resiliency_lmi(&sys, g, 0.3, FaultTarget::AllLines).unwrap();
    let sol = solve_lmi(&spec, &SolverSettings::default());
    if sol.status != FeasibilityStatus::Feasible {
        notes.push(format!("FAILED 3-gen mu=0.3 LMI {:?}", sol.status));
        return finish(false, notes, t, 60.0);
    }
    let cert = issue(
        CertificateKind::ResiliencyAll,
        sol.p.unwrap(),
        &sys,
        Some(&eq),
        gamma,
        Some((0.3, FaultTarget::AllLines)),
        Validation {
            residual: sol.residual,
            min_eig_p: sol.min_eig_p,
        },
    );
    notes.push(format!("3-gen mu*V_min {:.4}", cert.tau_max.unwrap()));
    let r = certify_robust_resiliency(&cert, 0.1).unwrap();
    ok &= check(r.is_certified(), format!("3-gen tau=0.1 {:?}", r.verdict), &mut notes);
    for e in 0..3 {
        let sc = FaultScenario::new(&sys, e, 0.1, eq.clone(), eq.clone()).unwrap();
        let rep = verify_certificate_by_simulation(&sys, &cert, &sc, 50.0, 1e-3, &cfg).unwrap();
        ok &= check(rep.confirmed(), format!("3-gen line {e} oracle {:?}", rep.violations()), &mut notes);
        traj.reports.push((format!("3-gen line {e} tau=0.1"), rep));
    }
    let r = certify_robust_resiliency(&cert, 0.2).unwrap();
    ok &= check(!r.is_certified(), format!("3-gen tau=0.2 {:?}", r.verdict), &mut notes);
    finish(ok, notes, t, 60.0)
}

fn criterion_7(traj: &Trajectories) -> Outcome {
    let t = Instant::now();
    let mut notes = Vec::new();
    let mut ok = !traj.reports.is_empty();
    for (name, rep) in &traj.reports {
        ok &= check(
            rep.monotone && rep.growth_bound_holds,
            format!(
                "{name}: max dV {:.1e}, growth excess {}",
                rep.max_v_increase,
                rep.max_growth_excess.map_or("n/a".into(), |x| format!("{x:.1e}"))
            ),
            &mut notes,
        );
    }
    finish(ok, notes, t, f64::INFINITY)
}

fn scaled(net: &PowerNetwork, factor: f64) -> PowerNetwork {
    let mut n = net.clone();
    for b in n.buses.iter_mut().take(16) {
        b.injection *= factor;
    }
    n
}

fn criterion_8() -> Outcome {
    let t = Instant::now();
    let mut notes = Vec::new();
    let net = fixtures::case118();
    let mut ok = check(net.lines.len() == 170, format!("{} lines after normalization", net.lines.len()), &mut notes);
    let e = net.line_index(18, 20).expect("line {19,21} exists");
    let mut tripped = net.clone();
    tripped.lines.remove(e);
    let mut matched = Vec::new();
    let mut trip_margins = Vec::new();
    for (name, w) in [
        ("weighted", LaplacianWeighting::Coupling),
        ("unweighted", LaplacianWeighting::Combinatorial),
    ] {
        let up = sync_condition_margin_with(&scaled(&net, 1.5), w);
        let down = sync_condition_margin_with(&scaled(&net, 0.5), w);
        let trip = sync_condition_margin_with(&tripped, w);
        notes.push(format!("{name}: +50% {up:.4}, -50% {down:.4}, tripped {trip:.4}"));
        if (up - 0.1039).abs() <= 0.1 * 0.1039 && (down - 0.0762).abs() <= 0.1 * 0.0762 {
            matched.push(name);
        }
        trip_margins.push((name, trip));
    }
    ok &= check(!matched.is_empty(), format!("variants within 10% of 0.1039/0.0762: {matched:?}"), &mut notes);
    let checked: Vec<_> = trip_margins
        .iter()
        .filter(|(n, _)| matched.is_empty() || matched.contains(n))
        .collect();
    ok &= check(
        checked.iter().all(|(_, m)| *m > 1.0),
        format!("tripped margin exceeds 1 for {:?}", checked.iter().map(|(n, _)| *n).collect::<Vec<_>>()),
        &mut notes,
    );

    let mut seeded = net.clone();
    seeded.randomize_dynamics(1, (2.0, 4.0), (1.0, 2.0));
    let sys = build_lure_system(&seeded);
    let spec = assemble_stability_lmi(&sys, sector_gain(PI / 12.0).unwrap()).unwrap();
    let block = spec.block_dim();
    let r = solve_lmi(&spec, &SolverSettings::default());
    ok &= check(
        block == 342 && r.status == FeasibilityStatus::Feasible && r.residual <= 1e-6,
        format!(
            "{block}-dim stability LMI {:?} via {:?}, residual {:.2e}{}",
            r.status,
            r.backend,
            r.residual,
            r.note.as_ref().map_or(String::new(), |n| format!(" ({n})"))
        ),
        &mut notes,
    );
    if std::env::var_os("GRIDCERT_SLOW").is_some() {
        let spec = assemble_resiliency_lmi(&sys, sector_gain(PI / 12.0).unwrap(), 0.11, FaultTarget::Line(e)).unwrap();
        let r = solve_lmi(&spec, &SolverSettings::default());
        notes.push(format!("resiliency LMI mu=0.11 {:?}, residual {:.2e}", r.status, r.residual));
    }
    finish(ok, notes, t, 3600.0)
}

/// Three load buses and an infinite bus, at most five lines: the state is
/// the three load angles, so boundary faces can be scanned on a lattice.
fn random_four_bus(seed: u64) -> PowerNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut text = String::from("[buses]\n");
    for k in 1..=3 {
        text += &format!(
            "{k} load 1 - {:.3} {:.3}\n",
            rng.random_range(1.0..2.0),
            rng.random_range(-0.1..0.1)
        );
    }
    text += "4 infinite 1 - - -\n[lines]\n";
    let mut pairs = vec![(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)];
    // random spanning tree, then up to two extra lines
    let mut chosen = Vec::new();
    let mut joined = vec![4];
    while joined.len() < 4 {
        let cand: Vec<usize> = (0..pairs.len())
            .filter(|&i| joined.contains(&pairs[i].0) != joined.contains(&pairs[i].1))
            .collect();
        let (a, b) = pairs.remove(cand[rng.random_range(0..cand.len())]);
        joined.push(if joined.contains(&a) { b } else { a });
        chosen.push((a, b));
    }
    for _ in 0..rng.random_range(0..=2) {
        let i = rng.random_range(0..pairs.len());
        chosen.push(pairs.remove(i));
    }
    for (a, b) in chosen {
        text += &format!("{a} {b} {:.3}\n", rng.random_range(0.5..2.0));
    }
    parse_network_native(&text).unwrap()
}

/// Edge rows over the three load angles; the infinite bus is bus 3.
fn edge_rows(sys: &LureSystem) -> Vec<[f64; 3]> {
    sys.edges
        .iter()
        .map(|&(i, j)| {
            let mut r = [0.0; 3];
            if i < 3 {
                r[i] += 1.0;
            }
            if j < 3 {
                r[j] -= 1.0;
            }
            r
        })
        .collect()
}

fn quad3(p: &[[f64; 3]; 3], x: &[f64; 3]) -> f64 {
    (0..3).map(|i| (0..3).map(|j| x[i] * p[i][j] * x[j]).sum::<f64>()).sum()
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Integer lattice points `u` with `|r.u| <= bound` on every edge row; the
/// bound also caps every coordinate because each bus reaches the infinite
/// bus in at most three edges.
fn lattice(rows: &[[f64; 3]], bound: i32, mut keep: impl FnMut([i32; 3], &[i32]) -> bool) -> Vec<[i32; 3]> {
    let r = 3 * bound;
    let mut out = Vec::new();
    let mut d = vec![0; rows.len()];
    for a in -r..=r {
        for b in -r..=r {
            for c in -r..=r {
                let u = [a, b, c];
                let ok = rows.iter().zip(d.iter_mut()).all(|(row, de)| {
                    *de = (row[0] as i32) * a + (row[1] as i32) * b + (row[2] as i32) * c;
                    de.abs() <= bound
                });
                if ok && keep(u, &d) {
                    out.push(u);
                }
            }
        }
    }
    out
}

struct Brute {
    /// Smallest lower-bound margin over the equilibrium grid.
    grid_margin: f64,
    /// Smallest lattice margin over the boundary faces at the worst grid
    /// equilibria; a negative value is a counterexample.
    face_margin: f64,
}

/// Grid search over `Delta(gamma)` in steps of `gamma/50`, scoring each
/// equilibrium with the hyperplane minimum of `V` on every face, then a
/// scan of the boundary faces in steps of `pi/100` at the worst equilibria.
fn brute_force(p: &DMatrix<f64>, sys: &LureSystem, x0: &[f64], gamma: f64) -> Brute {
    let rows = edge_rows(sys);
    let pm = [0, 1, 2].map(|i| [0, 1, 2].map(|j| p[(i, j)]));
    let pinv = p.clone().try_inverse().unwrap();
    let scale: Vec<f64> = rows
        .iter()
        .map(|r| (0..3).map(|i| (0..3).map(|j| r[i] * pinv[(i, j)] * r[j]).sum::<f64>()).sum())
        .collect();
    let x0 = [x0[0], x0[1], x0[2]];
    let step = gamma / 50.0;
    let mut scored: Vec<(f64, [f64; 3])> = lattice(&rows, 50, |_, _| true)
        .into_iter()
        .map(|u| {
            let ds = u.map(|k| k as f64 * step);
            let face = rows
                .iter()
                .zip(&scale)
                .flat_map(|(r, s)| {
                    let d = dot3(r, &ds);
                    [(FRAC_PI_2 - d).powi(2) / s, (FRAC_PI_2 + d).powi(2) / s]
                })
                .fold(f64::INFINITY, f64::min);
            let rel = [x0[0] - ds[0], x0[1] - ds[1], x0[2] - ds[2]];
            (face - quad3(&pm, &rel), ds)
        })
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let boundary: Vec<[f64; 3]> = lattice(&rows, 50, |_, d| d.iter().any(|de| de.abs() == 50))
        .into_iter()
        .map(|u| u.map(|k| k as f64 * PI / 100.0))
        .collect();
    let mut face_margin = f64::INFINITY;
    for (_, ds) in scored.iter().take(8) {
        let rel0 = [x0[0] - ds[0], x0[1] - ds[1], x0[2] - ds[2]];
        let v0 = quad3(&pm, &rel0);
        for y in &boundary {
            let rel = [y[0] - ds[0], y[1] - ds[1], y[2] - ds[2]];
            face_margin = face_margin.min(quad3(&pm, &rel) - v0);
        }
    }
    Brute {
        grid_margin: scored[0].0,
        face_margin,
    }
}

fn criterion_9() -> Outcome {
    let t = Instant::now();
    let mut notes = Vec::new();
    let gamma = 0.3;
    let (mut certified, mut total, mut disagree, mut counterexamples) = (0, 0, 0, 0);
    let mut infeasible = 0;
    for seed in 0..8u64 {
        let net = random_four_bus(seed);
        let sys = build_lure_system(&net);
        let spec = assemble_stability_lmi(&sys, sector_gain(gamma).unwrap()).unwrap();
        let Some(p) = solve_lmi(&spec, &SolverSettings::default()).p else {
            infeasible += 1;
            continue;
        };
        let eq = solve_equilibrium(&net, None).unwrap();
        let cert = issue(CertificateKind::Stability, p.clone(), &sys, Some(&eq), gamma, None, unvalidated());
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
        for _ in 0..3 {
            let r = rng.random_range(0.05..0.9);
            let x0: Vec<f64> = (0..3).map(|_| rng.random_range(-r..r)).collect();
            let verdict = certify_robust_stability(&cert, &sys, &x0, gamma, DEFAULT_VERTEX_CAP).unwrap();
            let inside = edge_rows(&sys).iter().all(|row| dot3(row, &[x0[0], x0[1], x0[2]]).abs() <= FRAC_PI_2);
            let brute = brute_force(&p, &sys, &x0, gamma);
            let scale = verdict.margin.abs().max(1.0);
            let brute_ok = inside && brute.grid_margin > RELATIVE_SLACK * scale;
            total += 1;
            if verdict.is_certified() {
                certified += 1;
                if !(inside && brute.face_margin > 0.0) {
                    counterexamples += 1;
                    notes.push(format!("counterexample seed {seed}: face margin {:.3e}", brute.face_margin));
                }
            }
            if verdict.is_certified() != brute_ok {
                disagree += 1;
                notes.push(format!(
                    "seed {seed}: verdict margin {:.3e}, grid margin {:.3e}",
                    verdict.margin, brute.grid_margin
                ));
            }
        }
    }
    let ok = counterexamples == 0 && disagree == 0 && infeasible == 0 && certified > 0 && certified < total;
    notes.push(format!(
        "{certified} of {total} certified, {disagree} disagreements, {counterexamples} counterexamples, {infeasible} LMI failures"
    ));
    finish(ok, notes, t, 300.0)
}

fn criterion_10() -> Outcome {
    let t = Instant::now();
    let mut notes = Vec::new();
    let bin = env!("CARGO_BIN_EXE_gridcert");
    let runs: [&[&str]; 3] = [
        &["--net", "3gen", "--seed", "7", "certify", "resiliency", "--all-lines", "--mu-search", "--tau", "0.1"],
        &["--net", "2bus", "--seed", "7", "certify", "robust", "--state", "0.5,0.5"],
        &["--net", "3gen", "--seed", "7", "certify", "stability", "--state", "0.1,0.2,-0.3"],
    ];
    let mut ok = true;
    for args in runs {
        let out = |_: ()| Command::new(bin).args(args).output().unwrap();
        let (a, b) = (out(()), out(()));
        let same = a.stdout == b.stdout && !a.stdout.is_empty() && a.status.code() == b.status.code();
        ok &= check(
            same,
            format!("`{}` identical ({} bytes, exit {:?})", args.join(" "), a.stdout.len(), a.status.code()),
            &mut notes,
        );
    }
    finish(ok, notes, t, f64::INFINITY)
}

fn main() {
    // `cargo test` passes harness flags; a filter argument selects criteria.
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let wanted = |n: usize| filter.is_empty() || filter.iter().any(|f| f == &n.to_string() || f == "acceptance");
    let mut traj = Trajectories::default();
    let mut failed = Vec::new();
    let mut run = |n: usize, f: &mut dyn FnMut() -> Outcome| {
        if !wanted(n) {
            return;
        }
        let o = f();
        println!("criterion {n:>2}: {} | {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.push(n);
        }
    };
    run(1, &mut criterion_1);
    run(2, &mut criterion_2);
    run(3, &mut criterion_3);
    run(4, &mut criterion_4);
    run(5, &mut || criterion_5(&mut traj));
    run(6, &mut || criterion_6(&mut traj));
    run(7, &mut || criterion_7(&traj));
    run(8, &mut criterion_8);
    run(9, &mut criterion_9);
    run(10, &mut criterion_10);
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
