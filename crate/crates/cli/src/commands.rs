//! Subcommand implementations. Each returns the process exit code.

use crate::input::{
    edge_label, load_network, load_settings, parse_angle, parse_contingencies, parse_edge, parse_state,
};
use crate::report::{to_json, NetworkInfo, Report, SCHEMA};
use crate::{CertifyCmd, CheckSyncArgs, Cmd, Global, MuArgs, ResiliencyArgs, ScreenArgs, SimulateArgs, StateArgs, TargetArgs, ValidateArgs};
use gridcert_core::certify::{gamma_vertices, robust_margins, RobustMargins, DEFAULT_VERTEX_CAP};
use gridcert_core::lmi::Validation;
use gridcert_core::sim::{equilibrium_at, simulate_fault, simulate_post_fault, terminal_error, verify_stability_by_simulation};
use gridcert_core::*;
use rayon::prelude::*;
use serde::Serialize;
use std::path::Path;
use std::time::Instant;

struct Ctx<'a> {
    global: &'a Global,
    command: String,
    net: PowerNetwork,
    sys: LureSystem,
    gamma: f64,
    settings: SolverSettings,
    start: Instant,
    timings: Vec<(String, f64)>,
}

impl Ctx<'_> {
    fn lap(&mut self, label: &str) {
        let t = self.start.elapsed().as_secs_f64();
        self.timings.push((label.to_string(), t));
    }

    fn g(&self) -> Result<f64> {
        sector_gain(self.gamma)
    }

    fn equilibrium(&self) -> Result<EquilibriumPoint> {
        solve_equilibrium(&self.net, None)
    }

    fn emit<T: Serialize>(&self, code: i32, result: T) -> Result<i32> {
        let report = Report {
            schema: SCHEMA,
            tool: "gridcert",
            version: env!("CARGO_PKG_VERSION"),
            command: self.command.clone(),
            network: NetworkInfo {
                source: self.global.net.clone(),
                hash: self.net.hash(),
                buses: self.net.n_buses(),
                lines: self.net.lines.len(),
                generators: self.net.n_generators(),
                loads: self.net.n_loads(),
                infinite_bus: self.net.infinite_bus().is_some(),
            },
            seed: self.global.seed,
            gamma: self.gamma,
            solver: self.settings,
            exit_code: code,
            result,
            timings: self.global.timings.then(|| self.timings.clone()),
        };
        let text = to_json(&report)?;
        match &self.global.report {
            Some(p) => std::fs::write(p, text)?,
            None => write_stdout(&text)?,
        }
        Ok(code)
    }
}

/// Writes to stdout; a closed pipe is not an error.
fn write_stdout(text: &str) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn command_name(cmd: &Cmd) -> String {
    match cmd {
        Cmd::SolveEq => "solve-eq".into(),
        Cmd::CheckSync(_) => "check-sync".into(),
        Cmd::Certify { kind } => match kind {
            CertifyCmd::Stability(_) => "certify stability".into(),
            CertifyCmd::Robust(_) => "certify robust".into(),
            CertifyCmd::Resiliency(_) => "certify resiliency".into(),
        },
        Cmd::Screen(_) => "screen".into(),
        Cmd::Simulate(_) => "simulate".into(),
        Cmd::Validate(_) => "validate".into(),
    }
}

pub fn run(global: &Global, cmd: &Cmd) -> Result<i32> {
    let start = Instant::now();
    let gamma = parse_angle(&global.gamma)?;
    if !(gamma > 0.0 && gamma < std::f64::consts::FRAC_PI_2) {
        return Err(Error::AngleOutOfRange(gamma));
    }
    let net = load_network(&global.net, global.seed)?;
    let sys = build_lure_system(&net);
    let mut ctx = Ctx {
        global,
        command: command_name(cmd),
        net,
        sys,
        gamma,
        settings: load_settings(global.settings.as_deref())?,
        start,
        timings: Vec::new(),
    };
    ctx.lap("load");
    match cmd {
        Cmd::SolveEq => solve_eq(&mut ctx),
        Cmd::CheckSync(a) => check_sync(&mut ctx, a),
        Cmd::Certify { kind } => match kind {
            CertifyCmd::Stability(a) => certify_stab(&mut ctx, a),
            CertifyCmd::Robust(a) => certify_robust(&mut ctx, a),
            CertifyCmd::Resiliency(a) => certify_res(&mut ctx, a),
        },
        Cmd::Screen(a) => screen(&mut ctx, a),
        Cmd::Simulate(a) => simulate(&mut ctx, a),
        Cmd::Validate(a) => validate(&mut ctx, a),
    }
}

fn code_of(r: &CertResult) -> i32 {
    if r.is_certified() {
        0
    } else {
        1
    }
}

#[derive(Serialize)]
struct EqResult {
    bus_ids: Vec<i64>,
    equilibrium: EquilibriumPoint,
    within_gamma: bool,
}

fn solve_eq(ctx: &mut Ctx) -> Result<i32> {
    let mut eq = ctx.equilibrium()?;
    let within = eq.check_gamma(ctx.gamma);
    ctx.lap("solve");
    let ids = ctx.net.buses.iter().map(|b| b.id).collect();
    ctx.emit(
        0,
        EqResult {
            bus_ids: ids,
            equilibrium: eq,
            within_gamma: within,
        },
    )
}

#[derive(Serialize)]
struct SyncResult {
    tripped: Option<String>,
    weighting: LaplacianWeighting,
    margin: f64,
    sin_gamma: f64,
    holds: bool,
}

fn check_sync(ctx: &mut Ctx, a: &CheckSyncArgs) -> Result<i32> {
    let mut net = ctx.net.clone();
    if let Some(t) = &a.trip {
        let e = parse_edge(t, &net)?;
        let before = net.n_components();
        net.lines.remove(e);
        if net.n_components() > before {
            return Err(Error::Disconnected {
                components: net.n_components(),
            });
        }
    }
    let weighting = if a.unweighted {
        LaplacianWeighting::Combinatorial
    } else {
        LaplacianWeighting::Coupling
    };
    let margin = sync_condition_margin_with(&net, weighting);
    ctx.lap("sync");
    let sin_gamma = ctx.gamma.sin();
    let holds = margin <= sin_gamma * (1.0 + 1e-12);
    ctx.emit(
        if holds { 0 } else { 1 },
        SyncResult {
            tripped: a.trip.clone(),
            weighting,
            margin,
            sin_gamma,
            holds,
        },
    )
}

#[derive(Serialize)]
struct LmiSummary {
    status: FeasibilityStatus,
    residual: f64,
    min_eig_p: f64,
    margin: Option<f64>,
    backend: Backend,
    iterations: usize,
    note: Option<String>,
}

impl From<&FeasibilityResult> for LmiSummary {
    fn from(r: &FeasibilityResult) -> Self {
        LmiSummary {
            status: r.status,
            residual: r.residual,
            min_eig_p: r.min_eig_p,
            margin: r.margin,
            backend: r.backend,
            iterations: r.iterations,
            note: r.note.clone(),
        }
    }
}

#[derive(Serialize)]
struct StabilityResult {
    state: Vec<f64>,
    lmi: LmiSummary,
    certificate: Option<Certificate>,
    verdict: Option<CertResult>,
}

/// Solves the stability LMI and issues a certificate when feasible.
fn stability_certificate(ctx: &mut Ctx, eq: &EquilibriumPoint) -> Result<(FeasibilityResult, Option<Certificate>)> {
    let g = ctx.g()?;
    let spec = assemble_stability_lmi(&ctx.sys, g)?;
    let r = solve_lmi(&spec, &ctx.settings);
    ctx.lap("lmi");
    let cert = match (&r.status, &r.p) {
        (FeasibilityStatus::Feasible, Some(p)) => Some(Certificate::issue(
            CertificateKind::Stability,
            p.clone(),
            &ctx.sys,
            Some(eq),
            g,
            ctx.gamma,
            None,
            Validation {
                residual: r.residual,
                min_eig_p: r.min_eig_p,
            },
            r.backend,
            ctx.net.hash(),
        )?),
        _ => None,
    };
    Ok((r, cert))
}

fn certify_stab(ctx: &mut Ctx, a: &StateArgs) -> Result<i32> {
    let state = parse_state(&a.state, &ctx.sys)?;
    let eq = ctx.equilibrium()?;
    let (r, cert) = stability_certificate(ctx, &eq)?;
    let verdict = match &cert {
        Some(c) => Some(certify_stability(c, &ctx.sys, &state, &eq)?),
        None => None,
    };
    let code = verdict.as_ref().map_or(1, code_of);
    ctx.emit(
        code,
        StabilityResult {
            state,
            lmi: (&r).into(),
            certificate: cert,
            verdict,
        },
    )
}

#[derive(Serialize)]
struct SearchSummary {
    certified: bool,
    solves: usize,
    margin: f64,
    critical_equilibrium: Vec<f64>,
    vertices: usize,
}

#[derive(Serialize)]
struct RobustResult {
    state: Vec<f64>,
    search: Option<SearchSummary>,
    /// Margins with and without the flow-out restriction.
    margins: Option<RobustMargins>,
    certificate: Option<Certificate>,
    verdict: CertResult,
}

fn certify_robust(ctx: &mut Ctx, a: &StateArgs) -> Result<i32> {
    let state = parse_state(&a.state, &ctx.sys)?;
    ctx.net.require_connected()?;
    let g = ctx.g()?;
    if gamma_vertices(&ctx.sys, ctx.gamma, DEFAULT_VERTEX_CAP).is_err() {
        let verdict = CertResult {
            verdict: Verdict::NotCertified,
            margin: f64::NAN,
            detail: Some(Detail::EnumerationCap),
        };
        return ctx.emit(
            1,
            RobustResult {
                state,
                search: None,
                margins: None,
                certificate: None,
                verdict,
            },
        );
    }
    let found = search_p_for_state(&ctx.sys, g, &state, ctx.gamma, &ctx.settings, 40);
    ctx.lap("search");
    let Some(found) = found else {
        let verdict = CertResult {
            verdict: Verdict::NotCertified,
            margin: f64::NAN,
            detail: None,
        };
        return ctx.emit(
            1,
            RobustResult {
                state,
                search: None,
                margins: None,
                certificate: None,
                verdict,
            },
        );
    };
    let cert = Certificate::issue(
        CertificateKind::RobustStability,
        found.p.clone(),
        &ctx.sys,
        None,
        g,
        ctx.gamma,
        None,
        found.validation,
        found.backend,
        ctx.net.hash(),
    )?;
    let verdict = certify_robust_stability(&cert, &ctx.sys, &state, ctx.gamma, DEFAULT_VERTEX_CAP)?;
    let margins = robust_margins(&cert.p, &ctx.sys, &state, ctx.gamma, DEFAULT_VERTEX_CAP)?.ok();
    ctx.lap("check");
    let ev = &found.evaluation;
    let search = SearchSummary {
        certified: found.certified,
        solves: found.solves,
        margin: ev.margin,
        critical_equilibrium: ev.critical_equilibrium.clone(),
        vertices: ev.vertices,
    };
    ctx.emit(
        code_of(&verdict),
        RobustResult {
            state,
            search: Some(search),
            margins,
            certificate: Some(cert),
            verdict,
        },
    )
}

#[derive(Serialize)]
struct MuSummary {
    mu: f64,
    v_min: f64,
    mu_vmin: f64,
    evaluations: usize,
}

fn target_of(ctx: &Ctx, t: &TargetArgs) -> Result<FaultTarget> {
    match (&t.line, t.all_lines) {
        (Some(l), false) => Ok(FaultTarget::Line(parse_edge(l, &ctx.net)?)),
        (None, true) => Ok(FaultTarget::AllLines),
        _ => Err(Error::InvalidArgument("give exactly one of --line and --all-lines".into())),
    }
}

/// Resiliency certificate for `target`, at a fixed `mu` or from the search.
fn resiliency_certificate(
    ctx: &mut Ctx,
    target: FaultTarget,
    mu: &MuArgs,
    eq: &EquilibriumPoint,
) -> Result<(Option<Certificate>, Option<LmiSummary>, Option<MuSummary>)> {
    let g = ctx.g()?;
    let kind = match target {
        FaultTarget::Line(_) => CertificateKind::ResiliencyLine,
        FaultTarget::AllLines => CertificateKind::ResiliencyAll,
    };
    let (p, mu_value, validation, backend, lmi, summary) = if mu.mu_search {
        let Some(s) = search_mu(&ctx.sys, g, target, eq, &ctx.settings) else {
            ctx.lap("mu-search");
            return Ok((None, None, None));
        };
        ctx.lap("mu-search");
        let summary = MuSummary {
            mu: s.mu,
            v_min: s.v_min,
            mu_vmin: s.mu_vmin,
            evaluations: s.evaluations.len(),
        };
        (s.p, s.mu, s.validation, s.backend, None, Some(summary))
    } else {
        let m = mu
            .mu
            .ok_or_else(|| Error::InvalidArgument("give --mu or --mu-search".into()))?;
        let spec = assemble_resiliency_lmi(&ctx.sys, g, m, target)?;
        let r = solve_lmi(&spec, &ctx.settings);
        ctx.lap("lmi");
        let lmi = LmiSummary::from(&r);
        match (r.status, r.p) {
            (FeasibilityStatus::Feasible, Some(p)) => (
                p,
                m,
                Validation {
                    residual: r.residual,
                    min_eig_p: r.min_eig_p,
                },
                r.backend,
                Some(lmi),
                None,
            ),
            _ => return Ok((None, Some(lmi), None)),
        }
    };
    let cert = Certificate::issue(
        kind,
        p,
        &ctx.sys,
        Some(eq),
        g,
        ctx.gamma,
        Some((mu_value, target)),
        validation,
        backend,
        ctx.net.hash(),
    )?;
    Ok((Some(cert), lmi, summary))
}

fn clearing_verdict(ctx: &Ctx, cert: &Certificate, tau: f64) -> Result<CertResult> {
    match cert.kind {
        CertificateKind::ResiliencyAll => certify_robust_resiliency(cert, tau),
        _ => certify_resiliency(cert, &ctx.sys, tau, None),
    }
}

#[derive(Serialize)]
struct ResiliencyResult {
    target: String,
    tau: Option<f64>,
    lmi: Option<LmiSummary>,
    mu_search: Option<MuSummary>,
    certificate: Option<Certificate>,
    verdict: Option<CertResult>,
}

fn target_label(ctx: &Ctx, t: FaultTarget) -> String {
    match t {
        FaultTarget::Line(e) => edge_label(&ctx.net, e),
        FaultTarget::AllLines => "all-lines".into(),
    }
}

fn certify_res(ctx: &mut Ctx, a: &ResiliencyArgs) -> Result<i32> {
    let target = target_of(ctx, &a.target)?;
    let eq = ctx.equilibrium()?;
    let (cert, lmi, mu_search) = resiliency_certificate(ctx, target, &a.mu, &eq)?;
    let verdict = match (&cert, a.tau) {
        (Some(c), Some(tau)) => Some(clearing_verdict(ctx, c, tau)?),
        _ => None,
    };
    let code = match (&cert, &verdict) {
        (None, _) => 1,
        (Some(_), Some(v)) => code_of(v),
        (Some(_), None) => 0,
    };
    let target = target_label(ctx, target);
    ctx.emit(
        code,
        ResiliencyResult {
            target,
            tau: a.tau,
            lmi,
            mu_search,
            certificate: cert,
            verdict,
        },
    )
}

#[derive(Serialize)]
struct ScreenEntry {
    line: String,
    tau: f64,
    verdict: CertResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    seconds: Option<f64>,
}

#[derive(Serialize)]
struct ScreenResult {
    certificate_source: &'static str,
    lmi_solves: usize,
    certificate: Option<Certificate>,
    scenarios: Vec<ScreenEntry>,
}

fn screen(ctx: &mut Ctx, a: &ScreenArgs) -> Result<i32> {
    let text = if a.contingencies == Path::new("-") {
        std::io::read_to_string(std::io::stdin())?
    } else {
        std::fs::read_to_string(&a.contingencies)?
    };
    let list = parse_contingencies(&text, &ctx.net)?;
    let eq = ctx.equilibrium()?;
    let (cert, source, solves) = match &a.certificate {
        Some(path) => {
            let cert: Certificate = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            if cert.kind != CertificateKind::ResiliencyAll {
                return Err(Error::WrongCertificateKind {
                    expected: "resiliency-all",
                    found: cert.kind.as_str(),
                });
            }
            if cert.provenance.network_hash != ctx.net.hash() {
                return Err(Error::InvalidArgument("certificate was issued for a different network".into()));
            }
            (Some(cert), "cached", 0)
        }
        None => {
            let (cert, _, summary) = resiliency_certificate(ctx, FaultTarget::AllLines, &a.mu, &eq)?;
            let solves = summary.map_or(1, |s| s.evaluations);
            (cert, "solved", solves)
        }
    };
    if let (Some(c), Some(path)) = (&cert, &a.save_certificate) {
        std::fs::write(path, crate::report::to_json(c)?)?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let timed = ctx.global.timings;
    let scenarios: Vec<ScreenEntry> = match &cert {
        Some(c) => pool.install(|| {
            list.par_iter()
                .map(|&(e, tau)| {
                    let t0 = Instant::now();
                    let verdict = certify_robust_resiliency(c, tau).expect("kind checked");
                    ScreenEntry {
                        line: edge_label(&ctx.net, e),
                        tau,
                        verdict,
                        seconds: timed.then(|| t0.elapsed().as_secs_f64()),
                    }
                })
                .collect()
        }),
        None => list
            .iter()
            .map(|&(e, tau)| ScreenEntry {
                line: edge_label(&ctx.net, e),
                tau,
                verdict: CertResult {
                    verdict: Verdict::NotCertified,
                    margin: f64::NAN,
                    detail: None,
                },
                seconds: None,
            })
            .collect(),
    };
    ctx.lap("screen");
    let all = scenarios.iter().all(|s| s.verdict.is_certified());
    ctx.emit(
        if all { 0 } else { 1 },
        ScreenResult {
            certificate_source: source,
            lmi_solves: solves,
            certificate: cert,
            scenarios,
        },
    )
}

#[derive(Serialize)]
struct SimulateResult {
    fault: Option<String>,
    clearing_time: Option<f64>,
    clearing_discrepancy: f64,
    samples: usize,
    terminal_error: f64,
    converged: bool,
}

fn simulate(ctx: &mut Ctx, a: &SimulateArgs) -> Result<i32> {
    let eq = ctx.equilibrium()?;
    let cfg = IntegratorSettings {
        step: a.step,
        record_every: a.every,
    };
    let (traj, fault, used) = match &a.fault {
        Some(f) => {
            let e = parse_edge(f, &ctx.net)?;
            let sc = FaultScenario::new(&ctx.sys, e, a.tau, eq.clone(), eq.clone())?;
            let (traj, used) = simulate_fault(&ctx.sys, &sc, a.horizon, &cfg)?;
            (traj, Some(edge_label(&ctx.net, e)), Some(used))
        }
        None => {
            let x0 = match &a.state {
                Some(s) => parse_state(s, &ctx.sys)?,
                None => ctx.sys.layout.pad_angles(&eq.angles).as_slice().to_vec(),
            };
            (simulate_post_fault(&ctx.sys, &eq, &x0, a.horizon, &cfg)?, None, None)
        }
    };
    ctx.lap("integrate");
    let csv = traj.to_csv(&ctx.sys.layout.labels(&ctx.net));
    match &a.out {
        Some(p) => std::fs::write(p, csv)?,
        None => write_stdout(&csv)?,
    }
    if ctx.global.report.is_some() {
        let result = SimulateResult {
            fault,
            clearing_time: used,
            clearing_discrepancy: used.map_or(0.0, |u| a.tau - u),
            samples: traj.len(),
            terminal_error: terminal_error(&traj, &ctx.sys, &eq),
            converged: verify_convergence(&traj, &ctx.sys, &eq, 1e-3),
        };
        ctx.emit(0, result)?;
    }
    Ok(0)
}

#[derive(Serialize)]
struct OracleEntry {
    scenario: String,
    report: OracleReport,
}

#[derive(Serialize)]
struct ValidateResult {
    mode: &'static str,
    certificate: Option<Certificate>,
    verdict: Option<CertResult>,
    oracle: Vec<OracleEntry>,
    violations: Vec<String>,
}

fn validate(ctx: &mut Ctx, a: &ValidateArgs) -> Result<i32> {
    let eq = ctx.equilibrium()?;
    let cfg = IntegratorSettings::default();
    let (mode, cert, verdict, oracle) = match (&a.state, a.tau) {
        (Some(s), None) => {
            let state = parse_state(s, &ctx.sys)?;
            if a.robust {
                let g = ctx.g()?;
                let found = search_p_for_state(&ctx.sys, g, &state, ctx.gamma, &ctx.settings, 40);
                ctx.lap("search");
                let Some(found) = found else {
                    return ctx.emit(
                        1,
                        ValidateResult {
                            mode: "robust",
                            certificate: None,
                            verdict: None,
                            oracle: Vec::new(),
                            violations: Vec::new(),
                        },
                    );
                };
                let cert = Certificate::issue(
                    CertificateKind::RobustStability,
                    found.p,
                    &ctx.sys,
                    None,
                    g,
                    ctx.gamma,
                    None,
                    found.validation,
                    found.backend,
                    ctx.net.hash(),
                )?;
                let verdict = certify_robust_stability(&cert, &ctx.sys, &state, ctx.gamma, DEFAULT_VERTEX_CAP)?;
                // the nominal equilibrium and every vertex of the equilibrium set
                let mut targets = vec![eq.angles.clone()];
                targets.extend(gamma_vertices(&ctx.sys, ctx.gamma, DEFAULT_VERTEX_CAP).unwrap_or_default());
                let mut oracle = Vec::new();
                for v in targets {
                    let target = equilibrium_at(&ctx.sys, v);
                    let report = verify_stability_by_simulation(&ctx.sys, &cert, &state, &target, a.horizon, a.tol, &cfg)?;
                    oracle.push(OracleEntry {
                        scenario: format!("{:?}", target.angles),
                        report,
                    });
                }
                ("robust", Some(cert), Some(verdict), oracle)
            } else {
                let (_, cert) = stability_certificate(ctx, &eq)?;
                let mut oracle = Vec::new();
                let verdict = match &cert {
                    Some(c) => {
                        let report = verify_stability_by_simulation(&ctx.sys, c, &state, &eq, a.horizon, a.tol, &cfg)?;
                        oracle.push(OracleEntry {
                            scenario: "post-fault".into(),
                            report,
                        });
                        Some(certify_stability(c, &ctx.sys, &state, &eq)?)
                    }
                    None => None,
                };
                ("stability", cert, verdict, oracle)
            }
        }
        (None, Some(tau)) => {
            let target = target_of(ctx, &a.target)?;
            let (cert, _, _) = resiliency_certificate(ctx, target, &a.mu, &eq)?;
            let lines: Vec<usize> = match target {
                FaultTarget::Line(e) => vec![e],
                FaultTarget::AllLines => (0..ctx.sys.n_edges()).collect(),
            };
            let mut oracle = Vec::new();
            let mut verdict = None;
            if let Some(c) = &cert {
                verdict = Some(clearing_verdict(ctx, c, tau)?);
                for e in lines {
                    let sc = FaultScenario::new(&ctx.sys, e, tau, eq.clone(), eq.clone())?;
                    let report = match verify_certificate_by_simulation(&ctx.sys, c, &sc, a.horizon, a.tol, &cfg) {
                        Ok(r) => r,
                        Err(Error::NonFinite { .. }) => continue,
                        Err(e) => return Err(e),
                    };
                    oracle.push(OracleEntry {
                        scenario: edge_label(&ctx.net, e),
                        report,
                    });
                }
            }
            ("resiliency", cert, verdict, oracle)
        }
        _ => {
            return Err(Error::InvalidArgument(
                "validate needs either --state or --tau".into(),
            ))
        }
    };
    ctx.lap("oracle");
    let certified = verdict.as_ref().is_some_and(|v| v.is_certified());
    let violations: Vec<String> = if certified {
        oracle
            .iter()
            .flat_map(|o| o.report.violations().into_iter().map(move |v| format!("{}: {v}", o.scenario)))
            .collect()
    } else {
        Vec::new()
    };
    let code = if !certified {
        1
    } else if violations.is_empty() {
        0
    } else {
        2
    };
    ctx.emit(
        code,
        ValidateResult {
            mode,
            certificate: cert,
            verdict,
            oracle,
            violations,
        },
    )
}
