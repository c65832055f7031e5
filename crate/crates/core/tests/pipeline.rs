use gridcert_core::certify::{certify_robust_over, gamma_vertices, DEFAULT_VERTEX_CAP};
use gridcert_core::lmi::Validation;
use gridcert_core::sim::{equilibrium_at, verify_stability_by_simulation};
use gridcert_core::*;
use std::f64::consts::PI;

fn resiliency_all(net: &PowerNetwork, mu: f64) -> (LureSystem, EquilibriumPoint, Certificate) {
    let sys = build_lure_system(net);
    let eq = solve_equilibrium(net, None).unwrap();
    let g = sector_gain(PI / 6.0).unwrap();
    let spec = assemble_resiliency_lmi(&sys, g, mu, FaultTarget::AllLines).unwrap();
    let r = solve_lmi(&spec, &SolverSettings::default());
    assert_eq!(r.status, FeasibilityStatus::Feasible, "{:?}", r.note);
    let cert = Certificate::issue(
        CertificateKind::ResiliencyAll,
        r.p.unwrap(),
        &sys,
        Some(&eq),
        g,
        PI / 6.0,
        Some((mu, FaultTarget::AllLines)),
        Validation {
            residual: r.residual,
            min_eig_p: r.min_eig_p,
        },
        r.backend,
        net.hash(),
    )
    .unwrap();
    (sys, eq, cert)
}

#[test]
fn three_gen_all_lines_clearing_time() {
    let net = fixtures::three_gen();
    let (sys, eq, cert) = resiliency_all(&net, 0.3);
    let bound = cert.tau_max.unwrap();
    eprintln!("3-gen mu=0.3 bound {bound}");
    assert!(certify_robust_resiliency(&cert, 0.1).unwrap().is_certified());
    assert!(!certify_robust_resiliency(&cert, 0.2).unwrap().is_certified());
    let cfg = IntegratorSettings::default();
    for e in 0..3 {
        let sc = FaultScenario::new(&sys, e, 0.1, eq.clone(), eq.clone()).unwrap();
        let rep = verify_certificate_by_simulation(&sys, &cert, &sc, 50.0, 1e-3, &cfg).unwrap();
        assert!(rep.confirmed(), "line {e}: {rep:?}");
    }
}

#[test]
fn mu_search_two_bus_and_three_gen() {
    let net = fixtures::two_bus();
    let sys = build_lure_system(&net);
    let eq = solve_equilibrium(&net, None).unwrap();
    let g = sector_gain(PI / 6.0).unwrap();
    let s = search_mu(&sys, g, FaultTarget::Line(0), &eq, &SolverSettings::default()).unwrap();
    eprintln!("2-bus mu {} V_min {} bound {}", s.mu, s.v_min, s.mu_vmin);
    assert!(s.mu_vmin >= 0.43);

    let net = fixtures::three_gen();
    let sys = build_lure_system(&net);
    let eq = solve_equilibrium(&net, None).unwrap();
    let s = search_mu(&sys, g, FaultTarget::AllLines, &eq, &SolverSettings::default()).unwrap();
    eprintln!("3-gen mu {} V_min {} bound {}", s.mu, s.v_min, s.mu_vmin);
    assert!(s.mu_vmin >= 0.13);
}

#[test]
fn two_bus_robust_search() {
    let net = fixtures::two_bus();
    let sys = build_lure_system(&net);
    let g = sector_gain(PI / 6.0).unwrap();
    let found = search_p_for_state(&sys, g, &[0.5, 0.5], PI / 6.0, &SolverSettings::default(), 40);
    eprintln!("robust search: {:?}", found.as_ref().map(|f| (f.certified, f.evaluation.margin, f.solves)));
    // the simulations converge regardless of the certificate outcome
    let verts = gamma_vertices(&sys, PI / 6.0, DEFAULT_VERTEX_CAP).unwrap();
    assert_eq!(verts.len(), 2);
    let eq = solve_equilibrium(&net, None).unwrap();
    let p = found.map(|f| f.p).unwrap_or_else(|| nalgebra::DMatrix::from_row_slice(2, 2, &[0.8228, 0.1402, 0.1402, 0.5797]));
    let cert = Certificate::issue(
        CertificateKind::Stability,
        p,
        &sys,
        Some(&eq),
        g,
        PI / 6.0,
        None,
        Validation { residual: 0.0, min_eig_p: 0.0 },
        Backend::InteriorPoint,
        String::new(),
    )
    .unwrap();
    eprintln!("{:?}", certify_robust_over(&cert, &sys, &[0.5, 0.5], &verts).unwrap());
    for d in [-PI / 6.0, 0.0, PI / 6.0] {
        let eq = equilibrium_at(&sys, vec![d, 0.0]);
        let rep = verify_stability_by_simulation(&sys, &cert, &[0.5, 0.5], &eq, 50.0, 1e-3, &IntegratorSettings::default()).unwrap();
        assert!(rep.converged, "{rep:?}");
        assert!(rep.monotone, "{rep:?}");
    }
}
