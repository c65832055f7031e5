//! Quadratic Lyapunov certificates of transient stability and fault
//! resiliency for lossless structure-preserving power grid models.

// `!(x >= 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod equilibrium;
pub mod error;
pub mod fixtures;
pub mod lmi;
pub mod lure;
pub mod matrix_json;
pub mod network;
pub mod riccati;
pub mod sdp;
pub mod sim;

pub use certify::{
    certify_robust_resiliency, certify_robust_stability, certify_resiliency, certify_stability,
    compute_vmin, lyapunov_value, CertResult, Certificate, CertificateKind, Detail, Verdict,
};
pub use equilibrium::{
    sector_gain, sector_gains, solve_equilibrium, sync_condition_margin, sync_condition_margin_with,
    EquilibriumPoint, LaplacianWeighting, SectorGains,
};
pub use error::{Error, Result};
pub use lmi::{
    assemble_resiliency_lmi, assemble_stability_lmi, search_mu, search_p_for_state, solve_lmi,
    Backend, FaultTarget, FeasibilityResult, FeasibilityStatus, LmiSpec, SolverSettings,
};
pub use lure::{build_lure_system, LureSystem, StateLayout};
pub use network::{
    build_incidence, normalize_network, parse_matpower_case, parse_network_native, Bus, BusKind,
    Line, NormalizeOptions, PowerNetwork,
};
pub use sim::{
    integrate, rhs_fault_on, rhs_post_fault, verify_certificate_by_simulation, verify_convergence,
    FaultScenario, IntegratorSettings, OracleReport, Trajectory,
};
