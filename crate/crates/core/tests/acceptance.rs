//! Acceptance gate: every criterion at full profile, one line per criterion.
//!
//! Run with `cargo test -p targetzone --test acceptance -- --nocapture` to
//! see the lines as they complete; the same checks back the CLI `accept`
//! subcommand.

use targetzone::acceptance::{run_criterion, AcceptanceConfig};

fn check(id: u32) {
    let report = run_criterion(id, &AcceptanceConfig::default());
    println!("{}", report.line());
    assert!(report.passed, "{}", report.line());
}

#[test]
fn criterion_01_boundary_identity() {
    check(1);
}

#[test]
fn criterion_02_singular_pde_residual_of_closed_form() {
    check(2);
}

#[test]
fn criterion_03_psi_heat_identity() {
    check(3);
}

#[test]
fn criterion_04_barrier_value_dual_representation() {
    check(4);
}

#[test]
fn criterion_05_optimal_payoff_matches_value_function() {
    check(5);
}

#[test]
fn criterion_06_suboptimality_ordering() {
    check(6);
}

#[test]
fn criterion_07_hopf_cole_equivalence() {
    check(7);
}

#[test]
fn criterion_08_pde_vs_feynman_kac() {
    check(8);
}

#[test]
fn criterion_09_eps_convergence_and_rate() {
    check(9);
}

#[test]
fn criterion_10_singular_pde_accuracy() {
    check(10);
}

#[test]
fn criterion_11_reflected_simulator_sanity() {
    check(11);
}
