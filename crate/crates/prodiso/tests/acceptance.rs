//! The acceptance gate: every desk check must pass within its time
//! budget. One test per check so a failure names the check it broke,
//! with the check's own details in the assertion message.

use prodiso::isometry::SearchConfig;
use prodiso::verify::run_criterion;

fn gate(id: usize, budget_ms: u128) {
    let r = run_criterion(id, &SearchConfig::default());
    eprintln!(
        "check {} {}: {} ({} ms) - {}",
        r.id,
        r.name,
        if r.passed { "pass" } else { "FAIL" },
        r.millis,
        r.details,
    );
    assert!(
        r.millis <= budget_ms,
        "check {} took {} ms, budget {} ms",
        r.id,
        r.millis,
        budget_ms
    );
    assert!(r.passed, "check {} ({}) failed: {}", r.id, r.name, r.details);
}

#[test]
fn reducibility_sweep() {
    gate(1, 60_000);
}

#[test]
fn two_point_contrast() {
    gate(2, 1_000);
}

#[test]
fn slice_dichotomies() {
    gate(3, 30_000);
}

#[test]
fn embedding_certification() {
    gate(4, 30_000);
}

#[test]
fn quad_dimension() {
    gate(5, 300_000);
}

#[test]
fn structure_axioms() {
    gate(6, 30_000);
}

#[test]
fn factorization_oracle() {
    gate(7, 60_000);
}
