//! Acceptance gate: runs the verification battery one criterion per test so
//! the harness emits one pass/fail line each, and enforces the wall-clock
//! budgets the battery declares.

use sturmian::battery::CRITERIA;

fn gate(index: usize) {
    let outcome = CRITERIA[index].run();
    println!("{} in {:.2}s", outcome.line(), outcome.seconds);
    if let Err(why) = &outcome.result {
        panic!("criterion {} ({}): {why}", outcome.number, outcome.name);
    }
    if let Some(budget) = outcome.budget {
        assert!(
            outcome.seconds < budget,
            "criterion {} exceeded its {budget}s budget: {:.2}s",
            outcome.number,
            outcome.seconds
        );
    }
}

#[test]
fn criterion_1_fibonacci_prefix() {
    gate(0);
}

#[test]
fn criterion_2_orbit_extremes() {
    gate(1);
}

#[test]
fn criterion_3_round_trip() {
    gate(2);
}

#[test]
fn criterion_4_orbit_confinement() {
    gate(3);
}

#[test]
fn criterion_5_complexity_and_balance() {
    gate(4);
}

#[test]
fn criterion_6_order_laws() {
    gate(5);
}

#[test]
fn criterion_7_identity() {
    gate(6);
}

#[test]
fn criterion_8_frequency_defects() {
    gate(7);
}

#[test]
fn criterion_9_admissibility_oracle() {
    gate(8);
}
