//! Full acceptance suite: one test per criterion, each printing a
//! PASS/FAIL line with the measured values (run with `--nocapture` to see
//! every line; the summary test prints the whole table).

use renvol_core::acceptance;

const SEED: u64 = 0x5eed_2026;

fn check(result: renvol_core::acceptance::CriterionResult) {
    println!("{}", result.line());
    assert!(result.passed, "{}", result.line());
}

#[test]
fn criterion_01_cusp_h_integral() {
    check(acceptance::criterion_1_cusp_h_integral(SEED));
}

#[test]
fn criterion_02_cusp_volume() {
    check(acceptance::criterion_2_cusp_volume(SEED));
}

#[test]
fn criterion_03_cusp_renormalized_limit() {
    check(acceptance::criterion_3_cusp_renvol_limit());
}

#[test]
fn criterion_04_tube_divergence() {
    check(acceptance::criterion_4_tube_divergence());
}

#[test]
fn criterion_05_schwarzian() {
    check(acceptance::criterion_5_schwarzian(SEED));
}

#[test]
fn criterion_06_polyakov() {
    check(acceptance::criterion_6_polyakov(SEED));
}

#[test]
fn criterion_07_naturality_and_offset() {
    check(acceptance::criterion_7_naturality_and_offset(SEED));
}

#[test]
fn criterion_08_curvature() {
    check(acceptance::criterion_8_curvature());
}

#[test]
fn criterion_09_adapted_correction() {
    check(acceptance::criterion_9_adapted_correction(SEED));
}

#[test]
fn criterion_10_thresholds() {
    check(acceptance::criterion_10_thresholds());
}

#[test]
fn criterion_11_qd_norms() {
    check(acceptance::criterion_11_qd_norms());
}

/// Prints the whole table in order (informational; assertions live in the
/// per-criterion tests above).
#[test]
fn acceptance_table() {
    for r in acceptance::run_all(SEED) {
        println!("{}", r.line());
    }
}
