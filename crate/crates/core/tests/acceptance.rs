//! Acceptance suite: one test per exit criterion, each printing a pass/fail
//! line. Everything asserts exact rational identities or exhaustive/sampled
//! properties at desk scale.

use macc_core::checks::{self, CheckOutcome};
use macc_core::combinatorics::{ratio, whole};
use macc_core::converse::{comb_optimal_load, full_avg_lower_bound, level_avg_lower_bound};
use macc_core::topology::CombProfile;

const SEED: u64 = 42;

fn report(criterion: &str, outcome: &CheckOutcome) {
    println!(
        "{} {criterion}: {} ({} cases; {})",
        if outcome.passed { "PASS" } else { "FAIL" },
        outcome.name,
        outcome.cases,
        outcome.detail
    );
    assert!(outcome.passed, "{criterion}: {}", outcome.detail);
}

#[test]
fn criterion_1_scheme_converse_tightness() {
    // Spot values first: one user per pair of four caches.
    let profile = CombProfile::new(4, vec![0, 0, 1, 0, 0]).unwrap();
    assert_eq!(comb_optimal_load(&profile, 1), whole(1));
    assert_eq!(comb_optimal_load(&profile, 2), ratio(1u32.into(), 6u32.into()));
    assert_eq!(comb_optimal_load(&profile, 3), whole(0));

    // Simulated bit count == closed form == permutation-scan bound, exactly,
    // for >= 10 profiles per cache count (single and mixed levels) and all t.
    report("criterion-1", &checks::tightness(5));
}

#[test]
fn criterion_2_bit_exact_decodability() {
    report("criterion-2", &checks::decodability(200, SEED));
    report("criterion-2", &checks::fault_detection(SEED ^ 0x5eed));
}

#[test]
fn criterion_3_acyclicity() {
    // Exhaustive over the full ensembles up to four caches and two users,
    // every cache permutation; then 100 random larger samples.
    report("criterion-3", &checks::acyclicity(4, 2, 100, SEED ^ 0xacc));
}

#[test]
fn criterion_4_bound_algebra() {
    // Raw composition-sum forms equal the simplified closed forms, exactly,
    // over the whole grid for both ensembles.
    report("criterion-4", &checks::bound_algebra(5, 6));
}

#[test]
fn criterion_5_counting_oracle() {
    report(
        "criterion-5",
        &checks::ensemble_counting(4, 4, macc_core::converse::DEFAULT_ENUMERATION_CAP),
    );
}

#[test]
fn criterion_6_ensemble_sizes() {
    report("criterion-6", &checks::ensemble_sizes(4, 4));
}

#[test]
fn criterion_7_average_gap() {
    report("criterion-7", &checks::gap_positivity(6));
}

#[test]
fn criterion_8_convexity() {
    // Second differences of all three bound families are non-negative up to
    // twelve caches; the combinatorial objective is non-increasing with the
    // expected endpoints. Spot endpoints:
    let profile = CombProfile::new(12, vec![3, 1, 0, 2, 0, 0, 1, 0, 0, 0, 0, 0, 1]).unwrap();
    assert_eq!(
        comb_optimal_load(&profile, 0),
        whole(profile.total_users())
    );
    assert_eq!(comb_optimal_load(&profile, 12), whole(3));

    report("criterion-8", &checks::convexity(12));
}

#[test]
fn criterion_9_bound_sandwich() {
    // Per-connectivity bound <= greedy load for every member, and the
    // ensemble average of the bounds dominates the closed-form average.
    report("criterion-9", &checks::sandwich(4, 3));

    // Independent spot check of the closed forms the sandwich compares
    // against.
    assert_eq!(
        level_avg_lower_bound(3, 2, 2, 1),
        ratio(4u32.into(), 9u32.into())
    );
    assert_eq!(full_avg_lower_bound(1, 1, 0), whole(1));
}
