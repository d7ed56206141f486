//! Self-verification suite.
//!
//! Each check runs a grid of exact identities or property samples and
//! reports one pass/fail outcome with a case count. The CLI `verify`
//! subcommand prints these as a table; the integration tests reuse them at
//! the same grid sizes.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::caching::{man_place, suggest_file_bits, Library, PlacedLibrary};
use crate::combinatorics::{
    binomial, binomial_u, hockey_stick_check, permutations, whole, CacheSubset,
};
use crate::converse::{
    avg_lower_bound_raw, avg_vs_comb_gap, build_side_info_graph, comb_optimal_load,
    connectivity_lower_bound, ensemble_user_count_closed_form, ensemble_user_count_sum,
    full_avg_lower_bound, full_avg_summand, is_acyclic, level_avg_lower_bound,
    level_penalty_term, permutation_acyclic_set, DEFAULT_ENUMERATION_CAP,
};
use crate::delivery::{comb_deliver, decode, greedy_deliver, measured_load, DemandVector};
use crate::topology::{build_combinatorial, CombProfile, Connectivity, Ensemble};

/// Result of one named check.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub cases: u64,
    pub detail: String,
}

impl CheckOutcome {
    fn pass(name: &'static str, cases: u64, detail: impl Into<String>) -> Self {
        CheckOutcome {
            name,
            passed: true,
            cases,
            detail: detail.into(),
        }
    }

    fn fail(name: &'static str, cases: u64, detail: impl Into<String>) -> Self {
        CheckOutcome {
            name,
            passed: false,
            cases,
            detail: detail.into(),
        }
    }
}

/// A deterministic spread of combinatorial profiles for one cache count:
/// every single-level profile at one and two users per group, plus mixed
/// profiles exercising coexisting connection levels. At least ten per count.
pub fn standard_profiles(lambda_caches: u32) -> Vec<CombProfile> {
    let levels = lambda_caches as usize + 1;
    let mut out = Vec::new();
    for copies in 1..=2u64 {
        for level in 0..=lambda_caches {
            out.push(CombProfile::single_level(lambda_caches, level, copies).unwrap());
        }
    }
    let mut mixed: Vec<Vec<u64>> = vec![
        vec![1; levels],
        (0..levels).map(|l| u64::from(l % 2 == 1)).collect(),
        (0..levels).map(|l| u64::from(l % 2 == 0)).collect(),
    ];
    // The (1,2,1,0,...) shape once there are enough levels for it.
    if levels >= 3 {
        let mut v = vec![0; levels];
        v[0] = 1;
        v[1] = 2;
        v[2] = 1;
        mixed.push(v);
    }
    for v in mixed {
        out.push(CombProfile::new(lambda_caches, v).unwrap());
    }
    out
}

fn simulate_profile(
    profile: &CombProfile,
    t: u32,
    seed: u64,
) -> (PlacedLibrary, DemandVector, crate::delivery::TransmissionSet) {
    let lambda_caches = profile.lambda_caches();
    let users = profile.total_users().max(1);
    let bits = suggest_file_bits(lambda_caches, t, 8);
    let library = Library::synthetic(users, bits, seed).expect("synthetic library");
    let placed = man_place(library, lambda_caches, t).expect("compatible size");
    let demand = DemandVector::canonical_distinct(&build_combinatorial(profile));
    let tx = comb_deliver(&placed, profile, &demand).expect("delivery");
    (placed, demand, tx)
}

/// Pascal recurrence and hockey-stick identity over an integer grid.
pub fn binomial_identities(max_n: u64) -> CheckOutcome {
    let mut cases = 0;
    for n in 0..=max_n as i64 {
        for k in 0..=n {
            cases += 1;
            // The recurrence holds from the first row on; at (0,0) the zero
            // extension empties the right-hand side.
            if n >= 1 && binomial(n, k) != binomial(n - 1, k - 1) + binomial(n - 1, k) {
                return CheckOutcome::fail(
                    "binomial-identities",
                    cases,
                    format!("Pascal recurrence fails at ({n},{k})"),
                );
            }
            if !hockey_stick_check(n as u64, k as u64) {
                return CheckOutcome::fail(
                    "binomial-identities",
                    cases,
                    format!("hockey-stick identity fails at ({n},{k})"),
                );
            }
        }
    }
    CheckOutcome::pass("binomial-identities", cases, format!("grid n <= {max_n}"))
}

/// Exact three-way tightness on the combinatorial topology: the simulated
/// bit count, the closed-form load and the permutation-scan lower bound must
/// agree as rationals, for every profile and every t.
pub fn tightness(max_lambda: u32) -> CheckOutcome {
    let mut cases = 0;
    for lambda_caches in 2..=max_lambda {
        for profile in standard_profiles(lambda_caches) {
            let conn = build_combinatorial(&profile);
            for t in 0..=lambda_caches {
                cases += 1;
                let (placed, _, tx) = simulate_profile(&profile, t, 1000 + cases);
                let simulated = measured_load(&tx, placed.file_bits());
                let closed = comb_optimal_load(&profile, t);
                let bound = match connectivity_lower_bound(&conn, t) {
                    Ok(b) => b,
                    Err(e) => {
                        return CheckOutcome::fail(
                            "scheme-converse-tightness",
                            cases,
                            format!("bound failed for {profile} t={t}: {e}"),
                        )
                    }
                };
                if simulated != closed || closed != bound {
                    return CheckOutcome::fail(
                        "scheme-converse-tightness",
                        cases,
                        format!(
                            "profile {profile} t={t}: simulated {simulated}, closed {closed}, bound {bound}"
                        ),
                    );
                }
            }
        }
    }
    CheckOutcome::pass(
        "scheme-converse-tightness",
        cases,
        format!("cache counts 2..={max_lambda}"),
    )
}

fn random_profile(rng: &mut ChaCha8Rng, lambda_caches: u32, max_users: u64) -> CombProfile {
    loop {
        let per_level: Vec<u64> = (0..=lambda_caches)
            .map(|_| if rng.random_bool(0.4) { rng.random_range(1..=2) } else { 0 })
            .collect();
        let profile = CombProfile::new(lambda_caches, per_level).unwrap();
        let users = profile.total_users();
        if users >= 1 && users <= max_users {
            return profile;
        }
    }
}

/// Randomized end-to-end decodability: every user of every sampled instance
/// must reproduce its requested file bit for bit.
pub fn decodability(case_count: u64, seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..case_count {
        let lambda_caches = rng.random_range(2..=5u32);
        let profile = random_profile(&mut rng, lambda_caches, 24);
        let t = rng.random_range(0..=lambda_caches);
        let conn = build_combinatorial(&profile);
        let users = conn.total_users();
        let bits = suggest_file_bits(lambda_caches, t, 8) * rng.random_range(1..=2u64);
        let library = Library::synthetic(users.max(1), bits, rng.random()).unwrap();
        let placed = man_place(library, lambda_caches, t).unwrap();
        let file_count = placed.library().file_count();
        let demand = if rng.random_bool(0.75) {
            DemandVector::random_distinct(&conn, file_count, &mut rng).unwrap()
        } else {
            DemandVector::random(&conn, file_count, &mut rng)
        };
        let tx = match comb_deliver(&placed, &profile, &demand) {
            Ok(tx) => tx,
            Err(e) => {
                return CheckOutcome::fail(
                    "bit-exact-decodability",
                    case,
                    format!("delivery failed: {e}"),
                )
            }
        };
        for user in conn.users() {
            let want = placed.library().file(demand.file_for(&user).unwrap());
            match decode(&placed, &user, &demand, &tx) {
                Ok(got) if got == want => {}
                Ok(_) => {
                    return CheckOutcome::fail(
                        "bit-exact-decodability",
                        case,
                        format!("user {user} decoded wrong bytes ({profile}, t={t})"),
                    )
                }
                Err(e) => {
                    return CheckOutcome::fail(
                        "bit-exact-decodability",
                        case,
                        format!("user {user} failed to decode: {e}"),
                    )
                }
            }
        }
    }
    CheckOutcome::pass(
        "bit-exact-decodability",
        case_count,
        "randomized profiles, parameters, seeds and demands",
    )
}

/// Seeded mutation: dropping one constituent from a message's XOR while the
/// metadata still lists it must be caught as a decode mismatch.
pub fn fault_detection(seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let profile = CombProfile::new(4, vec![0, 1, 1, 0, 0]).unwrap();
    let t = 2;
    let (placed, demand, mut tx) = simulate_profile(&profile, t, rng.random());
    let victim = rng.random_range(0..tx.messages().len());
    let constituent = {
        let m = &tx.messages()[victim];
        m.constituents[rng.random_range(0..m.constituents.len())].clone()
    };
    let subfile = placed.subfile(&constituent.subfile).to_vec();
    tx.corrupt_message_payload(victim, &subfile);

    let conn = build_combinatorial(&profile);
    let mut detected = false;
    for user in conn.users() {
        let want = placed.library().file(demand.file_for(&user).unwrap());
        match decode(&placed, &user, &demand, &tx) {
            Ok(got) => detected |= got != want,
            Err(_) => detected = true,
        }
    }
    if detected {
        CheckOutcome::pass("fault-injection-detected", 1, "mutated XOR caught")
    } else {
        CheckOutcome::fail(
            "fault-injection-detected",
            1,
            "mutated transmission decoded cleanly",
        )
    }
}

fn random_connectivity(rng: &mut ChaCha8Rng, lambda_caches: u32, users: u64) -> Connectivity {
    let states: Vec<CacheSubset> = Ensemble::Full.states(lambda_caches);
    let groups = (0..users).map(|_| {
        let state = states[rng.random_range(0..states.len())].clone();
        (state, 1u64)
    });
    Connectivity::new(lambda_caches, groups).unwrap()
}

/// Layered sets are acyclic: exhaustively over every connectivity of the
/// full ensemble (small grid) and every permutation, then over random larger
/// samples, under both the generic and the size-t placement splits.
pub fn acyclicity(
    exhaustive_lambda: u32,
    exhaustive_users: u64,
    samples: u64,
    seed: u64,
) -> CheckOutcome {
    let mut cases = 0;
    for lambda_caches in 1..=exhaustive_lambda {
        for users in 1..=exhaustive_users {
            for conn in Ensemble::Full.connectivities(lambda_caches, users) {
                let demand = DemandVector::canonical_distinct(&conn);
                let graph = build_side_info_graph(&conn, &demand, None).unwrap();
                for perm in permutations(lambda_caches) {
                    cases += 1;
                    let set =
                        permutation_acyclic_set(&conn, &demand, &perm, None).unwrap();
                    if is_acyclic(&graph, &set) != Ok(true) {
                        return CheckOutcome::fail(
                            "layered-set-acyclicity",
                            cases,
                            format!("cycle at lambda={lambda_caches} users={users} perm={perm}"),
                        );
                    }
                }
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        cases += 1;
        let lambda_caches = rng.random_range(3..=5u32);
        let users = rng.random_range(2..=4u64);
        let conn = random_connectivity(&mut rng, lambda_caches, users);
        let mut demand_rng = ChaCha8Rng::seed_from_u64(rng.random());
        let demand =
            DemandVector::random_distinct(&conn, conn.total_users() as u32, &mut demand_rng)
                .unwrap();
        let level = if rng.random_bool(0.5) {
            None
        } else {
            Some(rng.random_range(0..=lambda_caches))
        };
        let graph = build_side_info_graph(&conn, &demand, level).unwrap();
        let perm_index = rng.random_range(0..factorial(lambda_caches));
        let perm = permutations(lambda_caches).nth(perm_index as usize).unwrap();
        let set = permutation_acyclic_set(&conn, &demand, &perm, level).unwrap();
        if is_acyclic(&graph, &set) != Ok(true) {
            return CheckOutcome::fail(
                "layered-set-acyclicity",
                cases,
                format!("cycle in sampled case lambda={lambda_caches} perm={perm}"),
            );
        }
    }
    CheckOutcome::pass(
        "layered-set-acyclicity",
        cases,
        format!(
            "exhaustive to lambda={exhaustive_lambda}, users={exhaustive_users}; {samples} samples"
        ),
    )
}

fn factorial(n: u32) -> u64 {
    (1..=n as u64).product::<u64>().max(1)
}

/// The raw counting form of each average bound equals its simplified closed
/// form, exactly, across the whole parameter grid.
pub fn bound_algebra(max_lambda: u32, max_users: u64) -> CheckOutcome {
    let mut cases = 0;
    for lambda_caches in 1..=max_lambda {
        for users in 1..=max_users {
            for level in 1..=lambda_caches {
                for t in 0..=(lambda_caches - level + 1) {
                    cases += 1;
                    let raw =
                        avg_lower_bound_raw(lambda_caches, Ensemble::Level(level), users, t);
                    let closed = level_avg_lower_bound(lambda_caches, level, users, t);
                    if raw != closed {
                        return CheckOutcome::fail(
                            "bound-algebra",
                            cases,
                            format!(
                                "level ensemble lambda={lambda_caches} level={level} K={users} t={t}: raw {raw} != closed {closed}"
                            ),
                        );
                    }
                }
            }
            for t in 0..=lambda_caches {
                cases += 1;
                let raw = avg_lower_bound_raw(lambda_caches, Ensemble::Full, users, t);
                let closed = full_avg_lower_bound(lambda_caches, users, t);
                if raw != closed {
                    return CheckOutcome::fail(
                        "bound-algebra",
                        cases,
                        format!(
                            "full ensemble lambda={lambda_caches} K={users} t={t}: raw {raw} != closed {closed}"
                        ),
                    );
                }
            }
        }
    }
    CheckOutcome::pass(
        "bound-algebra",
        cases,
        format!("grid lambda <= {max_lambda}, users <= {max_users}"),
    )
}

/// Enumerated per-state user sums match their closed form, for every state
/// of both ensembles.
pub fn ensemble_counting(max_lambda: u32, max_users: u64, cap: u64) -> CheckOutcome {
    let mut cases = 0;
    for lambda_caches in 1..=max_lambda {
        for users in 1..=max_users {
            for ensemble in ensembles_for(lambda_caches) {
                let expected = ensemble_user_count_closed_form(lambda_caches, ensemble, users);
                for state in ensemble.states(lambda_caches) {
                    cases += 1;
                    match ensemble_user_count_sum(lambda_caches, ensemble, users, &state, cap) {
                        Ok(got) if got == expected => {}
                        Ok(got) => {
                            return CheckOutcome::fail(
                                "ensemble-counting",
                                cases,
                                format!(
                                    "lambda={lambda_caches} K={users} state {state}: {got} != {expected}"
                                ),
                            )
                        }
                        Err(e) => {
                            return CheckOutcome::fail(
                                "ensemble-counting",
                                cases,
                                format!("enumeration failed: {e}"),
                            )
                        }
                    }
                }
            }
        }
    }
    CheckOutcome::pass(
        "ensemble-counting",
        cases,
        format!("grid lambda <= {max_lambda}, users <= {max_users}, both ensembles"),
    )
}

fn ensembles_for(lambda_caches: u32) -> Vec<Ensemble> {
    let mut v: Vec<Ensemble> = (1..=lambda_caches).map(Ensemble::Level).collect();
    v.push(Ensemble::Full);
    v
}

/// Enumerated ensemble sizes match the weak-composition closed forms.
pub fn ensemble_sizes(max_lambda: u32, max_users: u64) -> CheckOutcome {
    let mut cases = 0;
    for lambda_caches in 1..=max_lambda {
        for users in 1..=max_users {
            for ensemble in ensembles_for(lambda_caches) {
                cases += 1;
                let enumerated = ensemble.connectivities(lambda_caches, users).count();
                let closed = ensemble.size(lambda_caches, users);
                if BigUint::from(enumerated) != closed {
                    return CheckOutcome::fail(
                        "ensemble-sizes",
                        cases,
                        format!(
                            "lambda={lambda_caches} K={users} {ensemble:?}: {enumerated} != {closed}"
                        ),
                    );
                }
            }
        }
    }
    CheckOutcome::pass(
        "ensemble-sizes",
        cases,
        format!("grid lambda <= {max_lambda}, users <= {max_users}"),
    )
}

/// The average-vs-optimal gap equals the penalty term exactly and is
/// strictly positive away from the endpoints.
pub fn gap_positivity(max_lambda: u32) -> CheckOutcome {
    let mut cases = 0;
    for lambda_caches in 2..=max_lambda {
        for level in 1..=lambda_caches {
            let groups = binomial_u(lambda_caches as u64, level as u64)
                .to_u64()
                .unwrap();
            for copies in 1..=2u64 {
                let users = groups * copies;
                for t in 0..=(lambda_caches - level) {
                    cases += 1;
                    let gap = match avg_vs_comb_gap(lambda_caches, level, users, t) {
                        Ok(g) => g,
                        Err(e) => {
                            return CheckOutcome::fail(
                                "avg-vs-optimal-gap",
                                cases,
                                format!("gap failed: {e}"),
                            )
                        }
                    };
                    let penalty = level_penalty_term(lambda_caches, level, users, t);
                    if gap != penalty {
                        return CheckOutcome::fail(
                            "avg-vs-optimal-gap",
                            cases,
                            format!(
                                "lambda={lambda_caches} level={level} K={users} t={t}: gap {gap} != penalty {penalty}"
                            ),
                        );
                    }
                    if t >= 1 && gap <= whole(0) {
                        return CheckOutcome::fail(
                            "avg-vs-optimal-gap",
                            cases,
                            format!(
                                "lambda={lambda_caches} level={level} K={users} t={t}: gap not positive"
                            ),
                        );
                    }
                }
            }
        }
    }
    CheckOutcome::pass(
        "avg-vs-optimal-gap",
        cases,
        format!("grid lambda <= {max_lambda}"),
    )
}

/// Discrete convexity and monotonicity of all three bound families, plus the
/// endpoint identities of the combinatorial objective.
pub fn convexity(max_lambda: u32) -> CheckOutcome {
    let mut cases = 0;
    for lambda_caches in 2..=max_lambda {
        let mut profiles = vec![CombProfile::new(
            lambda_caches,
            (0..=lambda_caches).map(|l| (l as u64 % 3) + 1).collect(),
        )
        .unwrap()];
        for level in 0..=lambda_caches {
            profiles.push(CombProfile::single_level(lambda_caches, level, 2).unwrap());
        }
        for profile in &profiles {
            let f = |t: u32| comb_optimal_load(profile, t);
            if f(0) != whole(profile.total_users())
                || f(lambda_caches) != whole(profile.level_count(0))
            {
                return CheckOutcome::fail(
                    "objective-convexity",
                    cases,
                    format!("endpoints wrong for {profile}"),
                );
            }
            for t in 0..lambda_caches {
                cases += 1;
                if f(t + 1) > f(t) {
                    return CheckOutcome::fail(
                        "objective-convexity",
                        cases,
                        format!("{profile} not non-increasing at t={t}"),
                    );
                }
                if t + 2 <= lambda_caches {
                    let dd = f(t + 2) - whole(2) * f(t + 1) + f(t);
                    if dd < whole(0) {
                        return CheckOutcome::fail(
                            "objective-convexity",
                            cases,
                            format!("{profile} not convex at t={t}"),
                        );
                    }
                }
            }
        }

        let users = 5u64;
        for level in 1..=lambda_caches {
            let g = |t: u32| level_avg_lower_bound(lambda_caches, level, users, t);
            let last = lambda_caches - level + 1;
            for t in 0..last {
                cases += 1;
                if g(t + 1) > g(t) {
                    return CheckOutcome::fail(
                        "objective-convexity",
                        cases,
                        format!("level family lambda={lambda_caches} level={level} rises at t={t}"),
                    );
                }
            }
            for t in 0..=last.saturating_sub(2) {
                cases += 1;
                let dd = g(t + 2) - whole(2) * g(t + 1) + g(t);
                if dd < whole(0) {
                    return CheckOutcome::fail(
                        "objective-convexity",
                        cases,
                        format!(
                            "level family lambda={lambda_caches} level={level} not convex at t={t}"
                        ),
                    );
                }
            }
        }

        for level in 0..=lambda_caches {
            let h = |t: u32| full_avg_summand(lambda_caches, users, t, level);
            for t in 0..=(lambda_caches - 2) {
                cases += 1;
                let dd = h(t + 2) - whole(2) * h(t + 1) + h(t);
                if dd < whole(0) {
                    return CheckOutcome::fail(
                        "objective-convexity",
                        cases,
                        format!(
                            "full-family summand lambda={lambda_caches} level={level} not convex at t={t}"
                        ),
                    );
                }
            }
        }
    }
    CheckOutcome::pass(
        "objective-convexity",
        cases,
        format!("three families, lambda <= {max_lambda}"),
    )
}

/// For every member of every small level ensemble: the per-connectivity
/// bound never exceeds the greedy achievable load, and the ensemble average
/// of the bounds dominates the closed-form average bound.
pub fn sandwich(max_lambda: u32, max_users: u64) -> CheckOutcome {
    let mut cases = 0;
    for lambda_caches in 2..=max_lambda {
        for level in 1..=lambda_caches {
            for users in 1..=max_users {
                for t in 0..=(lambda_caches - level + 1) {
                    let bits = suggest_file_bits(lambda_caches, t, 8);
                    let library = Library::synthetic(users, bits, 7).unwrap();
                    let placed = man_place(library, lambda_caches, t).unwrap();
                    let mut bound_sum = whole(0);
                    let mut members = 0u64;
                    for conn in Ensemble::Level(level).connectivities(lambda_caches, users) {
                        cases += 1;
                        members += 1;
                        let bound = connectivity_lower_bound(&conn, t).unwrap();
                        let demand = DemandVector::canonical_distinct(&conn);
                        let greedy = greedy_deliver(&placed, &conn, &demand).unwrap();
                        let greedy_load = measured_load(&greedy, placed.file_bits());
                        if bound > greedy_load {
                            return CheckOutcome::fail(
                                "bound-sandwich",
                                cases,
                                format!(
                                    "lambda={lambda_caches} level={level} K={users} t={t}: bound {bound} above greedy {greedy_load}"
                                ),
                            );
                        }
                        bound_sum += bound;
                    }
                    let average = bound_sum / whole(members);
                    let closed = level_avg_lower_bound(lambda_caches, level, users, t);
                    if average < closed {
                        return CheckOutcome::fail(
                            "bound-sandwich",
                            cases,
                            format!(
                                "lambda={lambda_caches} level={level} K={users} t={t}: average {average} below closed form {closed}"
                            ),
                        );
                    }
                }
            }
        }
    }
    CheckOutcome::pass(
        "bound-sandwich",
        cases,
        format!("level ensembles, lambda <= {max_lambda}, users <= {max_users}"),
    )
}

/// The full default suite, in reporting order.
pub fn run_all(seed: u64) -> Vec<CheckOutcome> {
    vec![
        binomial_identities(20),
        tightness(5),
        decodability(200, seed),
        fault_detection(seed ^ 0x5eed),
        acyclicity(4, 2, 100, seed ^ 0xacc),
        bound_algebra(5, 6),
        ensemble_counting(4, 4, DEFAULT_ENUMERATION_CAP),
        ensemble_sizes(4, 4),
        gap_positivity(6),
        convexity(12),
        sandwich(4, 3),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_profiles_are_plentiful_and_valid() {
        for lambda_caches in 2..=5u32 {
            let profiles = standard_profiles(lambda_caches);
            assert!(profiles.len() >= 10, "need >= 10 profiles");
            for p in &profiles {
                assert_eq!(p.lambda_caches(), lambda_caches);
            }
            // The canonical single-pair-level profile is present.
            assert!(profiles
                .iter()
                .any(|p| p.per_level().iter().sum::<u64>() == 1 && p.level_count(2) == 1));
        }
    }

    #[test]
    fn fault_detection_detects() {
        assert!(fault_detection(99).passed);
    }

    #[test]
    fn quick_suite_passes() {
        // Small-grid smoke test of each check; full sizes run in the
        // acceptance suite.
        assert!(binomial_identities(8).passed);
        assert!(tightness(3).passed);
        assert!(decodability(10, 5).passed);
        assert!(acyclicity(3, 2, 5, 5).passed);
        assert!(bound_algebra(3, 3).passed);
        assert!(ensemble_counting(3, 3, DEFAULT_ENUMERATION_CAP).passed);
        assert!(ensemble_sizes(3, 3).passed);
        assert!(gap_positivity(4).passed);
        assert!(convexity(6).passed);
        assert!(sandwich(3, 2).passed);
    }
}
