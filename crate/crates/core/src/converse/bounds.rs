//! Closed-form load bounds and the counting oracles that cross-check their
//! derivations.
//!
//! Three families: the exact optimal load of the generalized combinatorial
//! topology, the average-load lower bound over the ensemble of
//! `level`-uniform connectivities, and the average-load lower bound over the
//! full ensemble of all connectivities. Each average bound also exists in a
//! raw pre-simplification form that must agree with the closed form exactly.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::combinatorics::{binomial_u, ratio, whole, Rational};
use crate::converse::ConverseError;
use crate::topology::{CombProfile, Ensemble};

fn binom_ratio(top: u64, upper: u64, lower: u64) -> Rational {
    // C(top, upper) / C(top, lower); zero when upper > top.
    ratio(binomial_u(top, upper), binomial_u(top, lower))
}

/// Exact optimal worst-case load of the combinatorial topology at integer
/// cache parameter `t`: `sum_{l=0}^{lambda-t} K_l C(lambda, t+l) / C(lambda, t)`.
/// At `t = 0` this is the total user count; at `t = lambda` only the
/// cacheless users remain.
pub fn comb_optimal_load(profile: &CombProfile, t: u32) -> Rational {
    let lambda_caches = profile.lambda_caches();
    assert!(t <= lambda_caches, "t={t} outside [0, {lambda_caches}]");
    let mut total = whole(0);
    for level in 0..=(lambda_caches - t) {
        let count = profile.level_count(level);
        if count == 0 {
            continue;
        }
        total += binom_ratio(lambda_caches as u64, (t + level) as u64, t as u64) * whole(count);
    }
    total
}

/// The converse objective for the combinatorial topology, extended to
/// rational `t` in `[0, lambda]` through the falling-factorial form
/// `K_l * prod_i (lambda - t - i) / (t + l - i)`, with each level-`l` term
/// clamped to zero past `t = lambda - l + 1`. Agrees with
/// [`comb_optimal_load`] at every integer `t`; convex and non-increasing.
pub fn comb_objective(profile: &CombProfile, t: &Rational) -> Rational {
    let lambda_caches = profile.lambda_caches();
    assert!(
        *t >= whole(0) && *t <= whole(lambda_caches),
        "t outside [0, {lambda_caches}]"
    );
    let mut total = whole(profile.level_count(0));
    for level in 1..=lambda_caches {
        let count = profile.level_count(level);
        if count == 0 {
            continue;
        }
        if *t > whole(lambda_caches - level + 1) {
            continue;
        }
        let mut term = whole(count);
        for i in 0..level {
            let numerator = whole(lambda_caches - i) - t;
            let denominator = t + whole(level - i);
            term *= numerator / denominator;
        }
        total += term;
    }
    total
}

/// The strictly positive penalty the level-uniform ensemble average pays
/// over the combinatorial optimum:
/// `(K / |ensemble|) * C(lambda - t, level) * (1 - 1 / C(t + level, level))`.
pub fn level_penalty_term(lambda_caches: u32, level: u32, users: u64, t: u32) -> Rational {
    penalty_term(
        lambda_caches,
        level,
        users,
        t,
        &Ensemble::Level(level).size(lambda_caches, users),
    )
}

/// Penalty term of the full-ensemble bound for one summand `level`.
pub fn full_penalty_term(lambda_caches: u32, users: u64, t: u32, level: u32) -> Rational {
    penalty_term(
        lambda_caches,
        level,
        users,
        t,
        &Ensemble::Full.size(lambda_caches, users),
    )
}

fn penalty_term(
    lambda_caches: u32,
    level: u32,
    users: u64,
    t: u32,
    ensemble_size: &BigUint,
) -> Rational {
    let reach = binomial_u((lambda_caches - t) as u64, level as u64);
    if reach.is_zero() {
        return whole(0);
    }
    let gain = binomial_u((t + level) as u64, level as u64);
    let fraction = whole(1) - ratio(1u32.into(), gain);
    ratio(reach * users, ensemble_size.clone()) * fraction
}

/// Lower bound on the optimal average worst-case load over all
/// connectivities in which each of `users` users reads exactly `level`
/// caches, at cache parameter `t`:
/// `K C(lambda, t+level) / (C(lambda, level) C(lambda, t))` plus the penalty
/// term. Corner points live on `t in [0, lambda - level + 1]`.
pub fn level_avg_lower_bound(lambda_caches: u32, level: u32, users: u64, t: u32) -> Rational {
    assert!(
        level >= 1 && level <= lambda_caches,
        "level {level} outside [1, {lambda_caches}]"
    );
    assert!(t <= lambda_caches, "t={t} outside [0, {lambda_caches}]");
    let states = binomial_u(lambda_caches as u64, level as u64);
    let main = binom_ratio(lambda_caches as u64, (t + level) as u64, t as u64)
        * ratio(users.into(), states);
    main + level_penalty_term(lambda_caches, level, users, t)
}

/// One `level`-summand of the full-ensemble bound:
/// `K C(lambda, t+level) / (2^lambda C(lambda, t))` plus its penalty term.
pub fn full_avg_summand(lambda_caches: u32, users: u64, t: u32, level: u32) -> Rational {
    assert!(t <= lambda_caches, "t={t} outside [0, {lambda_caches}]");
    let states = BigUint::from(Ensemble::Full.state_count(lambda_caches));
    let main = binom_ratio(lambda_caches as u64, (t + level) as u64, t as u64)
        * ratio(users.into(), states);
    main + full_penalty_term(lambda_caches, users, t, level)
}

/// Lower bound on the optimal average worst-case load over the full
/// ensemble of all connectivities of `users` users, at cache parameter `t`:
/// the sum of [`full_avg_summand`] over `level in [0, lambda - t]`. Summands
/// beyond `lambda - t` vanish by the binomial zero convention, so summing
/// over `[0, lambda]` gives the same value.
pub fn full_avg_lower_bound(lambda_caches: u32, users: u64, t: u32) -> Rational {
    let mut total = whole(0);
    for level in 0..=(lambda_caches - t) {
        total += full_avg_summand(lambda_caches, users, t, level);
    }
    total
}

fn raw_count_sum(users: u64, states: u64) -> BigUint {
    // sum_{i=1}^{K-1} (K - i) * C(i + S - 2, i)
    let mut sum = BigUint::zero();
    for i in 1..users {
        sum += binomial_u(i + states - 2, i) * (users - i);
    }
    sum
}

fn raw_term(lambda_caches: u32, level: u32, users: u64, t: u32, states: u64) -> Rational {
    // K * C(lambda - t, level)
    // + (C(lambda, t+level)/C(lambda, t)) * sum_{i=1}^{K-1} (K-i) C(i+S-2, i)
    let direct = whole(users) * whole_big(binomial_u((lambda_caches - t) as u64, level as u64));
    let weighted = binom_ratio(lambda_caches as u64, (t + level) as u64, t as u64)
        * whole_big(raw_count_sum(users, states));
    direct + weighted
}

fn whole_big(n: BigUint) -> Rational {
    Rational::from_integer(n.into())
}

/// The average-load bounds in their raw counting form, before the
/// hockey-stick simplification collapses the composition sums. Must equal
/// the corresponding closed form exactly; serves as the algebraic oracle.
pub fn avg_lower_bound_raw(
    lambda_caches: u32,
    ensemble: Ensemble,
    users: u64,
    t: u32,
) -> Rational {
    let size = whole_big(ensemble.size(lambda_caches, users));
    match ensemble {
        Ensemble::Level(level) => {
            let states = ensemble.state_count(lambda_caches);
            raw_term(lambda_caches, level, users, t, states) / size
        }
        Ensemble::Full => {
            let states = ensemble.state_count(lambda_caches);
            let mut total = whole(0);
            for level in 0..=(lambda_caches - t) {
                total += raw_term(lambda_caches, level, users, t, states);
            }
            total / size
        }
    }
}

/// Brute-force counting oracle: enumerates the whole ensemble and sums, over
/// its members, the number of users on the fixed subset `subset`.
pub fn ensemble_user_count_sum(
    lambda_caches: u32,
    ensemble: Ensemble,
    users: u64,
    subset: &crate::combinatorics::CacheSubset,
    cap: u64,
) -> Result<BigUint, ConverseError> {
    if let Ensemble::Level(level) = ensemble {
        assert_eq!(
            subset.len() as u32,
            level,
            "subset {subset} is not a state of the level-{level} ensemble"
        );
    }
    let size = ensemble.size(lambda_caches, users);
    if size > BigUint::from(cap) {
        return Err(ConverseError::EnsembleTooLarge { size, cap });
    }
    let mut total = BigUint::zero();
    for conn in ensemble.connectivities(lambda_caches, users) {
        total += conn.count_for(subset);
    }
    Ok(total)
}

/// Closed form for [`ensemble_user_count_sum`]: the all-users-on-the-subset
/// member contributes `K`, and the members with `K - i` users there number
/// `C(i + S - 2, i)` for each deficit `i`. Independent of which state is
/// picked, by symmetry.
pub fn ensemble_user_count_closed_form(
    lambda_caches: u32,
    ensemble: Ensemble,
    users: u64,
) -> BigUint {
    let states = ensemble.state_count(lambda_caches);
    raw_count_sum(users, states) + users
}

/// Gap between the level-ensemble average bound and the combinatorial
/// optimum at equal user count, defined when the users spread evenly over
/// the level's cache groups. Equals the penalty term exactly; strictly
/// positive for `t in [1, lambda - level]`.
pub fn avg_vs_comb_gap(
    lambda_caches: u32,
    level: u32,
    users: u64,
    t: u32,
) -> Result<Rational, ConverseError> {
    let groups = binomial_u(lambda_caches as u64, level as u64)
        .to_u64()
        .expect("group count fits u64");
    if groups == 0 || users % groups != 0 {
        return Err(ConverseError::DivisibilityViolation { users, groups });
    }
    let profile = CombProfile::single_level(lambda_caches, level, users / groups)
        .expect("level validated by the divisibility check");
    Ok(level_avg_lower_bound(lambda_caches, level, users, t) - comb_optimal_load(&profile, t))
}
