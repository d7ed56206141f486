//! Connectivities and connectivity ensembles.
//!
//! A connectivity records, for every subset of caches, how many users are
//! connected exactly and uniquely to that subset. Users are unlabeled:
//! permuting users yields the same connectivity, and user identity exists
//! only through the canonical `(subset, k)` naming.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combinatorics::{binomial_u, subsets, weak_compositions, CacheSubset};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TopologyError {
    #[error("cache index {index} out of range [1, {lambda_caches}]")]
    CacheIndexOutOfRange { index: u32, lambda_caches: u32 },
    #[error("duplicate cache index {index} within one group")]
    DuplicateCacheIndex { index: u32 },
    #[error("duplicate group {{{group}}}")]
    DuplicateGroup { group: String },
    #[error("profile needs {expected} per-level counts for {lambda_caches} caches, got {got}")]
    ProfileLength {
        lambda_caches: u32,
        expected: usize,
        got: usize,
    },
    #[error("connection level {level} out of range [1, {lambda_caches}]")]
    LevelOutOfRange { level: u32, lambda_caches: u32 },
    #[error("malformed connectivity file: {0}")]
    Malformed(String),
}

/// How many users read each cache subset. Canonical: zero-count entries are
/// omitted and groups are kept sorted (size first, then lexicographic).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Connectivity {
    lambda_caches: u32,
    groups: BTreeMap<CacheSubset, u64>,
}

impl Connectivity {
    /// Builds a connectivity, validating every cache index against
    /// `lambda_caches`. Counts of equal subsets accumulate; zero counts are
    /// dropped.
    pub fn new(
        lambda_caches: u32,
        groups: impl IntoIterator<Item = (CacheSubset, u64)>,
    ) -> Result<Self, TopologyError> {
        let mut map: BTreeMap<CacheSubset, u64> = BTreeMap::new();
        for (subset, count) in groups {
            for index in subset.iter() {
                if index == 0 || index > lambda_caches {
                    return Err(TopologyError::CacheIndexOutOfRange {
                        index,
                        lambda_caches,
                    });
                }
            }
            if count > 0 {
                *map.entry(subset).or_insert(0) += count;
            }
        }
        Ok(Connectivity {
            lambda_caches,
            groups: map,
        })
    }

    pub fn empty(lambda_caches: u32) -> Self {
        Connectivity {
            lambda_caches,
            groups: BTreeMap::new(),
        }
    }

    pub fn lambda_caches(&self) -> u32 {
        self.lambda_caches
    }

    pub fn total_users(&self) -> u64 {
        self.groups.values().sum()
    }

    /// Groups in canonical order (subset size ascending, then lexicographic).
    pub fn groups(&self) -> impl Iterator<Item = (&CacheSubset, u64)> {
        self.groups.iter().map(|(s, &c)| (s, c))
    }

    /// Number of users connected exactly and uniquely to `subset`.
    pub fn count_for(&self, subset: &CacheSubset) -> u64 {
        self.groups.get(subset).copied().unwrap_or(0)
    }

    /// All users in deterministic order: subset size ascending, subset
    /// lexicographic, then copy index ascending.
    pub fn users(&self) -> Vec<UserId> {
        let mut out = Vec::with_capacity(self.total_users() as usize);
        for (subset, &count) in &self.groups {
            for k in 1..=count {
                out.push(UserId {
                    caches: subset.clone(),
                    index: k,
                });
            }
        }
        out
    }

    /// Classifies this connectivity: does every user sit on the same number
    /// of caches, and is it an instance of the generalized combinatorial
    /// topology (uniform counts over all subsets of each size)?
    pub fn membership(&self) -> Membership {
        let mut levels: Vec<u32> = self.groups.keys().map(|s| s.len() as u32).collect();
        levels.dedup(); // keys are size-sorted, so equal sizes are adjacent
        let uniform_level = match levels.len() {
            1 => Some(levels[0]),
            _ => None,
        };

        // Combinatorial: for each level with any users, all C(lambda, level)
        // subsets must carry the same count.
        let mut per_level = vec![0u64; self.lambda_caches as usize + 1];
        let mut combinatorial = true;
        'levels: for level in 0..=self.lambda_caches {
            let level_subsets = subsets(self.lambda_caches, level);
            let mut counts = level_subsets.iter().map(|s| self.count_for(s));
            let first = counts.next().unwrap_or(0);
            for c in counts {
                if c != first {
                    combinatorial = false;
                    break 'levels;
                }
            }
            per_level[level as usize] = first;
        }
        Membership {
            uniform_level,
            empty: self.groups.is_empty(),
            profile: combinatorial
                .then(|| CombProfile::new(self.lambda_caches, per_level).expect("length matches")),
        }
    }

    /// JSON form: `{"lambda_caches": 4, "groups": [{"caches": [1,2], "count": 2}, ...]}`.
    pub fn to_json_string(&self) -> String {
        let file = ConnectivityFile {
            lambda_caches: self.lambda_caches,
            groups: self
                .groups
                .iter()
                .map(|(s, &count)| GroupFile {
                    caches: s.as_slice().to_vec(),
                    count,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("connectivity serializes")
    }

    /// Parses and validates the JSON form. Rejects out-of-range cache
    /// indices, duplicate indices within a group, and duplicate groups.
    pub fn from_json_str(s: &str) -> Result<Self, TopologyError> {
        let file: ConnectivityFile =
            serde_json::from_str(s).map_err(|e| TopologyError::Malformed(e.to_string()))?;
        let mut seen: BTreeMap<CacheSubset, ()> = BTreeMap::new();
        let mut groups = Vec::new();
        for group in file.groups {
            let mut sorted = group.caches.clone();
            sorted.sort_unstable();
            for w in sorted.windows(2) {
                if w[0] == w[1] {
                    return Err(TopologyError::DuplicateCacheIndex { index: w[0] });
                }
            }
            for &index in &sorted {
                if index == 0 || index > file.lambda_caches {
                    return Err(TopologyError::CacheIndexOutOfRange {
                        index,
                        lambda_caches: file.lambda_caches,
                    });
                }
            }
            let subset = CacheSubset::new(sorted);
            if seen.insert(subset.clone(), ()).is_some() {
                return Err(TopologyError::DuplicateGroup {
                    group: subset.label(),
                });
            }
            groups.push((subset, group.count));
        }
        Connectivity::new(file.lambda_caches, groups)
    }
}

#[derive(Serialize, Deserialize)]
struct ConnectivityFile {
    lambda_caches: u32,
    groups: Vec<GroupFile>,
}

#[derive(Serialize, Deserialize)]
struct GroupFile {
    caches: Vec<u32>,
    count: u64,
}

/// The `k`-th user connected exactly and uniquely to `caches` (1-based `k`).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct UserId {
    pub caches: CacheSubset,
    pub index: u64,
}

impl UserId {
    pub fn new(caches: CacheSubset, index: u64) -> Self {
        UserId { caches, index }
    }

    /// Machine-readable key, e.g. `1,2#1`; a cacheless user is `#1`.
    pub fn key(&self) -> String {
        format!("{}#{}", self.caches.label(), self.index)
    }

    /// Parses the `key()` format.
    pub fn parse_key(s: &str) -> Option<UserId> {
        let (caches, index) = s.rsplit_once('#')?;
        let index: u64 = index.parse().ok()?;
        if index == 0 {
            return None;
        }
        let caches = if caches.is_empty() {
            CacheSubset::empty()
        } else {
            let mut v = Vec::new();
            for part in caches.split(',') {
                v.push(part.parse().ok()?);
            }
            CacheSubset::new(v)
        };
        Some(UserId { caches, index })
    }
}

impl fmt::Display for UserId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.key())
    }
}

/// Per-level user counts of the generalized combinatorial topology:
/// `per_level[l]` users on every l-subset of caches, for each l.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CombProfile {
    lambda_caches: u32,
    per_level: Vec<u64>,
}

impl CombProfile {
    pub fn new(lambda_caches: u32, per_level: Vec<u64>) -> Result<Self, TopologyError> {
        let expected = lambda_caches as usize + 1;
        if per_level.len() != expected {
            return Err(TopologyError::ProfileLength {
                lambda_caches,
                expected,
                got: per_level.len(),
            });
        }
        Ok(CombProfile {
            lambda_caches,
            per_level,
        })
    }

    /// Profile with `count` users on every `level`-subset and nothing else.
    pub fn single_level(
        lambda_caches: u32,
        level: u32,
        count: u64,
    ) -> Result<Self, TopologyError> {
        if level > lambda_caches {
            return Err(TopologyError::LevelOutOfRange {
                level,
                lambda_caches,
            });
        }
        let mut per_level = vec![0u64; lambda_caches as usize + 1];
        per_level[level as usize] = count;
        CombProfile::new(lambda_caches, per_level)
    }

    pub fn lambda_caches(&self) -> u32 {
        self.lambda_caches
    }

    pub fn per_level(&self) -> &[u64] {
        &self.per_level
    }

    pub fn level_count(&self, level: u32) -> u64 {
        self.per_level
            .get(level as usize)
            .copied()
            .unwrap_or_default()
    }

    /// Total users: sum over levels of `per_level[l] * C(lambda, l)`.
    pub fn total_users(&self) -> u64 {
        let mut total = BigUint::ZERO;
        for (level, &count) in self.per_level.iter().enumerate() {
            total += binomial_u(self.lambda_caches as u64, level as u64) * count;
        }
        total.to_u64().expect("user count fits u64")
    }
}

impl fmt::Display for CombProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({})",
            self.per_level
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )
    }
}

/// The connectivity where every l-subset of caches serves exactly
/// `profile.level_count(l)` users, for every l simultaneously.
pub fn build_combinatorial(profile: &CombProfile) -> Connectivity {
    let lambda_caches = profile.lambda_caches();
    let mut groups = Vec::new();
    for level in 0..=lambda_caches {
        let count = profile.level_count(level);
        if count == 0 {
            continue;
        }
        for subset in subsets(lambda_caches, level) {
            groups.push((subset, count));
        }
    }
    Connectivity::new(lambda_caches, groups).expect("indices in range by construction")
}

/// The cyclic wrap-around connectivity: `lambda_caches` users, user `i`
/// reading the `level` consecutive caches starting at `i` (1-based, wrapping).
pub fn build_cyclic(lambda_caches: u32, level: u32) -> Result<Connectivity, TopologyError> {
    if level == 0 || level > lambda_caches {
        return Err(TopologyError::LevelOutOfRange {
            level,
            lambda_caches,
        });
    }
    let mut groups = Vec::new();
    for start in 0..lambda_caches {
        let caches = CacheSubset::new((0..level).map(|j| (start + j) % lambda_caches + 1));
        groups.push((caches, 1));
    }
    Connectivity::new(lambda_caches, groups)
}

/// A connectivity ensemble: either every user on exactly `level` caches, or
/// the full ensemble over all cache subsets.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Ensemble {
    Level(u32),
    Full,
}

impl Ensemble {
    /// The states a user can occupy: all `level`-subsets, or every subset of
    /// the caches (including the empty set). Canonical order.
    pub fn states(&self, lambda_caches: u32) -> Vec<CacheSubset> {
        match *self {
            Ensemble::Level(level) => subsets(lambda_caches, level),
            Ensemble::Full => (0..=lambda_caches)
                .flat_map(|size| subsets(lambda_caches, size))
                .collect(),
        }
    }

    pub fn state_count(&self, lambda_caches: u32) -> u64 {
        match *self {
            Ensemble::Level(level) => binomial_u(lambda_caches as u64, level as u64)
                .to_u64()
                .expect("state count fits u64"),
            Ensemble::Full => {
                assert!(lambda_caches < 63, "state count fits u64");
                1u64 << lambda_caches
            }
        }
    }

    /// Closed-form ensemble size: the number of weak compositions of `users`
    /// into one part per state.
    pub fn size(&self, lambda_caches: u32, users: u64) -> BigUint {
        let states = self.state_count(lambda_caches);
        binomial_u(users + states - 1, users)
    }

    /// Lazily yields every distribution of `users` over the states, one
    /// connectivity per weak composition, in lexicographic composition order.
    /// Never materializes the ensemble; use [`Ensemble::size`] to bound it.
    pub fn connectivities(
        &self,
        lambda_caches: u32,
        users: u64,
    ) -> impl Iterator<Item = Connectivity> {
        let states = self.states(lambda_caches);
        let parts = states.len();
        weak_compositions(users, parts).map(move |counts| {
            Connectivity::new(
                lambda_caches,
                states
                    .iter()
                    .zip(counts.iter())
                    .filter(|(_, &c)| c > 0)
                    .map(|(s, &c)| (s.clone(), c)),
            )
            .expect("states are in range")
        })
    }
}

/// All connectivities in which each of `users` users reads exactly `level`
/// caches. Count: `C(users + C(lambda, level) - 1, users)`.
pub fn level_ensemble(
    lambda_caches: u32,
    level: u32,
    users: u64,
) -> impl Iterator<Item = Connectivity> {
    assert!(
        level <= lambda_caches,
        "level {level} exceeds cache count {lambda_caches}"
    );
    Ensemble::Level(level).connectivities(lambda_caches, users)
}

/// All connectivities of `users` users over all `2^lambda` cache subsets
/// (including cacheless users). Count: `C(users + 2^lambda - 1, users)`.
pub fn full_ensemble(lambda_caches: u32, users: u64) -> impl Iterator<Item = Connectivity> {
    Ensemble::Full.connectivities(lambda_caches, users)
}

/// Outcome of [`Connectivity::membership`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Membership {
    /// `Some(l)` iff at least one user exists and all users read exactly
    /// `l` caches.
    pub uniform_level: Option<u32>,
    /// True when the connectivity has no users at all.
    pub empty: bool,
    /// The per-level profile iff the connectivity is an instance of the
    /// generalized combinatorial topology.
    pub profile: Option<CombProfile>,
}

impl Membership {
    /// Does the connectivity belong to the ensemble of `level`-uniform
    /// connectivities? An empty connectivity belongs to all of them.
    pub fn in_level_ensemble(&self, level: u32) -> bool {
        self.empty || self.uniform_level == Some(level)
    }

    pub fn is_combinatorial(&self) -> bool {
        self.profile.is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinatorial_single_level_counts() {
        // One user per pair of 4 caches: 6 users.
        let profile = CombProfile::new(4, vec![0, 0, 1, 0, 0]).unwrap();
        let conn = build_combinatorial(&profile);
        assert_eq!(conn.total_users(), 6);
        assert_eq!(profile.total_users(), 6);
        let users = conn.users();
        let keys: Vec<String> = users.iter().map(|u| u.key()).collect();
        assert_eq!(
            keys,
            vec!["1,2#1", "1,3#1", "1,4#1", "2,3#1", "2,4#1", "3,4#1"]
        );
    }

    #[test]
    fn combinatorial_mixed_levels() {
        let profile = CombProfile::new(4, vec![0, 0, 2, 2, 0]).unwrap();
        let conn = build_combinatorial(&profile);
        assert_eq!(conn.total_users(), 20); // 2*C(4,2) + 2*C(4,3)
        assert!(conn.membership().is_combinatorial());
    }

    #[test]
    fn combinatorial_cacheless_only() {
        let profile = CombProfile::new(3, vec![1, 0, 0, 0]).unwrap();
        let conn = build_combinatorial(&profile);
        assert_eq!(conn.total_users(), 1);
        assert_eq!(conn.count_for(&CacheSubset::empty()), 1);
    }

    #[test]
    fn cyclic_examples() {
        let conn = build_cyclic(4, 2).unwrap();
        for pair in [[1, 2], [2, 3], [3, 4], [1, 4]] {
            assert_eq!(conn.count_for(&CacheSubset::new(pair)), 1);
        }
        assert_eq!(conn.count_for(&CacheSubset::new([1, 3])), 0);
        assert_eq!(conn.count_for(&CacheSubset::new([2, 4])), 0);

        let singles = build_cyclic(3, 1).unwrap();
        assert_eq!(singles.total_users(), 3);
        for c in 1..=3 {
            assert_eq!(singles.count_for(&CacheSubset::new([c])), 1);
        }

        // Full wrap degenerates to all users on the full set.
        let full = build_cyclic(4, 4).unwrap();
        assert_eq!(full.count_for(&CacheSubset::new([1, 2, 3, 4])), 4);
        assert!(full.membership().in_level_ensemble(4));
    }

    #[test]
    fn membership_classification() {
        let cyclic = build_cyclic(4, 2).unwrap();
        let m = cyclic.membership();
        assert!(m.in_level_ensemble(2));
        assert!(!m.in_level_ensemble(3));
        // Pairs {1,3} and {2,4} serve no user, so not combinatorial.
        assert!(!m.is_combinatorial());

        let comb = build_combinatorial(&CombProfile::new(4, vec![0, 0, 1, 0, 0]).unwrap());
        let m = comb.membership();
        assert!(m.in_level_ensemble(2));
        assert_eq!(
            m.profile,
            Some(CombProfile::new(4, vec![0, 0, 1, 0, 0]).unwrap())
        );

        // Two users on {1}, one on {1,2,3}, one on {2,3,4}: mixed levels.
        let mixed = Connectivity::new(
            4,
            vec![
                (CacheSubset::new([1]), 2),
                (CacheSubset::new([1, 2, 3]), 1),
                (CacheSubset::new([2, 3, 4]), 1),
            ],
        )
        .unwrap();
        let m = mixed.membership();
        assert!(!m.in_level_ensemble(1));
        assert!(!m.in_level_ensemble(3));
        assert!(!m.is_combinatorial());
    }

    #[test]
    fn users_order_and_empty() {
        assert!(Connectivity::empty(3).users().is_empty());
        let conn = Connectivity::new(2, vec![(CacheSubset::new([1]), 2)]).unwrap();
        let keys: Vec<String> = conn.users().iter().map(|u| u.key()).collect();
        assert_eq!(keys, vec!["1#1", "1#2"]);
    }

    #[test]
    fn ensemble_counts_match_closed_form() {
        for lambda_caches in 1..=4u32 {
            for users in 1..=5u64 {
                for level in 0..=lambda_caches {
                    let ensemble = Ensemble::Level(level);
                    let enumerated = ensemble.connectivities(lambda_caches, users).count();
                    assert_eq!(
                        BigUint::from(enumerated),
                        ensemble.size(lambda_caches, users),
                        "level ensemble ({lambda_caches},{level},{users})"
                    );
                }
                let enumerated = full_ensemble(lambda_caches, users).count();
                assert_eq!(
                    BigUint::from(enumerated),
                    Ensemble::Full.size(lambda_caches, users),
                    "full ensemble ({lambda_caches},{users})"
                );
            }
        }
    }

    #[test]
    fn ensemble_spot_sizes() {
        assert_eq!(Ensemble::Level(2).size(3, 2), BigUint::from(6u32));
        assert_eq!(Ensemble::Full.size(3, 2), BigUint::from(36u32));
        assert_eq!(Ensemble::Full.size(1, 1), BigUint::from(2u32));
        assert_eq!(Ensemble::Full.size(2, 1), BigUint::from(4u32));
        assert_eq!(Ensemble::Level(2).size(2, 5), BigUint::from(1u32));
        assert_eq!(Ensemble::Level(2).size(4, 1), BigUint::from(6u32));
    }

    #[test]
    fn level_ensemble_members_are_uniform() {
        for conn in level_ensemble(4, 2, 3) {
            assert_eq!(conn.total_users(), 3);
            assert!(conn.membership().in_level_ensemble(2));
            for (subset, _) in conn.groups() {
                assert_eq!(subset.len(), 2);
            }
        }
    }

    #[test]
    fn combinatorial_profile_round_trips() {
        for lambda_caches in 1..=4u32 {
            for level in 0..=lambda_caches {
                for count in 1..=2u64 {
                    let profile =
                        CombProfile::single_level(lambda_caches, level, count).unwrap();
                    let conn = build_combinatorial(&profile);
                    assert_eq!(conn.membership().profile, Some(profile));
                }
            }
        }
    }

    #[test]
    fn json_round_trip_and_validation() {
        let conn = build_cyclic(4, 2).unwrap();
        let s = conn.to_json_string();
        assert_eq!(Connectivity::from_json_str(&s).unwrap(), conn);

        let dup_index = r#"{"lambda_caches": 3, "groups": [{"caches": [1,1], "count": 1}]}"#;
        assert_eq!(
            Connectivity::from_json_str(dup_index),
            Err(TopologyError::DuplicateCacheIndex { index: 1 })
        );

        let out_of_range = r#"{"lambda_caches": 3, "groups": [{"caches": [4], "count": 1}]}"#;
        assert_eq!(
            Connectivity::from_json_str(out_of_range),
            Err(TopologyError::CacheIndexOutOfRange {
                index: 4,
                lambda_caches: 3
            })
        );

        let dup_group = r#"{"lambda_caches": 3, "groups": [
            {"caches": [1,2], "count": 1}, {"caches": [2,1], "count": 2}]}"#;
        assert_eq!(
            Connectivity::from_json_str(dup_group),
            Err(TopologyError::DuplicateGroup {
                group: "1,2".into()
            })
        );
    }

    #[test]
    fn user_key_round_trip() {
        for key in ["1,2#1", "#3", "2#10"] {
            assert_eq!(UserId::parse_key(key).unwrap().key(), key);
        }
        assert!(UserId::parse_key("1,2").is_none());
        assert!(UserId::parse_key("1#0").is_none());
    }
}
