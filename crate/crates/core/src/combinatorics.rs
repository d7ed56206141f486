//! Exact combinatorial primitives shared by every other module.
//!
//! Counts are arbitrary precision (`BigUint`) and loads are exact fractions
//! (`BigRational`); nothing here can silently overflow. Every enumeration
//! order is lexicographic so that downstream reports are reproducible byte
//! for byte. Enumeration is lazy where the space can explode (compositions,
//! permutations); callers bound or stream them.

use std::cmp::Ordering;
use std::fmt;

pub use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

/// Exact fraction type used for every load value in the crate.
pub type Rational = num_rational::BigRational;

/// Exact fraction from unsigned parts. `den` must be non-zero.
pub fn ratio(num: BigUint, den: BigUint) -> Rational {
    Rational::new(num.into(), den.into())
}

/// Exact integer as a rational.
pub fn whole<T: Into<BigInt>>(n: T) -> Rational {
    Rational::from_integer(n.into())
}

/// Binomial coefficient with the zero extension: returns `n!/(k!(n-k)!)`
/// when `0 <= k <= n` and 0 whenever `n < 0`, `k < 0` or `n < k`.
pub fn binomial(n: i64, k: i64) -> BigUint {
    if n < 0 || k < 0 || k > n {
        return BigUint::zero();
    }
    let (n, k) = (n as u64, k as u64);
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    // The running product stays integral: after i steps it is C(n-k+i, i).
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `binomial` for u64 arguments known to be in range.
pub(crate) fn binomial_u(n: u64, k: u64) -> BigUint {
    binomial(
        i64::try_from(n).expect("binomial argument fits i64"),
        i64::try_from(k).expect("binomial argument fits i64"),
    )
}

/// Checks the hockey-stick identity `sum_{i=k}^{n} C(i,k) = C(n+1,k+1)`
/// by direct summation. Requires `n >= k`. Used as a self-test of the
/// binomial implementation.
pub fn hockey_stick_check(n: u64, k: u64) -> bool {
    assert!(n >= k, "hockey_stick_check requires n >= k");
    let mut sum = BigUint::zero();
    for i in k..=n {
        sum += binomial_u(i, k);
    }
    sum == binomial_u(n + 1, k + 1)
}

/// A set of 1-based cache indices, stored sorted ascending with no
/// duplicates. Two equal sets compare equal structurally.
///
/// The ordering is canonical across the crate: smaller sets first, then
/// lexicographic on the sorted elements.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct CacheSubset(Vec<u32>);

impl CacheSubset {
    /// Builds the canonical form of the given indices: sorted, deduplicated.
    pub fn new(caches: impl IntoIterator<Item = u32>) -> Self {
        let mut v: Vec<u32> = caches.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        CacheSubset(v)
    }

    pub fn empty() -> Self {
        CacheSubset(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, cache: u32) -> bool {
        self.0.binary_search(&cache).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn max(&self) -> Option<u32> {
        self.0.last().copied()
    }

    pub fn intersects(&self, other: &CacheSubset) -> bool {
        // Both sides are sorted; merge scan.
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => return true,
            }
        }
        false
    }

    pub fn is_disjoint(&self, other: &CacheSubset) -> bool {
        !self.intersects(other)
    }

    pub fn is_subset_of(&self, other: &CacheSubset) -> bool {
        self.0.iter().all(|c| other.contains(*c))
    }

    pub fn union(&self, other: &CacheSubset) -> CacheSubset {
        CacheSubset::new(self.iter().chain(other.iter()))
    }

    pub fn difference(&self, other: &CacheSubset) -> CacheSubset {
        CacheSubset(self.iter().filter(|c| !other.contains(*c)).collect())
    }

    /// The caches of `[1, lambda_caches]` not in this set.
    pub fn complement(&self, lambda_caches: u32) -> CacheSubset {
        CacheSubset((1..=lambda_caches).filter(|c| !self.contains(*c)).collect())
    }

    /// Comma-joined element list without braces, e.g. `1,3`; empty for `{}`.
    /// Used as the machine-readable half of user keys.
    pub fn label(&self) -> String {
        self.0
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl Ord for CacheSubset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for CacheSubset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CacheSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.label())
    }
}

impl FromIterator<u32> for CacheSubset {
    fn from_iter<T: IntoIterator<Item = u32>>(iter: T) -> Self {
        CacheSubset::new(iter)
    }
}

/// All `size`-subsets of `[1, lambda_caches]` in lexicographic order of the
/// sorted element lists. Empty when `size > lambda_caches`.
pub fn subsets(lambda_caches: u32, size: u32) -> Vec<CacheSubset> {
    let ground: Vec<u32> = (1..=lambda_caches).collect();
    subsets_of(&ground, size as usize)
}

/// All `size`-subsets of an arbitrary sorted ground set, lexicographic.
pub fn subsets_of(ground: &[u32], size: usize) -> Vec<CacheSubset> {
    let n = ground.len();
    if size > n {
        return Vec::new();
    }
    if size == 0 {
        return vec![CacheSubset::empty()];
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        out.push(CacheSubset(idx.iter().map(|&i| ground[i]).collect()));
        // Advance the rightmost index that still has room.
        let mut pos = size;
        while pos > 0 {
            pos -= 1;
            if idx[pos] != pos + n - size {
                idx[pos] += 1;
                for j in pos + 1..size {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
            if pos == 0 {
                return out;
            }
        }
    }
}

/// Lazy iterator over all lists of `parts` non-negative integers summing to
/// `total`, in lexicographic order. There are `C(total + parts - 1, total)`
/// of them.
pub fn weak_compositions(total: u64, parts: usize) -> WeakCompositions {
    let next = if parts == 0 {
        // Degenerate: one empty composition iff total is zero.
        if total == 0 {
            Some(Vec::new())
        } else {
            None
        }
    } else {
        let mut first = vec![0u64; parts];
        first[parts - 1] = total;
        Some(first)
    };
    WeakCompositions { next }
}

pub struct WeakCompositions {
    next: Option<Vec<u64>>,
}

impl Iterator for WeakCompositions {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if advance_composition(&mut succ) {
            self.next = Some(succ);
        }
        Some(current)
    }
}

/// Rewrites `v` into its lexicographic successor among equal-sum vectors.
/// Returns false when `v` is already the last one.
fn advance_composition(v: &mut [u64]) -> bool {
    let parts = v.len();
    if parts < 2 {
        return false;
    }
    let mut suffix = 0u64;
    for j in (0..parts - 1).rev() {
        suffix += v[j + 1];
        if suffix > 0 {
            v[j] += 1;
            for x in v[j + 1..].iter_mut() {
                *x = 0;
            }
            v[parts - 1] = suffix - 1;
            return true;
        }
    }
    false
}

/// An ordering of all `lambda_caches` caches; each index appears exactly once.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CachePermutation(Vec<u32>);

impl CachePermutation {
    /// Validates that `order` is a permutation of `[1, lambda_caches]`.
    pub fn try_new(order: Vec<u32>, lambda_caches: u32) -> Option<Self> {
        if order.len() != lambda_caches as usize {
            return None;
        }
        let mut seen = vec![false; lambda_caches as usize];
        for &c in &order {
            if c == 0 || c > lambda_caches || seen[(c - 1) as usize] {
                return None;
            }
            seen[(c - 1) as usize] = true;
        }
        Some(CachePermutation(order))
    }

    pub fn identity(lambda_caches: u32) -> Self {
        CachePermutation((1..=lambda_caches).collect())
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The caches in the first `i` positions, as a set.
    pub fn prefix_set(&self, i: usize) -> CacheSubset {
        CacheSubset::new(self.0[..i].iter().copied())
    }
}

impl fmt::Display for CachePermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({})",
            self.0
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )
    }
}

/// Lazy iterator over all `lambda_caches!` cache permutations in
/// lexicographic order. Intended for small cache counts; the caller guards
/// the factorial blowup.
pub fn permutations(lambda_caches: u32) -> Permutations {
    Permutations {
        next: Some(CachePermutation::identity(lambda_caches)),
    }
}

pub struct Permutations {
    next: Option<CachePermutation>,
}

impl Iterator for Permutations {
    type Item = CachePermutation;

    fn next(&mut self) -> Option<CachePermutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_permutation(&mut succ.0) {
            self.next = Some(succ);
        }
        Some(current)
    }
}

fn next_permutation(v: &mut [u32]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: i64, k: i64) -> u64 {
        use num_traits::ToPrimitive;
        binomial(n, k).to_u64().unwrap()
    }

    #[test]
    fn binomial_small_and_zero_extension() {
        assert_eq!(b(4, 2), 6);
        assert_eq!(b(3, 5), 0);
        assert_eq!(b(-1, 2), 0);
        assert_eq!(b(5, -1), 0);
        assert_eq!(b(0, 0), 1);
    }

    #[test]
    fn binomial_pascal_recurrence() {
        // n starts at 1: at (0,0) the zero extension makes both right-hand
        // terms vanish, so the recurrence only holds from the first row on.
        for n in 1..=30i64 {
            for k in 0..=n {
                assert_eq!(
                    binomial(n, k),
                    binomial(n - 1, k - 1) + binomial(n - 1, k),
                    "Pascal fails at ({n},{k})"
                );
            }
        }
    }

    #[test]
    fn hockey_stick_examples() {
        assert!(hockey_stick_check(5, 2)); // 1+3+6+10 = 20 = C(6,3)
        assert!(hockey_stick_check(7, 7)); // both sides 1
        assert!(hockey_stick_check(7, 0)); // both sides 8
    }

    #[test]
    fn hockey_stick_grid() {
        for n in 0..=20u64 {
            for k in 0..=n {
                assert!(hockey_stick_check(n, k), "fails at ({n},{k})");
            }
        }
    }

    #[test]
    fn subsets_examples() {
        let s = subsets(3, 2);
        assert_eq!(
            s,
            vec![
                CacheSubset::new([1, 2]),
                CacheSubset::new([1, 3]),
                CacheSubset::new([2, 3]),
            ]
        );
        assert_eq!(subsets(4, 0), vec![CacheSubset::empty()]);
        assert_eq!(subsets(2, 3), Vec::<CacheSubset>::new());
    }

    #[test]
    fn subsets_count_matches_binomial() {
        for lambda_caches in 0..=10u32 {
            for size in 0..=lambda_caches + 2 {
                let got = subsets(lambda_caches, size).len() as u64;
                assert_eq!(got, b(lambda_caches as i64, size as i64));
            }
        }
    }

    #[test]
    fn subsets_are_sorted_lexicographically() {
        let s = subsets(6, 3);
        for w in s.windows(2) {
            assert!(w[0].as_slice() < w[1].as_slice());
        }
    }

    #[test]
    fn weak_compositions_example() {
        let got: Vec<Vec<u64>> = weak_compositions(2, 3).collect();
        assert_eq!(
            got,
            vec![
                vec![0, 0, 2],
                vec![0, 1, 1],
                vec![0, 2, 0],
                vec![1, 0, 1],
                vec![1, 1, 0],
                vec![2, 0, 0],
            ]
        );
    }

    #[test]
    fn weak_compositions_degenerate() {
        assert_eq!(weak_compositions(7, 1).collect::<Vec<_>>(), vec![vec![7]]);
        assert_eq!(
            weak_compositions(0, 4).collect::<Vec<_>>(),
            vec![vec![0, 0, 0, 0]]
        );
    }

    #[test]
    fn weak_compositions_count_matches_binomial() {
        for total in 0..=6u64 {
            for parts in 1..=8usize {
                let count = weak_compositions(total, parts).count() as u64;
                assert_eq!(count, b((total + parts as u64 - 1) as i64, total as i64));
            }
        }
    }

    #[test]
    fn permutations_examples() {
        let two: Vec<_> = permutations(2).map(|p| p.as_slice().to_vec()).collect();
        assert_eq!(two, vec![vec![1, 2], vec![2, 1]]);
        assert_eq!(permutations(3).count(), 6);
        assert_eq!(permutations(1).count(), 1);
    }

    #[test]
    fn permutations_are_lexicographic_and_valid() {
        let all: Vec<_> = permutations(4).collect();
        assert_eq!(all.len(), 24);
        for w in all.windows(2) {
            assert!(w[0].as_slice() < w[1].as_slice());
        }
        for p in &all {
            assert!(CachePermutation::try_new(p.as_slice().to_vec(), 4).is_some());
        }
    }

    #[test]
    fn cache_subset_order_is_size_then_lex() {
        let mut v = vec![
            CacheSubset::new([1, 3]),
            CacheSubset::new([2]),
            CacheSubset::new([1, 2, 3]),
            CacheSubset::empty(),
            CacheSubset::new([1, 2]),
        ];
        v.sort();
        let labels: Vec<String> = v.iter().map(|s| s.label()).collect();
        assert_eq!(labels, vec!["", "2", "1,2", "1,3", "1,2,3"]);
    }

    #[test]
    fn cache_subset_canonicalizes() {
        assert_eq!(CacheSubset::new([3, 1, 3, 2]), CacheSubset::new([1, 2, 3]));
        assert!(CacheSubset::new([2, 4]).intersects(&CacheSubset::new([4, 7])));
        assert!(CacheSubset::new([2, 4]).is_disjoint(&CacheSubset::new([1, 3])));
        assert_eq!(
            CacheSubset::new([1, 4]).complement(4),
            CacheSubset::new([2, 3])
        );
    }
}
