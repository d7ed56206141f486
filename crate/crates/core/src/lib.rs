//! Exact simulator and bound calculator for multi-access coded caching,
//! where every user reads an arbitrary subset of the shared caches.
//!
//! The crate is organized bottom-up:
//!
//! - [`combinatorics`]: arbitrary-precision binomials, canonical subset /
//!   permutation / weak-composition enumeration.
//! - [`topology`]: connectivities (user counts per cache subset), the
//!   generalized combinatorial and cyclic topologies, connectivity ensembles.
//! - [`caching`]: the subset-indexed MAN placement, independent of the
//!   connectivity.
//! - [`delivery`]: the XOR multicast delivery for the combinatorial topology,
//!   bit-exact decoding, and a greedy clique-cover delivery for arbitrary
//!   connectivities.
//! - [`converse`]: index-coding side-information graphs, acyclic-set lower
//!   bounds, and the closed-form per-topology and ensemble-averaged bounds
//!   with their brute-force oracles.
//! - [`checks`]: the self-verification suite run by the CLI.
//!
//! All loads and counts are exact: `BigUint` for counts, `BigRational` for
//! loads. Decimal rendering happens only at the output boundary.

pub mod caching;
pub mod checks;
pub mod combinatorics;
pub mod converse;
pub mod delivery;
pub mod topology;
