//! Converse machinery: index-coding side-information graphs, the
//! permutation-layered acyclic sets, per-connectivity lower bounds, and the
//! closed-form per-topology and ensemble-averaged bounds together with their
//! brute-force counting oracles.

mod bounds;
mod curve;
mod graph;

use num_bigint::BigUint;
use thiserror::Error;

pub use bounds::{
    avg_lower_bound_raw, avg_vs_comb_gap, comb_objective, comb_optimal_load,
    ensemble_user_count_closed_form, ensemble_user_count_sum, full_avg_lower_bound,
    full_avg_summand, full_penalty_term, level_avg_lower_bound, level_penalty_term,
};
pub use curve::{
    comb_optimal_curve, decimal_string, full_avg_curve, level_avg_curve, BoundCurve, Corner,
    COMB_SOURCE, FULL_AVG_SOURCE, LEVEL_AVG_SOURCE,
};
pub use graph::{
    build_side_info_graph, connectivity_lower_bound, index_coding_bound, is_acyclic,
    permutation_acyclic_set, SideInfoGraph, Vertex, MAX_PERMUTATION_CACHES,
};

/// Default guard for brute-force ensemble enumeration.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConverseError {
    #[error("demand must assign distinct files")]
    NonDistinctDemand,
    #[error("vertex {vertex} is not in the graph")]
    UnknownVertex { vertex: String },
    #[error("subset induces a cycle in the side-information graph")]
    CyclicSubset,
    #[error("permutation scan over {lambda_caches} caches exceeds the supported maximum of {max}")]
    PermutationSpaceTooLarge { lambda_caches: u32, max: u32 },
    #[error("ensemble of {size} connectivities exceeds the enumeration cap {cap}")]
    EnsembleTooLarge { size: BigUint, cap: u64 },
    #[error("{users} users do not spread evenly over {groups} cache groups")]
    DivisibilityViolation { users: u64, groups: u64 },
    #[error("memory {memory} outside [0, {max}]")]
    MemoryOutOfRange { memory: String, max: String },
}
