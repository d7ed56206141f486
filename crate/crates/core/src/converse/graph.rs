//! The index-coding view of a delivery round.
//!
//! Vertices are the requested subfiles a user cannot read from its caches;
//! an edge points from a subfile into every subfile whose requester caches
//! it. The total size of any acyclic vertex set lower-bounds the number of
//! transmitted bits, and a cache permutation yields a layered vertex set
//! that is acyclic for every connectivity.

use std::collections::BTreeMap;
use std::fmt;

use rayon::iter::{ParallelBridge, ParallelIterator};

use crate::combinatorics::{
    binomial_u, permutations, ratio, subsets_of, whole, CachePermutation, CacheSubset, Rational,
};
use crate::converse::ConverseError;
use crate::delivery::DemandVector;
use crate::topology::{Connectivity, UserId};

/// Permutation scans are factorial; anything larger is refused.
pub const MAX_PERMUTATION_CACHES: u32 = 6;

/// One requested subfile the user cannot cache: the mask is disjoint from
/// the user's caches.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Vertex {
    pub user: UserId,
    pub mask: CacheSubset,
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.user, self.mask)
    }
}

/// Directed side-information graph over requested subfiles.
#[derive(Clone, Debug)]
pub struct SideInfoGraph {
    vertices: Vec<Vertex>,
    index: BTreeMap<Vertex, usize>,
    out_edges: Vec<Vec<usize>>,
}

impl SideInfoGraph {
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out_edges.iter().map(Vec::len).sum()
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        self.index.contains_key(v)
    }

    /// Successors of `v`: the vertices whose requesting user caches `v`'s mask.
    pub fn successors(&self, v: &Vertex) -> Option<impl Iterator<Item = &Vertex>> {
        let i = self.index.get(v)?;
        Some(self.out_edges[*i].iter().map(|&j| &self.vertices[j]))
    }
}

fn masks_over(ground: &CacheSubset, level: Option<u32>) -> Vec<CacheSubset> {
    match level {
        Some(t) => subsets_of(ground.as_slice(), t as usize),
        None => (0..=ground.len())
            .flat_map(|s| subsets_of(ground.as_slice(), s))
            .collect(),
    }
}

/// Builds the side-information graph for a distinct demand.
///
/// With `level = Some(t)` the vertex set is restricted to masks of size `t`
/// (the uniform placement split); `None` keeps the generic split over all
/// subset sizes. An edge runs from `(P_k1, T_P)` to `(Q_k2, T_Q)` exactly
/// when `T_P` meets `Q`, i.e. the source subfile sits in the target user's
/// side information.
pub fn build_side_info_graph(
    conn: &Connectivity,
    demand: &DemandVector,
    level: Option<u32>,
) -> Result<SideInfoGraph, ConverseError> {
    if !demand.is_distinct() {
        return Err(ConverseError::NonDistinctDemand);
    }
    let lambda_caches = conn.lambda_caches();
    let mut vertices = Vec::new();
    for user in conn.users() {
        let free = user.caches.complement(lambda_caches);
        for mask in masks_over(&free, level) {
            vertices.push(Vertex {
                user: user.clone(),
                mask,
            });
        }
    }
    let index: BTreeMap<Vertex, usize> = vertices
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, v)| (v, i))
        .collect();
    let mut out_edges = vec![Vec::new(); vertices.len()];
    for (i, v) in vertices.iter().enumerate() {
        for (j, w) in vertices.iter().enumerate() {
            if i != j && v.mask.intersects(&w.user.caches) {
                out_edges[i].push(j);
            }
        }
    }
    Ok(SideInfoGraph {
        vertices,
        index,
        out_edges,
    })
}

/// Is the subgraph induced by `subset` free of directed cycles?
/// Three-color depth-first search, iterative.
pub fn is_acyclic(graph: &SideInfoGraph, subset: &[Vertex]) -> Result<bool, ConverseError> {
    let n = graph.vertices.len();
    let mut in_subset = vec![false; n];
    for v in subset {
        let i = graph
            .index
            .get(v)
            .ok_or_else(|| ConverseError::UnknownVertex {
                vertex: v.to_string(),
            })?;
        in_subset[*i] = true;
    }

    const WHITE: u8 = 0;
    const GRAY: u8 = 1;
    const BLACK: u8 = 2;
    let mut color = vec![WHITE; n];
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for start in 0..n {
        if !in_subset[start] || color[start] != WHITE {
            continue;
        }
        color[start] = GRAY;
        stack.push((start, 0));
        while let Some(&mut (node, ref mut cursor)) = stack.last_mut() {
            let mut advanced = false;
            while *cursor < graph.out_edges[node].len() {
                let next = graph.out_edges[node][*cursor];
                *cursor += 1;
                if !in_subset[next] {
                    continue;
                }
                match color[next] {
                    GRAY => return Ok(false),
                    WHITE => {
                        color[next] = GRAY;
                        stack.push((next, 0));
                        advanced = true;
                        break;
                    }
                    _ => {}
                }
            }
            if !advanced {
                color[node] = BLACK;
                stack.pop();
            }
        }
    }
    Ok(true)
}

/// Lower bound on the transmitted bits of any delivery serving this demand:
/// the total size of an acyclic vertex set. Fails with `CyclicSubset` when
/// the subset is not acyclic.
pub fn index_coding_bound(
    graph: &SideInfoGraph,
    subset: &[Vertex],
    subfile_bits: impl Fn(&Vertex) -> Rational,
) -> Result<Rational, ConverseError> {
    if !is_acyclic(graph, subset)? {
        return Err(ConverseError::CyclicSubset);
    }
    let mut total = whole(0);
    for v in subset {
        total += subfile_bits(v);
    }
    Ok(total)
}

/// The layered vertex set induced by a cache permutation `c`:
/// every subfile of every cacheless user, plus, for each connection level,
/// each position `i`, each level-subset of `{c_1..c_i}` containing `c_i` and
/// each of its users, all masks inside `{c_{i+1}..}`. Acyclic for any
/// connectivity: a layer's users cache nothing in their own or higher layers.
pub fn permutation_acyclic_set(
    conn: &Connectivity,
    demand: &DemandVector,
    perm: &CachePermutation,
    level: Option<u32>,
) -> Result<Vec<Vertex>, ConverseError> {
    if !demand.is_distinct() {
        return Err(ConverseError::NonDistinctDemand);
    }
    let lambda_caches = conn.lambda_caches();
    let mut out = Vec::new();

    let everything = CacheSubset::empty().complement(lambda_caches);
    for k in 1..=conn.count_for(&CacheSubset::empty()) {
        for mask in masks_over(&everything, level) {
            out.push(Vertex {
                user: UserId::new(CacheSubset::empty(), k),
                mask,
            });
        }
    }

    for user_level in 1..=lambda_caches {
        for i in user_level..=lambda_caches {
            let pivot = perm.as_slice()[(i - 1) as usize];
            let prefix = perm.prefix_set(i as usize);
            let rest = prefix.difference(&CacheSubset::new([pivot]));
            let free = prefix.complement(lambda_caches);
            let free_masks = masks_over(&free, level);
            for others in subsets_of(rest.as_slice(), (user_level - 1) as usize) {
                let caches = others.union(&CacheSubset::new([pivot]));
                let count = conn.count_for(&caches);
                for k in 1..=count {
                    for mask in &free_masks {
                        out.push(Vertex {
                            user: UserId::new(caches.clone(), k),
                            mask: mask.clone(),
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Index-coding lower bound on the load of one connectivity under the
/// uniform split at level `t`: the best layered acyclic set over all cache
/// permutations, with every subfile worth `1/C(lambda, t)` of a file.
///
/// The vertex sets do not depend on which distinct files are demanded, so a
/// single canonical distinct demand is used.
pub fn connectivity_lower_bound(conn: &Connectivity, t: u32) -> Result<Rational, ConverseError> {
    let lambda_caches = conn.lambda_caches();
    if lambda_caches > MAX_PERMUTATION_CACHES {
        return Err(ConverseError::PermutationSpaceTooLarge {
            lambda_caches,
            max: MAX_PERMUTATION_CACHES,
        });
    }
    assert!(t <= lambda_caches, "t={t} outside [0, {lambda_caches}]");
    let demand = DemandVector::canonical_distinct(conn);
    let graph = build_side_info_graph(conn, &demand, Some(t))?;
    let unit = ratio(1u32.into(), binomial_u(lambda_caches as u64, t as u64));
    permutations(lambda_caches)
        .par_bridge()
        .map(|perm| {
            let set = permutation_acyclic_set(conn, &demand, &perm, Some(t))?;
            index_coding_bound(&graph, &set, |_| unit.clone())
        })
        .try_reduce(|| whole(0), |a, b| Ok(a.max(b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{build_combinatorial, build_cyclic, CombProfile};

    fn two_users_disjoint() -> Connectivity {
        Connectivity::new(
            2,
            vec![(CacheSubset::new([1]), 1), (CacheSubset::new([2]), 1)],
        )
        .unwrap()
    }

    #[test]
    fn two_cycle_between_mutually_cached_subfiles() {
        let conn = two_users_disjoint();
        let demand = DemandVector::canonical_distinct(&conn);
        let graph = build_side_info_graph(&conn, &demand, Some(1)).unwrap();
        assert_eq!(graph.vertex_count(), 2);
        assert_eq!(graph.edge_count(), 2);
        let all = graph.vertices().to_vec();
        assert_eq!(is_acyclic(&graph, &all), Ok(false));
        for v in graph.vertices() {
            assert_eq!(is_acyclic(&graph, std::slice::from_ref(v)), Ok(true));
        }
        assert_eq!(is_acyclic(&graph, &[]), Ok(true));
    }

    #[test]
    fn single_user_has_no_edges() {
        let conn = Connectivity::new(2, vec![(CacheSubset::new([1]), 1)]).unwrap();
        let demand = DemandVector::canonical_distinct(&conn);
        let graph = build_side_info_graph(&conn, &demand, None).unwrap();
        assert!(graph.vertex_count() > 0);
        assert_eq!(graph.edge_count(), 0);
    }

    #[test]
    fn cacheless_users_have_no_side_information() {
        let conn = Connectivity::new(3, vec![(CacheSubset::empty(), 3)]).unwrap();
        let demand = DemandVector::canonical_distinct(&conn);
        let graph = build_side_info_graph(&conn, &demand, Some(1)).unwrap();
        assert_eq!(graph.edge_count(), 0);
    }

    #[test]
    fn non_distinct_demand_is_rejected() {
        let conn = two_users_disjoint();
        let mut assignments = std::collections::BTreeMap::new();
        for user in conn.users() {
            assignments.insert(user, 1u32);
        }
        let demand = DemandVector::new(&conn, assignments).unwrap();
        assert_eq!(
            build_side_info_graph(&conn, &demand, Some(1)).unwrap_err(),
            ConverseError::NonDistinctDemand
        );
        let perm = CachePermutation::identity(2);
        assert_eq!(
            permutation_acyclic_set(&conn, &demand, &perm, None).unwrap_err(),
            ConverseError::NonDistinctDemand
        );
    }

    #[test]
    fn unknown_vertex_is_rejected() {
        let conn = two_users_disjoint();
        let demand = DemandVector::canonical_distinct(&conn);
        let graph = build_side_info_graph(&conn, &demand, Some(1)).unwrap();
        let stranger = Vertex {
            user: UserId::new(CacheSubset::new([1, 2]), 9),
            mask: CacheSubset::empty(),
        };
        assert!(matches!(
            is_acyclic(&graph, &[stranger]),
            Err(ConverseError::UnknownVertex { .. })
        ));
    }

    #[test]
    fn layered_set_matches_hand_instantiation() {
        // Two caches; one user on {1}, one on {1,2}; c = (1,2); generic split.
        let conn = Connectivity::new(
            2,
            vec![(CacheSubset::new([1]), 1), (CacheSubset::new([1, 2]), 1)],
        )
        .unwrap();
        let demand = DemandVector::canonical_distinct(&conn);
        let perm = CachePermutation::identity(2);
        let mut got = permutation_acyclic_set(&conn, &demand, &perm, None).unwrap();
        got.sort();
        let u1 = UserId::new(CacheSubset::new([1]), 1);
        let u12 = UserId::new(CacheSubset::new([1, 2]), 1);
        let mut expected = vec![
            Vertex {
                user: u1.clone(),
                mask: CacheSubset::empty(),
            },
            Vertex {
                user: u1,
                mask: CacheSubset::new([2]),
            },
            Vertex {
                user: u12,
                mask: CacheSubset::empty(),
            },
        ];
        expected.sort();
        assert_eq!(got, expected);
    }

    #[test]
    fn layered_sets_are_acyclic_for_combinatorial_topology() {
        let conn = build_combinatorial(&CombProfile::new(4, vec![0, 0, 1, 0, 0]).unwrap());
        let demand = DemandVector::canonical_distinct(&conn);
        let graph = build_side_info_graph(&conn, &demand, None).unwrap();
        for perm in permutations(4) {
            let set = permutation_acyclic_set(&conn, &demand, &perm, None).unwrap();
            assert_eq!(is_acyclic(&graph, &set), Ok(true), "perm {perm}");
        }
    }

    #[test]
    fn edgeless_graph_is_entirely_acyclic() {
        let conn = Connectivity::new(2, vec![(CacheSubset::empty(), 2)]).unwrap();
        let demand = DemandVector::canonical_distinct(&conn);
        let graph = build_side_info_graph(&conn, &demand, None).unwrap();
        let all = graph.vertices().to_vec();
        assert_eq!(is_acyclic(&graph, &all), Ok(true));
    }

    #[test]
    fn index_coding_bound_sums_uniform_sizes() {
        let conn = two_users_disjoint();
        let demand = DemandVector::canonical_distinct(&conn);
        let graph = build_side_info_graph(&conn, &demand, Some(1)).unwrap();
        let one_vertex = &graph.vertices()[..1];
        // Uniform split over C(2,1)=2 masks: each vertex carries B/2.
        let got = index_coding_bound(&graph, one_vertex, |_| ratio(1u32.into(), 2u32.into()))
            .unwrap();
        assert_eq!(got, ratio(1u32.into(), 2u32.into()));
        let cyclic = graph.vertices().to_vec();
        assert_eq!(
            index_coding_bound(&graph, &cyclic, |_| whole(1)).unwrap_err(),
            ConverseError::CyclicSubset
        );
    }

    #[test]
    fn bound_is_tight_on_the_single_level_instance() {
        let conn = build_combinatorial(&CombProfile::new(4, vec![0, 0, 1, 0, 0]).unwrap());
        assert_eq!(
            connectivity_lower_bound(&conn, 2).unwrap(),
            ratio(1u32.into(), 6u32.into())
        );
    }

    #[test]
    fn bound_for_cacheless_population_is_k() {
        let conn = Connectivity::new(3, vec![(CacheSubset::empty(), 4)]).unwrap();
        for t in 0..=3 {
            assert_eq!(connectivity_lower_bound(&conn, t).unwrap(), whole(4));
        }
    }

    #[test]
    fn permutation_guard_fires() {
        let conn = Connectivity::new(7, vec![(CacheSubset::new([1]), 1)]).unwrap();
        assert!(matches!(
            connectivity_lower_bound(&conn, 1),
            Err(ConverseError::PermutationSpaceTooLarge { .. })
        ));
    }

    #[test]
    fn cyclic_bound_sandwiched_by_greedy_load() {
        use crate::caching::{man_place, suggest_file_bits, Library};
        use crate::delivery::{greedy_deliver, measured_load};
        let conn = build_cyclic(4, 2).unwrap();
        let t = 2;
        let lb = connectivity_lower_bound(&conn, t).unwrap();
        let lib = Library::synthetic(4, suggest_file_bits(4, t, 8), 3).unwrap();
        let placed = man_place(lib, 4, t).unwrap();
        let demand = DemandVector::canonical_distinct(&conn);
        let greedy = greedy_deliver(&placed, &conn, &demand).unwrap();
        assert!(lb >= whole(0));
        assert!(lb <= measured_load(&greedy, placed.file_bits()));
    }
}
